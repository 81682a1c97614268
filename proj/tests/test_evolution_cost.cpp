#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "doctest.h"
#include "stopcost/evolution_cost.hpp"
#include "test_support.hpp"

using namespace stopcost;
using testsupport::bundled;
using testsupport::rel;

namespace {

std::vector<double> one_to_ten() {
  std::vector<double> t;
  for (int i = 1; i <= 10; ++i) t.push_back(i);
  return t;
}

}  // namespace

TEST_CASE("QSP query counts") {
  // 2 (x + 1.04 x^{1/3} ln(1/eps)^{2/3}) with x = lambda t
  const double x = 1000.0;
  const double c = std::cbrt(9.0) / 2.0;
  CHECK(qsp_queries(1000.0, 1.0, 0.01) == std::ceil(2 * (x + c * 10.0 * std::pow(std::log(100.0), 2.0 / 3.0))));
  QspOptions o2;
  o2.natural_log = false;
  CHECK(qsp_queries(500.0, 2.0, 0.01, o2) == std::ceil(2 * (x + c * 10.0 * std::pow(std::log2(100.0), 2.0 / 3.0))));
  QspOptions tab;
  tab.convention = QspConvention::kTable;
  CHECK(qsp_queries(1000.0, 1.0, 0.01, tab) == std::ceil(2 * x * c * 10.0 * std::pow(std::log2(100.0), 2.0 / 3.0)));
  CHECK_THROWS(qsp_queries(1000.0, 1.0, 1.5));
  CHECK_THROWS(qsp_convention_from_string("x"));
}

TEST_CASE("closed-form kinetic norm") {
  CHECK(trotter_norms_analytic(3, 1.0, 1).tau_norm == doctest::Approx(6 * kPi * kPi).epsilon(1e-14));
  CHECK(trotter_norms_analytic(15, 8 * 3375.0, 2).tau_norm ==
        doctest::Approx(trotter_norms_analytic(15, 3375.0, 2).tau_norm / 4).epsilon(1e-14));
}

TEST_CASE("numeric kinetic norm equals the closed form") {
  for (int n : {2, 3, 4, 5, 7, 8, 9, 11, 13, 15}) {
    const double om = 100.0 + 37.0 * n;
    CHECK(rel(trotter_norms_numeric(n, om, 1).tau_norm, trotter_norms_analytic(n, om, 1).tau_norm) < 1e-12);
  }
}

TEST_CASE("numeric pair norm matches a full sort") {
  const int n = 3;
  const double om = 27.0;
  for (int eta = 1; eta <= 10; ++eta) {
    double best = 0;
    for (int j = 0; j < 27; ++j) {
      std::vector<double> v;
      for (int k = 0; k < 27; ++k) {
        if (k == j) continue;
        const int dx = j / 9 - k / 9, dy = j / 3 % 3 - k / 3 % 3, dz = j % 3 - k % 3;
        v.push_back(1.0 / std::sqrt(1.0 * dx * dx + dy * dy + dz * dz));
      }
      std::sort(v.rbegin(), v.rend());
      double s = 0;
      for (int i = 0; i < eta; ++i) s += v[i];
      best = std::max(best, s);
    }
    CHECK(trotter_norms_numeric(n, om, eta).nu_norm == doctest::Approx(n / (2.0 * 3.0) * best).epsilon(1e-13));
  }
  CHECK_THROWS(trotter_norms_numeric(3, om, 27));
}

TEST_CASE("pair norm approaches the packed-sphere form") {
  const auto num = trotter_norms_numeric(15, 3375.0, 50);
  const auto ana = trotter_norms_analytic(15, 3375.0, 50);
  CHECK(rel(num.nu_norm, ana.nu_norm) < 0.25);
}

TEST_CASE("Trotter step count") {
  TrotterNorms n{10.0, 5.0, TrotterNorms::Source::kAnalytic};
  const double r = std::pow(2.0, 1.125) * std::pow(15.0, 0.875) * std::pow(3.4e-8 * 50 * 4 / 0.01, 0.125);
  CHECK(trotter_steps(n, 4, 2.0, 0.01) == std::ceil(r));
  CHECK_THROWS(trotter_steps(n, 4, 2.0, 0.01, 3));
  CHECK(pf8_exponential_cost(6) == 2137 + 144 + 114);
  CHECK(pf8_step_cost(3, 6) == 17 * 2395.0 * 3);
}

TEST_CASE("published end-to-end totals within 25 percent") {
  const struct {
    const char* name;
    double qsp, pf;
    long long pf_qubits;
  } rows[] = {
      {"alpha_hydrogen_50", 5.593e14, 1.124e13, 2666}, {"alpha_hydrogen_75", 2.033e16, 3.069e14, 3902},
      {"alpha_hydrogen", 1.992e17, 1.399e15, 6170},    {"proton_deuterium", 2.121e20, 2.079e17, 33368},
      {"proton_carbon", 2.225e18, 1.074e16, 9284},
  };
  QspOptions tab;
  tab.convention = QspConvention::kTable;
  for (const auto& r : rows) {
    const auto s = bundled(r.name);
    const auto [lam, b] = resolve_lambda_and_budget(s, 0.01, true);
    const auto q = qsp_total(s, b, lam.lambda_H, one_to_ten(), 0.01, 50, tab);
    const auto p = pf8_total(s, one_to_ten(), 0.01, 50);
    CAPTURE(r.name);
    CHECK(rel(q.total_toffolis, r.qsp) < 0.25);
    CHECK(rel(p.total_toffolis, r.pf) < 0.25);
    CHECK(p.qubits == r.pf_qubits);
    CHECK(q.samples_factor == 500);
  }
}

TEST_CASE("QSP totals add up per time") {
  const auto s = bundled("alpha_hydrogen");
  const auto [lam, b] = resolve_lambda_and_budget(s, 0.01, true);
  const auto q = qsp_total(s, b, lam.lambda_H, {1.0, 3.0}, 0.01, 7);
  CHECK(q.total_toffolis == 7 * (q.toffolis_per_time[0] + q.toffolis_per_time[1]));
  CHECK(q.toffolis_per_time[1] == q.queries_per_time[1] * q.cost_per_query);
  CHECK_THROWS(qsp_total(s, b, lam.lambda_H, {}, 0.01, 7));
  CHECK_THROWS(qsp_total(s, b, lam.lambda_H, {1.0}, 0.01, 0));
}

TEST_CASE("time grid parsing") {
  CHECK(parse_time_grid("1:10:10") == std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
  CHECK(parse_time_grid("0.5,2") == std::vector<double>{0.5, 2});
  CHECK(parse_time_grid("3:9:1") == std::vector<double>{3});
  CHECK_THROWS(parse_time_grid("1:10"));
  CHECK_THROWS(parse_time_grid("1:10:0"));
  CHECK_THROWS(parse_time_grid("a,b"));
  CHECK_THROWS(parse_time_grid("-1,2"));
}

TEST_CASE("log-log slope of a power law") {
  std::vector<double> x{1, 2, 5, 10}, y;
  for (double v : x) y.push_back(3.0 * std::pow(v, 1.7));
  CHECK(loglog_slope(x, y) == doctest::Approx(1.7).epsilon(1e-12));
}

TEST_CASE("eta sweep at fixed density") {
  const auto base = bundled("alpha_hydrogen");
  const auto rows = eta_sweep(base, {55, 109, 218, 436}, 1.0, 0.01);
  std::vector<double> x, y;
  for (const auto& r : rows) {
    x.push_back(r.eta);
    y.push_back(r.qsp_toffolis);
    CHECK(r.volume / r.eta == doctest::Approx(base.cell.volume / base.target.eta));
    CHECK(r.qpe_toffolis > r.qsp_toffolis);
  }
  const double slope = loglog_slope(x, y);
  CHECK(slope > 4.0 / 3.0);
  CHECK(slope < 8.0 / 3.0);
  CHECK(rows[2].lambda_H == doctest::Approx(resolve_lambda_and_budget(base, 0.01).first.lambda_H).epsilon(1e-6));
}
