#include <cmath>

#include "doctest.h"
#include "stopcost/lambda_norms.hpp"
#include "test_support.hpp"

using namespace stopcost;
using testsupport::bundled;
using testsupport::rel;

namespace {

double brute_lattice(int h, double power) {
  double s = 0.0;
  for (int x = -h; x <= h; ++x)
    for (int y = -h; y <= h; ++y)
      for (int z = -h; z <= h; ++z) {
        if (!x && !y && !z) continue;
        s += std::pow(1.0 * x * x + y * y + z * z, -power / 2);
      }
  return s;
}

// Enumerate every prepared basis state: mu with weight 2^mu / 2^{n+2}, three sign-magnitude
// components of mu bits, and the comparison register m < M. Success needs no negative zero,
// nu outside the inner box, and m |nu|^2 < M 4^{mu-2}.
double enumerated_success(int n, int n_M) {
  const long long M = 1LL << n_M;
  double p = 0.0;
  for (int mu = 2; mu <= n + 1; ++mu) {
    const int mag = 1 << (mu - 1);
    long long good = 0;
    for (int cx = 0; cx < 2 * mag; ++cx)
      for (int cy = 0; cy < 2 * mag; ++cy)
        for (int cz = 0; cz < 2 * mag; ++cz) {
          const int c[3] = {cx, cy, cz};
          bool neg_zero = false;
          long long r2 = 0;
          int inf = 0;
          for (int w : c) {
            const int sign = w / mag, m = w % mag;
            if (sign && m == 0) neg_zero = true;
            r2 += 1LL * m * m;
            inf = std::max(inf, m);
          }
          if (neg_zero || inf < (1 << (mu - 2))) continue;
          for (long long m = 0; m < M; ++m)
            if (m * r2 < M * (1LL << (2 * (mu - 2)))) ++good;
        }
    const double states = std::ldexp(1.0, 3 * mu) * static_cast<double>(M);
    p += std::ldexp(1.0, mu - (n + 2)) * static_cast<double>(good) / states;
  }
  return p;
}

}  // namespace

TEST_CASE("lattice sums match brute force") {
  for (int h = 1; h <= 7; ++h) {
    CHECK(lattice_inverse_square_sum_range(h) == doctest::Approx(brute_lattice(h, 2.0)).epsilon(1e-13));
    CHECK(lattice_inverse_sum_range(h) == doctest::Approx(brute_lattice(h, 1.0)).epsilon(1e-13));
  }
  CHECK(lattice_inverse_square_sum(4) == doctest::Approx(brute_lattice(3, 2.0)).epsilon(1e-13));
  CHECK_THROWS(lattice_inverse_square_sum_range(0));
}

TEST_CASE("success probability matches basis-state enumeration") {
  for (int n = 2; n <= 4; ++n)
    for (int nm : {1, 3, 5}) {
      if (n == 4 && nm > 3) continue;
      CAPTURE(n);
      CAPTURE(nm);
      CHECK(prep_success_probability(n, nm) == doctest::Approx(enumerated_success(n, nm)).epsilon(1e-14));
    }
}

TEST_CASE("success probability flattens with n_M") {
  const double a = prep_success_probability(6, 40);
  const double b = prep_success_probability(6, 48);
  CHECK(std::abs(a - b) < 1e-10);
  CHECK(a > 0.2);
  CHECK(a < 0.3);
}

TEST_CASE("single round of amplitude amplification") {
  // Oracle: one Grover iterate rotates the good amplitude by twice its angle.
  for (double p : {0.01, 0.1, 0.2357, 0.25, 0.5}) {
    const double th = std::asin(std::sqrt(p));
    double good = std::sin(th), bad = std::cos(th);
    // reflect about bad axis, then about the start state
    good = -good;
    const double dot = good * std::sin(th) + bad * std::cos(th);
    good = 2 * dot * std::sin(th) - good;
    bad = 2 * dot * std::cos(th) - bad;
    CHECK(amplify(p) == doctest::Approx(good * good).epsilon(1e-12));
  }
  CHECK(amplify(0.25) == doctest::Approx(1.0));
  CHECK_THROWS(amplify(1.5));
}

TEST_CASE("kinetic norms") {
  auto s = bundled("alpha_hydrogen");
  double te, tp, tm;
  lambda_kinetic(s, te, tp, tm);
  // Corner momentum 2^{n_p - 1} dk on each axis, |k|^2 / 2 per electron.
  const double kc = 2 * kPi / s.cell.edge() * std::pow(2.0, s.cell.n_p - 1);
  CHECK(te == doctest::Approx(s.target.eta * 3.0 * kc * kc / 2.0));
  CHECK(tp > 0);
  CHECK(tm > 0);
}

TEST_CASE("published lambda values within 2 percent") {
  const struct {
    const char* name;
    double lambda;
  } rows[] = {{"alpha_hydrogen", 1744784.42}, {"proton_deuterium", 88202784.59}, {"proton_carbon", 7727607.07}};
  for (const auto& r : rows) {
    const auto [lam, budget] = resolve_lambda_and_budget(bundled(r.name), 0.01, true);
    CAPTURE(r.name);
    CHECK(rel(lam.lambda_H, r.lambda) < 0.02);
    CHECK(lam.lambda_H >= lam.sum_branch);
    CHECK(lam.lambda_H_plain >= lam.lambda_H);
  }
}

TEST_CASE("lambda and n_M reach a fixed point") {
  const auto s = bundled("proton_carbon");
  const auto [lam, b] = resolve_lambda_and_budget(s, 0.01, true);
  const auto again = derive_precision_budget(s, 0.01, lambda_total(s, true, b.n_M).lambda_H);
  CHECK(again == b);
  CHECK(lam.n_M == b.n_M);
}
