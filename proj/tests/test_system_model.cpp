#include <cmath>
#include <string>

#include "doctest.h"
#include "stopcost/system_model.hpp"
#include "test_support.hpp"

using namespace stopcost;
using testsupport::bundled;

namespace {

const char* kMinimal = R"(
label: tiny
cell:
  volume_bohr3: 1000
  n_per_dim: 9
target:
  eta: 4
  lambda_zeta: 4
  num_nuclei: 4
projectile:
  mass_me: 1836.15267343
  charge: 1
  velocity_au: 1.0
  sigma_k: 2.0
  n_n: 6
)";

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto pos = s.find(from);
  REQUIRE(pos != std::string::npos);
  return s.replace(pos, from.size(), to);
}

std::string error_path(const std::string& text) {
  try {
    load_system(text);
  } catch (const ConfigError& e) {
    return e.path() + " | " + e.what();
  }
  return "no error";
}

}  // namespace

TEST_CASE("momentum bits cover the signed index range") {
  // Oracle: smallest sign-magnitude width whose magnitude part holds (n-1)/2.
  for (int n = 1; n <= 301; n += 2) {
    int b = 1;
    while ((1 << (b - 1)) - 1 < (n - 1) / 2) ++b;
    CHECK(momentum_bits(n) == b);
  }
  CHECK(momentum_bits(53) == 6);
  CHECK(momentum_bits(63) == 6);
  CHECK(momentum_bits(27) == 5);
}

TEST_CASE("bundled configs carry the published cells") {
  const auto ah = bundled("alpha_hydrogen");
  CHECK(ah.cell.n_p == 6);
  CHECK(ah.target.eta == 218);
  CHECK(ah.projectile.n_n == 8);
  const auto pd = bundled("proton_deuterium");
  CHECK(pd.cell.n_p == 6);
  CHECK(pd.target.eta == 1729);
  const auto pc = bundled("proton_carbon");
  CHECK(pc.cell.n_p == 6);  // explicit override; the derived width is 5
  CHECK(momentum_bits(pc.cell.n_per_dim) == 5);
  CHECK(bundled("alpha_hydrogen_50").cell.n_p == 5);
}

TEST_CASE("projectile momentum is snapped to the reciprocal lattice") {
  for (const char* name : {"alpha_hydrogen", "proton_deuterium", "proton_carbon"}) {
    const auto s = bundled(name);
    const double dk = 2 * kPi / s.cell.edge();
    const double k = s.projectile.mean_momentum[0];
    CHECK(std::abs(k / dk - std::round(k / dk)) < 1e-9);
    CHECK(std::abs(k - s.projectile.mass * 4.0) <= dk / 2 + 1e-9);
    CHECK(s.projectile.mean_momentum[1] == 0.0);
  }
}

TEST_CASE("config errors name the offending field") {
  CHECK(error_path(replace(kMinimal, "n_per_dim: 9", "n_per_dim: 8")).find("cell.n_per_dim | cell.n_per_dim: even grid dimension") == 0);
  CHECK(error_path(replace(kMinimal, "  eta: 4\n", "")).find("target.eta") == 0);
  CHECK(error_path(replace(kMinimal, "sigma_k: 2.0", "sigma_k: -2.0")).find("projectile.sigma_k") == 0);
  CHECK(error_path(replace(kMinimal, "sigma_k: 2.0", "sigma_k: -2.0")).find("negative physical quantity") != std::string::npos);
  CHECK(error_path(replace(kMinimal, "velocity_au: 1.0", "k_proj: [1.0, 0, 0]")).find("incommensurate mean momentum") !=
        std::string::npos);
  CHECK(error_path(replace(kMinimal, "volume_bohr3: 1000", "volume_bohr3: abc")).find("cell.volume_bohr3") == 0);
  CHECK(error_path("[1, 2]").find("<document>") == 0);
  CHECK_THROWS_AS(load_system_file("/nonexistent/x.yaml"), ConfigError);
}

TEST_CASE("commensurate k_proj is accepted verbatim") {
  const double dk = 2 * kPi / 10.0;
  const auto s = load_system(replace(kMinimal, "velocity_au: 1.0", "k_proj: [" + std::to_string(3 * dk) + ", 0, 0]"));
  CHECK(s.projectile.mean_momentum[0] == doctest::Approx(3 * dk).epsilon(1e-6));
}

TEST_CASE("dump and load round-trip") {
  for (const char* name : {"alpha_hydrogen", "proton_deuterium", "proton_carbon", "alpha_hydrogen_50"}) {
    const auto a = bundled(name);
    const auto b = load_system(dump_system(a));
    CHECK(same_spec(a, b));
    CHECK(dump_system(b) == dump_system(a));
  }
}

TEST_CASE("missing n_n is sized from the kinetic tolerance") {
  const auto s = load_system(replace(kMinimal, "  n_n: 6\n", ""));
  // sigma 2 in a 10 bohr box: grid doubling from n=4 until |eps_T| < 1e-3.
  CHECK(s.projectile.n_n >= s.cell.n_p);
  CHECK(s.projectile.n_per_dim_proj >= 4);
  const auto tight = load_system(replace(kMinimal, "  n_n: 6\n", "  kinetic_tolerance_ha: 1e-9\n"));
  CHECK(tight.projectile.n_n >= s.projectile.n_n);
}

TEST_CASE("precision budget") {
  const auto s = load_system(kMinimal);
  const auto b = derive_precision_budget(s, 0.01, 1000.0);
  CHECK(b.n_T == 10 + 17);  // log2(1e5) = 16.6
  CHECK(b.n_M == b.n_T + 10);
  CHECK(b.n_R == b.n_T + 10);
  CHECK(b.b_r == 7);
  const auto o = load_system(std::string(kMinimal) + "precision:\n  n_T: 20\n  n_M: 30\n  guard_bits: 3\n");
  const auto bo = derive_precision_budget(o, 0.01, 1000.0);
  CHECK(bo.n_T == 20);
  CHECK(bo.n_M == 30);
  CHECK(bo.n_R == 23);
  const auto e = load_system(std::string(kMinimal) + "precision:\n  rule: equal_split\n");
  const auto be = derive_precision_budget(e, 0.01, 1000.0);
  CHECK(be.rule == PrecisionRule::kEqualSplit);
  CHECK(be.n_M > 0);
  CHECK_THROWS_AS(load_system(std::string(kMinimal) + "precision:\n  rule: bogus\n"), ConfigError);
  CHECK_THROWS(derive_precision_budget(s, 0.0, 1000.0));
}

TEST_CASE("system register qubits") {
  const auto s = bundled("alpha_hydrogen");
  CHECK(system_register_qubits(s) == 3 * 218 * 6 + 3 * 8);
}
