#include <cmath>
#include <cstdio>
#include <string>

#include "doctest.h"
#include "stopcost/system_model.hpp"
#include "stopcost/wavepacket.hpp"

using namespace stopcost;

namespace {

std::string two_sig(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1e", v);
  return buf;
}

// Direct 3D sum over the sampled momenta, no factorization.
double kinetic_3d(double sigma, double mass, double edge, int n) {
  const double dk = 2 * kPi / edge;
  double w = 0, kw = 0;
  for (int a = -n / 2; a <= n / 2; ++a)
    for (int b = -n / 2; b <= n / 2; ++b)
      for (int c = -n / 2; c <= n / 2; ++c) {
        const double k2 = dk * dk * (a * a + b * b + c * c);
        const double g = std::exp(-k2 / (2 * sigma * sigma));
        w += g;
        kw += g * k2 / (2 * mass);
      }
  return kw / w;
}

}  // namespace

TEST_CASE("published wave-packet table at two significant figures") {
  const struct {
    double sigma;
    const char *e_cut, *n_n_waves;
    int n_n;
    const char* eps;
  } rows[] = {{1, "3.8e+01", "6.4e+01", 3, "5.6e-04"},
              {4, "9.8e+03", "2.6e+05", 7, "1.1e-04"},
              {6, "3.9e+04", "2.1e+06", 8, "4.2e-06"},
              {10, "1.6e+05", "1.7e+07", 9, "1.8e-07"}};
  for (const auto& r : rows) {
    const auto row = size_projectile_register(r.sigma, 1836.15, 15.0, 1e-3);
    CAPTURE(r.sigma);
    CHECK(two_sig(row.e_cut) == r.e_cut);
    CHECK(two_sig(static_cast<double>(row.n_plane_waves)) == r.n_n_waves);
    CHECK(row.n_n == r.n_n);
    CHECK(two_sig(std::abs(row.epsilon_T)) == r.eps);
    CHECK(row.epsilon_T < 0);
  }
}

TEST_CASE("factorized kinetic energy equals the 3D sum") {
  for (int n : {2, 4, 8, 16})
    for (double s : {0.5, 1.0, 3.0})
      CHECK(wavepacket_kinetic_energy(s, 1836.0, 15.0, n) == doctest::Approx(kinetic_3d(s, 1836.0, 15.0, n)).epsilon(1e-12));
}

TEST_CASE("error vanishes on a fine grid") {
  CHECK(std::abs(kinetic_error(4.0, 1836.0, 15.0, 512)) < 1e-12);
  CHECK(std::abs(kinetic_error(4.0, 1836.0, 15.0, 16)) > 1e-3);
}

TEST_CASE("truncated Gaussian integral tracks the grid sum") {
  const struct {
    double sigma;
    int n;
  } rows[] = {{1, 4}, {4, 64}, {6, 128}, {10, 256}};
  for (const auto& r : rows) {
    const double grid = kinetic_error(r.sigma, 1836.15, 15.0, r.n);
    const double cont = kinetic_error_truncated_integral(r.sigma, 1836.15, 15.0, r.n);
    CAPTURE(r.sigma);
    CHECK(std::abs(cont - grid) / std::abs(grid) < 0.01);
  }
}

TEST_CASE("cutoff and register width") {
  CHECK(grid_cutoff_hartree(15.0, 4) * kHartreeEv == doctest::Approx(38.196).epsilon(1e-4));
  CHECK(projectile_bits(4) == 3);
  CHECK(projectile_bits(256) == 9);
  CHECK(projectile_bits(5) == 4);
  const auto curve = kinetic_error_curve(4.0, 1836.0, 15.0, 8);
  CHECK(curve.size() == 7);  // n = 2 ... 128
  CHECK(curve.back().n_n == 8);
  CHECK_THROWS(size_projectile_register(6.0, 1836.0, 15.0, 1e-30));
  CHECK_THROWS(kinetic_error(-1.0, 1836.0, 15.0, 4));
}

TEST_CASE("regularized Coulomb potential") {
  CHECK(regularized_potential(50.0, 2.0, 0.5) == doctest::Approx(2.0 / 50.0).epsilon(1e-12));
  const double at0 = regularized_potential(0.0, 1.0, 0.7);
  CHECK(at0 == doctest::Approx(std::sqrt(2 / kPi) / 0.7).epsilon(1e-14));
  CHECK(regularized_potential(1e-5, 1.0, 0.7) == doctest::Approx(std::erf(1e-5 / (std::sqrt(2.0) * 0.7)) / 1e-5).epsilon(1e-10));
}
