#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "stopcost/evolution_cost.hpp"
#include "stopcost/sampling.hpp"

using namespace stopcost;

TEST_CASE("kinetic variance matches sampling") {
  const double sigma = 1.5, mass = 10.0, k0 = 4.0;
  std::mt19937_64 rng(99);
  std::normal_distribution<double> g;
  double mean = 0, m2 = 0;
  const int n = 400000;
  for (int i = 0; i < n; ++i) {
    const double kx = k0 + sigma * g(rng), ky = sigma * g(rng), kz = sigma * g(rng);
    const double e = (kx * kx + ky * ky + kz * kz) / (2 * mass);
    const double d = e - mean;
    mean += d / (i + 1);
    m2 += d * (e - mean);
  }
  CHECK(kinetic_variance(sigma, mass, k0) == doctest::Approx(m2 / (n - 1)).epsilon(0.01));
  // Proton at 2 a.u. with unit spread: the effective variance used for sample counts.
  CHECK(kinetic_variance(1.0, 1836.15267343, 2 * 1836.15267343) == doctest::Approx(4.0).epsilon(1e-3));
}

TEST_CASE("sample counts") {
  CHECK(mc_samples_needed(4.0, 0.02) == 10000);
  CHECK(mc_samples_needed(4.0, 0.01) == 40000);
  CHECK(mc_samples_needed(1.0, 0.3) == 12);
  CHECK_THROWS(mc_samples_needed(0.0, 0.1));
}

TEST_CASE("slope error formula against Monte Carlo regression") {
  const int n = 10;
  const double eps = 0.05, dt = 0.5;
  std::vector<double> t;
  for (int i = 0; i < n; ++i) t.push_back(1.0 + dt * i);
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g(0.0, eps);
  const int trials = 100000;
  double s1 = 0, s2 = 0;
  std::vector<double> y(n);
  for (int k = 0; k < trials; ++k) {
    for (int i = 0; i < n; ++i) y[i] = 3.0 - 0.2 * t[i] + g(rng);
    const double s = ols_slope(t, y);
    s1 += s;
    s2 += s * s;
  }
  const double sd = std::sqrt(s2 / trials - (s1 / trials) * (s1 / trials));
  CHECK(std::abs(sd / slope_error(eps, n, dt) - 1.0) < 0.02);
  CHECK(s1 / trials == doctest::Approx(-0.2).epsilon(1e-3));
}

TEST_CASE("OLS slope and intercept") {
  double b = 0;
  CHECK(ols_slope({0, 1, 2}, {1, 3, 5}, &b) == doctest::Approx(2.0));
  CHECK(b == doctest::Approx(1.0));
  CHECK_THROWS(ols_slope({1, 1}, {1, 2}));
}

TEST_CASE("cost slopes and a single crossover") {
  const double e = 1e10, sigma = 2.0;
  const auto rows = ko_crossover_curve(e, sigma, 1e-4, 10.0, 101);
  std::vector<double> eps, mc, ko;
  for (const auto& r : rows)
    if (r.epsilon_T < 1e-2) {
      eps.push_back(r.epsilon_T);
      mc.push_back(r.mc_total);
      ko.push_back(r.ko_total);
    }
  CHECK(std::abs(loglog_slope(eps, mc) + 2.0) < 0.05);
  CHECK(std::abs(loglog_slope(eps, ko) + 1.0) < 0.05);
  CHECK(count_sign_changes(rows) == 1);
  CHECK(rows.front().ko_total < rows.front().mc_total);
  CHECK(rows.back().ko_total > rows.back().mc_total);
}

TEST_CASE("KO encoding and per-iteration cost") {
  // (3p^2 - p - 1) + 3(2mp - m) + (3m^2 - m - 1) + (3f^2 - f - 1), f = 2m - 1
  CHECK(ko_encoding_cost(8, 12) == 183 + 540 + 419 + 1563);
  const auto m = ko_total_cost(1e6, 2.0, 0.1);
  CHECK(m.n_f == 23);
  CHECK(m.iterations == 20);
  CHECK(m.per_iteration_toffolis == doctest::Approx(2e6 + 2705 + 25 * 23 + 23));
  CHECK_THROWS(ko_encoding_cost(5, 3));
}

TEST_CASE("trajectory parsing") {
  const auto d = parse_trajectory_csv("time_au,kproj_au\n1,10\n2,9.5\r\n3,9\n");
  CHECK(d.times.size() == 3);
  CHECK(d.mean_momentum[1] == 9.5);
  CHECK_THROWS(parse_trajectory_csv("t,k\n1,2\n"));
  CHECK_THROWS(parse_trajectory_csv("time_au,kproj_au\n1,x\n"));
  CHECK_THROWS(parse_trajectory_csv("time_au,kproj_au\n2,1\n1,1\n"));
  const auto f = load_trajectory_csv(std::string(STOPCOST_DATA_DIR) + "/synthetic_proton_v2.csv");
  CHECK(f.times.size() == 10);
  CHECK_THROWS(load_trajectory_csv("/nonexistent.csv"));
}

TEST_CASE("stopping estimate is seeded and unbiased") {
  const double mass = 1836.15267343;
  const auto traj = synthetic_linear_trajectory(mass, 2.0, 0.004, 1.0, 10.0, 10);
  const auto a = simulate_stopping_estimate(traj, 1.0, mass, 2000, 5);
  const auto b = simulate_stopping_estimate(traj, 1.0, mass, 2000, 5);
  const auto c = simulate_stopping_estimate(traj, 1.0, mass, 2000, 6);
  CHECK(a.slope == b.slope);
  CHECK(a.point_means == b.point_means);
  CHECK(a.slope != c.slope);
  CHECK(a.epsilon_T == doctest::Approx(std::sqrt(4.0 / 2000)).epsilon(0.1));
  CHECK(std::abs(a.slope + 0.004) < 5 * a.slope_error);
  CHECK(a.slope_error == doctest::Approx(slope_error(a.epsilon_T, 10, 1.0)).epsilon(1e-12));
  CHECK_THROWS(simulate_stopping_estimate(traj, 1.0, mass, 1, 5));
}

TEST_CASE("stream seeds are distinct") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 20; ++s)
    for (std::uint64_t i = 0; i < 20; ++i) seen.insert(stream_seed(s, i));
  CHECK(seen.size() == 400);
}
