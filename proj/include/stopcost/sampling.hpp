#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace stopcost {

// 0.1 eV/Angstrom expressed as a stopping force in atomic units.
inline constexpr double kStoppingBandFine = 0.002;
inline constexpr double kStoppingBandCoarse = 0.01;

struct SamplingPlan {
  int n_points = 0;
  long long n_samples = 0;
  double epsilon_T = 0.0;
  double epsilon_S = 0.0;
  double dt = 0.0;
};

struct KOParams {
  int n_proj = 8;
  int n_mean = 12;
  double c_atan = 25.0;  // Toffolis per arctan output bit
  double c_ko = 1.0;     // iterations = ceil(c_ko * sigma / eps)
};

struct KOCostModel {
  int n_proj = 0, n_mean = 0, n_f = 0;
  long long encoding_toffolis = 0;
  double per_iteration_toffolis = 0.0;
  double iterations = 0.0;
  double setup_toffolis = 0.0;
  double total = 0.0;
};

struct TrajectoryData {
  std::vector<double> times;
  std::vector<double> mean_momentum;
  std::string source;
};

struct StoppingEstimate {
  double slope = 0.0;        // dT/dt, hartree per a.u. time
  double slope_error = 0.0;  // OLS standard error of the slope
  double epsilon_T = 0.0;    // RMS per-point standard error
  std::vector<double> point_means;
};

// Var(|k|^2/2M) for k ~ N(k_proj, sigma^2 I_3).
double kinetic_variance(double sigma_k, double mass, double k_proj_norm);
double mc_samples_needed(double variance, double epsilon_T);
double slope_error(double epsilon_T, int n_points, double dt);

long long ko_encoding_cost(int n_proj, int n_mean);
KOCostModel ko_total_cost(double evolution_cost_per_call, double sigma, double epsilon_T, const KOParams& params = {});
double mc_total_cost(double evolution_cost_per_call, double sigma, double epsilon_T);

struct CrossoverRow {
  double epsilon_T = 0.0;
  double mc_total = 0.0;
  double ko_total = 0.0;
};
std::vector<CrossoverRow> ko_crossover_curve(double evolution_cost_per_call, double sigma, double eps_lo,
                                             double eps_hi, int n, const KOParams& params = {});
int count_sign_changes(const std::vector<CrossoverRow>& rows);

// Ordinary least squares fit; returns slope, fills intercept when non-null.
double ols_slope(const std::vector<double>& x, const std::vector<double>& y, double* intercept = nullptr);

TrajectoryData load_trajectory_csv(const std::string& path);
TrajectoryData parse_trajectory_csv(const std::string& text, const std::string& source = "inline");
// Kinetic energy falling linearly from T0 at rate `rate` (hartree per a.u. time).
TrajectoryData synthetic_linear_trajectory(double mass, double velocity, double rate, double t0, double t1, int n);

StoppingEstimate simulate_stopping_estimate(const TrajectoryData& traj, double sigma_k, double mass,
                                            long long n_samples, std::uint64_t seed);

// Deterministic sub-stream seed derived from (seed, stream).
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace stopcost
