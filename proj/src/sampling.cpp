#include "stopcost/sampling.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace stopcost {

double kinetic_variance(double sigma_k, double mass, double k_proj_norm) {
  if (sigma_k < 0 || !(mass > 0)) throw std::invalid_argument("need sigma_k >= 0 and mass > 0");
  const double s2 = sigma_k * sigma_k;
  return (3.0 * s2 * s2 + 2.0 * s2 * k_proj_norm * k_proj_norm) / (2.0 * mass * mass);
}

double mc_samples_needed(double variance, double epsilon_T) {
  if (!(variance > 0) || !(epsilon_T > 0)) throw std::invalid_argument("variance and epsilon must be positive");
  // Guard against 1/0.01^2 landing a hair above an integer.
  const double r = variance / (epsilon_T * epsilon_T);
  return std::ceil(r * (1.0 - 1e-12));
}

double slope_error(double epsilon_T, int n_points, double dt) {
  if (n_points < 3 || !(dt > 0)) throw std::invalid_argument("need n_points >= 3 and dt > 0");
  const double n = n_points;
  return epsilon_T * std::sqrt(12.0 / (n * (n * n - 1.0))) / dt;
}

long long ko_encoding_cost(int n_proj, int n_mean) {
  if (n_proj < 1 || n_mean < n_proj) throw std::invalid_argument("need n_mean >= n_proj >= 1");
  const long long p = n_proj, m = n_mean, f = 2LL * n_mean - 1;
  return (3 * p * p - p - 1) + 3 * (2 * m * p - m) + (3 * m * m - m - 1) + (3 * f * f - f - 1);
}

KOCostModel ko_total_cost(double evolution_cost_per_call, double sigma, double epsilon_T, const KOParams& params) {
  if (!(evolution_cost_per_call > 0) || !(sigma > 0) || !(epsilon_T > 0))
    throw std::invalid_argument("KO cost inputs must be positive");
  KOCostModel m;
  m.n_proj = params.n_proj;
  m.n_mean = params.n_mean;
  m.n_f = 2 * params.n_mean - 1;
  m.encoding_toffolis = ko_encoding_cost(params.n_proj, params.n_mean);
  // Synthesizer plus its reflection, the integer encoding, the arctan rotation angle, and the phase.
  m.per_iteration_toffolis =
      2.0 * evolution_cost_per_call + static_cast<double>(m.encoding_toffolis) + params.c_atan * m.n_f + m.n_f;
  m.iterations = std::ceil(params.c_ko * sigma / epsilon_T * (1.0 - 1e-12));
  m.setup_toffolis = 0.0;
  m.total = m.iterations * m.per_iteration_toffolis + m.setup_toffolis;
  return m;
}

double mc_total_cost(double evolution_cost_per_call, double sigma, double epsilon_T) {
  return mc_samples_needed(sigma * sigma, epsilon_T) * evolution_cost_per_call;
}

std::vector<CrossoverRow> ko_crossover_curve(double evolution_cost_per_call, double sigma, double eps_lo,
                                             double eps_hi, int n, const KOParams& params) {
  if (!(eps_lo > 0) || !(eps_hi > eps_lo) || n < 2) throw std::invalid_argument("bad epsilon range");
  std::vector<CrossoverRow> rows;
  const double a = std::log(eps_lo), b = std::log(eps_hi);
  for (int i = 0; i < n; ++i) {
    CrossoverRow r;
    r.epsilon_T = std::exp(a + (b - a) * i / (n - 1));
    r.mc_total = mc_total_cost(evolution_cost_per_call, sigma, r.epsilon_T);
    r.ko_total = ko_total_cost(evolution_cost_per_call, sigma, r.epsilon_T, params).total;
    rows.push_back(r);
  }
  return rows;
}

int count_sign_changes(const std::vector<CrossoverRow>& rows) {
  int changes = 0, prev = 0;
  for (const auto& r : rows) {
    const double d = r.ko_total - r.mc_total;
    const int s = d > 0 ? 1 : (d < 0 ? -1 : 0);
    if (s == 0) continue;
    if (prev != 0 && s != prev) ++changes;
    prev = s;
  }
  return changes;
}

double ols_slope(const std::vector<double>& x, const std::vector<double>& y, double* intercept) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("need at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (!(sxx > 0)) throw std::invalid_argument("degenerate abscissae");
  const double slope = sxy / sxx;
  if (intercept) *intercept = my - slope * mx;
  return slope;
}

TrajectoryData parse_trajectory_csv(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  TrajectoryData d;
  d.source = source;
  if (!std::getline(in, line)) throw std::invalid_argument(source + ": empty trajectory");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "time_au,kproj_au") throw std::invalid_argument(source + ": expected header time_au,kproj_au");
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::invalid_argument(source + ":" + std::to_string(lineno) + ": bad row");
    try {
      std::size_t p1 = 0, p2 = 0;
      const std::string a = line.substr(0, comma), b = line.substr(comma + 1);
      const double t = std::stod(a, &p1);
      const double k = std::stod(b, &p2);
      if (p1 != a.size() || p2 != b.size()) throw std::invalid_argument("trailing characters");
      d.times.push_back(t);
      d.mean_momentum.push_back(k);
    } catch (const std::exception&) {
      throw std::invalid_argument(source + ":" + std::to_string(lineno) + ": bad number");
    }
  }
  for (std::size_t i = 1; i < d.times.size(); ++i)
    if (!(d.times[i] > d.times[i - 1])) throw std::invalid_argument(source + ": times not strictly increasing");
  return d;
}

TrajectoryData load_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open trajectory " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_trajectory_csv(ss.str(), path);
}

TrajectoryData synthetic_linear_trajectory(double mass, double velocity, double rate, double t0, double t1, int n) {
  if (n < 2 || !(t1 > t0)) throw std::invalid_argument("need n >= 2 and t1 > t0");
  TrajectoryData d;
  d.source = "synthetic";
  const double e0 = 0.5 * mass * velocity * velocity;
  for (int i = 0; i < n; ++i) {
    const double t = t0 + (t1 - t0) * i / (n - 1);
    const double e = e0 - rate * (t - t0);
    if (!(e > 0)) throw std::invalid_argument("projectile stops inside the trajectory window");
    d.times.push_back(t);
    d.mean_momentum.push_back(std::sqrt(2.0 * mass * e));
  }
  return d;
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

namespace {

// Box-Muller on top of mt19937_64; std::normal_distribution is not portable bit for bit.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : rng_(seed) {}
  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - static_cast<double>(rng_() >> 11) * 0x1.0p-53;  // (0, 1]
    const double u2 = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(th);
    has_spare_ = true;
    return r * std::cos(th);
  }

 private:
  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace

StoppingEstimate simulate_stopping_estimate(const TrajectoryData& traj, double sigma_k, double mass,
                                            long long n_samples, std::uint64_t seed) {
  if (traj.times.size() < 3 || traj.times.size() != traj.mean_momentum.size())
    throw std::invalid_argument("degenerate trajectory: need at least 3 points");
  if (n_samples < 2) throw std::invalid_argument("need at least 2 samples per point");
  if (!(sigma_k > 0) || !(mass > 0)) throw std::invalid_argument("sigma_k and mass must be positive");
  StoppingEstimate est;
  double var_sum = 0.0;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    NormalStream g(stream_seed(seed, i));
    const double k0 = traj.mean_momentum[i];
    double mean = 0.0, m2 = 0.0;  // Welford
    for (long long s = 0; s < n_samples; ++s) {
      const double kx = k0 + sigma_k * g.next();
      const double ky = sigma_k * g.next();
      const double kz = sigma_k * g.next();
      const double e = (kx * kx + ky * ky + kz * kz) / (2.0 * mass);
      const double delta = e - mean;
      mean += delta / static_cast<double>(s + 1);
      m2 += delta * (e - mean);
    }
    est.point_means.push_back(mean);
    var_sum += m2 / static_cast<double>(n_samples - 1);
  }
  est.slope = ols_slope(traj.times, est.point_means);
  const double n = static_cast<double>(traj.times.size());
  est.epsilon_T = std::sqrt(var_sum / n / static_cast<double>(n_samples));
  double mt = 0.0;
  for (double t : traj.times) mt += t;
  mt /= n;
  double sxx = 0.0;
  for (double t : traj.times) sxx += (t - mt) * (t - mt);
  est.slope_error = est.epsilon_T / std::sqrt(sxx);
  return est;
}

}  // namespace stopcost
