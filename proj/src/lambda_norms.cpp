#include "stopcost/lambda_norms.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace stopcost {

namespace {

// Number of signed, permuted images of a sorted non-negative triple a >= b >= c.
int orbit_size(int a, int b, int c) {
  int perms = 6;
  if (a == b && b == c) perms = 1;
  else if (a == b || b == c) perms = 3;
  const int signs = (a > 0 ? 2 : 1) * (b > 0 ? 2 : 1) * (c > 0 ? 2 : 1);
  return perms * signs;
}

// Sum of |nu|^{-power} over [-h, h]^3 minus the origin, one sorted triple at a time.
double symmetric_lattice_sum(int h, double power) {
  double total = 0.0;
  for (int a = 1; a <= h; ++a) {
    double shell = 0.0;
    for (int b = 0; b <= a; ++b)
      for (int c = 0; c <= b; ++c) {
        const double r2 = 1.0 * a * a + 1.0 * b * b + 1.0 * c * c;
        shell += orbit_size(a, b, c) * (power == 2.0 ? 1.0 / r2 : std::pow(r2, -power / 2));
      }
    total += shell;
  }
  return total;
}

template <class Key, class F>
double memoized(std::map<Key, double>& cache, std::mutex& m, const Key& key, F&& compute) {
  {
    std::lock_guard lock(m);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  const double v = compute();
  std::lock_guard lock(m);
  cache.emplace(key, v);
  return v;
}

std::mutex g_cache_mutex;
std::map<std::pair<int, int>, double> g_lattice_cache;
std::map<std::pair<int, int>, double> g_prep_cache;

using u128 = unsigned __int128;

// Largest n_M for which a whole box sum (about 2^{n_M + 3 mu}) fits in 128 bits.
// Beyond this the ceiling correction is below 2^-70 and p_nu is flat.
int effective_n_M(int n_bits, int n_M) { return std::min(n_M, 120 - 3 * n_bits); }

}  // namespace

double lattice_inverse_square_sum_range(int half_width) {
  if (half_width < 1) throw std::invalid_argument("half width must be at least 1");
  return memoized(g_lattice_cache, g_cache_mutex, std::pair{half_width, 2},
                  [&] { return symmetric_lattice_sum(half_width, 2.0); });
}

double lattice_inverse_sum_range(int half_width) {
  if (half_width < 1) throw std::invalid_argument("half width must be at least 1");
  return memoized(g_lattice_cache, g_cache_mutex, std::pair{half_width, 1},
                  [&] { return symmetric_lattice_sum(half_width, 1.0); });
}

double lattice_inverse_square_sum(int n_per_dim) {
  if (n_per_dim < 2) throw std::invalid_argument("n_per_dim must be at least 2");
  return lattice_inverse_square_sum_range(n_per_dim - 1);
}

double prep_success_probability(int n_bits, int n_M) {
  if (n_bits < 2) throw std::invalid_argument("n_bits must be at least 2");
  if (n_M < 1) throw std::invalid_argument("n_M must be at least 1");
  const int nm = effective_n_M(n_bits, n_M);
  if (nm < 1) throw std::invalid_argument("register too wide for exact p_nu evaluation");
  return memoized(g_prep_cache, g_cache_mutex, std::pair{n_bits, nm}, [&] {
    // Box mu holds vectors with infinity norm in [2^{mu-2}, 2^{mu-1}); each is kept
    // with probability ceil(M 4^{mu-2}/|nu|^2) / (M 4^{mu-2}).
    long double p = 0.0L;
    for (int mu = 2; mu <= n_bits + 1; ++mu) {
      const int inner = 1 << (mu - 2);
      const int outer = (1 << (mu - 1)) - 1;
      const u128 numer = static_cast<u128>(1) << (nm + 2 * (mu - 2));
      u128 box = 0;
      for (int a = inner; a <= outer; ++a)
        for (int b = 0; b <= a; ++b)
          for (int c = 0; c <= b; ++c) {
            const u128 r2 = static_cast<u128>(1LL * a * a + 1LL * b * b + 1LL * c * c);
            box += static_cast<u128>(orbit_size(a, b, c)) * ((numer + r2 - 1) / r2);
          }
      // box / (M 4^mu 2^{n+2})
      p += std::ldexp(static_cast<long double>(box), -(nm + 2 * mu + n_bits + 2));
    }
    return static_cast<double>(p);
  });
}

double amplify(double p) {
  if (p < 0 || p > 1) throw std::invalid_argument("probability outside [0, 1]");
  const double s = std::sin(3.0 * std::asin(std::sqrt(p)));
  return s * s;
}

void lambda_kinetic(const SystemSpec& spec, double& t_elec, double& t_proj, double& t_mean) {
  const int np = spec.cell.n_p;
  const int nn = spec.projectile.n_n;
  if (nn < 2) throw std::invalid_argument("n_n must be at least 2 for the mean-momentum term");
  const double edge = spec.cell.edge();
  const double edge2 = edge * edge;
  const double m = spec.projectile.mass;
  t_elec = 6.0 * spec.target.eta * kPi * kPi / edge2 * std::ldexp(1.0, 2 * (np - 1));
  t_proj = 6.0 * kPi * kPi / (m * edge2) * std::ldexp(1.0, 2 * (nn - 1));
  t_mean = 2.0 * kPi * spec.projectile.momentum_l1() / (m * edge) * std::ldexp(1.0, 2 * (nn - 1)) /
           (std::ldexp(1.0, nn - 1) - 1.0);
}

void lambda_potentials(const SystemSpec& spec, double lambda_nu, double lambda_nu_proj, double& u_elec,
                       double& u_proj, double& v_elec, double& v_proj) {
  const double eta = spec.target.eta;
  const double lz = spec.target.lambda_zeta;
  const double zp = spec.projectile.charge;
  const double pe = kPi * spec.cell.edge();
  u_elec = eta * lz * lambda_nu / pe;
  u_proj = zp * lz * lambda_nu_proj / pe;
  v_elec = eta * (eta - 1.0) * lambda_nu / (2.0 * pe);
  v_proj = eta * zp * lambda_nu / pe;
}

LambdaBreakdown lambda_total(const SystemSpec& spec, bool amplified, int n_M) {
  LambdaBreakdown b;
  b.amplified = amplified;
  b.n_M = n_M;
  // Sums run over the difference range addressable by the n-bit registers.
  b.lambda_nu = lattice_inverse_square_sum_range((1 << spec.cell.n_p) - 1);
  b.lambda_nu_proj = lattice_inverse_square_sum_range((1 << spec.projectile.n_n) - 1);
  lambda_kinetic(spec, b.lambda_T_elec, b.lambda_T_proj, b.lambda_T_mean);
  lambda_potentials(spec, b.lambda_nu, b.lambda_nu_proj, b.lambda_U_elec, b.lambda_U_proj, b.lambda_V_elec,
                    b.lambda_V_proj);

  b.p_nu = prep_success_probability(spec.cell.n_p, n_M);
  b.p_nu_proj = prep_success_probability(spec.projectile.n_n, n_M);
  b.p_nu_amp = amplify(b.p_nu);
  b.p_nu_proj_amp = amplify(b.p_nu_proj);

  b.sum_branch = b.lambda_T_elec + b.lambda_T_proj + b.lambda_T_mean + b.lambda_U_elec + b.lambda_U_proj +
                 b.lambda_V_elec + b.lambda_V_proj;
  const int eta = spec.target.eta;
  if (eta == 1 && b.lambda_V_elec > 0) throw std::invalid_argument("eta = 1 with nonzero electron pair norm");
  const double v_scaled = eta > 1 ? b.lambda_V_elec / (1.0 - 1.0 / eta) : 0.0;
  const double nu_part = b.lambda_U_elec + v_scaled + b.lambda_V_proj;
  b.prep_branch_plain = nu_part / b.p_nu + b.lambda_U_proj / b.p_nu_proj;
  const double prep_amp = nu_part / b.p_nu_amp + b.lambda_U_proj / b.p_nu_proj_amp;
  b.prep_branch = amplified ? prep_amp : b.prep_branch_plain;
  b.lambda_H_plain = std::max(b.sum_branch, b.prep_branch_plain);
  b.lambda_H = std::max(b.sum_branch, b.prep_branch);
  return b;
}

std::pair<LambdaBreakdown, PrecisionBudget> resolve_lambda_and_budget(const SystemSpec& spec, double epsilon,
                                                                      bool amplified) {
  int n_M = spec.precision.n_M.value_or(14);
  for (int pass = 0; pass < 32; ++pass) {
    LambdaBreakdown lam = lambda_total(spec, amplified, n_M);
    PrecisionBudget budget = derive_precision_budget(spec, epsilon, lam.lambda_H);
    if (budget.n_M == n_M) return {lam, budget};
    n_M = budget.n_M;
  }
  throw std::runtime_error("lambda / n_M iteration did not settle");
}

}  // namespace stopcost
