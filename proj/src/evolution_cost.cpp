#include "stopcost/evolution_cost.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace stopcost {

namespace {

const double kQspCoefficient = std::pow(3.0, 2.0 / 3.0) / 2.0;

}  // namespace

const char* to_string(QspConvention c) { return c == QspConvention::kStated ? "stated" : "table"; }

QspConvention qsp_convention_from_string(const std::string& name) {
  if (name == "stated") return QspConvention::kStated;
  if (name == "table") return QspConvention::kTable;
  throw std::invalid_argument("unknown QSP convention '" + name + "' (expected stated or table)");
}

double qsp_queries(double lambda_H, double t, double epsilon, const QspOptions& opts) {
  if (!(lambda_H * t > 0)) throw std::invalid_argument("lambda t must be positive");
  if (!(epsilon > 0 && epsilon < 1)) throw std::invalid_argument("epsilon must lie in (0, 1)");
  const double lt = lambda_H * t;
  if (opts.convention == QspConvention::kTable) {
    const double lg = std::pow(std::log2(1.0 / epsilon), 2.0 / 3.0);
    return std::ceil(2.0 * lt * kQspCoefficient * std::cbrt(lt) * lg);
  }
  const double log_term = opts.natural_log ? std::log(1.0 / epsilon) : std::log2(1.0 / epsilon);
  return std::ceil(2.0 * (lt + kQspCoefficient * std::cbrt(lt) * std::pow(log_term, 2.0 / 3.0)));
}

EvolutionCostReport qsp_total(const SystemSpec& spec, const PrecisionBudget& budget, double lambda_H,
                              const std::vector<double>& times, double epsilon, long long n_samples,
                              const QspOptions& opts) {
  if (times.empty()) throw std::invalid_argument("empty time grid");
  if (n_samples < 1) throw std::invalid_argument("samples must be at least 1");
  const auto L = ledger(spec, budget, opts.amplified);
  EvolutionCostReport r;
  r.method = Method::kQsp;
  r.times = times;
  r.epsilon = epsilon;
  r.cost_per_query = static_cast<double>(L.total_per_step);
  double sum = 0.0;
  for (double t : times) {
    const double q = qsp_queries(lambda_H, t, epsilon, opts);
    r.queries_per_time.push_back(q);
    r.toffolis_per_time.push_back(q * r.cost_per_query);
    sum += q * r.cost_per_query;
  }
  r.total_toffolis = static_cast<double>(n_samples) * sum;
  r.qubits = L.qubits;
  r.samples_factor = n_samples * static_cast<long long>(times.size());
  return r;
}

TrotterNorms trotter_norms_analytic(double n, double volume, int eta) {
  if (!(n >= 1) || !(volume > 0)) throw std::invalid_argument("invalid cell");
  TrotterNorms norms;
  const double edge = std::cbrt(volume);
  const double half = (n - 1.0) / 2.0;
  norms.tau_norm = 2.0 * kPi * kPi / (edge * edge) * 3.0 * half * half;
  norms.nu_norm = std::cbrt(kPi) * std::pow(0.75, 2.0 / 3.0) * std::pow(eta, 2.0 / 3.0) * n / edge;
  norms.source = TrotterNorms::Source::kAnalytic;
  return norms;
}

TrotterNorms trotter_norms_numeric(int n, double volume, int eta) {
  if (n < 1 || !(volume > 0)) throw std::invalid_argument("invalid cell");
  const long long N = 1LL * n * n * n;
  if (eta < 1 || eta > N - 1) throw std::invalid_argument("eta must lie in [1, N-1] for the nu norm");
  TrotterNorms norms;
  norms.source = TrotterNorms::Source::kNumeric;
  const double edge = std::cbrt(volume);
  const double step = 2.0 * kPi / edge;
  const double c = (n - 1) / 2.0;  // centered, half-integer for even n

  double tau = 0.0;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int z = 0; z < n; ++z) {
        const double kx = (x - c) * step, ky = (y - c) * step, kz = (z - c) * step;
        tau = std::max(tau, (kx * kx + ky * ky + kz * kz) / 2.0);
      }
  norms.tau_norm = tau;

  // 1/|d| for every difference vector, indexed by (dx+n-1, dy+n-1, dz+n-1).
  const int w = 2 * n - 1;
  std::vector<double> inv(static_cast<std::size_t>(w) * w * w, 0.0);
  for (int dx = -(n - 1); dx <= n - 1; ++dx)
    for (int dy = -(n - 1); dy <= n - 1; ++dy)
      for (int dz = -(n - 1); dz <= n - 1; ++dz) {
        const double r2 = 1.0 * dx * dx + 1.0 * dy * dy + 1.0 * dz * dz;
        inv[(static_cast<std::size_t>(dx + n - 1) * w + (dy + n - 1)) * w + (dz + n - 1)] =
            r2 > 0 ? 1.0 / std::sqrt(r2) : 0.0;
      }
  double best = 0.0;
  std::vector<double> vals;
  vals.reserve(static_cast<std::size_t>(N));
  for (int jx = 0; jx < n; ++jx)
    for (int jy = 0; jy < n; ++jy)
      for (int jz = 0; jz < n; ++jz) {
        vals.clear();
        for (int kx = 0; kx < n; ++kx)
          for (int ky = 0; ky < n; ++ky)
            for (int kz = 0; kz < n; ++kz) {
              if (kx == jx && ky == jy && kz == jz) continue;
              vals.push_back(
                  inv[(static_cast<std::size_t>(kx - jx + n - 1) * w + (ky - jy + n - 1)) * w + (kz - jz + n - 1)]);
            }
        std::nth_element(vals.begin(), vals.begin() + (eta - 1), vals.end(), std::greater<>());
        double s = 0.0;
        for (int i = 0; i < eta; ++i) s += vals[i];
        best = std::max(best, s);
      }
  norms.nu_norm = n / (2.0 * edge) * best;
  return norms;
}

double trotter_steps(const TrotterNorms& norms, int eta, double t, double epsilon, int order, double xi) {
  if (order < 2 || order % 2) throw std::invalid_argument("order must be even and at least 2");
  if (!(xi > 0)) throw std::invalid_argument("xi must be positive");
  if (!(epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
  const double k = order;
  const double r = std::pow(t, 1.0 + 1.0 / k) * std::pow(norms.tau_norm + norms.nu_norm, 1.0 - 1.0 / k) *
                   std::pow(xi * norms.tau_norm * norms.nu_norm * eta / epsilon, 1.0 / k);
  return std::ceil(r);
}

double pf8_exponential_cost(int n) {
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  return 2137.0 + 4.0 * n * n + 19.0 * n;
}

double pf8_step_cost(int eta, int n) { return 17.0 * pf8_exponential_cost(n) * eta * (eta - 1.0) / 2.0; }

std::vector<LedgerItem> pf_workspace_items() {
  return {
      {"retained_arithmetic", 2000, "qubits retained from the pairwise arithmetic"},
      {"interpolation_newton", 246, "interpolation and Newton-Raphson registers"},
  };
}

long long pf_qubits(const SystemSpec& spec) {
  long long q = 3LL * spec.target.eta * spec.cell.n_p;
  for (const auto& it : pf_workspace_items()) q += it.count;
  return q;
}

EvolutionCostReport pf8_total(const SystemSpec& spec, const std::vector<double>& times, double epsilon,
                              long long n_samples, double xi) {
  if (times.empty()) throw std::invalid_argument("empty time grid");
  if (n_samples < 1) throw std::invalid_argument("samples must be at least 1");
  const int eta = spec.target.eta;
  const auto norms = trotter_norms_analytic(std::ldexp(1.0, spec.cell.n_p), spec.cell.volume, eta);
  EvolutionCostReport r;
  r.method = Method::kPf8;
  r.times = times;
  r.epsilon = epsilon;
  r.cost_per_query = pf8_step_cost(eta, spec.cell.n_p);
  double sum = 0.0;
  for (double t : times) {
    const double steps = trotter_steps(norms, eta, t, epsilon, 8, xi);
    r.queries_per_time.push_back(steps);
    r.toffolis_per_time.push_back(steps * r.cost_per_query);
    sum += steps * r.cost_per_query;
  }
  r.total_toffolis = static_cast<double>(n_samples) * sum;
  r.qubits = pf_qubits(spec);
  r.samples_factor = n_samples * static_cast<long long>(times.size());
  return r;
}

std::vector<double> parse_time_grid(const std::string& text) {
  auto number = [&](const std::string& s) {
    std::size_t pos = 0;
    double v = 0;
    try {
      v = std::stod(s, &pos);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad time grid '" + text + "'");
    }
    if (pos != s.size()) throw std::invalid_argument("bad time grid '" + text + "'");
    return v;
  };
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw std::invalid_argument("time grid must be a:b:n");
    const double a = number(parts[0]), b = number(parts[1]);
    const double nd = number(parts[2]);
    const int n = static_cast<int>(nd);
    if (n < 1 || n != nd) throw std::invalid_argument("time grid needs a positive integer count");
    for (int i = 0; i < n; ++i) out.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
  } else {
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');) out.push_back(number(p));
  }
  if (out.empty()) throw std::invalid_argument("empty time grid");
  for (double t : out)
    if (!(t > 0)) throw std::invalid_argument("times must be positive");
  return out;
}

std::vector<EtaSweepRow> eta_sweep(const SystemSpec& base, const std::vector<int>& etas, double t, double epsilon,
                                   double epsilon_qpe) {
  std::vector<EtaSweepRow> rows;
  for (int eta : etas) {
    SystemSpec s = base;
    const double scale = static_cast<double>(eta) / base.target.eta;
    s.target.eta = eta;
    s.cell.volume = base.cell.volume * scale;
    s.target.lambda_zeta = base.target.lambda_zeta * scale;
    s.target.num_nuclei = std::max(1, static_cast<int>(std::lround(base.target.num_nuclei * scale)));
    s.target.nuclei.clear();
    for (double& k : s.projectile.mean_momentum) k = snap_momentum(k, s.cell.edge());
    const auto [lam, budget] = resolve_lambda_and_budget(s, epsilon, true);
    const auto L = ledger(s, budget, true);
    EtaSweepRow row;
    row.eta = eta;
    row.volume = s.cell.volume;
    row.lambda_H = lam.lambda_H;
    row.cost_per_step = L.total_per_step;
    row.qsp_toffolis = qsp_queries(lam.lambda_H, t, epsilon) * static_cast<double>(L.total_per_step);
    row.qpe_toffolis = std::ceil(kPi * lam.lambda_H / (2.0 * epsilon_qpe)) * static_cast<double>(L.total_per_step);
    rows.push_back(row);
  }
  return rows;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("need at least two points");
  const std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace stopcost
