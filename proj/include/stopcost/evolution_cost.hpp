#pragma once

#include <string>
#include <vector>

#include "stopcost/block_encoding.hpp"
#include "stopcost/lambda_norms.hpp"
#include "stopcost/system_model.hpp"

namespace stopcost {

inline constexpr double kXiDefault = 3.4e-8;

// kStated:  2(lt + (3^{2/3}/2)(lt)^{1/3} ln^{2/3}(1/eps)), linear in lambda*t.
// kTable:   2 lt (3^{2/3}/2)(lt)^{1/3} log2^{2/3}(1/eps), the form behind the published totals.
enum class QspConvention { kStated, kTable };

const char* to_string(QspConvention c);
QspConvention qsp_convention_from_string(const std::string& name);

struct QspOptions {
  QspConvention convention = QspConvention::kStated;
  bool natural_log = true;  // kStated only; false switches to log2
  bool amplified = true;    // ledger and lambda with amplitude-amplified nu preparation
};

enum class Method { kQsp, kPf8 };

struct EvolutionCostReport {
  Method method = Method::kQsp;
  std::vector<double> times;
  double epsilon = 0.0;
  std::vector<double> queries_per_time;  // QSP queries or PF steps
  std::vector<double> toffolis_per_time;
  double total_toffolis = 0.0;  // integral-valued, may exceed 2^63
  long long qubits = 0;
  long long samples_factor = 0;  // N_s * number of times
  double cost_per_query = 0.0;   // C_BE or PF step cost
};

struct TrotterNorms {
  double tau_norm = 0.0;
  double nu_norm = 0.0;
  enum class Source { kAnalytic, kNumeric } source = Source::kAnalytic;
};

double qsp_queries(double lambda_H, double t, double epsilon, const QspOptions& opts = {});

EvolutionCostReport qsp_total(const SystemSpec& spec, const PrecisionBudget& budget, double lambda_H,
                              const std::vector<double>& times, double epsilon, long long n_samples,
                              const QspOptions& opts = {});

// Closed forms. n_per_dim is a real so the effective 2^{n_p} grid can be used.
TrotterNorms trotter_norms_analytic(double n_per_dim, double volume, int eta);
TrotterNorms trotter_norms_numeric(int n_per_dim, double volume, int eta);

double trotter_steps(const TrotterNorms& norms, int eta, double t, double epsilon, int order = 8,
                     double xi = kXiDefault);

double pf8_exponential_cost(int n);
double pf8_step_cost(int eta, int n);

// Interpolation and Newton-Raphson registers kept alongside the retained arithmetic qubits.
std::vector<LedgerItem> pf_workspace_items();
long long pf_qubits(const SystemSpec& spec);

// Norms use the grid addressed by n_p bits, N^{1/3} = 2^{n_p}.
EvolutionCostReport pf8_total(const SystemSpec& spec, const std::vector<double>& times, double epsilon,
                              long long n_samples, double xi = kXiDefault);

// Uniform grid a, a+h, ..., b with n points ("a:b:n"), or a comma list.
std::vector<double> parse_time_grid(const std::string& text);

struct EtaSweepRow {
  int eta = 0;
  double volume = 0.0;
  double lambda_H = 0.0;
  long long cost_per_step = 0;
  double qsp_toffolis = 0.0;
  double qpe_toffolis = 0.0;
};

// Fixed Wigner-Seitz radius and fixed grid: volume and lambda_zeta scale with eta.
std::vector<EtaSweepRow> eta_sweep(const SystemSpec& base, const std::vector<int>& etas, double t,
                                   double epsilon, double epsilon_qpe = 1e-3);

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace stopcost
