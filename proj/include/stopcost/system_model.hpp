#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace stopcost {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kHartreeEv = 27.211386245988;
inline constexpr double kProtonMassMe = 1836.15267343;

// Config and validation failures. path() names the offending key, e.g. "cell.n_per_dim".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// Sign-magnitude width of one momentum component on a centered grid of
// n_per_dim points: (n_per_dim+1)/2 magnitudes plus a sign bit.
int momentum_bits(int n_per_dim);

struct SimulationCell {
  double volume = 0.0;  // bohr^3
  int n_per_dim = 0;    // N^{1/3}, odd
  int n_p = 0;          // bits per electron momentum component

  double edge() const;  // Omega^{1/3}
  long long num_points() const { return 1LL * n_per_dim * n_per_dim * n_per_dim; }
};

struct Nucleus {
  double charge = 0.0;
  std::array<double, 3> position{};
};

struct TargetSpec {
  int eta = 0;
  std::vector<Nucleus> nuclei;  // may be empty when only lambda_zeta is known
  double lambda_zeta = 0.0;     // sum of nuclear charges
  int num_nuclei = 0;           // L
  double wigner_seitz = 0.0;    // informational

  int n_eta() const;  // ceil(log2 eta)
};

struct ProjectileSpec {
  double mass = 0.0;    // electron masses
  double charge = 0.0;  // zeta_proj
  std::array<double, 3> mean_momentum{};
  double sigma_k = 0.0;
  int n_n = 0;
  int n_per_dim_proj = 0;

  double momentum_l1() const;
  double momentum_norm() const;
};

enum class PrecisionRule {
  kGuard,       // n_M = n_R = n_T + guard_bits (calibrated default)
  kEqualSplit,  // epsilon shared equally across four error sinks
};

const char* to_string(PrecisionRule rule);
PrecisionRule precision_rule_from_string(const std::string& name);

struct PrecisionOverrides {
  PrecisionRule rule = PrecisionRule::kGuard;
  int guard_bits = 10;
  std::optional<int> n_T;
  std::optional<int> n_M;
  std::optional<int> n_R;
  std::optional<int> b_r;

  bool operator==(const PrecisionOverrides&) const = default;
};

struct SystemSpec {
  std::string label;
  SimulationCell cell;
  TargetSpec target;
  ProjectileSpec projectile;
  PrecisionOverrides precision;
};

struct PrecisionBudget {
  double epsilon_total = 0.0;
  int n_T = 0;
  int n_M = 0;
  int n_R = 0;
  int b_r = 7;
  PrecisionRule rule = PrecisionRule::kGuard;

  bool operator==(const PrecisionBudget&) const = default;
};

// Parses the YAML config document and validates it.
SystemSpec load_system(const std::string& config_text);
SystemSpec load_system_file(const std::string& path);

// Writes a config document that reloads into an identical SystemSpec.
std::string dump_system(const SystemSpec& spec);

// Throws ConfigError on the first violated invariant.
void validate(const SystemSpec& spec);

// Nearest momentum commensurate with the cell: 2*pi*m / Omega^{1/3}.
double snap_momentum(double k, double edge);

PrecisionBudget derive_precision_budget(const SystemSpec& spec, double epsilon, double lambda_H);

long long system_register_qubits(const SystemSpec& spec);

bool same_spec(const SystemSpec& a, const SystemSpec& b);

}  // namespace stopcost
