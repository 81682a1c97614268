#include "stopcost/system_model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "stopcost/lambda_norms.hpp"
#include "stopcost/wavepacket.hpp"

namespace stopcost {

int momentum_bits(int n_per_dim) {
  if (n_per_dim < 1) throw std::invalid_argument("n_per_dim must be positive");
  const int magnitudes = (n_per_dim + 1) / 2;
  int bits = 0;
  while ((1 << bits) < magnitudes) ++bits;
  return bits + 1;
}

double SimulationCell::edge() const { return std::cbrt(volume); }

int TargetSpec::n_eta() const {
  int bits = 0;
  while ((1LL << bits) < eta) ++bits;
  return bits;
}

double ProjectileSpec::momentum_l1() const {
  return std::abs(mean_momentum[0]) + std::abs(mean_momentum[1]) + std::abs(mean_momentum[2]);
}

double ProjectileSpec::momentum_norm() const {
  return std::sqrt(mean_momentum[0] * mean_momentum[0] + mean_momentum[1] * mean_momentum[1] +
                   mean_momentum[2] * mean_momentum[2]);
}

const char* to_string(PrecisionRule rule) { return rule == PrecisionRule::kGuard ? "guard" : "equal_split"; }

PrecisionRule precision_rule_from_string(const std::string& name) {
  if (name == "guard") return PrecisionRule::kGuard;
  if (name == "equal_split") return PrecisionRule::kEqualSplit;
  throw ConfigError("precision.rule", "unknown rule '" + name + "' (expected guard or equal_split)");
}

double snap_momentum(double k, double edge) {
  const double step = 2.0 * kPi / edge;
  return step * std::round(k / step);
}

namespace {

YAML::Node require(const YAML::Node& parent, const std::string& key, const std::string& path) {
  YAML::Node n = parent[key];
  if (!n || n.IsNull()) throw ConfigError(path, "missing field");
  return n;
}

template <class T>
T scalar(const YAML::Node& n, const std::string& path) {
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(path, "not a valid number");
  }
}

template <class T>
T get(const YAML::Node& parent, const std::string& key, const std::string& path) {
  return scalar<T>(require(parent, key, path), path);
}

template <class T>
std::optional<T> get_opt(const YAML::Node& parent, const std::string& key, const std::string& path) {
  if (!parent) return std::nullopt;
  YAML::Node n = parent[key];
  if (!n || n.IsNull()) return std::nullopt;
  return scalar<T>(n, path);
}

bool commensurate(double k, double edge) {
  const double m = k * edge / (2.0 * kPi);
  return std::abs(m - std::round(m)) <= 1e-6 * std::max(1.0, std::abs(m));
}

}  // namespace

void validate(const SystemSpec& s) {
  if (!(s.cell.volume > 0)) throw ConfigError("cell.volume_bohr3", "must be positive");
  if (s.cell.n_per_dim < 1) throw ConfigError("cell.n_per_dim", "must be positive");
  if (s.cell.n_per_dim % 2 == 0) throw ConfigError("cell.n_per_dim", "even grid dimension");
  if (s.cell.n_p < 1) throw ConfigError("cell.n_p", "must be at least 1");
  if (s.target.eta < 1) throw ConfigError("target.eta", "must be at least 1");
  if (s.target.lambda_zeta < 0) throw ConfigError("target.lambda_zeta", "negative physical quantity");
  if (s.target.num_nuclei < 0) throw ConfigError("target.num_nuclei", "negative physical quantity");
  if (!s.target.nuclei.empty()) {
    double total = 0;
    for (const auto& nuc : s.target.nuclei) {
      if (nuc.charge < 0) throw ConfigError("target.nuclei", "negative physical quantity");
      total += nuc.charge;
    }
    if (std::abs(total - s.target.lambda_zeta) > 1e-9 * std::max(1.0, total))
      throw ConfigError("target.lambda_zeta", "does not equal the sum of nuclear charges");
    if (static_cast<int>(s.target.nuclei.size()) != s.target.num_nuclei)
      throw ConfigError("target.num_nuclei", "does not match the nuclei list");
  }
  if (s.projectile.mass < 1) throw ConfigError("projectile.mass_me", "must be at least 1");
  if (s.projectile.charge < 1) throw ConfigError("projectile.charge", "must be at least 1");
  if (!(s.projectile.sigma_k > 0)) throw ConfigError("projectile.sigma_k", "must be positive");
  if (s.projectile.n_n < s.cell.n_p) throw ConfigError("projectile.n_n", "smaller than n_p");
  for (int w = 0; w < 3; ++w)
    if (!commensurate(s.projectile.mean_momentum[w], s.cell.edge()))
      throw ConfigError("projectile.k_proj", "incommensurate mean momentum");
  const auto& p = s.precision;
  for (auto [v, name] : {std::pair{p.n_T, "precision.n_T"}, {p.n_M, "precision.n_M"}, {p.n_R, "precision.n_R"},
                         {p.b_r, "precision.b_r"}})
    if (v && *v < 1) throw ConfigError(name, "bit count must be at least 1");
  if (p.guard_bits < 0) throw ConfigError("precision.guard_bits", "must be non-negative");
}

SystemSpec load_system(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("<document>", std::string("parse error: ") + e.what());
  }
  if (!root || !root.IsMap()) throw ConfigError("<document>", "expected a mapping at top level");

  SystemSpec s;
  s.label = root["label"] ? root["label"].as<std::string>() : std::string("unnamed");

  auto cell = require(root, "cell", "cell");
  s.cell.volume = get<double>(cell, "volume_bohr3", "cell.volume_bohr3");
  s.cell.n_per_dim = get<int>(cell, "n_per_dim", "cell.n_per_dim");
  if (s.cell.n_per_dim < 1) throw ConfigError("cell.n_per_dim", "must be positive");
  if (s.cell.n_per_dim % 2 == 0) throw ConfigError("cell.n_per_dim", "even grid dimension");
  if (!(s.cell.volume > 0)) throw ConfigError("cell.volume_bohr3", "negative physical quantity");
  s.cell.n_p = get_opt<int>(cell, "n_p", "cell.n_p").value_or(momentum_bits(s.cell.n_per_dim));

  auto target = require(root, "target", "target");
  s.target.eta = get<int>(target, "eta", "target.eta");
  s.target.wigner_seitz = get_opt<double>(target, "wigner_seitz_bohr", "target.wigner_seitz_bohr").value_or(0.0);
  if (auto nuclei = target["nuclei"]; nuclei && nuclei.IsSequence()) {
    int i = 0;
    for (const auto& n : nuclei) {
      const std::string path = "target.nuclei[" + std::to_string(i++) + "]";
      Nucleus nuc;
      nuc.charge = get<double>(n, "charge", path + ".charge");
      auto pos = require(n, "position", path + ".position");
      if (!pos.IsSequence() || pos.size() != 3) throw ConfigError(path + ".position", "expected 3 coordinates");
      for (int w = 0; w < 3; ++w) nuc.position[w] = scalar<double>(pos[w], path + ".position");
      s.target.nuclei.push_back(nuc);
    }
    double total = 0;
    for (const auto& nuc : s.target.nuclei) total += nuc.charge;
    s.target.lambda_zeta = get_opt<double>(target, "lambda_zeta", "target.lambda_zeta").value_or(total);
    s.target.num_nuclei =
        get_opt<int>(target, "num_nuclei", "target.num_nuclei").value_or(static_cast<int>(s.target.nuclei.size()));
  } else {
    s.target.lambda_zeta = get<double>(target, "lambda_zeta", "target.lambda_zeta");
    s.target.num_nuclei = get<int>(target, "num_nuclei", "target.num_nuclei");
  }
  if (s.target.eta < 1) throw ConfigError("target.eta", "must be at least 1");

  auto proj = require(root, "projectile", "projectile");
  s.projectile.mass = get<double>(proj, "mass_me", "projectile.mass_me");
  s.projectile.charge = get<double>(proj, "charge", "projectile.charge");
  s.projectile.sigma_k = get<double>(proj, "sigma_k", "projectile.sigma_k");
  if (s.projectile.mass < 0) throw ConfigError("projectile.mass_me", "negative physical quantity");
  if (s.projectile.sigma_k < 0) throw ConfigError("projectile.sigma_k", "negative physical quantity");
  const double edge = s.cell.edge();
  if (auto k = proj["k_proj"]; k && !k.IsNull()) {
    if (!k.IsSequence() || k.size() != 3) throw ConfigError("projectile.k_proj", "expected 3 components");
    for (int w = 0; w < 3; ++w) s.projectile.mean_momentum[w] = scalar<double>(k[w], "projectile.k_proj");
    for (int w = 0; w < 3; ++w)
      if (!commensurate(s.projectile.mean_momentum[w], edge))
        throw ConfigError("projectile.k_proj", "incommensurate mean momentum");
  } else if (auto v = get_opt<double>(proj, "velocity_au", "projectile.velocity_au")) {
    if (*v < 0) throw ConfigError("projectile.velocity_au", "negative physical quantity");
    s.projectile.mean_momentum = {snap_momentum(s.projectile.mass * *v, edge), 0.0, 0.0};
  } else {
    throw ConfigError("projectile.velocity_au", "missing field (or give projectile.k_proj)");
  }
  if (auto nn = get_opt<int>(proj, "n_n", "projectile.n_n")) {
    s.projectile.n_n = *nn;
    s.projectile.n_per_dim_proj = get_opt<int>(proj, "n_per_dim", "projectile.n_per_dim").value_or((1 << (*nn - 1)));
  } else {
    const double tol = get_opt<double>(proj, "kinetic_tolerance_ha", "projectile.kinetic_tolerance_ha").value_or(1e-3);
    const auto row = size_projectile_register(s.projectile.sigma_k, s.projectile.mass, edge, tol);
    s.projectile.n_n = std::max(row.n_n, s.cell.n_p);
    s.projectile.n_per_dim_proj = row.n_per_dim;
  }

  if (auto prec = root["precision"]; prec && prec.IsMap()) {
    if (prec["rule"]) s.precision.rule = precision_rule_from_string(prec["rule"].as<std::string>());
    s.precision.guard_bits = get_opt<int>(prec, "guard_bits", "precision.guard_bits").value_or(10);
    s.precision.n_T = get_opt<int>(prec, "n_T", "precision.n_T");
    s.precision.n_M = get_opt<int>(prec, "n_M", "precision.n_M");
    s.precision.n_R = get_opt<int>(prec, "n_R", "precision.n_R");
    s.precision.b_r = get_opt<int>(prec, "b_r", "precision.b_r");
  }

  validate(s);
  return s;
}

SystemSpec load_system_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_system(ss.str());
}

std::string dump_system(const SystemSpec& s) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "label" << YAML::Value << s.label;
  out << YAML::Key << "cell" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "volume_bohr3" << YAML::Value << s.cell.volume;
  out << YAML::Key << "n_per_dim" << YAML::Value << s.cell.n_per_dim;
  out << YAML::Key << "n_p" << YAML::Value << s.cell.n_p;
  out << YAML::EndMap;
  out << YAML::Key << "target" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "eta" << YAML::Value << s.target.eta;
  out << YAML::Key << "lambda_zeta" << YAML::Value << s.target.lambda_zeta;
  out << YAML::Key << "num_nuclei" << YAML::Value << s.target.num_nuclei;
  out << YAML::Key << "wigner_seitz_bohr" << YAML::Value << s.target.wigner_seitz;
  if (!s.target.nuclei.empty()) {
    out << YAML::Key << "nuclei" << YAML::Value << YAML::BeginSeq;
    for (const auto& n : s.target.nuclei) {
      out << YAML::BeginMap << YAML::Key << "charge" << YAML::Value << n.charge;
      out << YAML::Key << "position" << YAML::Value << YAML::Flow << YAML::BeginSeq << n.position[0]
          << n.position[1] << n.position[2] << YAML::EndSeq << YAML::EndMap;
    }
    out << YAML::EndSeq;
  }
  out << YAML::EndMap;
  out << YAML::Key << "projectile" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "mass_me" << YAML::Value << s.projectile.mass;
  out << YAML::Key << "charge" << YAML::Value << s.projectile.charge;
  out << YAML::Key << "k_proj" << YAML::Value << YAML::Flow << YAML::BeginSeq << s.projectile.mean_momentum[0]
      << s.projectile.mean_momentum[1] << s.projectile.mean_momentum[2] << YAML::EndSeq;
  out << YAML::Key << "sigma_k" << YAML::Value << s.projectile.sigma_k;
  out << YAML::Key << "n_n" << YAML::Value << s.projectile.n_n;
  out << YAML::Key << "n_per_dim" << YAML::Value << s.projectile.n_per_dim_proj;
  out << YAML::EndMap;
  out << YAML::Key << "precision" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "rule" << YAML::Value << to_string(s.precision.rule);
  out << YAML::Key << "guard_bits" << YAML::Value << s.precision.guard_bits;
  if (s.precision.n_T) out << YAML::Key << "n_T" << YAML::Value << *s.precision.n_T;
  if (s.precision.n_M) out << YAML::Key << "n_M" << YAML::Value << *s.precision.n_M;
  if (s.precision.n_R) out << YAML::Key << "n_R" << YAML::Value << *s.precision.n_R;
  if (s.precision.b_r) out << YAML::Key << "b_r" << YAML::Value << *s.precision.b_r;
  out << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

bool same_spec(const SystemSpec& a, const SystemSpec& b) {
  auto same_nuclei = [&] {
    if (a.target.nuclei.size() != b.target.nuclei.size()) return false;
    for (std::size_t i = 0; i < a.target.nuclei.size(); ++i)
      if (a.target.nuclei[i].charge != b.target.nuclei[i].charge ||
          a.target.nuclei[i].position != b.target.nuclei[i].position)
        return false;
    return true;
  };
  return a.label == b.label && a.cell.volume == b.cell.volume && a.cell.n_per_dim == b.cell.n_per_dim &&
         a.cell.n_p == b.cell.n_p && a.target.eta == b.target.eta && a.target.lambda_zeta == b.target.lambda_zeta &&
         a.target.num_nuclei == b.target.num_nuclei && a.target.wigner_seitz == b.target.wigner_seitz &&
         same_nuclei() && a.projectile.mass == b.projectile.mass && a.projectile.charge == b.projectile.charge &&
         a.projectile.mean_momentum == b.projectile.mean_momentum && a.projectile.sigma_k == b.projectile.sigma_k &&
         a.projectile.n_n == b.projectile.n_n && a.projectile.n_per_dim_proj == b.projectile.n_per_dim_proj &&
         a.precision == b.precision;
}

namespace {

int bits_for_ratio(double ratio) { return std::max(1, static_cast<int>(std::ceil(std::log2(ratio)))); }

}  // namespace

PrecisionBudget derive_precision_budget(const SystemSpec& spec, double epsilon, double lambda_H) {
  if (!(epsilon > 0 && epsilon < 1)) throw std::invalid_argument("epsilon must lie in (0, 1)");
  if (!(lambda_H > 0)) throw std::invalid_argument("lambda_H must be positive");
  const auto& o = spec.precision;
  PrecisionBudget b;
  b.epsilon_total = epsilon;
  b.rule = o.rule;
  b.n_T = o.n_T.value_or(10 + static_cast<int>(std::ceil(std::log2(lambda_H / epsilon))));
  b.b_r = o.b_r.value_or(7);

  if (o.rule == PrecisionRule::kGuard) {
    b.n_M = o.n_M.value_or(b.n_T + o.guard_bits);
    b.n_R = o.n_R.value_or(b.n_T + o.guard_bits);
    return b;
  }

  // Equal split: each of the four sinks gets epsilon/4. The n_M and n_R error
  // bounds follow the first-quantized costing lineage.
  const double share = epsilon / 4.0;
  const double eta = spec.target.eta;
  const double lz = spec.target.lambda_zeta;
  const double edge = spec.cell.edge();
  const int np = spec.cell.n_p;
  const double a_m = 2.0 * eta / (kPi * edge) * (eta - 1.0 + 2.0 * lz) *
                     (7.0 * std::ldexp(1.0, np + 1) - 9.0 * np - 11.0 - 3.0 * std::ldexp(1.0, -np));
  const double a_r = eta * lz / edge * lattice_inverse_sum_range((1 << np) - 1);
  b.n_M = o.n_M.value_or(bits_for_ratio(a_m / share));
  b.n_R = o.n_R.value_or(lz > 0 ? bits_for_ratio(a_r / share) : 1);
  return b;
}

long long system_register_qubits(const SystemSpec& spec) {
  return 3LL * spec.target.eta * spec.cell.n_p + 3LL * spec.projectile.n_n;
}

}  // namespace stopcost
