#include "stopcost/wavepacket.hpp"

#include <cmath>
#include <stdexcept>

#include "stopcost/system_model.hpp"

namespace stopcost {

namespace {

void check(double sigma_k, double mass, double cell_edge, int n_per_dim) {
  if (!(sigma_k > 0) || !(mass > 0) || !(cell_edge > 0) || n_per_dim < 0)
    throw std::invalid_argument("wave packet parameters must be positive");
}

}  // namespace

double wavepacket_kinetic_energy(double sigma_k, double mass, double cell_edge, int n_per_dim) {
  check(sigma_k, mass, cell_edge, n_per_dim);
  // The Gaussian weight factorizes per axis, so <|k|^2> = 3 <k_x^2>.
  const double dk = 2.0 * kPi / cell_edge;
  const int half = n_per_dim / 2;
  double w_sum = 0.0, k2w_sum = 0.0;
  for (int p = -half; p <= half; ++p) {
    const double k2 = (p * dk) * (p * dk);
    const double w = std::exp(-k2 / (2.0 * sigma_k * sigma_k));
    w_sum += w;
    k2w_sum += k2 * w;
  }
  return 3.0 * k2w_sum / w_sum / (2.0 * mass);
}

double kinetic_error(double sigma_k, double mass, double cell_edge, int n_per_dim) {
  return wavepacket_kinetic_energy(sigma_k, mass, cell_edge, n_per_dim) - 3.0 * sigma_k * sigma_k / (2.0 * mass);
}

double grid_cutoff_hartree(double cell_edge, int n_per_dim) {
  const double k = n_per_dim * 2.0 * kPi / cell_edge;
  return 0.5 * k * k;
}

int projectile_bits(int n_per_dim) {
  if (n_per_dim < 1) throw std::invalid_argument("n_per_dim must be positive");
  int bits = 0;
  while ((1LL << bits) < n_per_dim) ++bits;
  return bits + 1;
}

ConvergenceRow convergence_row(double sigma_k, double mass, double cell_edge, int n_per_dim) {
  ConvergenceRow r;
  r.sigma_k = sigma_k;
  r.n_per_dim = n_per_dim;
  r.e_cut = grid_cutoff_hartree(cell_edge, n_per_dim) * kHartreeEv;
  r.n_plane_waves = 1LL * n_per_dim * n_per_dim * n_per_dim;
  r.n_n = projectile_bits(n_per_dim);
  r.epsilon_T = kinetic_error(sigma_k, mass, cell_edge, n_per_dim);
  return r;
}

ConvergenceRow size_projectile_register(double sigma_k, double mass, double cell_edge, double tolerance) {
  if (!(tolerance > 0)) throw std::invalid_argument("tolerance must be positive");
  for (int n = 4;; n *= 2) {
    const auto row = convergence_row(sigma_k, mass, cell_edge, n);
    if (std::abs(row.epsilon_T) < tolerance) return row;
    if (row.n_n >= 16)
      throw std::runtime_error("kinetic energy not converged within 16 bits (|eps_T| = " +
                               std::to_string(std::abs(row.epsilon_T)) + " Ha)");
  }
}

std::vector<ConvergenceRow> kinetic_error_curve(double sigma_k, double mass, double cell_edge, int max_bits) {
  std::vector<ConvergenceRow> rows;
  for (int n = 2; projectile_bits(n) <= max_bits; n *= 2) rows.push_back(convergence_row(sigma_k, mass, cell_edge, n));
  return rows;
}

double regularized_potential(double r, double charge, double sigma_r) {
  if (r < 0 || !(sigma_r > 0)) throw std::invalid_argument("need r >= 0 and sigma_r > 0");
  const double x = r / (std::sqrt(2.0) * sigma_r);
  if (x < 1e-4) {
    // erf(x)/x = 2/sqrt(pi) (1 - x^2/3 + x^4/10)
    const double x2 = x * x;
    return charge * std::sqrt(2.0 / kPi) / sigma_r * (1.0 - x2 / 3.0 + x2 * x2 / 10.0);
  }
  return charge * std::erf(x) / r;
}

double kinetic_error_truncated_integral(double sigma_k, double mass, double cell_edge, int n_per_dim) {
  check(sigma_k, mass, cell_edge, n_per_dim);
  // Per-axis Gaussian second moment on [-a, a], a the outer edge of the sampled cells.
  const double a = (n_per_dim / 2 + 0.5) * 2.0 * kPi / cell_edge;
  const double z = a / sigma_k;
  const double m2 = sigma_k * sigma_k *
                    (1.0 - 2.0 * z * std::exp(-z * z / 2.0) / std::sqrt(2.0 * kPi) / std::erf(z / std::sqrt(2.0)));
  return 3.0 * (m2 - sigma_k * sigma_k) / (2.0 * mass);
}

}  // namespace stopcost
