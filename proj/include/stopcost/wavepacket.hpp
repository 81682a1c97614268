#pragma once

#include <vector>

namespace stopcost {

struct ConvergenceRow {
  double sigma_k = 0.0;
  double e_cut = 0.0;  // eV
  long long n_plane_waves = 0;
  int n_n = 0;
  double epsilon_T = 0.0;  // hartree, signed
  int n_per_dim = 0;
};

// Grid of n_per_dim momenta per axis means integer indices -n/2..n/2 scaled by 2*pi/L.
// Mean-momentum terms cancel in the centered frame, so only sigma_k enters.
double wavepacket_kinetic_energy(double sigma_k, double mass, double cell_edge, int n_per_dim);
double kinetic_error(double sigma_k, double mass, double cell_edge, int n_per_dim);

// Cutoff in hartree for a grid of n_per_dim: K^2/2 with K = n_per_dim * 2*pi/L.
double grid_cutoff_hartree(double cell_edge, int n_per_dim);
int projectile_bits(int n_per_dim);

ConvergenceRow convergence_row(double sigma_k, double mass, double cell_edge, int n_per_dim);

// Doubles n_per_dim from 4 until |eps_T| < tolerance. Throws past 16 bits.
ConvergenceRow size_projectile_register(double sigma_k, double mass, double cell_edge, double tolerance);

// (E_cut, eps_T) series for doubling grids up to max_bits.
std::vector<ConvergenceRow> kinetic_error_curve(double sigma_k, double mass, double cell_edge, int max_bits);

// zeta * erf(r / (sqrt(2) sigma_r)) / r, finite at r = 0.
double regularized_potential(double r, double charge, double sigma_r);

// Same error with the lattice sum replaced by the integral truncated to the grid box.
double kinetic_error_truncated_integral(double sigma_k, double mass, double cell_edge, int n_per_dim);

}  // namespace stopcost
