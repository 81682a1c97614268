#pragma once

#include <utility>

#include "stopcost/system_model.hpp"

namespace stopcost {

struct LambdaBreakdown {
  double lambda_nu = 0.0;       // sum 1/|nu|^2 over the electron difference grid
  double lambda_nu_proj = 0.0;  // same over the projectile difference grid
  double lambda_T_elec = 0.0;
  double lambda_T_proj = 0.0;
  double lambda_T_mean = 0.0;
  double lambda_U_elec = 0.0;
  double lambda_U_proj = 0.0;
  double lambda_V_elec = 0.0;
  double lambda_V_proj = 0.0;
  double p_nu = 0.0;
  double p_nu_proj = 0.0;
  double p_nu_amp = 0.0;
  double p_nu_proj_amp = 0.0;
  double sum_branch = 0.0;        // plain sum of all components
  double prep_branch = 0.0;       // success-probability weighted branch (as used)
  double prep_branch_plain = 0.0;  // same with un-amplified probabilities
  double lambda_H = 0.0;
  double lambda_H_plain = 0.0;  // un-amplified lambda_H
  bool amplified = true;
  int n_M = 0;  // precision the p_nu values were evaluated at

  bool prep_branch_active() const { return prep_branch > sum_branch; }
};

// Sum of 1/|nu|^2 over the integer cube [-h, h]^3 without the origin.
double lattice_inverse_square_sum_range(int half_width);
// Sum of 1/|nu| over the same set.
double lattice_inverse_sum_range(int half_width);
// Difference set of an n_per_dim grid: [-(n-1), n-1]^3 without the origin. n_per_dim >= 3.
double lattice_inverse_square_sum(int n_per_dim);

// Success probability of the nested-box 1/|nu| preparation on an n_bits register
// with an n_M-bit inequality test.
double prep_success_probability(int n_bits, int n_M);

double amplify(double p);

void lambda_kinetic(const SystemSpec& spec, double& t_elec, double& t_proj, double& t_mean);
void lambda_potentials(const SystemSpec& spec, double lambda_nu, double lambda_nu_proj, double& u_elec,
                       double& u_proj, double& v_elec, double& v_proj);

LambdaBreakdown lambda_total(const SystemSpec& spec, bool amplified, int n_M);

// lambda_H depends on p_nu(n_M) while n_M depends on n_T(lambda_H); iterate to the fixed point.
std::pair<LambdaBreakdown, PrecisionBudget> resolve_lambda_and_budget(const SystemSpec& spec, double epsilon,
                                                                      bool amplified = true);

}  // namespace stopcost
