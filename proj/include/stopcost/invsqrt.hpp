#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace stopcost {

// Cubic interpolation constants, expanded about 1 on [1, 3/2) and about 3/2 on [3/2, 2).
struct InterpolationBranch {
  double origin;
  std::array<double, 4> a;
  double delta;
};
const InterpolationBranch& branch_low();
const InterpolationBranch& branch_high();

// ~1/sqrt(x) in double precision: power-of-four reduction into [1, 4), the scaled branch
// for [2^m, 3/2 2^m) or [3/2 2^m, 2^{m+1}), one Newton-Raphson step, exponent restored.
double inv_sqrt_pipeline(double x);
// One branch polynomial plus the Newton step, no range reduction. Lets a closed interval be scanned
// against its own branch even at the shared endpoint.
double inv_sqrt_branch(double x, const InterpolationBranch& branch);

// Same in fixed point: coefficients rounded to coeff_bits, every product rounded to
// work_bits fractional bits. Throws FixedPointOverflow if an intermediate leaves its range.
class FixedPointOverflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
double inv_sqrt_pipeline_quantized(double x, int coeff_bits = 15, int work_bits = 24);

// ~b/sqrt(x): coefficients pre-multiplied by b, Newton step y <- y(3 + delta - y^2 x / b^2)/2.
double scaled_inv_sqrt(double x, double b);
// The "replace 3 by 2 + b^2" recipe; converges only linearly unless |b| = 1.
double scaled_inv_sqrt_literal(double x, double b);

struct ScanResult {
  double max_rel_error = 0.0;
  double argmax = 0.0;
};
// Max relative error of f(x)*sqrt(x)/b - 1 on n equispaced points of [lo, hi].
template <class F>
ScanResult scan_relative_error(F&& f, double lo, double hi, long n, double b = 1.0) {
  ScanResult r;
  for (long i = 0; i < n; ++i) {
    const double x = (n == 1) ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    const double e = std::abs(f(x) * std::sqrt(x) / b - 1.0);
    if (e > r.max_rel_error) {
      r.max_rel_error = e;
      r.argmax = x;
    }
  }
  return r;
}

// Two intervals per octave: 0, 1, [2], [3], [4,5], [6,7], [8,11], [12,15], ...
struct QromInterval {
  int id = 0;
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;  // inclusive
};
QromInterval variable_spacing_qrom_index(std::uint64_t x, int total_bits);
int variable_spacing_qrom_count(int total_bits);
std::vector<QromInterval> variable_spacing_qrom_table(int total_bits);

struct CostAnnotation {
  std::string label;
  long long toffolis;
};
// Sub-step Toffoli counts of one pairwise inverse-square-root exponential on n-bit components.
std::vector<CostAnnotation> pipeline_cost_annotations(int n);

}  // namespace stopcost
