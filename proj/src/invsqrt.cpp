#include "stopcost/invsqrt.hpp"

#include <cmath>

namespace stopcost {

const InterpolationBranch& branch_low() {
  static const InterpolationBranch b{1.0,
                                     {0.99994132489119882162, 0.49609891915903542303, 0.33261112772430493331,
                                      0.14876762006038398086},
                                     5.1642030908180720584e-9};
  return b;
}

const InterpolationBranch& branch_high() {
  static const InterpolationBranch b{1.5,
                                     {0.81648515205385221995, 0.27136515484240234115, 0.12756148214815175348,
                                      0.044753028579153842218},
                                     3.6279794522852781448e-10};
  return b;
}

namespace {

struct Reduced {
  double z;  // in [1, 4)
  int e;     // x = 4^e z
};

Reduced reduce(double x) {
  if (!(x > 0) || !std::isfinite(x)) throw std::invalid_argument("inverse square root needs finite x > 0");
  int exp2 = 0;
  const double f = std::frexp(x, &exp2);  // x = f 2^exp2, f in [0.5, 1)
  // Pick an even power of two so that z lands in [1, 4).
  int shift = exp2 - 1;
  if (shift % 2 != 0) --shift;
  return {std::ldexp(f, exp2 - shift), shift / 2};
}

// Branch and octave for z in [1, 4): m = 0 on [1, 2), m = 1 on [2, 4).
struct Selected {
  const InterpolationBranch* branch;
  int m;
  std::array<double, 4> a;  // scaled by 2^{-(2j+1) m / 2}
  double u;
};

Selected select(double z) {
  const int m = z >= 2.0 ? 1 : 0;
  const double base = m ? 2.0 : 1.0;
  const InterpolationBranch& br = z < 1.5 * base ? branch_low() : branch_high();
  Selected s{&br, m, br.a, z - br.origin * base};
  if (m)
    for (int j = 0; j < 4; ++j) s.a[j] *= std::pow(2.0, -(2.0 * j + 1.0) / 2.0);
  return s;
}

double horner(const std::array<double, 4>& a, double u) { return a[0] - u * (a[1] - u * (a[2] - u * a[3])); }

}  // namespace

double inv_sqrt_pipeline(double x) {
  const auto [z, e] = reduce(x);
  const auto s = select(z);
  const double y = horner(s.a, s.u);
  const double y1 = 0.5 * y * (3.0 + s.branch->delta - y * y * z);
  return std::ldexp(y1, -e);
}

double inv_sqrt_branch(double x, const InterpolationBranch& br) {
  const double y = horner(br.a, x - br.origin);
  return 0.5 * y * (3.0 + br.delta - y * y * x);
}

double inv_sqrt_pipeline_quantized(double x, int coeff_bits, int work_bits) {
  if (coeff_bits < 1 || work_bits < coeff_bits || work_bits > 48)
    throw std::invalid_argument("need 1 <= coeff_bits <= work_bits <= 48");
  const auto [z, e] = reduce(x);
  const auto s = select(z);
  auto round_to = [](double v, int bits) {
    const double r = std::ldexp(std::nearbyint(std::ldexp(v, bits)), -bits);
    if (std::abs(r) >= 8.0) throw FixedPointOverflow("fixed-point intermediate out of range");
    return r;
  };
  auto R = [&](double v) { return round_to(v, work_bits); };
  std::array<double, 4> aq{};
  for (int j = 0; j < 4; ++j) aq[j] = round_to(s.a[j], coeff_bits);
  const double u = s.u;
  double y = aq[3];
  y = aq[2] - R(u * y);
  y = aq[1] - R(u * y);
  y = aq[0] - R(u * y);
  // Newton step in residual form: y + y (1 + delta - (y x) y) / 2.
  const double t = R(y * z);
  const double r = R(1.0 + s.branch->delta) - R(t * y);
  const double y1 = y + R(y * r / 2.0);
  return std::ldexp(y1, -e);
}

double scaled_inv_sqrt(double x, double b) {
  if (b == 0) throw std::invalid_argument("b must be nonzero");
  const auto [z, e] = reduce(x);
  auto s = select(z);
  for (double& a : s.a) a *= b;
  const double y = horner(s.a, s.u);
  const double y1 = 0.5 * y * (3.0 + s.branch->delta - y * y * z / (b * b));
  return std::ldexp(y1, -e);
}

double scaled_inv_sqrt_literal(double x, double b) {
  if (b == 0) throw std::invalid_argument("b must be nonzero");
  const auto [z, e] = reduce(x);
  auto s = select(z);
  for (double& a : s.a) a *= b;
  const double y = horner(s.a, s.u);
  const double y1 = 0.5 * y * (2.0 + b * b + s.branch->delta - y * y * z);
  return std::ldexp(y1, -e);
}

QromInterval variable_spacing_qrom_index(std::uint64_t x, int total_bits) {
  if (total_bits < 1 || total_bits > 63) throw std::invalid_argument("total_bits must lie in [1, 63]");
  if (x >> total_bits) throw std::invalid_argument("x out of range");
  if (x < 2) return {static_cast<int>(x), x, x};
  int j = 63 - __builtin_clzll(x);  // x in [2^j, 2^{j+1})
  const std::uint64_t lo = 1ULL << j;
  const std::uint64_t half = 1ULL << (j - 1);
  const int upper = x >= lo + half ? 1 : 0;
  const std::uint64_t start = lo + upper * half;
  return {2 + 2 * (j - 1) + upper, start, start + half - 1};
}

int variable_spacing_qrom_count(int total_bits) {
  if (total_bits < 1) throw std::invalid_argument("total_bits must be positive");
  return total_bits == 1 ? 2 : 2 * total_bits;
}

std::vector<QromInterval> variable_spacing_qrom_table(int total_bits) {
  std::vector<QromInterval> out;
  std::uint64_t x = 0;
  const std::uint64_t end = 1ULL << total_bits;
  while (x < end) {
    const auto iv = variable_spacing_qrom_index(x, total_bits);
    out.push_back(iv);
    x = iv.hi + 1;
  }
  return out;
}

std::vector<CostAnnotation> pipeline_cost_annotations(int n) {
  if (n < 1) throw std::invalid_argument("n must be positive");
  const long long nn = n;
  return {
      {"sum_of_squares", 3 * nn * nn - nn - 1},
      {"variable_spacing_qrom", 4 * nn + 2},
      {"interpolation_multiplies", 3 * 15 * 15},
      {"interpolation_subtractions", 3 * 15},
      {"newton_square", 15 * 15},
      {"newton_multiplies", 2 * 24 * 24},
      {"newton_subtraction", 24},
      {"unitemized_addition", 15},
      {"shifts", nn * (nn + 1) + 15 * nn},
  };
}

}  // namespace stopcost
