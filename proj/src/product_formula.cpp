#include <cmath>
#include <stdexcept>

#include "stopcost/gridsim.hpp"

namespace stopcost {

namespace {

// Palindromic list of S2 weights, outermost first.
std::vector<double> stage_weights(const ProductFormula& f) {
  std::vector<double> w(f.outer_weights.rbegin(), f.outer_weights.rend());
  w.push_back(f.w0());
  w.insert(w.end(), f.outer_weights.begin(), f.outer_weights.end());
  return w;
}

ProductFormula from_stages(int order, const std::vector<double>& stages) {
  if (stages.size() % 2 == 0) throw std::logic_error("symmetric composition needs an odd stage count");
  ProductFormula f;
  f.order = order;
  const std::size_t mid = stages.size() / 2;
  f.outer_weights.assign(stages.begin() + static_cast<std::ptrdiff_t>(mid) + 1, stages.end());
  return f;
}

// Triple-jump (four-fold) step: S(p)^2 S(1-4p) S(p)^2 raises a symmetric order-k formula to k+2.
std::vector<double> fractal_step(const std::vector<double>& inner, int k) {
  const double p = 1.0 / (4.0 - std::pow(4.0, 1.0 / (k + 1)));
  std::vector<double> out;
  for (double c : {p, p, 1.0 - 4.0 * p, p, p})
    for (double w : inner) out.push_back(c * w);
  return out;
}

}  // namespace

double ProductFormula::w0() const {
  double s = 0.0;
  for (double w : outer_weights) s += w;
  return 1.0 - 2.0 * s;
}

ProductFormula ProductFormula::strang() { return ProductFormula{2, {}}; }

ProductFormula ProductFormula::suzuki(int order) {
  if (order != 4 && order != 6) throw std::invalid_argument("suzuki order must be 4 or 6");
  std::vector<double> stages{1.0};
  for (int k = 2; k < order; k += 2) stages = fractal_step(stages, k);
  return from_stages(order, stages);
}

ProductFormula ProductFormula::bespoke_order8() {
  return ProductFormula{8,
                        {0.5935806040085031, -0.4691601234700394, 0.2743566425898439, 0.1719387948465702,
                         0.2343987448254160, -0.4861642448032533, 0.4961736738811380, -0.3266021894843879,
                         0.2327167934936900, 0.09824955741471075}};
}

void evolve_product_formula(const Splitting& h, const ProductFormula& f, double t, CVec& psi) {
  // Adjacent H0 half steps of consecutive S2 factors are merged into one exponential.
  const auto w = stage_weights(f);
  double pending = 0.5 * w.front() * t;
  for (std::size_t i = 0; i < w.size(); ++i) {
    h.apply_exp_h0(pending, psi);
    h.apply_exp_h1(w[i] * t, psi);
    pending = 0.5 * w[i] * t + (i + 1 < w.size() ? 0.5 * w[i + 1] * t : 0.0);
  }
  h.apply_exp_h0(pending, psi);
}

void evolve_exact(const Splitting& h, double t, CVec& psi) { h.apply_exact(t, psi); }

CMat product_formula_error_matrix(const Splitting& h, const ProductFormula& f, double t) {
  const auto n = static_cast<Eigen::Index>(h.dimension());
  CMat m(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    CVec a = CVec::Unit(n, j), b = CVec::Unit(n, j);
    evolve_product_formula(h, f, t, a);
    evolve_exact(h, t, b);
    m.col(j) = a - b;
  }
  return m;
}

double dense_spectral_norm(const CMat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMat> svd(m);
  return svd.singularValues()(0);
}

}  // namespace stopcost
