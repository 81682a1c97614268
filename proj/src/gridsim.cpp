#include "stopcost/gridsim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "stopcost/evolution_cost.hpp"
#include "stopcost/system_model.hpp"

namespace stopcost {

namespace {

const cplx kI(0.0, 1.0);

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

// All n-bit words with k set bits, ascending.
std::vector<std::uint64_t> combinations(int n, int k) {
  std::vector<std::uint64_t> out;
  const auto count = static_cast<std::size_t>(binomial(n, k));
  out.reserve(count);
  if (k == 0) {
    out.push_back(0);
    return out;
  }
  std::uint64_t v = k == 64 ? ~0ULL : (1ULL << k) - 1;
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(v);
    if (i + 1 == count) break;
    const std::uint64_t c = v & (~v + 1);
    const std::uint64_t r = v + c;
    v = (((r ^ v) >> 2) / c) | r;
  }
  return out;
}

int parity_below(std::uint64_t bits, int pos) {
  const std::uint64_t mask = pos == 0 ? 0 : (pos >= 64 ? ~0ULL : (1ULL << pos) - 1);
  return std::popcount(bits & mask) & 1;
}

}  // namespace

// ---------------------------------------------------------------- DenseSplitting

DenseSplitting::DenseSplitting(const CMat& h0, const CMat& h1) : h0_(h0), h1_(h1) {
  if (h0.rows() != h0.cols() || h1.rows() != h1.cols() || h0.rows() != h1.rows())
    throw std::invalid_argument("splitting terms must be square and of equal size");
  e0_ = diagonalize(h0_);
  e1_ = diagonalize(h1_);
  eh_ = diagonalize(h0_ + h1_);
}

DenseSplitting::Eig DenseSplitting::diagonalize(const CMat& m) {
  Eigen::SelfAdjointEigenSolver<CMat> es(m);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  return {es.eigenvectors(), es.eigenvalues()};
}

void DenseSplitting::apply(const Eig& e, double s, CVec& psi) {
  CVec c = e.vectors.adjoint() * psi;
  for (Eigen::Index i = 0; i < c.size(); ++i) c[i] *= std::exp(-kI * s * e.values[i]);
  psi = e.vectors * c;
}

void DenseSplitting::apply_exp_h0(double s, CVec& psi) const { apply(e0_, s, psi); }
void DenseSplitting::apply_exp_h1(double s, CVec& psi) const { apply(e1_, s, psi); }
void DenseSplitting::apply_exact(double s, CVec& psi) const { apply(eh_, s, psi); }

// ---------------------------------------------------------------- GridSystem

std::size_t sector_dimension(int n_sites, int eta, SpinMode mode) {
  if (mode == SpinMode::kSpinless) return static_cast<std::size_t>(binomial(n_sites, eta));
  if (eta % 2) return 0;
  const double half = binomial(n_sites, eta / 2);
  return static_cast<std::size_t>(half * half);
}

GridSystem::GridSystem(int n_per_dim, double volume, int eta, SpinMode mode)
    : n_per_dim_(n_per_dim), volume_(volume), eta_(eta), mode_(mode) {
  if (n_per_dim < 1 || !(volume > 0) || eta < 1) throw std::invalid_argument("invalid grid system");
  n_sites_ = n_per_dim * n_per_dim * n_per_dim;
  n_orbitals_ = mode == SpinMode::kSpinless ? n_sites_ : 2 * n_sites_;
  if (n_orbitals_ > 64) throw std::invalid_argument("more than 64 spin orbitals");
  if (mode == SpinMode::kSpinHalfSz0 && eta % 2) throw std::invalid_argument("S_z = 0 needs even eta");
  const int per_spin = mode == SpinMode::kSpinless ? eta : eta / 2;
  if (per_spin > n_sites_) throw std::invalid_argument("eta exceeds available modes");
  const std::size_t dim = sector_dimension(n_sites_, eta, mode);
  if (dim > kMaxSector)
    throw std::invalid_argument("sector dimension " + std::to_string(dim) + " exceeds cap " +
                                std::to_string(kMaxSector));
  build_basis();
  build_one_body();
  t_sector_ = one_body_sector(tau_);
  t_bound_ = 0.0;
  for (int k = 0; k < t_sector_.outerSize(); ++k) {
    double col = 0.0;
    for (Eigen::SparseMatrix<cplx>::InnerIterator it(t_sector_, k); it; ++it) col += std::abs(it.value());
    t_bound_ = std::max(t_bound_, col);
  }

  vdiag_.resize(static_cast<Eigen::Index>(basis_.size()));
  for (std::size_t b = 0; b < basis_.size(); ++b) {
    std::vector<int> sites;
    for (std::uint64_t bits = basis_[b]; bits; bits &= bits - 1) sites.push_back(std::countr_zero(bits) % n_sites_);
    double v = 0.0;
    for (std::size_t i = 0; i < sites.size(); ++i)
      for (std::size_t j = i + 1; j < sites.size(); ++j)
        if (sites[i] != sites[j]) v += 2.0 * nu(sites[i], sites[j]);
    vdiag_[static_cast<Eigen::Index>(b)] = v;
  }
}

void GridSystem::build_basis() {
  if (mode_ == SpinMode::kSpinless) {
    basis_ = combinations(n_sites_, eta_);
    return;
  }
  const auto half = combinations(n_sites_, eta_ / 2);
  basis_.clear();
  basis_.reserve(half.size() * half.size());
  for (auto dn : half)
    for (auto up : half) basis_.push_back(up | (dn << n_sites_));
  std::sort(basis_.begin(), basis_.end());
}

void GridSystem::build_one_body() {
  const int n = n_per_dim_;
  const double edge = std::cbrt(volume_);
  const double c = (n - 1) / 2.0;
  coords_.resize(n_sites_);
  for (int s = 0; s < n_sites_; ++s) coords_[s] = {s / (n * n), (s / n) % n, s % n};
  momenta_.clear();
  for (int mx = 0; mx < n; ++mx)
    for (int my = 0; my < n; ++my)
      for (int mz = 0; mz < n; ++mz)
        momenta_.push_back({2 * kPi / edge * (mx - c), 2 * kPi / edge * (my - c), 2 * kPi / edge * (mz - c)});

  // tau factorizes: the plane-wave sum over the other two axes is a Kronecker delta.
  std::vector<cplx> g(2 * n - 1);
  for (int d = -(n - 1); d <= n - 1; ++d) {
    cplx acc = 0.0;
    for (int m = 0; m < n; ++m) {
      const double k = 2 * kPi / edge * (m - c);
      acc += 0.5 * k * k * std::exp(kI * (2 * kPi * (m - c) * d / n));
    }
    g[d + n - 1] = acc / static_cast<double>(n);
  }
  tau_ = CMat::Zero(n_sites_, n_sites_);
  for (int j = 0; j < n_sites_; ++j)
    for (int l = 0; l < n_sites_; ++l) {
      const auto& a = coords_[j];
      const auto& b = coords_[l];
      const int dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
      cplx v = 0.0;
      if (dy == 0 && dz == 0) v += g[dx + n - 1];
      if (dx == 0 && dz == 0) v += g[dy + n - 1];
      if (dx == 0 && dy == 0) v += g[dz + n - 1];
      tau_(j, l) = v;
    }
}

double GridSystem::nu(int l, int m) const {
  if (l == m) throw std::invalid_argument("nu is defined for distinct sites");
  const auto& a = coords_[l];
  const auto& b = coords_[m];
  const double d = std::sqrt(1.0 * (a[0] - b[0]) * (a[0] - b[0]) + 1.0 * (a[1] - b[1]) * (a[1] - b[1]) +
                             1.0 * (a[2] - b[2]) * (a[2] - b[2]));
  return n_per_dim_ / (2.0 * std::cbrt(volume_)) / d;
}

std::size_t GridSystem::index_of(std::uint64_t bits) const {
  const auto it = std::lower_bound(basis_.begin(), basis_.end(), bits);
  if (it == basis_.end() || *it != bits) throw std::logic_error("state outside the sector");
  return static_cast<std::size_t>(it - basis_.begin());
}

Eigen::SparseMatrix<cplx> GridSystem::one_body_sector(const CMat& h) const {
  if (h.rows() != n_sites_ || h.cols() != n_sites_) throw std::invalid_argument("one-body matrix has wrong size");
  std::vector<Eigen::Triplet<cplx>> trip;
  for (std::size_t b = 0; b < basis_.size(); ++b) {
    const std::uint64_t bits = basis_[b];
    cplx diag = 0.0;
    for (std::uint64_t rest = bits; rest; rest &= rest - 1) {
      const int o = std::countr_zero(rest);
      const int l = o % n_sites_;
      const int spin_off = o - l;
      diag += h(l, l);
      const std::uint64_t removed = bits ^ (1ULL << o);
      const int s1 = parity_below(bits, o);
      for (int j = 0; j < n_sites_; ++j) {
        if (j == l) continue;
        const int o2 = j + spin_off;
        if (removed >> o2 & 1ULL) continue;
        const cplx coef = h(j, l);
        if (coef == cplx(0.0)) continue;
        const std::uint64_t next = removed | (1ULL << o2);
        const int sign = (s1 + parity_below(removed, o2)) & 1 ? -1 : 1;
        trip.emplace_back(static_cast<int>(index_of(next)), static_cast<int>(b), coef * static_cast<double>(sign));
      }
    }
    if (diag != cplx(0.0)) trip.emplace_back(static_cast<int>(b), static_cast<int>(b), diag);
  }
  const auto dim = static_cast<Eigen::Index>(basis_.size());
  Eigen::SparseMatrix<cplx> m(dim, dim);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

CMat GridSystem::dense_hamiltonian() const {
  CMat h = CMat(t_sector_);
  for (Eigen::Index i = 0; i < h.rows(); ++i) h(i, i) += vdiag_[i];
  return h;
}

std::vector<double> GridSystem::momentum_energies() const {
  std::vector<double> e;
  e.reserve(momenta_.size());
  for (const auto& k : momenta_) e.push_back(0.5 * (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]));
  return e;
}

void GridSystem::ensure_dense() const {
  if (dense_) return;
  auto cache = std::make_shared<DenseCache>();
  Eigen::SelfAdjointEigenSolver<CMat> et{CMat(t_sector_)};
  Eigen::SelfAdjointEigenSolver<CMat> eh{dense_hamiltonian()};
  if (et.info() != Eigen::Success || eh.info() != Eigen::Success)
    throw std::runtime_error("eigendecomposition failed");
  cache->t_vectors = et.eigenvectors();
  cache->t_values = et.eigenvalues();
  cache->h_vectors = eh.eigenvectors();
  cache->h_values = eh.eigenvalues();
  dense_ = cache;
}

namespace {

void apply_spectral(const CMat& vecs, const Eigen::VectorXd& vals, double s, CVec& psi) {
  CVec c = vecs.adjoint() * psi;
  for (Eigen::Index i = 0; i < c.size(); ++i) c[i] *= std::exp(-kI * s * vals[i]);
  psi = vecs * c;
}

}  // namespace

void GridSystem::taylor_apply(bool include_t, bool include_v, double s, CVec& psi) const {
  const double v_bound = include_v ? vdiag_.cwiseAbs().maxCoeff() : 0.0;
  const double bound = (include_t ? t_bound_ : 0.0) + v_bound;
  const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(s) * bound / 0.5)));
  const double h = s / steps;
  for (int step = 0; step < steps; ++step) {
    CVec acc = psi;
    CVec term = psi;
    bool converged = false;
    for (int k = 1; k <= 80; ++k) {
      CVec a = CVec::Zero(term.size());
      if (include_t) a += t_sector_ * term;
      if (include_v) a += vdiag_.cast<cplx>().cwiseProduct(term);
      term = (-kI * h / static_cast<double>(k)) * a;
      acc += term;
      // |hA| <= 1/2, so the tail after this term is below its norm.
      if (term.norm() < 1e-15 * std::max(1.0, acc.norm())) {
        converged = true;
        break;
      }
    }
    if (!converged)
      throw std::runtime_error("Taylor propagator did not converge (residual " + std::to_string(term.norm()) + ")");
    psi = acc;
  }
}

void GridSystem::apply_exp_h0(double s, CVec& psi) const {
  if (basis_.size() <= kDenseLimit) {
    ensure_dense();
    apply_spectral(dense_->t_vectors, dense_->t_values, s, psi);
  } else {
    taylor_apply(true, false, s, psi);
  }
}

void GridSystem::apply_exp_h1(double s, CVec& psi) const {
  for (Eigen::Index i = 0; i < psi.size(); ++i) psi[i] *= std::exp(-kI * s * vdiag_[i]);
}

void GridSystem::apply_exact(double s, CVec& psi) const {
  if (basis_.size() <= kDenseLimit) {
    ensure_dense();
    apply_spectral(dense_->h_vectors, dense_->h_values, s, psi);
  } else {
    taylor_apply(true, true, s, psi);
  }
}

CVec GridSystem::apply_hamiltonian(const CVec& psi) const {
  return t_sector_ * psi + vdiag_.cast<cplx>().cwiseProduct(psi);
}

CVec GridSystem::apply_translation(const CVec& psi, int axis) const {
  if (axis < 0 || axis > 2) throw std::invalid_argument("axis must be 0, 1 or 2");
  const int n = n_per_dim_;
  const bool antiperiodic = n % 2 == 0;
  CVec out = CVec::Zero(psi.size());
  std::vector<int> image;
  for (std::size_t b = 0; b < basis_.size(); ++b) {
    image.clear();
    int sign = 1;
    for (std::uint64_t rest = basis_[b]; rest; rest &= rest - 1) {
      const int o = std::countr_zero(rest);
      const int site = o % n_sites_;
      auto c = coords_[site];
      if (++c[axis] == n) {
        c[axis] = 0;
        if (antiperiodic) sign = -sign;
      }
      image.push_back((c[0] * n + c[1]) * n + c[2] + (o - site));
    }
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < image.size(); ++i) {
      bits |= 1ULL << image[i];
      for (std::size_t j = i + 1; j < image.size(); ++j)
        if (image[i] > image[j]) sign = -sign;
    }
    out[static_cast<Eigen::Index>(index_of(bits))] += static_cast<double>(sign) * psi[static_cast<Eigen::Index>(b)];
  }
  return out;
}

cplx GridSystem::translation_expectation(const CVec& psi, int axis) const {
  return psi.dot(apply_translation(psi, axis));
}

// ---------------------------------------------------------------- power iteration

PowerIterationResult power_iteration(const LinearMap& forward, const LinearMap& backward, const CVec& start,
                                     double tol, int max_iterations, std::uint64_t seed) {
  if (!(tol > 0)) throw std::invalid_argument("tol must be positive");
  PowerIterationResult res;
  CVec psi = start;
  if (psi.norm() == 0) throw std::invalid_argument("zero start vector");
  psi /= psi.norm();
  double prev = 0.0;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int it = 1; it <= max_iterations; ++it) {
    CVec phi = forward(psi);
    const double gamma = phi.norm();
    res.history.push_back(gamma);
    res.iterations = it;
    res.norm = gamma;
    psi = backward(phi);
    const double pn = psi.norm();
    // Start vector with no weight on the top singular space: restart from a seeded random vector.
    if ((gamma <= tol || pn == 0.0) && it == 1 + res.restarts && res.restarts < 3) {
      ++res.restarts;
      for (Eigen::Index i = 0; i < psi.size(); ++i) psi[i] = cplx(unif(rng), unif(rng));
      psi /= psi.norm();
      prev = 0.0;
      continue;
    }
    if (pn == 0.0) return res;
    psi /= pn;
    if (std::abs(gamma - prev) < tol) return res;
    prev = gamma;
  }
  throw std::runtime_error("power iteration exceeded " + std::to_string(max_iterations) + " iterations");
}

PowerIterationResult spectral_norm_power_iteration(const Splitting& h, const ProductFormula& f, double t,
                                                   double tol, int max_iterations, std::uint64_t seed) {
  auto delta = [&](double s) {
    return [&h, &f, s](const CVec& v) {
      CVec a = v, b = v;
      evolve_product_formula(h, f, s, a);
      evolve_exact(h, s, b);
      return CVec(a - b);
    };
  };
  const auto n = static_cast<Eigen::Index>(h.dimension());
  const CVec start = CVec::Constant(n, cplx(1.0 / std::sqrt(static_cast<double>(n)), 0.0));
  return power_iteration(delta(t), delta(-t), start, tol, max_iterations, seed);
}

double xi_prefactor(double tau_norm, double nu_norm, int eta, double t, int order) {
  return std::pow(tau_norm + nu_norm, order - 1) * tau_norm * nu_norm * eta * std::pow(t, order + 1);
}

XiEstimate estimate_xi(const GridSystem& system, double t, const ProductFormula& f, double tol) {
  const auto norms = trotter_norms_numeric(system.n_per_dim(), system.volume(), system.eta());
  const auto pi = spectral_norm_power_iteration(system, f, t, tol);
  XiEstimate e;
  e.t = t;
  e.tau_norm = norms.tau_norm;
  e.nu_norm = norms.nu_norm;
  e.norm_value = pi.norm;
  e.iterations = pi.iterations;
  e.prefactor = xi_prefactor(norms.tau_norm, norms.nu_norm, system.eta(), t, f.order);
  e.xi = e.norm_value / e.prefactor;
  return e;
}

}  // namespace stopcost
