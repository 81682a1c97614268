#pragma once

#include <array>
#include <complex>
#include <functional>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace stopcost {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

// Two-term Hamiltonian H = H0 + H1 with the exponentials a product formula needs.
class Splitting {
 public:
  virtual ~Splitting() = default;
  virtual std::size_t dimension() const = 0;
  virtual void apply_exp_h0(double s, CVec& psi) const = 0;  // psi <- exp(-i s H0) psi
  virtual void apply_exp_h1(double s, CVec& psi) const = 0;
  virtual void apply_exact(double s, CVec& psi) const = 0;  // psi <- exp(-i s (H0+H1)) psi
};

// Dense Hermitian pair, diagonalized once.
class DenseSplitting : public Splitting {
 public:
  DenseSplitting(const CMat& h0, const CMat& h1);
  std::size_t dimension() const override { return static_cast<std::size_t>(h0_.rows()); }
  void apply_exp_h0(double s, CVec& psi) const override;
  void apply_exp_h1(double s, CVec& psi) const override;
  void apply_exact(double s, CVec& psi) const override;
  const CMat& h0() const { return h0_; }
  const CMat& h1() const { return h1_; }

 private:
  struct Eig {
    CMat vectors;
    Eigen::VectorXd values;
  };
  static Eig diagonalize(const CMat& m);
  static void apply(const Eig& e, double s, CVec& psi);
  CMat h0_, h1_;
  Eig e0_, e1_, eh_;
};

enum class SpinMode { kSpinless, kSpinHalfSz0 };

// Real-space grid Hamiltonian restricted to a fixed particle-number (and S_z) sector.
// Orbitals are grid points r_p = p * L / N^{1/3}; the kinetic term is diagonal in the
// centered momentum basis, the pair potential (N^{1/3}/(2L))/|p - q| is diagonal in position.
class GridSystem : public Splitting {
 public:
  static constexpr std::size_t kMaxSector = 200000;
  static constexpr std::size_t kDenseLimit = 2000;

  GridSystem(int n_per_dim, double volume, int eta, SpinMode mode = SpinMode::kSpinless);

  int n_per_dim() const { return n_per_dim_; }
  double volume() const { return volume_; }
  int eta() const { return eta_; }
  SpinMode spin_mode() const { return mode_; }
  int num_sites() const { return n_sites_; }
  std::size_t dimension() const override { return basis_.size(); }
  const std::vector<std::uint64_t>& basis() const { return basis_; }

  // One-body kinetic matrix tau_{jk} on sites.
  const CMat& tau() const { return tau_; }
  // Pair coefficient nu_{lm} for distinct sites.
  double nu(int l, int m) const;
  const Eigen::VectorXd& potential_diagonal() const { return vdiag_; }
  const Eigen::SparseMatrix<cplx>& kinetic_sector() const { return t_sector_; }
  CMat dense_hamiltonian() const;

  // Single-particle kinetic energies |k|^2/2 on the centered momentum grid.
  std::vector<double> momentum_energies() const;

  void apply_exp_h0(double s, CVec& psi) const override;  // kinetic
  void apply_exp_h1(double s, CVec& psi) const override;  // potential
  void apply_exact(double s, CVec& psi) const override;
  CVec apply_hamiltonian(const CVec& psi) const;
  // Shift every particle one grid step along axis (periodic wrap, with the sign flip that
  // half-integer momenta require for even n_per_dim). Commutes with H when n_per_dim = 2.
  CVec apply_translation(const CVec& psi, int axis) const;
  cplx translation_expectation(const CVec& psi, int axis) const;
  // Sector matrix of a one-body operator sum_{jk,spin} h_jk a_j^dag a_k.
  Eigen::SparseMatrix<cplx> one_body_sector(const CMat& h) const;
  std::size_t index_of(std::uint64_t bits) const;  // throws if bits is not in the sector

 private:
  void build_basis();
  void build_one_body();
  void ensure_dense() const;
  void taylor_apply(bool include_t, bool include_v, double s, CVec& psi) const;

  int n_per_dim_;
  double volume_;
  int eta_;
  SpinMode mode_;
  int n_sites_;
  int n_orbitals_;
  std::vector<std::uint64_t> basis_;
  std::vector<std::array<int, 3>> coords_;
  std::vector<std::array<double, 3>> momenta_;
  CMat tau_;
  Eigen::SparseMatrix<cplx> t_sector_;
  Eigen::VectorXd vdiag_;
  double t_bound_ = 0.0;  // row-sum bound on |T| in the sector

  struct DenseCache {
    CMat t_vectors;
    Eigen::VectorXd t_values;
    CMat h_vectors;
    Eigen::VectorXd h_values;
  };
  mutable std::shared_ptr<DenseCache> dense_;
};

std::size_t sector_dimension(int n_sites, int eta, SpinMode mode);

struct ProductFormula {
  int order = 2;
  std::vector<double> outer_weights;  // w_1..w_m; w_0 = 1 - 2 sum w_i

  double w0() const;
  int num_stages() const { return 2 * static_cast<int>(outer_weights.size()) + 1; }
  static ProductFormula strang();
  static ProductFormula suzuki(int order);  // 4 or 6, fractal construction
  static ProductFormula bespoke_order8();
};

// psi <- S(t) psi with adjacent H0 half steps merged.
void evolve_product_formula(const Splitting& h, const ProductFormula& f, double t, CVec& psi);
void evolve_exact(const Splitting& h, double t, CVec& psi);

// Dense S(t) - exp(-itH) for small dimensions.
CMat product_formula_error_matrix(const Splitting& h, const ProductFormula& f, double t);
double dense_spectral_norm(const CMat& m);

struct PowerIterationResult {
  double norm = 0.0;
  int iterations = 0;
  int restarts = 0;
  std::vector<double> history;
};

// Algorithm 1: Gamma <- |Delta(t) psi|, psi <- Delta(-t) Delta(t) psi normalized, until |dGamma| < tol.
PowerIterationResult spectral_norm_power_iteration(const Splitting& h, const ProductFormula& f, double t,
                                                   double tol, int max_iterations = 10000,
                                                   std::uint64_t seed = 12345);

// Generic version on an arbitrary operator pair (Delta, Delta(-t)); exposed for synthetic tests.
using LinearMap = std::function<CVec(const CVec&)>;
PowerIterationResult power_iteration(const LinearMap& forward, const LinearMap& backward, const CVec& start,
                                     double tol, int max_iterations = 10000, std::uint64_t seed = 12345);

struct XiEstimate {
  double xi = 0.0;
  double t = 0.0;
  double prefactor = 0.0;
  double norm_value = 0.0;
  int iterations = 0;
  double tau_norm = 0.0;
  double nu_norm = 0.0;
};

double xi_prefactor(double tau_norm, double nu_norm, int eta, double t, int order);
XiEstimate estimate_xi(const GridSystem& system, double t, const ProductFormula& f, double tol = 1e-12);

}  // namespace stopcost
