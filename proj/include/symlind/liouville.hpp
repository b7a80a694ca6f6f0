#pragma once

// Single-system Liouville space: row vectorization, U^L V^R supermatrices
// and the strictly local SInDiP generator.
//
// Level labels are 0-based (|0>, |1>, ..., |M-1>). The dyad |i><j| occupies
// slot  alpha = i*M + j  of a row-vectorized operator; in 1-based notation
// this is alpha = (i-1)M + j.

#include <cmath>
#include <complex>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "symlind/error.hpp"

namespace symlind {

using cd = std::complex<double>;
using Operator = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using SparseMatrix = Eigen::SparseMatrix<cd, Eigen::ColMajor, int>;

inline constexpr cd I_unit{0.0, 1.0};

inline int slot_index(int i, int j, int levels) { return i * levels + j; }

inline std::pair<int, int> slot_levels(int slot, int levels) {
  return {slot / levels, slot % levels};
}

inline void require_square(const Operator& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() < 2)
    throw InvalidArgument(std::string(what) + ": operator must be square with dimension >= 2");
}

/// Stacks the rows of `a` top to bottom.
inline CVector row_vectorize(const Operator& a) {
  require_square(a, "row_vectorize");
  const Eigen::Index m = a.rows();
  CVector v(m * m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) v(i * m + j) = a(i, j);
  return v;
}

inline Operator unvectorize(const CVector& v) {
  const auto m = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (m * m != v.size() || m < 2)
    throw InvalidArgument("unvectorize: length is not a square >= 4");
  Operator a(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) a(i, j) = v(i * m + j);
  return a;
}

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// M^2 x M^2 matrix of a single-system superoperator in the row convention.
class SuperMatrix {
public:
  SuperMatrix() = default;

  explicit SuperMatrix(Eigen::MatrixXcd entries) : entries_(std::move(entries)) {
    const auto n = entries_.rows();
    const auto m = static_cast<int>(std::llround(std::sqrt(static_cast<double>(n))));
    if (entries_.cols() != n || static_cast<Eigen::Index>(m) * m != n || m < 2)
      throw InvalidArgument("SuperMatrix: expected an M^2 x M^2 matrix with M >= 2");
    levels_ = m;
  }

  static SuperMatrix identity(int levels) {
    return SuperMatrix(Eigen::MatrixXcd::Identity(levels * levels, levels * levels));
  }

  int levels() const { return levels_; }
  int dim() const { return levels_ * levels_; }
  const Eigen::MatrixXcd& matrix() const { return entries_; }
  cd operator()(int alpha, int beta) const { return entries_(alpha, beta); }

  /// Superoperator applied to an operator (vectorize, multiply, un-vectorize).
  Operator apply(const Operator& a) const { return unvectorize(entries_ * row_vectorize(a)); }

  SuperMatrix operator+(const SuperMatrix& o) const { return SuperMatrix(entries_ + o.entries_); }
  SuperMatrix operator-(const SuperMatrix& o) const { return SuperMatrix(entries_ - o.entries_); }
  SuperMatrix operator*(const SuperMatrix& o) const { return SuperMatrix(entries_ * o.entries_); }
  friend SuperMatrix operator*(cd s, const SuperMatrix& t) { return SuperMatrix(s * t.entries_); }

private:
  int levels_ = 0;
  Eigen::MatrixXcd entries_;
};

/// Supermatrix of A -> U A V, i.e. U (x) V^T.
inline SuperMatrix left_right_supermatrix(const Operator& u, const Operator& v) {
  require_square(u, "left_right_supermatrix");
  require_square(v, "left_right_supermatrix");
  if (u.rows() != v.rows())
    throw InvalidArgument("left_right_supermatrix: U and V have different dimensions");
  return SuperMatrix(kron(u, v.transpose()));
}

// Named single-system operators for level pairs. sigma_plus(i,j) = |i><j|
// raises from j to i, sigma_lower(i,j) = |j><i|, sigma3(i,j) = (|j><j| - |i><i|)/2.

inline Operator dyad(int i, int j, int levels) {
  Operator a = Operator::Zero(levels, levels);
  a(i, j) = 1.0;
  return a;
}

inline Operator sigma_plus(int i, int j, int levels) { return dyad(i, j, levels); }
inline Operator sigma_minus(int i, int j, int levels) { return dyad(j, i, levels); }

inline Operator sigma3(int i, int j, int levels) {
  Operator a = Operator::Zero(levels, levels);
  a(j, j) = 0.5;
  a(i, i) = -0.5;
  return a;
}

/// Generalized Gell-Mann matrices scaled to Tr(F_j^dag F_k) = delta_jk.
/// Order: symmetric pairs (j<k), antisymmetric pairs (j<k), diagonal l = 1..M-1.
inline std::vector<Operator> gell_mann_basis(int levels) {
  if (levels < 2) throw InvalidArgument("gell_mann_basis: M must be >= 2");
  const double r = 1.0 / std::sqrt(2.0);
  std::vector<Operator> out;
  out.reserve(static_cast<std::size_t>(levels * levels - 1));
  for (int j = 0; j < levels; ++j)
    for (int k = j + 1; k < levels; ++k) {
      Operator f = Operator::Zero(levels, levels);
      f(j, k) = r;
      f(k, j) = r;
      out.push_back(std::move(f));
    }
  for (int j = 0; j < levels; ++j)
    for (int k = j + 1; k < levels; ++k) {
      Operator f = Operator::Zero(levels, levels);
      f(j, k) = -I_unit * r;
      f(k, j) = I_unit * r;
      out.push_back(std::move(f));
    }
  for (int l = 1; l < levels; ++l) {
    Operator f = Operator::Zero(levels, levels);
    const double c = 1.0 / std::sqrt(static_cast<double>(l) * (l + 1));
    for (int j = 0; j < l; ++j) f(j, j) = c;
    f(l, l) = -c * l;
    out.push_back(std::move(f));
  }
  return out;
}

/// A jump operator with its rate, for building models from a Hamiltonian
/// and a list of Lindblad channels.
struct JumpChannel {
  Operator op;
  double rate = 0.0;
};

/// Hamiltonian coefficients h_k, traceless basis F_k and Kossakowski matrix a_jk
/// of one system. hbar = 1.
class SInDiPModel {
public:
  static constexpr double kBasisTol = 1e-12;
  static constexpr double kHermitianTol = 1e-12;
  static constexpr double kPsdTol = 1e-10;

  SInDiPModel(std::vector<cd> h, std::vector<Operator> basis, Eigen::MatrixXcd kossakowski)
      : h_(std::move(h)), basis_(std::move(basis)), a_(std::move(kossakowski)) {
    validate();
  }

  /// Model with the Gell-Mann basis.
  static SInDiPModel with_gell_mann(int levels, std::vector<cd> h, Eigen::MatrixXcd kossakowski) {
    return SInDiPModel(std::move(h), gell_mann_basis(levels), std::move(kossakowski));
  }

  /// Projects a Hamiltonian and traceless jump operators onto `basis`.
  /// The trace part of H only shifts the energy zero and is dropped.
  static SInDiPModel from_channels(const Operator& hamiltonian, const std::vector<JumpChannel>& jumps,
                                   std::vector<Operator> basis) {
    require_square(hamiltonian, "from_channels");
    const auto n = basis.size();
    std::vector<cd> h(n);
    for (std::size_t k = 0; k < n; ++k) h[k] = (basis[k].adjoint() * hamiltonian).trace();
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (const auto& jump : jumps) {
      require_square(jump.op, "from_channels");
      if (jump.op.rows() != hamiltonian.rows())
        throw InvalidArgument("from_channels: jump operator dimension differs from Hamiltonian");
      if (std::abs(jump.op.trace()) > kBasisTol)
        throw InvalidArgument("from_channels: jump operators must be traceless");
      if (jump.rate < 0.0) throw InvalidArgument("from_channels: negative jump rate");
      Eigen::VectorXcd l(static_cast<Eigen::Index>(n));
      for (std::size_t k = 0; k < n; ++k) l(static_cast<Eigen::Index>(k)) = (basis[k].adjoint() * jump.op).trace();
      a += jump.rate * l * l.adjoint();
    }
    return SInDiPModel(std::move(h), std::move(basis), std::move(a));
  }

  static SInDiPModel from_channels(const Operator& hamiltonian, const std::vector<JumpChannel>& jumps) {
    return from_channels(hamiltonian, jumps, gell_mann_basis(static_cast<int>(hamiltonian.rows())));
  }

  int levels() const { return static_cast<int>(basis_.front().rows()); }
  const std::vector<cd>& h() const { return h_; }
  const std::vector<Operator>& basis() const { return basis_; }
  const Eigen::MatrixXcd& kossakowski() const { return a_; }

  Operator hamiltonian() const {
    Operator hm = Operator::Zero(levels(), levels());
    for (std::size_t k = 0; k < h_.size(); ++k) hm += h_[k] * basis_[k];
    return hm;
  }

private:
  void validate() const {
    if (basis_.empty()) throw InvalidArgument("SInDiPModel: empty operator basis");
    const auto m = basis_.front().rows();
    if (m < 2) throw InvalidArgument("SInDiPModel: dim >= 2 violated");
    const auto n = static_cast<std::size_t>(m * m - 1);
    if (basis_.size() != n) throw InvalidArgument("SInDiPModel: basis must contain M^2-1 operators");
    if (h_.size() != n) throw InvalidArgument("SInDiPModel: h must contain M^2-1 coefficients");
    if (a_.rows() != static_cast<Eigen::Index>(n) || a_.cols() != static_cast<Eigen::Index>(n))
      throw InvalidArgument("SInDiPModel: Kossakowski matrix must be (M^2-1)x(M^2-1)");
    for (std::size_t j = 0; j < n; ++j) {
      if (basis_[j].rows() != m || basis_[j].cols() != m)
        throw InvalidArgument("SInDiPModel: basis operators have inconsistent dimension");
      if (std::abs(basis_[j].trace()) > kBasisTol)
        throw InvalidArgument("SInDiPModel: basis operator " + std::to_string(j) + " is not traceless");
      for (std::size_t k = 0; k < n; ++k) {
        const cd g = (basis_[j].adjoint() * basis_[k]).trace();
        if (std::abs(g - (j == k ? 1.0 : 0.0)) > kBasisTol)
          throw InvalidArgument("SInDiPModel: basis is not Hilbert-Schmidt orthonormal");
      }
    }
    const double scale = std::max(1.0, a_.cwiseAbs().maxCoeff());
    if ((a_ - a_.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol * scale)
      throw InvalidArgument("SInDiPModel: Kossakowski matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (a_ + a_.adjoint()), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kPsdTol * scale)
      throw InvalidArgument("SInDiPModel: Kossakowski matrix is not positive-semidefinite");
    const Operator hm = hamiltonian();
    if ((hm - hm.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol * std::max(1.0, hm.cwiseAbs().maxCoeff()))
      throw InvalidArgument("SInDiPModel: Hamiltonian sum h_k F_k is not Hermitian");
  }

  std::vector<cd> h_;
  std::vector<Operator> basis_;
  Eigen::MatrixXcd a_;
};

/// L1 = -i(H (x) 1 - 1 (x) H^T)
///      + 1/2 sum_jk a_jk (2 F_j (x) F_k^* - (F_k^dag F_j) (x) 1 - 1 (x) (F_k^dag F_j)^T)
inline SuperMatrix single_system_liouvillian(const SInDiPModel& model) {
  const int m = model.levels();
  const Operator id = Operator::Identity(m, m);
  const Operator hm = model.hamiltonian();
  Eigen::MatrixXcd l = -I_unit * (kron(hm, id) - kron(id, hm.transpose()));
  const auto& f = model.basis();
  const auto& a = model.kossakowski();
  Operator g = Operator::Zero(m, m);
  for (std::size_t j = 0; j < f.size(); ++j)
    for (std::size_t k = 0; k < f.size(); ++k) {
      const cd ajk = a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
      if (ajk == cd{}) continue;
      l += ajk * kron(f[j], f[k].conjugate());
      g += ajk * f[k].adjoint() * f[j];
    }
  l -= 0.5 * (kron(g, id) + kron(id, g.transpose()));
  return SuperMatrix(std::move(l));
}

/// Random Hermitian M x M matrix with entries of order `scale`.
template <class Rng>
Operator random_hermitian(int levels, Rng& rng, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Operator a(levels, levels);
  for (int i = 0; i < levels; ++i)
    for (int j = 0; j < levels; ++j) a(i, j) = cd(nd(rng), nd(rng));
  return 0.5 * scale * (a + a.adjoint());
}

/// Random density matrix (Wishart-type, full rank with probability one).
template <class Rng>
Operator random_density_matrix(int levels, Rng& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Operator b(levels, levels);
  for (int i = 0; i < levels; ++i)
    for (int j = 0; j < levels; ++j) b(i, j) = cd(nd(rng), nd(rng));
  Operator rho = b * b.adjoint();
  return rho / rho.trace().real();
}

/// Random valid model in the Gell-Mann basis: real h (Hermitian H) and
/// a = B B^dag scaled so that its largest entry is about `rate`.
template <class Rng>
SInDiPModel random_model(int levels, Rng& rng, double energy = 1.0, double rate = 1.0) {
  std::normal_distribution<double> nd(0.0, 1.0);
  const int n = levels * levels - 1;
  std::vector<cd> h(static_cast<std::size_t>(n));
  for (auto& x : h) x = energy * nd(rng);
  Eigen::MatrixXcd b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b(i, j) = cd(nd(rng), nd(rng));
  Eigen::MatrixXcd a = b * b.adjoint();
  a *= rate / a.cwiseAbs().maxCoeff();
  a = 0.5 * (a + a.adjoint());
  return SInDiPModel::with_gell_mann(levels, std::move(h), std::move(a));
}

} // namespace symlind
