#pragma once

// The permutation-symmetric subspace of the N-fold Liouville space.
//
// A basis vector is labelled by the occupation numbers n_ij = how many of
// the N tensor factors carry the dyad |i><j|.  It is normalised with
//   K = prod(n_ij!) / N!
// so that its expansion coefficients are 1/#(distinct arrangements).  These
// vectors are NOT unit norm: ||Q_n||^2 = K (see hs_norm_squared).
//
// Basis vectors are ranked in descending lexicographic order of the full
// M^2-tuple (n_00, n_01, ..., n_(M-1)(M-1)); rank 0 is n_00 = N and for
// N = 1 the rank of |ij) equals its slot index i*M + j.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "symlind/error.hpp"
#include "symlind/liouville.hpp"

namespace symlind {

namespace detail {

/// Binomial coefficient with overflow detection; throws when the value
/// exceeds 2^63 - 1.
inline std::int64_t checked_binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (std::int64_t i = 1; i <= k; ++i) {
    // r * (n - k + i) / i is exact at every step (it equals C(n-k+i, i)).
    r = r * static_cast<unsigned __int128>(n - k + i) / static_cast<unsigned __int128>(i);
    if (r > static_cast<unsigned __int128>(std::numeric_limits<std::int64_t>::max()))
      throw InvalidArgument("binomial C(" + std::to_string(n) + "," + std::to_string(k) +
                            ") overflows a 64-bit integer");
  }
  return static_cast<std::int64_t>(r);
}

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

/// Calls fn(parts) for every weak composition of `total` into parts.size()
/// parts, in descending lexicographic order.
inline void for_each_composition(int total, int parts, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> c(static_cast<std::size_t>(parts), 0);
  c[0] = total;
  while (true) {
    fn(c);
    int p = parts - 2;
    while (p >= 0 && c[static_cast<std::size_t>(p)] == 0) --p;
    if (p < 0) return;
    int rest = 0;
    for (int q = p + 1; q < parts; ++q) {
      rest += c[static_cast<std::size_t>(q)];
      c[static_cast<std::size_t>(q)] = 0;
    }
    --c[static_cast<std::size_t>(p)];
    c[static_cast<std::size_t>(p) + 1] = rest + 1;
  }
}

} // namespace detail

/// s = C(N + M^2 - 1, N).
inline std::int64_t sym_dimension(int levels, int systems) {
  if (levels < 2) throw InvalidArgument("sym_dimension: M must be >= 2");
  if (systems < 1) throw InvalidArgument("sym_dimension: N must be >= 1");
  const std::int64_t slots = static_cast<std::int64_t>(levels) * levels;
  return detail::checked_binomial(systems + slots - 1, systems);
}

/// Occupation numbers {n_ij} over the M^2 slots, stored in slot order.
class OccupationIndex {
public:
  OccupationIndex(int levels, std::vector<int> occupations) : levels_(levels), n_(std::move(occupations)) {
    if (levels_ < 2) throw InvalidArgument("OccupationIndex: M must be >= 2");
    if (n_.size() != static_cast<std::size_t>(levels_ * levels_))
      throw InvalidArgument("OccupationIndex: expected M^2 occupation numbers");
    systems_ = 0;
    for (int v : n_) {
      if (v < 0) throw InvalidArgument("OccupationIndex: negative occupation");
      systems_ += v;
    }
    if (systems_ < 1) throw InvalidArgument("OccupationIndex: total occupation must be >= 1");
  }

  /// All N units on a single slot.
  static OccupationIndex single(int levels, int systems, int slot) {
    std::vector<int> n(static_cast<std::size_t>(levels * levels), 0);
    n.at(static_cast<std::size_t>(slot)) = systems;
    return OccupationIndex(levels, std::move(n));
  }

  int levels() const { return levels_; }
  int systems() const { return systems_; }
  int slots() const { return levels_ * levels_; }
  const std::vector<int>& occupations() const { return n_; }
  int operator[](int slot) const { return n_[static_cast<std::size_t>(slot)]; }
  int at(int i, int j) const { return n_[static_cast<std::size_t>(slot_index(i, j, levels_))]; }

  /// n* : n_ij <-> n_ji.
  OccupationIndex transposed() const {
    std::vector<int> t(n_.size());
    for (int i = 0; i < levels_; ++i)
      for (int j = 0; j < levels_; ++j)
        t[static_cast<std::size_t>(slot_index(j, i, levels_))] = n_[static_cast<std::size_t>(slot_index(i, j, levels_))];
    return OccupationIndex(levels_, std::move(t));
  }

  bool is_diagonal() const {
    for (int i = 0; i < levels_; ++i)
      for (int j = 0; j < levels_; ++j)
        if (i != j && at(i, j) != 0) return false;
    return true;
  }

  bool operator==(const OccupationIndex& o) const = default;

private:
  int levels_;
  int systems_ = 0;
  std::vector<int> n_;
};

/// prod(n_ij!) / N!
inline double normalization_K(const OccupationIndex& idx) {
  if (idx.systems() <= 170) {
    double num = 1.0;
    for (int v : idx.occupations()) num *= detail::factorial(v);
    return num / detail::factorial(idx.systems());
  }
  double lg = -std::lgamma(idx.systems() + 1.0);
  for (int v : idx.occupations()) lg += std::lgamma(v + 1.0);
  return std::exp(lg);
}

/// N! / prod(n_ij!) = 1 / K, the number of distinct tensor arrangements.
inline double distinct_permutations(const OccupationIndex& idx) { return 1.0 / normalization_K(idx); }

/// Hilbert-Schmidt norm squared of the basis vector: equals K.
inline double hs_norm_squared(const OccupationIndex& idx) { return normalization_K(idx); }

/// Enumeration and ranking of the symmetric basis for fixed (M, N).
class SymBasis {
public:
  SymBasis(int levels, int systems)
      : levels_(levels), systems_(systems), slots_(levels * levels), size_(sym_dimension(levels, systems)) {
    // ways_[m][r] = number of weak compositions of r into m parts.
    ways_.assign(static_cast<std::size_t>(slots_ + 2), std::vector<std::int64_t>(static_cast<std::size_t>(systems_ + 1), 0));
    for (int m = 1; m <= slots_ + 1; ++m)
      for (int r = 0; r <= systems_; ++r)
        ways_[static_cast<std::size_t>(m)][static_cast<std::size_t>(r)] = detail::checked_binomial(r + m - 1, m - 1);
  }

  int levels() const { return levels_; }
  int systems() const { return systems_; }
  int slots() const { return slots_; }
  std::int64_t size() const { return size_; }

  std::int64_t rank(std::span<const int> n) const {
    if (n.size() != static_cast<std::size_t>(slots_)) throw InvalidArgument("rank: wrong number of slots");
    std::int64_t r = 0;
    int remaining = systems_;
    for (int k = 0; k + 1 < slots_; ++k) {
      const int v = n[static_cast<std::size_t>(k)];
      if (v < 0 || v > remaining) throw InvalidArgument("rank: occupation index does not sum to N");
      if (v < remaining) r += ways(slots_ - k, remaining - v - 1);
      remaining -= v;
    }
    if (n[static_cast<std::size_t>(slots_ - 1)] != remaining)
      throw InvalidArgument("rank: occupation index does not sum to N");
    return r;
  }

  std::int64_t rank(const OccupationIndex& idx) const {
    if (idx.levels() != levels_ || idx.systems() != systems_)
      throw InvalidArgument("rank: index belongs to a different (M, N)");
    return rank(std::span<const int>(idx.occupations()));
  }

  std::vector<int> unrank_raw(std::int64_t k) const {
    if (k < 0 || k >= size_) throw InvalidArgument("unrank: rank " + std::to_string(k) + " out of range");
    std::vector<int> n(static_cast<std::size_t>(slots_), 0);
    int remaining = systems_;
    for (int s = 0; s + 1 < slots_; ++s) {
      const int after = slots_ - s - 1;
      for (int v = remaining; v >= 0; --v) {
        const std::int64_t block = ways(after, remaining - v);
        if (k < block) {
          n[static_cast<std::size_t>(s)] = v;
          remaining -= v;
          break;
        }
        k -= block;
      }
    }
    n[static_cast<std::size_t>(slots_ - 1)] = remaining;
    return n;
  }

  OccupationIndex unrank(std::int64_t k) const { return OccupationIndex(levels_, unrank_raw(k)); }

  /// Advances `n` to the next index in rank order; false after the last one.
  bool next(std::vector<int>& n) const {
    int p = slots_ - 2;
    while (p >= 0 && n[static_cast<std::size_t>(p)] == 0) --p;
    if (p < 0) return false;
    int rest = 0;
    for (int q = p + 1; q < slots_; ++q) {
      rest += n[static_cast<std::size_t>(q)];
      n[static_cast<std::size_t>(q)] = 0;
    }
    --n[static_cast<std::size_t>(p)];
    n[static_cast<std::size_t>(p) + 1] = rest + 1;
    return true;
  }

  /// Calls fn(rank, occupations) for every basis vector in rank order.
  template <class Fn>
  void for_each(Fn&& fn) const {
    std::vector<int> n = unrank_raw(0);
    std::int64_t r = 0;
    do {
      fn(r, std::as_const(n));
      ++r;
    } while (next(n));
  }

  /// Ranks of the purely diagonal indices (n_ij = 0 for all i != j).
  std::vector<std::int64_t> diagonal_ranks() const {
    std::vector<std::int64_t> out;
    std::vector<int> n(static_cast<std::size_t>(slots_), 0);
    detail::for_each_composition(systems_, levels_, [&](const std::vector<int>& d) {
      for (int i = 0; i < levels_; ++i) n[static_cast<std::size_t>(slot_index(i, i, levels_))] = d[static_cast<std::size_t>(i)];
      out.push_back(rank(std::span<const int>(n)));
    });
    return out;
  }

  bool operator==(const SymBasis& o) const { return levels_ == o.levels_ && systems_ == o.systems_; }

private:
  std::int64_t ways(int parts, int total) const {
    return ways_[static_cast<std::size_t>(parts)][static_cast<std::size_t>(total)];
  }

  int levels_;
  int systems_;
  int slots_;
  std::int64_t size_;
  std::vector<std::vector<std::int64_t>> ways_;
};

using BasisPtr = std::shared_ptr<const SymBasis>;

inline BasisPtr make_basis(int levels, int systems) { return std::make_shared<const SymBasis>(levels, systems); }

/// Coefficients c_k of a symmetric operator over a SymBasis.
class SymState {
public:
  SymState() = default;
  explicit SymState(BasisPtr basis) : basis_(std::move(basis)) {
    if (!basis_) throw InvalidArgument("SymState: null basis");
    c_ = CVector::Zero(basis_->size());
  }
  SymState(BasisPtr basis, CVector coefficients) : basis_(std::move(basis)), c_(std::move(coefficients)) {
    if (!basis_) throw InvalidArgument("SymState: null basis");
    if (c_.size() != basis_->size()) throw InvalidArgument("SymState: coefficient vector has wrong length");
  }

  static SymState unit(BasisPtr basis, const OccupationIndex& idx) {
    SymState s(std::move(basis));
    s.c_(s.basis_->rank(idx)) = 1.0;
    return s;
  }

  const SymBasis& basis() const { return *basis_; }
  const BasisPtr& basis_ptr() const { return basis_; }
  int levels() const { return basis_->levels(); }
  int systems() const { return basis_->systems(); }
  const CVector& coefficients() const { return c_; }
  CVector& coefficients() { return c_; }
  cd operator[](std::int64_t k) const { return c_(k); }
  cd coefficient(const OccupationIndex& idx) const { return c_(basis_->rank(idx)); }

  SymState with_coefficients(CVector c) const { return SymState(basis_, std::move(c)); }

private:
  BasisPtr basis_;
  CVector c_;
};

/// Tr of the represented operator: sum of c_n over purely diagonal n.
inline cd trace_functional(const SymState& state) {
  cd t{};
  for (std::int64_t r : state.basis().diagonal_ranks()) t += state[r];
  return t;
}

inline void require_density_matrix(const Operator& rho, double tol = 1e-10) {
  require_square(rho, "density matrix");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol) throw InvalidArgument("density matrix is not Hermitian");
  if (std::abs(rho.trace() - 1.0) > tol) throw InvalidArgument("density matrix does not have unit trace");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol) throw InvalidArgument("density matrix is not positive-semidefinite");
}

/// Expansion of rho1^{(x)N}: c_n = N!/prod(n_ij!) * prod((rho1)_ij^n_ij).
inline SymState product_state_expand(const Operator& rho1, BasisPtr basis) {
  require_density_matrix(rho1);
  if (rho1.rows() != basis->levels()) throw InvalidArgument("product_state_expand: level mismatch");
  const int m = basis->levels();
  SymState out(basis);
  CVector& c = out.coefficients();
  const double nfact = detail::factorial(basis->systems());
  basis->for_each([&](std::int64_t r, const std::vector<int>& n) {
    cd v = nfact;
    for (int s = 0; s < basis->slots(); ++s) {
      const int k = n[static_cast<std::size_t>(s)];
      if (k == 0) continue;
      const auto [i, j] = slot_levels(s, m);
      v *= std::pow(rho1(i, j), k) / detail::factorial(k);
    }
    c(r) = v;
  });
  return out;
}

inline SymState product_state_expand(const Operator& rho1, int systems) {
  return product_state_expand(rho1, make_basis(static_cast<int>(rho1.rows()), systems));
}

/// max_n |c_n - conj(c_{n*})|.
inline double hermiticity_defect(const SymState& state) {
  const SymBasis& b = state.basis();
  const int m = b.levels();
  std::vector<int> t(static_cast<std::size_t>(b.slots()));
  double worst = 0.0;
  b.for_each([&](std::int64_t r, const std::vector<int>& n) {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        t[static_cast<std::size_t>(slot_index(j, i, m))] = n[static_cast<std::size_t>(slot_index(i, j, m))];
    const std::int64_t rt = b.rank(std::span<const int>(t));
    worst = std::max(worst, std::abs(state[r] - std::conj(state[rt])));
  });
  return worst;
}

} // namespace symlind
