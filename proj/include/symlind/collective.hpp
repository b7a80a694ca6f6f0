#pragma once

// Bosonized collective superoperators.
//
// A single-system supermatrix T maps to  sum_{alpha,beta} T_{alpha beta} b^dag_alpha b_beta.
// Summed over the N systems, the hop b^dag_alpha b_beta acts on a symmetric
// basis vector as
//   Q_n  ->  n_beta * Q_{n - e_beta + e_alpha}     (alpha != beta)
//   Q_n  ->  n_alpha * Q_n                         (alpha == beta)
// with integer coefficients; the model enters only through T.

#include <algorithm>
#include <climits>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Sparse>

#include "symlind/error.hpp"
#include "symlind/liouville.hpp"
#include "symlind/sym_basis.hpp"

namespace symlind {

/// coeff * sum_mu b^dag_alpha b_beta
struct HopTerm {
  int alpha = 0;
  int beta = 0;
  cd coeff{1.0, 0.0};
};

class HopTermList {
public:
  static constexpr double kDropTol = 1e-15;

  HopTermList() = default;
  HopTermList(int levels, std::vector<HopTerm> terms) : levels_(levels), terms_(std::move(terms)) {
    if (levels_ < 2) throw InvalidArgument("HopTermList: M must be >= 2");
    for (const auto& t : terms_)
      if (t.alpha < 0 || t.beta < 0 || t.alpha >= slots() || t.beta >= slots())
        throw InvalidArgument("HopTermList: slot index out of range");
    normalize();
  }

  int levels() const { return levels_; }
  int slots() const { return levels_ * levels_; }
  const std::vector<HopTerm>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  /// Coefficient of b^dag_alpha b_beta (0 when absent).
  cd coefficient(int alpha, int beta) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), std::pair{alpha, beta},
                               [](const HopTerm& t, const std::pair<int, int>& k) {
                                 return std::pair{t.alpha, t.beta} < k;
                               });
    return (it != terms_.end() && it->alpha == alpha && it->beta == beta) ? it->coeff : cd{};
  }

  HopTermList operator+(const HopTermList& o) const {
    check_same(o);
    std::vector<HopTerm> all = terms_;
    all.insert(all.end(), o.terms_.begin(), o.terms_.end());
    return HopTermList(levels_, std::move(all));
  }

  HopTermList operator-(const HopTermList& o) const { return *this + cd(-1.0) * o; }

  friend HopTermList operator*(cd s, const HopTermList& l) {
    std::vector<HopTerm> t = l.terms_;
    for (auto& h : t) h.coeff *= s;
    return HopTermList(l.levels_, std::move(t));
  }

  /// Largest coefficient difference against another list.
  double max_difference(const HopTermList& o) const {
    const HopTermList d = *this - o;
    double worst = 0.0;
    for (const auto& t : d.terms_) worst = std::max(worst, std::abs(t.coeff));
    return worst;
  }

private:
  void check_same(const HopTermList& o) const {
    if (levels_ != o.levels_) throw InvalidArgument("HopTermList: level mismatch");
  }

  void normalize() {
    std::sort(terms_.begin(), terms_.end(), [](const HopTerm& a, const HopTerm& b) {
      return std::pair{a.alpha, a.beta} < std::pair{b.alpha, b.beta};
    });
    std::vector<HopTerm> merged;
    for (const auto& t : terms_) {
      if (!merged.empty() && merged.back().alpha == t.alpha && merged.back().beta == t.beta)
        merged.back().coeff += t.coeff;
      else
        merged.push_back(t);
    }
    std::erase_if(merged, [](const HopTerm& t) { return std::abs(t.coeff) <= kDropTol; });
    terms_ = std::move(merged);
  }

  int levels_ = 0;
  std::vector<HopTerm> terms_;
};

// The sl(2) triple for a pair of slots li != lj:
//   A+ = b^dag_li b_lj,   A- = b^dag_lj b_li,   A0 = (b^dag_li b_li - b^dag_lj b_lj)/2.

inline HopTermList raising(int li, int lj, int levels, cd c = 1.0) { return HopTermList(levels, {{li, lj, c}}); }
inline HopTermList lowering(int li, int lj, int levels, cd c = 1.0) { return HopTermList(levels, {{lj, li, c}}); }
inline HopTermList cartan(int li, int lj, int levels, cd c = 1.0) {
  return HopTermList(levels, {{li, li, 0.5 * c}, {lj, lj, -0.5 * c}});
}
/// sum_alpha b^dag_alpha b_alpha, which is N times the identity on the symmetric subspace.
inline HopTermList number_operator(int levels, cd c = 1.0) {
  std::vector<HopTerm> t;
  for (int a = 0; a < levels * levels; ++a) t.push_back({a, a, c});
  return HopTermList(levels, std::move(t));
}

/// Slot of a two-digit label such as "21" (= |2><1|) for M <= 10.
inline int slot_of(std::string_view label, int levels) {
  if (label.size() != 2) throw InvalidArgument("slot label must have two digits");
  const int i = label[0] - '0';
  const int j = label[1] - '0';
  if (i < 0 || j < 0 || i >= levels || j >= levels) throw InvalidArgument("slot label out of range");
  return slot_index(i, j, levels);
}

/// Nonzero entries of T as hop terms.
inline HopTermList bosonize(const SuperMatrix& t) {
  std::vector<HopTerm> terms;
  for (int a = 0; a < t.dim(); ++a)
    for (int b = 0; b < t.dim(); ++b)
      if (std::abs(t(a, b)) > HopTermList::kDropTol) terms.push_back({a, b, t(a, b)});
  return HopTermList(t.levels(), std::move(terms));
}

namespace detail {

inline void require_levels(int list_levels, const SymBasis& basis) {
  if (list_levels != basis.levels()) throw InvalidArgument("hop terms and symmetric basis have different M");
}

/// Calls emit(target_rank, integer_weight) for one hop on one basis vector.
template <class Emit>
inline void hop_targets(const SymBasis& basis, const HopTerm& t, std::vector<int>& n, std::int64_t r, Emit&& emit) {
  if (t.alpha == t.beta) {
    const int k = n[static_cast<std::size_t>(t.alpha)];
    if (k) emit(r, k);
    return;
  }
  const int k = n[static_cast<std::size_t>(t.beta)];
  if (k == 0) return;
  --n[static_cast<std::size_t>(t.beta)];
  ++n[static_cast<std::size_t>(t.alpha)];
  emit(basis.rank(std::span<const int>(n)), k);
  ++n[static_cast<std::size_t>(t.beta)];
  --n[static_cast<std::size_t>(t.alpha)];
}

} // namespace detail

/// Applies every term of `list` to `state` and sums the results.
inline SymState apply_hops(const HopTermList& list, const SymState& state) {
  detail::require_levels(list.levels(), state.basis());
  SymState out(state.basis_ptr());
  CVector& y = out.coefficients();
  const CVector& x = state.coefficients();
  state.basis().for_each([&](std::int64_t r, const std::vector<int>& occ) {
    if (x(r) == cd{}) return;
    std::vector<int> n = occ;
    for (const auto& t : list.terms())
      detail::hop_targets(state.basis(), t, n, r, [&](std::int64_t target, int w) { y(target) += t.coeff * double(w) * x(r); });
  });
  return out;
}

inline SymState apply_hop(const HopTerm& term, const SymState& state) {
  return apply_hops(HopTermList(state.levels(), {term}), state);
}

/// Multiplies each coefficient by (n_li - n_lj)/2.
inline SymState apply_hop_diag3(int li, int lj, const SymState& state) {
  if (li == lj) throw InvalidArgument("apply_hop_diag3: slots must differ");
  SymState out = state;
  CVector& c = out.coefficients();
  state.basis().for_each([&](std::int64_t r, const std::vector<int>& n) {
    c(r) *= 0.5 * (n[static_cast<std::size_t>(li)] - n[static_cast<std::size_t>(lj)]);
  });
  return out;
}

/// Column-compressed matrix of a hop list on the symmetric subspace.
inline SparseMatrix hop_matrix(const HopTermList& list, const SymBasis& basis) {
  detail::require_levels(list.levels(), basis);
  const std::int64_t s = basis.size();
  if (s >= INT_MAX) throw InvalidArgument("hop_matrix: symmetric dimension exceeds 32-bit sparse indexing");
  std::vector<int> outer;
  std::vector<int> inner;
  std::vector<cd> values;
  outer.reserve(static_cast<std::size_t>(s) + 1);
  outer.push_back(0);
  std::vector<std::pair<std::int64_t, cd>> column;
  basis.for_each([&](std::int64_t r, const std::vector<int>& occ) {
    std::vector<int> n = occ;
    column.clear();
    for (const auto& t : list.terms())
      detail::hop_targets(basis, t, n, r, [&](std::int64_t target, int w) { column.emplace_back(target, t.coeff * double(w)); });
    std::sort(column.begin(), column.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t k = 0; k < column.size();) {
      const std::int64_t row = column[k].first;
      cd v{};
      for (; k < column.size() && column[k].first == row; ++k) v += column[k].second;
      if (v != cd{}) {
        inner.push_back(static_cast<int>(row));
        values.push_back(v);
      }
    }
    if (values.size() >= static_cast<std::size_t>(INT_MAX))
      throw InvalidArgument("hop_matrix: number of nonzeros exceeds 32-bit sparse indexing");
    outer.push_back(static_cast<int>(values.size()));
  });
  SparseMatrix m(s, s);
  m.resizeNonZeros(static_cast<Eigen::Index>(values.size()));
  std::copy(outer.begin(), outer.end(), m.outerIndexPtr());
  std::copy(inner.begin(), inner.end(), m.innerIndexPtr());
  std::copy(values.begin(), values.end(), m.valuePtr());
  return m;
}

/// Liouvillian restricted to the symmetric subspace.
class SymLiouvillian {
public:
  SymLiouvillian(BasisPtr basis, SparseMatrix matrix) : basis_(std::move(basis)), matrix_(std::move(matrix)) {
    if (matrix_.rows() != basis_->size() || matrix_.cols() != basis_->size())
      throw InvalidArgument("SymLiouvillian: matrix does not match basis size");
  }

  const SymBasis& basis() const { return *basis_; }
  const BasisPtr& basis_ptr() const { return basis_; }
  const SparseMatrix& matrix() const { return matrix_; }
  std::int64_t size() const { return basis_->size(); }

  SymState apply(const SymState& x) const {
    if (!(x.basis() == *basis_)) throw InvalidArgument("SymLiouvillian::apply: basis mismatch");
    return SymState(basis_, matrix_ * x.coefficients());
  }

  Eigen::Index max_column_nonzeros() const {
    Eigen::Index worst = 0;
    for (Eigen::Index c = 0; c < matrix_.outerSize(); ++c)
      worst = std::max<Eigen::Index>(worst, matrix_.outerIndexPtr()[c + 1] - matrix_.outerIndexPtr()[c]);
    return worst;
  }

private:
  BasisPtr basis_;
  SparseMatrix matrix_;
};

inline SymLiouvillian assemble_sym_liouvillian(const HopTermList& hops, BasisPtr basis) {
  SparseMatrix m = hop_matrix(hops, *basis);
  return SymLiouvillian(std::move(basis), std::move(m));
}

inline SymLiouvillian assemble_sym_liouvillian(const SuperMatrix& l1, BasisPtr basis) {
  if (l1.levels() != basis->levels()) throw InvalidArgument("assemble_sym_liouvillian: L1 and basis have different M");
  return assemble_sym_liouvillian(bosonize(l1), std::move(basis));
}

inline double max_abs_entry(const SparseMatrix& m) {
  double worst = 0.0;
  for (Eigen::Index k = 0; k < m.nonZeros(); ++k) worst = std::max(worst, std::abs(m.valuePtr()[k]));
  return worst;
}

inline double commutator_max_entry(const SparseMatrix& a, const SparseMatrix& b, const SparseMatrix& expected) {
  SparseMatrix c = SparseMatrix(a * b) - SparseMatrix(b * a) - expected;
  return max_abs_entry(c);
}

/// max of |[A+,A-] - 2 A0| and |[A0,A+-] -+ A+-| over entries, for slots li != lj.
inline double check_sl2_relations(int li, int lj, const SymBasis& basis) {
  if (li == lj) throw InvalidArgument("check_sl2_relations: slots must differ");
  const int m = basis.levels();
  const SparseMatrix ap = hop_matrix(raising(li, lj, m), basis);
  const SparseMatrix am = hop_matrix(lowering(li, lj, m), basis);
  const SparseMatrix a0 = hop_matrix(cartan(li, lj, m), basis);
  const double r1 = commutator_max_entry(ap, am, SparseMatrix(cd(2.0) * a0));
  const double r2 = commutator_max_entry(a0, ap, ap);
  const double r3 = commutator_max_entry(a0, am, SparseMatrix(cd(-1.0) * am));
  return std::max({r1, r2, r3});
}

} // namespace symlind
