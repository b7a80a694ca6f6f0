#pragma once

// Brute-force reference in the full N-fold Liouville space, for validation
// at small N only.  Tensor index of |a_1)|a_2)...|a_N) is
//   sum_mu a_mu (M^2)^(N-mu)     (mu = 1..N, first factor most significant).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "symlind/error.hpp"
#include "symlind/evolution.hpp"
#include "symlind/expmv.hpp"
#include "symlind/liouville.hpp"
#include "symlind/sym_basis.hpp"

namespace symlind {

inline constexpr std::int64_t kOracleCap = 1000000;

inline std::int64_t full_dimension(int levels, int systems) {
  if (levels < 2 || systems < 1) throw InvalidArgument("full_dimension: need M >= 2 and N >= 1");
  std::int64_t d = 1;
  for (int k = 0; k < systems; ++k) {
    d *= static_cast<std::int64_t>(levels) * levels;
    if (d > kOracleCap)
      throw InvalidArgument("oracle: M^(2N) exceeds the cap of " + std::to_string(kOracleCap) + " entries");
  }
  return d;
}

struct FullState {
  int levels = 0;
  int systems = 0;
  CVector v;
};

/// sum_mu 1^(mu-1) (x) L1 (x) 1^(N-mu) as a sparse matrix.
inline SparseMatrix full_liouvillian(const SuperMatrix& l1, int systems) {
  const int q = l1.dim();
  const std::int64_t dim = full_dimension(l1.levels(), systems);
  std::vector<Eigen::Triplet<cd>> trip;
  std::vector<std::pair<int, int>> nz;
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b)
      if (l1(a, b) != cd{}) nz.emplace_back(a, b);
  trip.reserve(nz.size() * static_cast<std::size_t>(dim / q) * static_cast<std::size_t>(systems));
  std::int64_t stride = dim;
  for (int mu = 0; mu < systems; ++mu) {
    stride /= q;  // weight of factor mu
    const std::int64_t outer = dim / (stride * q);
    for (std::int64_t hi = 0; hi < outer; ++hi)
      for (std::int64_t lo = 0; lo < stride; ++lo) {
        const std::int64_t base = hi * stride * q + lo;
        for (const auto& [a, b] : nz)
          trip.emplace_back(static_cast<int>(base + a * stride), static_cast<int>(base + b * stride), l1(a, b));
      }
  }
  SparseMatrix m(dim, dim);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

namespace detail {

/// Calls fn(full_index) for every distinct arrangement of the slot multiset n.
template <class Fn>
void for_each_arrangement(const std::vector<int>& n, int systems, Fn&& fn) {
  std::vector<int> seq;
  seq.reserve(static_cast<std::size_t>(systems));
  for (std::size_t s = 0; s < n.size(); ++s)
    for (int k = 0; k < n[s]; ++k) seq.push_back(static_cast<int>(s));
  const std::int64_t q = static_cast<std::int64_t>(n.size());
  do {
    std::int64_t idx = 0;
    for (int a : seq) idx = idx * q + a;
    fn(idx);
  } while (std::next_permutation(seq.begin(), seq.end()));
}

} // namespace detail

/// Each Q_n becomes K * (sum over distinct arrangements of its slot multiset).
inline FullState embed(const SymState& state) {
  const SymBasis& b = state.basis();
  FullState f{b.levels(), b.systems(), CVector::Zero(full_dimension(b.levels(), b.systems()))};
  b.for_each([&](std::int64_t r, const std::vector<int>& n) {
    const cd c = state[r];
    if (c == cd{}) return;
    const double k = normalization_K(OccupationIndex(b.levels(), n));
    detail::for_each_arrangement(n, b.systems(), [&](std::int64_t idx) { f.v(idx) += c * k; });
  });
  return f;
}

struct Projection {
  SymState state;
  double residual = 0.0;
};

/// c_n = sum of the entries over the orbit of n (inverse of embed on the
/// symmetric subspace); residual = || v - embed(c) ||.
inline Projection project(const FullState& full) {
  const std::int64_t dim = full_dimension(full.levels, full.systems);
  if (full.v.size() != dim) throw InvalidArgument("project: vector length differs from M^(2N)");
  BasisPtr basis = make_basis(full.levels, full.systems);
  SymState s(basis);
  basis->for_each([&](std::int64_t r, const std::vector<int>& n) {
    cd sum{};
    detail::for_each_arrangement(n, full.systems, [&](std::int64_t idx) { sum += full.v(idx); });
    s.coefficients()(r) = sum;
  });
  const double resid = (full.v - embed(s).v).norm();
  return {std::move(s), resid};
}

/// exp(L t) v0 in the full space; dense below 300 entries, Krylov otherwise.
inline CVector full_propagate(const SparseMatrix& lfull, const CVector& v0, double t, double tol = 1e-12) {
  if (t == 0.0) return v0;
  if (lfull.rows() <= 300) return dense_expm_action(lfull, v0, t);
  return krylov_expmv(lfull, v0, t, tol);
}

} // namespace symlind
