#include <gtest/gtest.h>

#include <random>

#include "symlind/symlind.hpp"

using namespace symlind;
using namespace symlind::lambda_slots;

namespace {

std::vector<int> with(std::vector<int> n, int slot, int delta) {
  n[static_cast<std::size_t>(slot)] += delta;
  return n;
}

SuperMatrix left_only(const Operator& u) { return left_right_supermatrix(u, Operator::Identity(u.rows(), u.cols())); }

} // namespace

TEST(Bosonize, LeftRaisingGivesThreeUnitHops) {
  const HopTermList h = bosonize(left_only(sigma_plus(2, 0, 3)));
  ASSERT_EQ(h.size(), 3u);
  EXPECT_EQ(h.coefficient(s20, s00), cd(1));
  EXPECT_EQ(h.coefficient(s21, s01), cd(1));
  EXPECT_EQ(h.coefficient(s22, s02), cd(1));
}

TEST(Bosonize, IdentityIsNumberOperator) {
  const HopTermList h = bosonize(SuperMatrix::identity(3));
  EXPECT_EQ(h.max_difference(number_operator(3)), 0.0);
  std::mt19937_64 rng(1);
  const SymState x = product_state_expand(random_density_matrix(3, rng), 4);
  EXPECT_LT((apply_hops(h, x).coefficients() - 4.0 * x.coefficients()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Bosonize, IsLieHomomorphism) {
  std::mt19937_64 rng(7);
  const auto basis = make_basis(3, 3);
  for (int trial = 0; trial < 3; ++trial) {
    const SuperMatrix a = single_system_liouvillian(random_model(3, rng));
    const SuperMatrix b = single_system_liouvillian(random_model(3, rng));
    const SparseMatrix ha = hop_matrix(bosonize(a), *basis);
    const SparseMatrix hb = hop_matrix(bosonize(b), *basis);
    const SparseMatrix hab = hop_matrix(bosonize(a * b - b * a), *basis);
    EXPECT_LT(commutator_max_entry(ha, hb, hab), 1e-12);
  }
}

TEST(LadderAction, RaisingMovesFromSourceSlot) {
  const auto basis = make_basis(3, 4);
  basis->for_each([&](std::int64_t r, const std::vector<int>& n) {
    const SymState out = apply_hop({s22, s21, 1.0}, SymState::unit(basis, basis->unrank(r)));
    const int n21 = n[s21];
    if (n21 == 0) {
      EXPECT_EQ(out.coefficients().cwiseAbs().maxCoeff(), 0.0);
      return;
    }
    const std::int64_t target = basis->rank(std::span<const int>(with(with(n, s21, -1), s22, 1)));
    for (std::int64_t k = 0; k < basis->size(); ++k) EXPECT_EQ(out[k], k == target ? cd(n21) : cd(0));
  });
}

TEST(LadderAction, LoweringMovesBack) {
  const auto basis = make_basis(3, 3);
  basis->for_each([&](std::int64_t r, const std::vector<int>& n) {
    const SymState out = apply_hop({s21, s22, 1.0}, SymState::unit(basis, basis->unrank(r)));
    const int n22 = n[s22];
    if (n22 == 0) {
      EXPECT_EQ(out.coefficients().cwiseAbs().maxCoeff(), 0.0);
      return;
    }
    const std::int64_t target = basis->rank(std::span<const int>(with(with(n, s21, 1), s22, -1)));
    EXPECT_EQ(out[target], cd(n22));
    EXPECT_EQ(out.coefficients().cwiseAbs().sum(), n22);
  });
}

TEST(LadderAction, GeneratorsMatchTriple) {
  // raising/lowering/cartan for (22, 21) are the three ladder superoperators.
  EXPECT_EQ(raising(s22, s21, 3).coefficient(s22, s21), cd(1));
  EXPECT_EQ(lowering(s22, s21, 3).coefficient(s21, s22), cd(1));
  EXPECT_EQ(cartan(s22, s21, 3).coefficient(s22, s22), cd(0.5));
  EXPECT_EQ(cartan(s22, s21, 3).coefficient(s21, s21), cd(-0.5));
}

TEST(LadderAction, EmptySourceAnnihilates) {
  const auto basis = make_basis(3, 2);
  const SymState q = SymState::unit(basis, OccupationIndex::single(3, 2, s00));
  EXPECT_EQ(apply_hop({s11, s22, 2.0}, q).coefficients().cwiseAbs().maxCoeff(), 0.0);
}

TEST(Diag3, HalfOccupationDifference) {
  const auto basis = make_basis(3, 4);
  basis->for_each([&](std::int64_t r, const std::vector<int>& n) {
    const SymState out = apply_hop_diag3(s22, s21, SymState::unit(basis, basis->unrank(r)));
    const double expected = 0.5 * (n[s22] - n[s21]);
    for (std::int64_t k = 0; k < basis->size(); ++k) EXPECT_EQ(out[k], k == r ? cd(expected) : cd(0));
  });
}

TEST(Diag3, EqualOccupationsGiveZero) {
  const auto basis = make_basis(3, 2);
  std::vector<int> n(9, 0);
  n[s22] = n[s21] = 1;
  EXPECT_EQ(apply_hop_diag3(s22, s21, SymState::unit(basis, OccupationIndex(3, n))).coefficients().cwiseAbs().maxCoeff(), 0.0);
}

TEST(Diag3, SingleExcitationEigenvalueHalf) {
  const auto basis = make_basis(3, 1);
  const SymState out = apply_hop_diag3(s12, s10, SymState::unit(basis, OccupationIndex::single(3, 1, s12)));
  EXPECT_EQ(out[s12], cd(0.5));
}

TEST(Assemble, SingleSystemReproducesL1) {
  std::mt19937_64 rng(13);
  for (int m = 2; m <= 3; ++m) {
    const SuperMatrix l1 = single_system_liouvillian(random_model(m, rng));
    const SymLiouvillian l = assemble_sym_liouvillian(l1, make_basis(m, 1));
    EXPECT_LT((Eigen::MatrixXcd(l.matrix()) - l1.matrix()).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(Assemble, MismatchedLevelsThrow) {
  std::mt19937_64 rng(1);
  EXPECT_THROW(assemble_sym_liouvillian(single_system_liouvillian(random_model(2, rng)), make_basis(3, 2)), InvalidArgument);
}

TEST(Assemble, PreservesTraceAndHermiticity) {
  std::mt19937_64 rng(29);
  for (int m = 2; m <= 3; ++m)
    for (int n = 1; n <= 4; ++n) {
      const auto basis = make_basis(m, n);
      const SymLiouvillian l = assemble_sym_liouvillian(single_system_liouvillian(random_model(m, rng)), basis);
      const SymState x = product_state_expand(random_density_matrix(m, rng), basis);
      const SymState lx = l.apply(x);
      EXPECT_LT(std::abs(trace_functional(lx)), 1e-12);
      EXPECT_LT(hermiticity_defect(lx), 1e-12);
    }
}

TEST(Assemble, ColumnSparsityIsBoundedByHopCount) {
  const LambdaParams p{6, 0.4, 0.9, 0.5, 0.0, 0.5, 1.0};
  const HopTermList hops = build_lambda_liouvillian(p);
  const SymLiouvillian l = assemble_sym_liouvillian(hops, make_basis(3, 6));
  EXPECT_LE(l.max_column_nonzeros(), 5);
}

TEST(Sl2, RelationsHoldForEveryPair) {
  for (int n = 1; n <= 3; ++n) {
    const SymBasis basis(3, n);
    for (int a = 0; a < 9; ++a)
      for (int b = 0; b < 9; ++b)
        if (a != b) {
          EXPECT_LE(check_sl2_relations(a, b, basis), 1e-12) << a << ' ' << b << " N=" << n;
        }
  }
}

TEST(Sl2, DisjointPairsCommute) {
  const SymBasis basis(3, 3);
  const int pairs[][2] = {{s22, s21}, {s10, s01}, {s20, s11}, {s00, s12}};
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      if (i == j) continue;
      const int* p = pairs[i];
      const int* q = pairs[j];
      const SparseMatrix zero(basis.size(), basis.size());
      for (const auto& gp : {raising(p[0], p[1], 3), lowering(p[0], p[1], 3), cartan(p[0], p[1], 3)})
        for (const auto& gq : {raising(q[0], q[1], 3), lowering(q[0], q[1], 3), cartan(q[0], q[1], 3)})
          EXPECT_EQ(commutator_max_entry(hop_matrix(gp, basis), hop_matrix(gq, basis), zero), 0.0);
    }
}

TEST(Appendix, AllIdentitiesHold) {
  for (int n : {2, 3}) {
    const auto checks = check_appendix_identities(SymBasis(3, n));
    EXPECT_EQ(checks.size(), 80u);
    for (const auto& c : checks) EXPECT_LE(c.residual, 1e-12) << "row " << c.row << " sign " << c.sign << " N=" << n;
  }
}

TEST(Appendix, ProjectorDecomposesIntoCartans) {
  // |j><j| = 1/3 + 2 sum_{k<j} s3^{k,k+1} - 2/3 sum_k (2-k) s3^{k,k+1}
  const Operator id = Operator::Identity(3, 3);
  for (int j = 0; j < 3; ++j) {
    Operator rhs = id / 3.0;
    for (int k = 0; k < j; ++k) rhs += 2.0 * sigma3(k, k + 1, 3);
    for (int k = 0; k < 2; ++k) rhs -= 2.0 / 3.0 * (2 - k) * sigma3(k, k + 1, 3);
    EXPECT_LT((left_only(dyad(j, j, 3)).matrix() - left_only(rhs).matrix()).cwiseAbs().maxCoeff(), 1e-13) << j;
  }
}

TEST(HopTermListOps, CombinesAndCancels) {
  const HopTermList a = raising(s22, s00, 3, 2.0) + cartan(s22, s00, 3);
  const HopTermList b = a - raising(s22, s00, 3, 2.0);
  EXPECT_EQ(b.coefficient(s22, s00), cd(0));
  EXPECT_EQ(b.max_difference(cartan(s22, s00, 3)), 0.0);
  EXPECT_EQ((cd(3.0) * a).coefficient(s22, s00), cd(6.0));
  EXPECT_THROW(HopTermList(3, {{9, 0, 1.0}}), InvalidArgument);
}

TEST(SlotLabels, TwoDigitLabels) {
  EXPECT_EQ(slot_of("21", 3), s21);
  EXPECT_EQ(slot_of("00", 3), s00);
  EXPECT_THROW(slot_of("31", 3), InvalidArgument);
}
