#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "symlind/symlind.hpp"

using namespace symlind;

namespace {

Operator pure(int level, int levels) { return dyad(level, level, levels); }

SymLiouvillian damping(int systems, double gamma, BasisPtr* basis_out = nullptr) {
  const auto basis = make_basis(2, systems);
  if (basis_out) *basis_out = basis;
  const SInDiPModel model = SInDiPModel::from_channels(Operator::Zero(2, 2), {{dyad(0, 1, 2), gamma}});
  return assemble_sym_liouvillian(single_system_liouvillian(model), basis);
}

} // namespace

TEST(Propagate, TimeZeroReturnsInitialState) {
  std::mt19937_64 rng(3);
  const auto basis = make_basis(3, 3);
  const SymLiouvillian l = assemble_sym_liouvillian(single_system_liouvillian(random_model(3, rng)), basis);
  const SymState x = product_state_expand(random_density_matrix(3, rng), basis);
  for (Method m : {Method::dense, Method::krylov, Method::ode}) {
    PropagationSpec spec;
    spec.t_grid = {0.0};
    spec.method = m;
    EXPECT_EQ(propagate(l, x, spec).front().coefficients(), x.coefficients());
  }
}

TEST(Propagate, ZeroGeneratorIsConstant) {
  const auto basis = make_basis(2, 3);
  const SymLiouvillian l(basis, SparseMatrix(basis->size(), basis->size()));
  std::mt19937_64 rng(1);
  const SymState x = product_state_expand(random_density_matrix(2, rng), basis);
  PropagationSpec spec;
  spec.t_grid = linear_grid(0.0, 2.0, 5);
  for (Method m : {Method::dense, Method::krylov, Method::ode}) {
    spec.method = m;
    for (const auto& s : propagate(l, x, spec)) EXPECT_LT((s.coefficients() - x.coefficients()).norm(), 1e-14);
  }
}

TEST(Propagate, AmplitudeDampingOfThreeSystems) {
  const double gamma = 0.8;
  BasisPtr basis;
  const SymLiouvillian l = damping(3, gamma, &basis);
  const SymState x = product_state_expand(pure(1, 2), basis);
  PropagationSpec spec;
  spec.t_grid = linear_grid(0.0, 3.0, 7);
  for (Method m : {Method::dense, Method::krylov, Method::ode}) {
    spec.method = m;
    const auto traj = propagate(l, x, spec);
    for (std::size_t k = 0; k < traj.size(); ++k) {
      const cd n1 = collective_expectation(pure(1, 2), traj[k]);
      EXPECT_NEAR(n1.real(), 3.0 * std::exp(-gamma * spec.t_grid[k]), 1e-9) << method_name(m);
      EXPECT_NEAR(n1.imag(), 0.0, 1e-12);
    }
  }
}

TEST(Propagate, MethodsAgree) {
  std::mt19937_64 rng(41);
  const auto basis = make_basis(3, 3);
  const SymLiouvillian l = assemble_sym_liouvillian(single_system_liouvillian(random_model(3, rng)), basis);
  const SymState x = product_state_expand(random_density_matrix(3, rng), basis);
  const SymState a = propagate_to(l, x, 1.3, Method::dense);
  const SymState b = propagate_to(l, x, 1.3, Method::krylov, 1e-12);
  const SymState c = propagate_to(l, x, 1.3, Method::ode, 1e-12);
  EXPECT_LT((a.coefficients() - b.coefficients()).norm() / a.coefficients().norm(), 1e-10);
  EXPECT_LT((a.coefficients() - c.coefficients()).norm() / a.coefficients().norm(), 1e-9);
}

TEST(Propagate, SemigroupProperty) {
  std::mt19937_64 rng(43);
  const auto basis = make_basis(2, 4);
  const SymLiouvillian l = assemble_sym_liouvillian(single_system_liouvillian(random_model(2, rng)), basis);
  const SymState x = product_state_expand(random_density_matrix(2, rng), basis);
  const SymState once = propagate_to(l, x, 1.1, Method::dense);
  const SymState twice = propagate_to(l, propagate_to(l, x, 0.4, Method::dense), 0.7, Method::dense);
  EXPECT_LT((once.coefficients() - twice.coefficients()).norm(), 1e-12);
}

TEST(Propagate, PreservesTraceAndHermiticity) {
  std::mt19937_64 rng(47);
  const auto basis = make_basis(3, 4);
  const SymLiouvillian l = assemble_sym_liouvillian(single_system_liouvillian(random_model(3, rng)), basis);
  const SymState x = product_state_expand(random_density_matrix(3, rng), basis);
  PropagationSpec spec;
  spec.t_grid = linear_grid(0.5, 4.0, 8);
  for (const auto& s : propagate(l, x, spec)) {
    EXPECT_LT(std::abs(trace_functional(s) - 1.0), 1e-10);
    EXPECT_LT(hermiticity_defect(s), 1e-10);
    EXPECT_GE(positivity_check(s), -1e-10);
  }
}

TEST(Propagate, RejectsBadInput) {
  BasisPtr basis;
  const SymLiouvillian l = damping(2, 1.0, &basis);
  const SymState x = product_state_expand(pure(0, 2), basis);
  PropagationSpec spec;
  EXPECT_THROW(propagate(l, x, spec), InvalidArgument);
  spec.t_grid = {1.0, 0.5};
  EXPECT_THROW(propagate(l, x, spec), InvalidArgument);
  spec.t_grid = {1.0};
  spec.tol = 0.5;
  EXPECT_THROW(propagate(l, x, spec), InvalidArgument);
  spec.tol = 1e-10;
  EXPECT_THROW(propagate(l, SymState(basis), spec), InvalidArgument);
  EXPECT_THROW(propagate(l, product_state_expand(pure(0, 2), 3), spec), InvalidArgument);
}

TEST(Krylov, ReportsNonConvergence) {
  BasisPtr basis;
  const SymLiouvillian l = damping(6, 1.0, &basis);
  const CVector v = product_state_expand(pure(1, 2), basis).coefficients();
  EXPECT_THROW(krylov_expmv(l.matrix(), v, 50.0, 1e-12, KrylovOptions{2, 0, 1}), NumericalError);
}

TEST(Expectation, IdentityGivesNTimesTrace) {
  std::mt19937_64 rng(5);
  const SymState x = product_state_expand(random_density_matrix(3, rng), 4);
  const cd v = collective_expectation(Operator::Identity(3, 3), x);
  EXPECT_LT(std::abs(v - 4.0 * trace_functional(x)), 1e-13);
}

TEST(Expectation, EmptyLevelGivesZero) {
  EXPECT_EQ(collective_expectation(pure(2, 3), product_state_expand(pure(0, 3), 3)), cd(0));
}

TEST(Expectation, MaximallyMixedPair) {
  const SymState x = product_state_expand(0.5 * Operator::Identity(2, 2), 2);
  EXPECT_NEAR(std::abs(collective_expectation(pure(1, 2), x) - 1.0), 0.0, 1e-15);
}

TEST(Expectation, MatchesHopRoute) {
  // Tr(sum_mu O rho) computed as trace_functional(bosonize(O^L) rho).
  std::mt19937_64 rng(8);
  const auto basis = make_basis(3, 3);
  const SymState x = SymState(basis, CVector::Random(basis->size()));
  const Operator o = random_hermitian(3, rng) + I_unit * random_hermitian(3, rng);
  const HopTermList h = bosonize(left_right_supermatrix(o, Operator::Identity(3, 3)));
  EXPECT_LT(std::abs(collective_expectation(o, x) - trace_functional(apply_hops(h, x))), 1e-12);
}

TEST(ReducedDensity, ProductStateGivesFactor) {
  std::mt19937_64 rng(12);
  for (int m = 2; m <= 3; ++m) {
    const Operator rho = random_density_matrix(m, rng);
    EXPECT_LT((reduced_single_density(product_state_expand(rho, 4)) - rho).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(ReducedDensity, SingleSystemIsTheState) {
  std::mt19937_64 rng(14);
  const Operator rho = random_density_matrix(3, rng);
  EXPECT_LT((reduced_single_density(product_state_expand(rho, 1)) - rho).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ReducedDensity, ZeroTraceThrows) {
  EXPECT_THROW(reduced_single_density(SymState(make_basis(2, 2))), InvalidArgument);
}

TEST(ReducedDensity, LambdaGroundStateLimitEmptiesUpperLevel) {
  const LambdaParams p{3, 0.7, 1.1, 0.0, 0.0, 0.4, 1.0};
  const auto basis = make_basis(3, 3);
  const SymLiouvillian l = assemble_sym_liouvillian(build_lambda_liouvillian(p), basis);
  const SymState x = product_state_expand(pure(2, 3), basis);
  const Operator r = reduced_single_density(propagate_to(l, x, 40.0 / p.gamma()));
  EXPECT_LT(std::abs(r(2, 2)), 1e-12);
  EXPECT_NEAR(r(0, 0).real() + r(1, 1).real(), 1.0, 1e-12);
}

TEST(Positivity, ProductStatesAndPureGround) {
  std::mt19937_64 rng(15);
  EXPECT_GE(positivity_check(product_state_expand(random_density_matrix(3, rng), 3)), 0.0);
  const Operator r = reduced_single_density(product_state_expand(pure(0, 3), 2));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(r);
  EXPECT_NEAR(es.eigenvalues()(0), 0.0, 1e-15);
  EXPECT_NEAR(es.eigenvalues()(1), 0.0, 1e-15);
  EXPECT_NEAR(es.eigenvalues()(2), 1.0, 1e-15);
}

TEST(Positivity, LambdaTrajectoryStaysPositive) {
  const LambdaParams p{4, 0.3, 1.2, 0.8, 0.0, 0.6, 1.5};
  const auto basis = make_basis(3, 4);
  const SymLiouvillian l = assemble_sym_liouvillian(build_lambda_liouvillian(p), basis);
  std::mt19937_64 rng(16);
  PropagationSpec spec;
  spec.t_grid = linear_grid(0.0, 6.0, 13);
  for (const auto& s : propagate(l, product_state_expand(random_density_matrix(3, rng), basis), spec))
    EXPECT_GE(positivity_check(s), -1e-8);
}

TEST(TrajectoryCsv, HeaderAndRoundTrippableNumbers) {
  BasisPtr basis;
  const SymLiouvillian l = damping(2, 0.5, &basis);
  PropagationSpec spec;
  spec.t_grid = {0.0, 0.1};
  const auto traj = propagate(l, product_state_expand(pure(1, 2), basis), spec);
  std::ostringstream os;
  write_trajectory_csv(os, spec.t_grid, {{"n1", pure(1, 2)}}, traj);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "time,n1_re,n1_im");
  std::getline(is, line);
  EXPECT_EQ(line, "0,2,0");
  std::getline(is, line);
  const double v = std::stod(line.substr(line.find(',') + 1));
  EXPECT_EQ(v, collective_expectation(pure(1, 2), traj[1]).real());
}

TEST(Methods, ParseNames) {
  EXPECT_EQ(parse_method("auto"), Method::automatic);
  EXPECT_EQ(parse_method("krylov"), Method::krylov);
  EXPECT_STREQ(method_name(Method::ode), "ode");
  EXPECT_THROW(parse_method("rk4"), InvalidArgument);
}
