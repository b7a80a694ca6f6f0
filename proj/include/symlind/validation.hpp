#pragma once

// Invariant suites shared by the `validate` command and the acceptance tests.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "symlind/appendix.hpp"
#include "symlind/collective.hpp"
#include "symlind/evolution.hpp"
#include "symlind/lambda.hpp"
#include "symlind/liouville.hpp"
#include "symlind/oracle.hpp"
#include "symlind/sym_basis.hpp"

namespace symlind {

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
  double seconds = 0.0;
};

/// Worst-case trace, Hermiticity and positivity figures over many states.
struct PhysicalityStats {
  double max_trace_deviation = 0.0;
  double max_hermiticity_defect = 0.0;
  double min_eigenvalue = 1.0;
  long states = 0;

  void add(const SymState& s) {
    max_trace_deviation = std::max(max_trace_deviation, std::abs(trace_functional(s) - 1.0));
    max_hermiticity_defect = std::max(max_hermiticity_defect, hermiticity_defect(s));
    min_eigenvalue = std::min(min_eigenvalue, positivity_check(s));
    ++states;
  }

  void merge(const PhysicalityStats& o) {
    max_trace_deviation = std::max(max_trace_deviation, o.max_trace_deviation);
    max_hermiticity_defect = std::max(max_hermiticity_defect, o.max_hermiticity_defect);
    min_eigenvalue = std::min(min_eigenvalue, o.min_eigenvalue);
    states += o.states;
  }

  bool ok(double tol = 1e-8) const {
    return max_trace_deviation <= tol && max_hermiticity_defect <= tol && min_eigenvalue >= -tol;
  }
};

namespace detail {

inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

template <class Fn>
CheckResult timed(Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  CheckResult r = fn();
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

/// Number of size-n multisets over k symbols, by explicit enumeration.
inline std::int64_t count_multisets(int k, int n) {
  std::int64_t count = 0;
  std::function<void(int, int)> rec = [&](int first, int left) {
    if (left == 0) {
      ++count;
      return;
    }
    for (int s = first; s < k; ++s) rec(s, left - 1);
  };
  rec(0, n);
  return count;
}

/// w * rho_a^(x)N + (1 - w) * rho_b^(x)N: symmetric, Hermitian, unit trace, not a product.
template <class Rng>
SymState random_symmetric_state(const BasisPtr& basis, Rng& rng) {
  std::uniform_real_distribution<double> u(0.2, 0.8);
  const double w = u(rng);
  const Operator ra = random_density_matrix(basis->levels(), rng);
  const Operator rb = random_density_matrix(basis->levels(), rng);
  SymState s = product_state_expand(ra, basis);
  s.coefficients() = w * s.coefficients() + (1.0 - w) * product_state_expand(rb, basis).coefficients();
  return s;
}

} // namespace detail

/// Criterion 1: closed-form dimension against explicit enumeration.
inline CheckResult check_dimensions() {
  return detail::timed([] {
    CheckResult r{"dimension reproduction", true, 0.0, 0.0, "", 0.0};
    for (std::int64_t n = 1; n <= 50; ++n)
      if (sym_dimension(2, static_cast<int>(n)) != (n + 1) * (n + 2) * (n + 3) / 6) {
        r.passed = false;
        r.detail += "M=2 N=" + std::to_string(n) + " mismatch; ";
      }
    std::int64_t full = 1;
    for (int n = 1; n <= 6; ++n) {
      full *= 9;
      const std::int64_t s = sym_dimension(3, n);
      if (s != detail::count_multisets(9, n)) {
        r.passed = false;
        r.detail += "M=3 N=" + std::to_string(n) + " mismatch; ";
      }
      r.detail += "N=" + std::to_string(n) + ":" + std::to_string(full) + "/" + std::to_string(s) + " ";
    }
    r.value = r.passed ? 0.0 : 1.0;
    return r;
  });
}

/// Criterion 2: every appendix identity on the symmetric subspace.
inline CheckResult check_appendix(const std::vector<int>& systems = {2, 3}, double tol = 1e-12) {
  return detail::timed([&] {
    CheckResult r{"appendix identities", true, 0.0, tol, "", 0.0};
    long count = 0;
    for (int n : systems) {
      const SymBasis basis(3, n);
      for (const auto& c : check_appendix_identities(basis)) {
        ++count;
        r.value = std::max(r.value, c.residual);
        if (c.residual > tol) r.detail += "row " + std::to_string(c.row) + " N=" + std::to_string(n) + "; ";
      }
    }
    r.passed = r.value <= tol;
    r.detail = std::to_string(count) + " identity checks " + r.detail;
    return r;
  });
}

/// Criterion 3: symmetric propagation embedded vs full-space propagation.
inline CheckResult check_oracle(int models, std::uint64_t seed, PhysicalityStats* phys = nullptr, double tol = 1e-8) {
  return detail::timed([&] {
    CheckResult r{"oracle equivalence", true, 0.0, tol, "", 0.0};
    std::mt19937_64 rng(seed);
    const std::vector<double> times{0.1, 0.4, 0.9, 1.6, 2.5};
    double worst_sym_resid = 0.0;
    for (int k = 0; k < models; ++k) {
      const int m = (k % 2 == 0) ? 2 : 3;
      const int n = ((k / 2) % 2 == 0) ? 2 : 3;
      const SInDiPModel model = random_model(m, rng);
      const SuperMatrix l1 = single_system_liouvillian(model);
      const BasisPtr basis = make_basis(m, n);
      const SymLiouvillian l = assemble_sym_liouvillian(l1, basis);
      const SymState x0 = detail::random_symmetric_state(basis, rng);
      PropagationSpec spec;
      spec.t_grid = times;
      const auto traj = propagate(l, x0, spec);
      const SparseMatrix lf = full_liouvillian(l1, n);
      CVector v = embed(x0).v;
      double t_prev = 0.0;
      for (std::size_t i = 0; i < times.size(); ++i) {
        v = full_propagate(lf, v, times[i] - t_prev);
        t_prev = times[i];
        const CVector e = embed(traj[i]).v;
        r.value = std::max(r.value, (e - v).norm() / v.norm());
        worst_sym_resid = std::max(worst_sym_resid, project(FullState{m, n, v}).residual);
        if (phys) phys->add(traj[i]);
      }
    }
    r.passed = r.value <= tol && worst_sym_resid <= 1e-9;
    r.detail = std::to_string(models) + " models x " + std::to_string(times.size()) +
               " times; max symmetry residual " + detail::fmt(worst_sym_resid);
    return r;
  });
}

/// Criterion 4: zero-temperature disentangling coefficients.
inline CheckResult check_ground_state_bch(double tol = 1e-12) {
  return detail::timed([&] {
    CheckResult r{"ground-state BCH", true, 0.0, tol, "", 0.0};
    LambdaParams p;
    p.gamma20 = 0.6;
    p.gamma21 = 1.7;
    p.N0 = 0.0;
    const LambdaCoefficients c = lambda_coefficients(p);
    const double g = p.gamma();
    for (int k = 1; k <= 10; ++k) {
      const double t = 0.5 * k / g;
      const BCHCoefficients b = bch_sl3(c, t);
      const double decay = 1.0 - std::exp(-g * t);
      const double d = std::max({std::abs(b.beta3_20 - (-2.0 * g * t / 3.0)), std::abs(b.beta3_21 - (-2.0 * g * t / 3.0)),
                                 std::abs(b.betaP20), std::abs(b.betaP21), std::abs(b.betaP10), std::abs(b.betaM10),
                                 std::abs(b.betaM21 - p.gamma21 / g * decay), std::abs(b.betaM20 - p.gamma20 / g * decay)});
      r.value = std::max(r.value, d);
    }
    r.passed = r.value <= tol;
    r.detail = "10 sample times in (0, 5/gamma]";
    return r;
  });
}

/// Criterion 5: ordered product vs exp(Xt) over the (N0, gamma ratio, t) grid.
inline CheckResult check_disentangling(int grid = 10, int times = 11, double tol = 1e-10) {
  return detail::timed([&] {
    CheckResult r{"disentangling identity", true, 0.0, tol, "", 0.0};
    long points = 0, failures = 0, fallbacks = 0;
    std::string failed;
    for (int a = 0; a < grid; ++a)
      for (int b = 0; b < grid; ++b) {
        LambdaParams p;
        p.N0 = grid > 1 ? 3.0 * a / (grid - 1) : 0.0;
        p.gamma20 = 1.0;
        p.gamma21 = grid > 1 ? std::pow(10.0, -1.0 + 2.0 * b / (grid - 1)) : 1.0;
        const LambdaCoefficients c = lambda_coefficients(p);
        for (int k = 0; k < times; ++k) {
          const double t = times > 1 ? 10.0 / p.gamma() * k / (times - 1) : 0.0;
          ++points;
          try {
            const BCHCoefficients bc = bch_sl3(c, t);
            if (bc.numerical_fallback) ++fallbacks;
            r.value = std::max(r.value, disentangling_residual(c, bc, t));
          } catch (const NumericalError& e) {
            ++failures;
            failed += "(N0=" + detail::fmt(p.N0) + ", ratio=" + detail::fmt(p.gamma21) + ", t=" + detail::fmt(t) + ": " +
                      e.what() + ") ";
          }
        }
      }
    r.passed = r.value <= tol;
    r.detail = std::to_string(points) + " points, relative max-entry residual; branch failures " +
               std::to_string(failures) + ", numerical fallbacks " + std::to_string(fallbacks) + " " + failed;
    return r;
  });
}

/// Criterion 6: numerical, disentangled and closed-form propagation of the Lambda ensemble.
inline CheckResult check_triple_agreement(int cases, std::uint64_t seed, PhysicalityStats* phys = nullptr,
                                          double tol = 1e-7) {
  return detail::timed([&] {
    CheckResult r{"triple agreement", true, 0.0, tol, "", 0.0};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> rate(0.2, 2.0), occ(0.0, 2.0), energy(0.1, 3.0), frac(0.1, 2.0);
    for (int k = 0; k < cases; ++k) {
      LambdaParams p;
      p.N = 1 + k % 4;
      p.gamma20 = rate(rng);
      p.gamma21 = rate(rng);
      p.N0 = (k % 5 == 0) ? 0.0 : occ(rng);
      p.E0 = 0.0;
      p.E1 = energy(rng);
      p.E2 = p.E1 + energy(rng);
      const double t = frac(rng) / p.gamma();
      const BasisPtr basis = make_basis(3, p.N);
      const SymState x0 = detail::random_symmetric_state(basis, rng);
      const SymLiouvillian l = assemble_sym_liouvillian(build_lambda_liouvillian(p), basis);
      PropagationSpec spec;
      spec.t_grid = {0.5 * t, t};
      const auto traj = propagate(l, x0, spec);
      const SymState an = analytic_propagate(p, x0, t);
      const SymState cf = closed_form_propagate(p, x0, t);
      const CVector& xn = traj.back().coefficients();
      r.value = std::max({r.value, (xn - an.coefficients()).norm(), (xn - cf.coefficients()).norm(),
                          (an.coefficients() - cf.coefficients()).norm()});
      if (phys) {
        for (const auto& s : traj) phys->add(s);
        phys->add(an);
        phys->add(cf);
      }
    }
    r.passed = r.value <= tol;
    r.detail = std::to_string(cases) + " cases, N = 1..4, 2-norm over coefficients";
    return r;
  });
}

/// Criterion 7 summary.
inline CheckResult check_physicality(const PhysicalityStats& s, double tol = 1e-8) {
  CheckResult r{"physicality invariants", s.ok(tol), std::max({s.max_trace_deviation, s.max_hermiticity_defect, -s.min_eigenvalue}),
                tol, "", 0.0};
  r.detail = std::to_string(s.states) + " states; trace " + detail::fmt(s.max_trace_deviation) + ", hermiticity " +
             detail::fmt(s.max_hermiticity_defect) + ", min eigenvalue " + detail::fmt(s.min_eigenvalue);
  return r;
}

/// Criterion 8: raising, lowering and Cartan actions on every basis vector, exactly.
inline CheckResult check_ladder_actions(int max_systems = 4) {
  return detail::timed([&] {
    CheckResult r{"ladder actions", true, 0.0, 0.0, "", 0.0};
    long checks = 0;
    for (int n = 1; n <= max_systems; ++n) {
      const BasisPtr basis = make_basis(3, n);
      const int q = basis->slots();
      basis->for_each([&](std::int64_t rank, const std::vector<int>& occ) {
        const SymState e = SymState::unit(basis, OccupationIndex(3, occ));
        for (int li = 0; li < q; ++li)
          for (int lj = 0; lj < q; ++lj) {
            if (li == lj) continue;
            const auto sl = static_cast<std::size_t>(li), sj = static_cast<std::size_t>(lj);
            // A+ = b^dag_li b_lj moves one unit lj -> li with weight n_lj.
            CVector want = CVector::Zero(basis->size());
            if (occ[sj] > 0) {
              std::vector<int> t = occ;
              --t[sj];
              ++t[sl];
              want(basis->rank(std::span<const int>(t))) = occ[sj];
            }
            const SymState up = apply_hop({li, lj, 1.0}, e);
            r.value = std::max(r.value, (up.coefficients() - want).cwiseAbs().maxCoeff());
            want.setZero();
            if (occ[sl] > 0) {
              std::vector<int> t = occ;
              --t[sl];
              ++t[sj];
              want(basis->rank(std::span<const int>(t))) = occ[sl];
            }
            const SymState down = apply_hops(lowering(li, lj, 3), e);
            r.value = std::max(r.value, (down.coefficients() - want).cwiseAbs().maxCoeff());
            want.setZero();
            want(rank) = 0.5 * (occ[sl] - occ[sj]);
            const SymState diag = apply_hop_diag3(li, lj, e);
            r.value = std::max(r.value, (diag.coefficients() - want).cwiseAbs().maxCoeff());
            checks += 3;
          }
      });
    }
    r.passed = r.value == 0.0;
    r.detail = std::to_string(checks) + " exact comparisons, M = 3, N = 1.." + std::to_string(max_systems);
    return r;
  });
}

} // namespace symlind
