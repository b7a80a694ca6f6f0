#pragma once

// Time propagation of symmetric states and collective one-body observables.

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "symlind/collective.hpp"
#include "symlind/error.hpp"
#include "symlind/expmv.hpp"
#include "symlind/liouville.hpp"
#include "symlind/sym_basis.hpp"

namespace symlind {

enum class Method { automatic, dense, krylov, ode };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::automatic: return "auto";
    case Method::dense: return "dense";
    case Method::krylov: return "krylov";
    case Method::ode: return "ode";
  }
  return "?";
}

inline Method parse_method(const std::string& s) {
  if (s == "auto") return Method::automatic;
  if (s == "dense") return Method::dense;
  if (s == "krylov") return Method::krylov;
  if (s == "ode") return Method::ode;
  throw InvalidArgument("unknown propagation method '" + s + "'");
}

struct PropagationSpec {
  static constexpr std::int64_t kDenseLimit = 500;

  std::vector<double> t_grid;
  Method method = Method::automatic;
  double tol = 1e-10;
  int krylov_dim = 30;

  void validate() const {
    if (t_grid.empty()) throw InvalidArgument("PropagationSpec: empty time grid");
    if (t_grid.front() < 0.0) throw InvalidArgument("PropagationSpec: t_grid[0] must be >= 0");
    for (std::size_t k = 1; k < t_grid.size(); ++k)
      if (!(t_grid[k] > t_grid[k - 1])) throw InvalidArgument("PropagationSpec: t_grid must be increasing");
    if (!(tol > 0.0 && tol <= 1e-2)) throw InvalidArgument("PropagationSpec: tol must lie in (0, 1e-2]");
    if (krylov_dim < 2) throw InvalidArgument("PropagationSpec: krylov_dim must be >= 2");
  }

  Method resolved(std::int64_t size) const {
    if (method != Method::automatic) return method;
    return size <= kDenseLimit ? Method::dense : Method::krylov;
  }
};

/// Evenly spaced grid of `count` points on [start, stop].
inline std::vector<double> linear_grid(double start, double stop, int count) {
  if (count < 1) throw InvalidArgument("linear_grid: count must be >= 1");
  if (count == 1) return {start};
  if (!(stop > start)) throw InvalidArgument("linear_grid: stop must exceed start");
  std::vector<double> g(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) g[static_cast<std::size_t>(k)] = start + (stop - start) * k / (count - 1);
  return g;
}

/// exp(t L) x for a plain sparse matrix, with the method contract of PropagationSpec.
class Propagator {
public:
  Propagator(const SparseMatrix& l, Method method, double tol, int krylov_dim = 30)
      : l_(l), method_(method), tol_(tol), krylov_dim_(krylov_dim) {
    if (method_ == Method::automatic) method_ = l.rows() <= PropagationSpec::kDenseLimit ? Method::dense : Method::krylov;
  }

  CVector step(const CVector& x, double dt) {
    if (dt == 0.0) return x;
    switch (method_) {
      case Method::dense: {
        auto it = cache_.find(dt);
        if (it == cache_.end()) it = cache_.emplace(dt, dense_expm(l_, dt)).first;
        return it->second * x;
      }
      case Method::krylov: return krylov_expmv(l_, x, dt, tol_, KrylovOptions{krylov_dim_});
      case Method::ode: return ode_expmv(l_, x, dt, tol_);
      case Method::automatic: break;
    }
    throw InvalidArgument("Propagator: unresolved method");
  }

  Method method() const { return method_; }

private:
  const SparseMatrix& l_;
  Method method_;
  double tol_;
  int krylov_dim_;
  std::map<double, Eigen::MatrixXcd> cache_;
};

inline void require_unit_trace(const SymState& rho0, double tol = 1e-8) {
  if (std::abs(trace_functional(rho0) - 1.0) > tol)
    throw InvalidArgument("initial state does not have unit trace");
}

/// States at every time of spec.t_grid, each propagated from the previous one.
inline std::vector<SymState> propagate(const SymLiouvillian& l, const SymState& rho0, const PropagationSpec& spec) {
  spec.validate();
  if (!(rho0.basis() == l.basis())) throw InvalidArgument("propagate: state and Liouvillian use different bases");
  require_unit_trace(rho0);
  Propagator prop(l.matrix(), spec.resolved(l.size()), spec.tol, spec.krylov_dim);
  std::vector<SymState> out;
  out.reserve(spec.t_grid.size());
  CVector x = rho0.coefficients();
  double t_prev = 0.0;
  for (double t : spec.t_grid) {
    x = prop.step(x, t - t_prev);
    t_prev = t;
    out.push_back(rho0.with_coefficients(x));
  }
  return out;
}

/// Single state at time t.
inline SymState propagate_to(const SymLiouvillian& l, const SymState& rho0, double t, Method method = Method::automatic,
                             double tol = 1e-10) {
  PropagationSpec spec;
  spec.t_grid = {t};
  spec.method = method;
  spec.tol = tol;
  return propagate(l, rho0, spec).front();
}

/// Named single-system operator O for the collective observable <sum_mu O^(mu)>.
struct ObservableSpec {
  std::string name;
  Operator op;

  bool is_hermitian(double tol = 1e-12) const { return (op - op.adjoint()).cwiseAbs().maxCoeff() <= tol; }
};

/// Tr((sum_mu O^(mu)) rho).
///
/// Only purely diagonal targets survive the trace, so for each diagonal
/// index d the contributing sources are d - e_ii + e_ki with weight O_ik n_ki.
inline cd collective_expectation(const Operator& op, const SymState& state) {
  const SymBasis& b = state.basis();
  const int m = b.levels();
  if (op.rows() != m || op.cols() != m) throw InvalidArgument("collective_expectation: operator dimension differs from M");
  cd total{};
  std::vector<int> n(static_cast<std::size_t>(b.slots()), 0);
  detail::for_each_composition(b.systems(), m, [&](const std::vector<int>& d) {
    std::fill(n.begin(), n.end(), 0);
    for (int i = 0; i < m; ++i) n[static_cast<std::size_t>(slot_index(i, i, m))] = d[static_cast<std::size_t>(i)];
    for (int i = 0; i < m; ++i) {
      const int ii = slot_index(i, i, m);
      if (n[static_cast<std::size_t>(ii)] == 0) continue;
      total += op(i, i) * double(n[static_cast<std::size_t>(ii)]) * state[b.rank(std::span<const int>(n))];
      for (int k = 0; k < m; ++k) {
        if (k == i || op(i, k) == cd{}) continue;
        const int ki = slot_index(k, i, m);
        --n[static_cast<std::size_t>(ii)];
        ++n[static_cast<std::size_t>(ki)];
        total += op(i, k) * state[b.rank(std::span<const int>(n))];
        ++n[static_cast<std::size_t>(ii)];
        --n[static_cast<std::size_t>(ki)];
      }
    }
  });
  return total;
}

inline cd collective_expectation(const ObservableSpec& obs, const SymState& state) {
  return collective_expectation(obs.op, state);
}

/// rho1_ij = <sum_mu (|j><i|)^(mu)> / (N Tr rho).
inline Operator reduced_single_density(const SymState& state) {
  const cd tr = trace_functional(state);
  if (std::abs(tr) == 0.0) throw InvalidArgument("reduced_single_density: state has zero trace");
  const int m = state.levels();
  Operator rho(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) rho(i, j) = collective_expectation(dyad(j, i, m), state);
  return rho / (double(state.systems()) * tr);
}

/// Smallest eigenvalue of the Hermitian part of the reduced one-body density.
inline double positivity_check(const SymState& state) {
  const Operator r = reduced_single_density(state);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (r + r.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// CSV: time, then <name>_re,<name>_im for every observable.
inline void write_trajectory_csv(std::ostream& os, const std::vector<double>& times,
                                 const std::vector<ObservableSpec>& observables, const std::vector<SymState>& states) {
  if (times.size() != states.size()) throw InvalidArgument("write_trajectory_csv: times and states differ in length");
  os << "time";
  for (const auto& o : observables) os << ',' << o.name << "_re," << o.name << "_im";
  os << '\n';
  for (std::size_t k = 0; k < times.size(); ++k) {
    os << format_double(times[k]);
    for (const auto& o : observables) {
      const cd v = collective_expectation(o, states[k]);
      os << ',' << format_double(v.real()) << ',' << format_double(v.imag());
    }
    os << '\n';
  }
}

} // namespace symlind
