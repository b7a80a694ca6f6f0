#pragma once

// Action of exp(tA) on a vector for a sparse complex A.
//
//  * dense_expm_action: Pade scaling-and-squaring on the dense matrix
//  * krylov_expmv:      Arnoldi projection with adaptive sub-stepping and the
//                       a-posteriori error estimate of Sidje's EXPOKIT expv
//  * ode_expmv:         embedded Runge-Kutta-Fehlberg 7(8) integration of x' = Ax

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <unsupported/Eigen/MatrixFunctions>
#include <boost/numeric/odeint.hpp>

#include "symlind/error.hpp"
#include "symlind/liouville.hpp"

namespace symlind {


/// max_i sum_j |A_ij|
inline double inf_norm(const SparseMatrix& a) {
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(a.rows());
  for (Eigen::Index c = 0; c < a.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(a, c); it; ++it) rows(it.row()) += std::abs(it.value());
  return rows.size() ? rows.maxCoeff() : 0.0;
}

inline Eigen::MatrixXcd dense_expm(const SparseMatrix& a, double t) {
  Eigen::MatrixXcd d = Eigen::MatrixXcd(a) * t;
  return d.exp();
}

inline CVector dense_expm_action(const SparseMatrix& a, const CVector& v, double t) { return dense_expm(a, t) * v; }

struct KrylovOptions {
  int dim = 30;
  int max_rejections = 10;
  long max_steps = 100000;
};

/// exp(tA) v with estimated error <= tol * ||v|| (2-norm, relative).
inline CVector krylov_expmv(const SparseMatrix& a, const CVector& v, double t, double tol, KrylovOptions opts = {}) {
  const Eigen::Index n = v.size();
  if (a.rows() != n || a.cols() != n) throw InvalidArgument("krylov_expmv: dimension mismatch");
  const double normv = v.norm();
  if (normv == 0.0 || t == 0.0) return v;
  const double anorm = inf_norm(a);
  if (anorm == 0.0) return v;

  const int m = static_cast<int>(std::min<Eigen::Index>(opts.dim, n));
  const double gamma = 0.9;
  const double delta = 1.2;
  const double t_out = std::abs(t);
  const double sgn = t < 0 ? -1.0 : 1.0;
  const double btol = 1e-14 * anorm;
  // Local error budget per unit time, relative to the input norm.
  const double abstol = 0.1 * tol * normv / t_out;

  auto round2 = [](double x) {
    const double s = std::pow(10.0, std::floor(std::log10(x)) - 1.0);
    return std::ceil(x / s) * s;
  };

  double xm = 1.0 / m;
  const double fact = std::pow((m + 1) / std::numbers::e, m + 1) * std::sqrt(2 * std::numbers::pi * (m + 1));
  double t_new = (1.0 / anorm) * std::pow((fact * abstol) / (4.0 * normv * anorm), xm);
  t_new = std::min(round2(t_new), t_out);

  CVector w = v;
  double beta = normv;
  double t_now = 0.0;
  long steps = 0;
  Eigen::MatrixXcd basis(n, m + 1);
  Eigen::MatrixXcd h(m + 2, m + 2);

  while (t_now < t_out) {
    if (++steps > opts.max_steps) throw NumericalError("krylov_expmv: step budget exhausted", t_out - t_now);
    double t_step = std::min(t_out - t_now, t_new);
    basis.col(0) = w / beta;
    h.setZero();
    int k1 = 2;
    int mb = m;
    for (int j = 0; j < m; ++j) {
      CVector p = a * basis.col(j);
      // Modified Gram-Schmidt, one re-orthogonalisation pass.
      for (int pass = 0; pass < 2; ++pass)
        for (int i = 0; i <= j; ++i) {
          const std::complex<double> hij = basis.col(i).dot(p);
          h(i, j) += hij;
          p -= hij * basis.col(i);
        }
      const double s = p.norm();
      if (s < btol) {
        k1 = 0;
        mb = j + 1;
        t_step = t_out - t_now;
        break;
      }
      h(j + 1, j) = s;
      basis.col(j + 1) = p / s;
    }
    double avnorm = 0.0;
    if (k1 != 0) {
      h(m + 1, m) = 1.0;
      avnorm = (a * basis.col(m)).norm();
    }

    Eigen::MatrixXcd f;
    double err_loc = 0.0;
    for (int reject = 0;; ++reject) {
      const int mx = mb + k1;
      f = (sgn * t_step * h.topLeftCorner(mx, mx)).exp();
      if (k1 == 0) {
        err_loc = 0.0;
        break;
      }
      const double phi1 = std::abs(beta * f(m, 0));
      const double phi2 = std::abs(beta * f(m + 1, 0) * avnorm);
      if (phi1 > 10.0 * phi2) {
        err_loc = phi2;
        xm = 1.0 / m;
      } else if (phi1 > phi2) {
        err_loc = (phi1 * phi2) / (phi1 - phi2);
        xm = 1.0 / m;
      } else {
        err_loc = phi1;
        xm = 1.0 / std::max(1, m - 1);
      }
      if (!std::isfinite(err_loc)) throw NumericalError("krylov_expmv: non-finite error estimate", err_loc);
      if (err_loc <= delta * t_step * abstol) break;
      if (reject >= opts.max_rejections)
        throw NumericalError("krylov_expmv: step rejected too often", err_loc / (t_step * abstol));
      t_step = round2(gamma * t_step * std::pow(t_step * abstol / err_loc, xm));
    }
    const int mx = mb + std::max(0, k1 - 1);
    w = basis.leftCols(mx) * (beta * f.col(0).head(mx));
    beta = w.norm();
    if (!std::isfinite(beta)) throw NumericalError("krylov_expmv: solution diverged", beta);
    t_now += t_step;
    if (err_loc > 0.0)
      t_new = round2(gamma * t_step * std::pow(t_step * abstol / err_loc, xm));
    else
      t_new = t_out - t_now;
    if (beta == 0.0) break;
  }
  return w;
}

/// Adaptive Runge-Kutta-Fehlberg 7(8) integration of x' = Ax over [0, t].
inline CVector ode_expmv(const SparseMatrix& a, const CVector& v, double t, double tol) {
  namespace ode = boost::numeric::odeint;
  using State = std::vector<std::complex<double>>;
  if (t == 0.0) return v;
  State x(v.data(), v.data() + v.size());
  const double scale = std::max(v.norm(), 1e-300);
  auto rhs = [&a](const State& in, State& out, double) {
    out.resize(in.size());
    Eigen::Map<const CVector> xi(in.data(), static_cast<Eigen::Index>(in.size()));
    Eigen::Map<CVector> yo(out.data(), static_cast<Eigen::Index>(out.size()));
    yo.noalias() = a * xi;
  };
  auto stepper = ode::make_controlled<ode::runge_kutta_fehlberg78<State>>(1e-3 * tol * scale, 1e-3 * tol);
  const double anorm = std::max(inf_norm(a), 1e-300);
  ode::integrate_adaptive(stepper, rhs, x, 0.0, t, std::min(t, 0.1 / anorm));
  CVector out(v.size());
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    out(i) = x[static_cast<std::size_t>(i)];
    if (!std::isfinite(std::abs(out(i)))) throw NumericalError("ode_expmv: solution diverged", 0.0);
  }
  return out;
}

} // namespace symlind
