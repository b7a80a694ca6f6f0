#pragma once

// Ensemble of N three-level Lambda atoms (levels 0 < 1 < 2, decay 2->1 and
// 2->0) in a thermal bath with occupation N0.
//
// The collective generator splits into
//   alpha1 * 1  +  sum_{k=2..6} alpha_k A3^(k)  +  X,
// where the five A3^(k) act on the coherence slots 21,12,01,10,20,02 only and
// X = sum alpha S is an element of the sl(3) spanned by
//   S+^20 = A+^{22,00}, S+^21 = A+^{22,11}, S-^20, S-^21, S3^20, S3^21
// (plus S+-^10 = A+-^{11,00}, which appear after disentangling).  The two
// parts commute, so exp(Lt) = e^{alpha1 t} prod exp(alpha_k A3^(k) t) exp(Xt).
//
// exp(Xt) is disentangled as
//   exp(b+20 S+20) exp(b+10 S+10) exp(b+21 S+21) exp(b3_21 S3^21) exp(b3_20 S3^20)
//   exp(b-21 S-21) exp(b-10 S-10) exp(b-20 S-20),
// i.e. a lower-unit / diagonal / upper-unit factorization in the 3x3
// representation |00) -> 0, |11) -> 1, |22) -> 2.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "symlind/collective.hpp"
#include "symlind/error.hpp"
#include "symlind/liouville.hpp"
#include "symlind/sym_basis.hpp"

namespace symlind {

struct LambdaParams {
  int N = 1;
  double gamma20 = 1.0;
  double gamma21 = 1.0;
  double N0 = 0.0;
  double E0 = 0.0;
  double E1 = 1.0;
  double E2 = 2.0;

  void validate() const {
    if (N < 1) throw InvalidArgument("LambdaParams: N must be >= 1");
    if (!(gamma20 > 0.0) || !(gamma21 > 0.0)) throw InvalidArgument("LambdaParams: decay rates must be > 0");
    if (!(N0 >= 0.0)) throw InvalidArgument("LambdaParams: N0 must be >= 0");
    if (!(E0 < E1 && E1 < E2)) throw InvalidArgument("LambdaParams: energies must satisfy E0 < E1 < E2");
  }

  double gamma() const { return gamma20 + gamma21; }
  double n0_tilde() const { return 2.0 * N0 + 1.0; }
  double n0_plus() const { return N0 + 1.0; }
  double n0_minus() const { return N0 - 1.0; }
  double e_bar() const { return (E0 + E1 + E2) / 3.0; }
  double e_tilde(int i) const {
    const double e[3] = {E0, E1, E2};
    return 2.0 * (e_bar() - e[i]);
  }
};

struct LambdaCoefficients {
  cd alpha1, alpha2, alpha3, alpha4, alpha5, alpha6;
  cd alphaP21, alphaP20, alphaM21, alphaM20, alpha3_21, alpha3_20;
};

inline LambdaCoefficients lambda_coefficients(const LambdaParams& p) {
  p.validate();
  const double g = p.gamma(), nt = p.n0_tilde(), np = p.n0_plus(), nm = p.n0_minus();
  const double c20 = nm * p.gamma20 - p.gamma21 * nt;
  const double c21 = nm * p.gamma21 - p.gamma20 * nt;
  const double et0 = p.e_tilde(0);
  LambdaCoefficients c;
  c.alpha1 = -g * nt * p.N / 3.0;
  c.alpha2 = -4.0 * I_unit * (2.0 * p.E0 + p.E2 - 3.0 * p.e_bar());
  c.alpha3 = -3.0 * I_unit * et0 + c20 / 3.0;
  c.alpha4 = -2.0 * I_unit * (p.E2 - p.E0) + c21 / 3.0;
  c.alpha5 = 3.0 * I_unit * et0 + c20 / 3.0;
  c.alpha6 = 2.0 * I_unit * (p.E2 - p.E0) + c21 / 3.0;
  c.alphaP21 = p.N0 * p.gamma21;
  c.alphaP20 = p.N0 * p.gamma20;
  c.alphaM21 = p.gamma21 * np;
  c.alphaM20 = p.gamma20 * np;
  c.alpha3_20 = 2.0 / 3.0 * c20;
  c.alpha3_21 = 2.0 / 3.0 * c21;
  return c;
}

/// Single-atom generator: -i[H, .] + sum over channels 2->l of
///   (N0+1) gamma (s- . s+ - {s+ s-, .}/2) + N0 gamma (s+ . s- - {s- s+, .}/2),
/// with H = Et0 sigma3^02 + Et1 sigma3^12 and s+ = |2><l|.
inline SuperMatrix lambda_single_atom(const LambdaParams& p) {
  p.validate();
  constexpr int m = 3;
  const Operator id = Operator::Identity(m, m);
  const Operator h = p.e_tilde(0) * sigma3(0, 2, m) + p.e_tilde(1) * sigma3(1, 2, m);
  Eigen::MatrixXcd l = -I_unit * (left_right_supermatrix(h, id).matrix() - left_right_supermatrix(id, h).matrix());
  auto dissipator = [&](const Operator& jump, double rate) {
    const Operator jj = jump.adjoint() * jump;
    l += rate * (left_right_supermatrix(jump, jump.adjoint()).matrix() -
                 0.5 * (left_right_supermatrix(jj, id).matrix() + left_right_supermatrix(id, jj).matrix()));
  };
  const std::array<std::pair<int, double>, 2> channels{{{0, p.gamma20}, {1, p.gamma21}}};
  for (const auto& [low, g] : channels) {
    const Operator up = sigma_plus(2, low, m);
    const Operator down = sigma_minus(2, low, m);
    dissipator(down, p.n0_plus() * g);
    if (p.N0 > 0.0) dissipator(up, p.N0 * g);
  }
  return SuperMatrix(std::move(l));
}

inline HopTermList build_lambda_liouvillian(const LambdaParams& p) { return bosonize(lambda_single_atom(p)); }

namespace lambda_slots {
inline constexpr int s00 = 0, s01 = 1, s02 = 2, s10 = 3, s11 = 4, s12 = 5, s20 = 6, s21 = 7, s22 = 8;
}

/// The same generator written out term by term in collective superoperators.
inline HopTermList lambda_coefficient_table(const LambdaParams& p) {
  using namespace lambda_slots;
  const LambdaCoefficients c = lambda_coefficients(p);
  constexpr int m = 3;
  return raising(s22, s00, m, c.alphaP20) + raising(s22, s11, m, c.alphaP21) + lowering(s22, s00, m, c.alphaM20) +
         lowering(s22, s11, m, c.alphaM21) + cartan(s22, s00, m, c.alpha3_20) + cartan(s22, s11, m, c.alpha3_21) +
         cartan(s21, s12, m, c.alpha2) + cartan(s21, s01, m, c.alpha3) + cartan(s20, s10, m, c.alpha4) +
         cartan(s12, s10, m, c.alpha5) + cartan(s02, s01, m, c.alpha6) +
         number_operator(m, -p.gamma() * p.n0_tilde() / 3.0);
}

// ---------------------------------------------------------------------------
// sl(3) representation and disentangling

/// Generator matrices in the 3x3 representation: S+^ab -> E_ab, S-^ab -> E_ba,
/// S3^ab -> (E_aa - E_bb)/2, with a > b in {0,1,2}.
inline Eigen::Matrix3cd sl3_raise(int a, int b) {
  Eigen::Matrix3cd e = Eigen::Matrix3cd::Zero();
  e(a, b) = 1.0;
  return e;
}
inline Eigen::Matrix3cd sl3_lower(int a, int b) { return sl3_raise(b, a); }
inline Eigen::Matrix3cd sl3_cartan(int a, int b) {
  Eigen::Matrix3cd e = Eigen::Matrix3cd::Zero();
  e(a, a) = 0.5;
  e(b, b) = -0.5;
  return e;
}

/// X = sum alpha S for the sl(3) part of the Lambda generator.
inline Eigen::Matrix3cd sl3_representation(const LambdaCoefficients& c) {
  return c.alphaP20 * sl3_raise(2, 0) + c.alphaP21 * sl3_raise(2, 1) + c.alphaM20 * sl3_lower(2, 0) +
         c.alphaM21 * sl3_lower(2, 1) + c.alpha3_20 * sl3_cartan(2, 0) + c.alpha3_21 * sl3_cartan(2, 1);
}

enum class SpectralBranch { general, degenerate_pair, triple_degenerate };

inline const char* branch_name(SpectralBranch b) {
  switch (b) {
    case SpectralBranch::general: return "general";
    case SpectralBranch::degenerate_pair: return "degenerate_pair";
    case SpectralBranch::triple_degenerate: return "triple_degenerate";
  }
  return "?";
}

/// exp(Xt) = c0 + c1 X + c2 X^2, with c_k = f_k / D when the spectrum is simple.
struct SpectralData {
  cd lambda, mu, nu;
  cd D, f0, f1, f2;
  std::array<cd, 3> c{};
  SpectralBranch branch = SpectralBranch::general;
};

inline constexpr double kDegeneracyTol = 1e-8;
// Below this relative gap f_k / D loses too many digits and the
// coefficients c_k come from divided differences instead.
inline constexpr double kSeparationTol = 1e-3;

namespace detail {

/// Newton coefficients of exp(zt) at (l, m, n) via the exponential of a
/// bidiagonal matrix; valid for coincident nodes.
inline std::array<cd, 3> hermite_exp_coefficients(cd l, cd m, cd n, double t) {
  Eigen::Matrix3cd j = Eigen::Matrix3cd::Zero();
  j(0, 0) = l * t;
  j(1, 1) = m * t;
  j(2, 2) = n * t;
  j(0, 1) = t;
  j(1, 2) = t;
  const Eigen::Matrix3cd e = j.exp();
  const cd d1 = e(0, 1);  // f[l, m]
  const cd d2 = e(0, 2);  // f[l, m, n]
  const cd c2 = d2;
  const cd c1 = d1 - (l + m) * c2;
  const cd c0 = e(0, 0) - l * d1 + l * m * c2;
  return {c0, c1, c2};
}

} // namespace detail

inline SpectralData sl3_spectral(const Eigen::Matrix3cd& x, double t) {
  Eigen::ComplexEigenSolver<Eigen::Matrix3cd> es(x, false);
  if (es.info() != Eigen::Success) throw NumericalError("sl3_spectral: eigenvalue computation failed", 0.0);
  std::array<cd, 3> ev{es.eigenvalues()(0), es.eigenvalues()(1), es.eigenvalues()(2)};
  const double scale = std::max({1.0, std::abs(ev[0]), std::abs(ev[1]), std::abs(ev[2])});
  auto close = [&](cd a, cd b, double tol) { return std::abs(a - b) <= tol * scale; };

  SpectralData s;
  const int pairs = int(close(ev[0], ev[1], kDegeneracyTol)) + int(close(ev[0], ev[2], kDegeneracyTol)) +
                    int(close(ev[1], ev[2], kDegeneracyTol));
  if (pairs >= 2) {
    s.branch = SpectralBranch::triple_degenerate;
  } else if (pairs == 1) {
    s.branch = SpectralBranch::degenerate_pair;
    // Put the simple eigenvalue first: lambda distinct, mu == nu.
    if (close(ev[0], ev[1], kDegeneracyTol)) std::swap(ev[0], ev[2]);
    else if (close(ev[0], ev[2], kDegeneracyTol)) std::swap(ev[0], ev[1]);
  }
  s.lambda = ev[0];
  s.mu = ev[1];
  s.nu = ev[2];
  const cd el = std::exp(s.lambda * t), em = std::exp(s.mu * t), en = std::exp(s.nu * t);
  const cd l = s.lambda, m = s.mu, n = s.nu;

  switch (s.branch) {
    case SpectralBranch::general: {
      s.D = (m - l) * (n - l) * (m - n);
      s.f0 = (m * m * n - m * n * n) * el + (n * n * l - n * l * l) * em + (l * l * m - l * m * m) * en;
      s.f1 = (n * n - m * m) * el + (l * l - n * n) * em + (m * m - l * l) * en;
      s.f2 = (m - n) * el + (n - l) * em + (l - m) * en;
      const double gap = std::min({std::abs(l - m), std::abs(l - n), std::abs(m - n)});
      if (gap > kSeparationTol * scale)
        s.c = {s.f0 / s.D, s.f1 / s.D, s.f2 / s.D};
      else
        s.c = detail::hermite_exp_coefficients(l, m, n, t);
      break;
    }
    case SpectralBranch::degenerate_pair: {
      s.D = l - m;
      s.f0 = l * em - m * el;
      s.f1 = el - em;
      s.f2 = 0.0;
      // The reduced forms need a diagonalizable X: (X - lambda)(X - mu) = 0.
      const Eigen::Matrix3cd id = Eigen::Matrix3cd::Identity();
      const double resid = ((x - l * id) * (x - m * id)).cwiseAbs().maxCoeff();
      if (resid <= 1e-10 * scale * scale && std::abs(l - m) > kSeparationTol * scale)
        s.c = {s.f0 / s.D, s.f1 / s.D, cd{}};
      else
        s.c = detail::hermite_exp_coefficients(l, m, n, t);
      break;
    }
    case SpectralBranch::triple_degenerate: {
      s.D = 1.0;
      s.c = detail::hermite_exp_coefficients(l, m, n, t);
      s.f0 = s.c[0];
      s.f1 = s.c[1];
      s.f2 = s.c[2];
      break;
    }
  }
  return s;
}

inline SpectralData sl3_spectral(const LambdaCoefficients& c, double t) { return sl3_spectral(sl3_representation(c), t); }

struct BCHCoefficients {
  cd beta3_21, beta3_20, betaP21, betaP20, betaP10, betaM21, betaM20, betaM10;
  bool numerical_fallback = false;
  SpectralBranch branch = SpectralBranch::general;
};

/// Ordered product of the eight disentangled factors in the 3x3 representation.
inline Eigen::Matrix3cd sl3_ordered_product(const BCHCoefficients& b) {
  auto ex = [](const Eigen::Matrix3cd& g) -> Eigen::Matrix3cd { return g.exp(); };
  return ex(b.betaP20 * sl3_raise(2, 0)) * ex(b.betaP10 * sl3_raise(1, 0)) * ex(b.betaP21 * sl3_raise(2, 1)) *
         ex(b.beta3_21 * sl3_cartan(2, 1)) * ex(b.beta3_20 * sl3_cartan(2, 0)) * ex(b.betaM21 * sl3_lower(2, 1)) *
         ex(b.betaM10 * sl3_lower(1, 0)) * ex(b.betaM20 * sl3_lower(2, 0));
}

namespace detail {

/// -2 log(e) on the principal branch; rejects values the logarithm cannot take.
inline cd cartan_log(cd e, const char* expr) {
  if (!std::isfinite(e.real()) || !std::isfinite(e.imag()))
    throw NumericalError(std::string("bch_sl3: ") + expr + " is not finite", std::abs(e));
  if (e == cd{}) throw NumericalError(std::string("bch_sl3: ") + expr + " vanishes", 0.0);
  if (e.imag() == 0.0 && e.real() < 0.0)
    throw NumericalError(std::string("bch_sl3: ") + expr + " is negative, logarithm branch undefined", e.real());
  return -2.0 * std::log(e);
}

} // namespace detail

/// Coefficients from an LDU factorization of G = exp(Xt).
inline BCHCoefficients bch_ldu(const Eigen::Matrix3cd& g) {
  BCHCoefficients b;
  const cd d0 = g(0, 0);
  b.beta3_20 = detail::cartan_log(d0, "G00");
  b.betaP10 = g(1, 0) / d0;
  b.betaP20 = g(2, 0) / d0;
  b.betaM10 = g(0, 1) / d0;
  b.betaM20 = g(0, 2) / d0;
  const cd d1 = g(1, 1) - b.betaP10 * d0 * b.betaM10;
  b.beta3_21 = detail::cartan_log(d1, "G11 - G10 G01 / G00");
  b.betaM21 = (g(1, 2) - b.betaP10 * d0 * b.betaM20) / d1;
  b.betaP21 = (g(2, 1) - b.betaP20 * d0 * b.betaM10) / d1;
  b.numerical_fallback = true;
  return b;
}

/// Closed-form disentangling coefficients at time t.
///
/// The closed forms hold for Cartan generators normalised as n_a - n_b; the
/// representation here uses (n_a - n_b)/2, so the Cartan coefficients enter
/// halved and the resulting beta3 are doubled.
inline BCHCoefficients bch_sl3(const LambdaCoefficients& c, double t) {
  if (t == 0.0) return {};
  const Eigen::Matrix3cd x = sl3_representation(c);
  const SpectralData s = sl3_spectral(x, t);
  if (s.branch == SpectralBranch::triple_degenerate) {
    BCHCoefficients b = bch_ldu((x * t).exp());
    b.branch = s.branch;
    return b;
  }
  const auto [f0, f1, f2] = s.c;
  const cd a320 = 0.5 * c.alpha3_20, a321 = 0.5 * c.alpha3_21;
  const cd ap20 = c.alphaP20, am20 = c.alphaM20, ap21 = c.alphaP21, am21 = c.alphaM21;

  BCHCoefficients b;
  b.branch = s.branch;
  const cd e20 = -a320 * f1 + f0 + f2 * (ap20 * am20 + a320 * a320);
  b.beta3_20 = detail::cartan_log(e20, "exp(-beta3_20)");
  const cd inv20 = 1.0 / e20;
  b.betaP10 = ap20 * f2 * am21 * inv20;
  b.betaP20 = ap20 * inv20 * (a321 * f2 + f1);
  b.betaM10 = am20 * f2 * ap21 * inv20;
  b.betaM20 = am20 * inv20 * (a321 * f2 + f1);
  const cd e21 = -e20 * b.betaP10 * b.betaM10 + (-a321 * f1 + f0 + f2 * (ap21 * am21 + a321 * a321));
  b.beta3_21 = detail::cartan_log(e21, "exp(-beta3_21)");
  const cd inv21 = 1.0 / e21;
  b.betaP21 = inv21 * (-b.betaM10 * b.betaP20 * e20 + ap21 * (a320 * f2 + f1));
  b.betaM21 = inv21 * (-b.betaP10 * b.betaM20 * e20 + am21 * (a320 * f2 + f1));
  return b;
}

inline BCHCoefficients bch_sl3(const LambdaParams& p, double t) { return bch_sl3(lambda_coefficients(p), t); }

/// bch_sl3 along an increasing grid, removing 2*pi jumps in the imaginary
/// part of the Cartan coefficients.
inline std::vector<BCHCoefficients> bch_sl3_series(const LambdaCoefficients& c, const std::vector<double>& t_grid) {
  std::vector<BCHCoefficients> out;
  out.reserve(t_grid.size());
  auto unwrap = [](cd prev, cd cur) {
    // beta3 = -2 log(.), so branch jumps are multiples of 4 pi.
    const double period = 4.0 * std::numbers::pi;
    const double k = std::round((cur.imag() - prev.imag()) / period);
    return cd(cur.real(), cur.imag() - k * period);
  };
  for (double t : t_grid) {
    BCHCoefficients b = bch_sl3(c, t);
    if (!out.empty()) {
      if (std::abs(b.beta3_20.imag() - out.back().beta3_20.imag()) > std::numbers::pi)
        b.beta3_20 = unwrap(out.back().beta3_20, b.beta3_20);
      if (std::abs(b.beta3_21.imag() - out.back().beta3_21.imag()) > std::numbers::pi)
        b.beta3_21 = unwrap(out.back().beta3_21, b.beta3_21);
    }
    out.push_back(b);
  }
  return out;
}

/// max|P - G| / max(1, max|G|), P the ordered product and G = exp(Xt).
inline double disentangling_residual(const LambdaCoefficients& c, const BCHCoefficients& b, double t) {
  const Eigen::Matrix3cd g = (sl3_representation(c) * t).exp();
  const Eigen::Matrix3cd p = sl3_ordered_product(b);
  return (p - g).cwiseAbs().maxCoeff() / std::max(1.0, g.cwiseAbs().maxCoeff());
}

// ---------------------------------------------------------------------------
// Exact exponentials of single generators on symmetric states

/// exp(beta * b^dag_alpha b_beta) applied to `state`.
///
/// Off-diagonal hops: the series terminates after n_beta terms and the k-th
/// term carries C(n_beta, k) beta^k.  Diagonal: e^{beta n_alpha}.
inline SymState ladder_exponential(const HopTerm& term, const SymState& state) {
  const SymBasis& b = state.basis();
  const int a = term.alpha, s = term.beta;
  if (a < 0 || s < 0 || a >= b.slots() || s >= b.slots()) throw InvalidArgument("ladder_exponential: slot out of range");
  const cd beta = term.coeff;
  const CVector& x = state.coefficients();
  if (a == s) {
    SymState out = state;
    CVector& y = out.coefficients();
    b.for_each([&](std::int64_t r, const std::vector<int>& n) { y(r) *= std::exp(beta * double(n[static_cast<std::size_t>(a)])); });
    return out;
  }
  if (beta == cd{}) return state;
  SymState out(state.basis_ptr());
  CVector& y = out.coefficients();
  std::vector<int> m;
  b.for_each([&](std::int64_t r, const std::vector<int>& n) {
    if (x(r) == cd{}) return;
    m = n;
    cd w = x(r);
    y(r) += w;
    const int top = n[static_cast<std::size_t>(s)];
    for (int k = 1; k <= top; ++k) {
      w *= beta * double(top - k + 1) / double(k);
      --m[static_cast<std::size_t>(s)];
      ++m[static_cast<std::size_t>(a)];
      y(b.rank(std::span<const int>(m))) += w;
    }
  });
  return out;
}

/// exp(beta * (n_li - n_lj)/2) applied to `state`.
inline SymState ladder_exponential_diag3(int li, int lj, cd beta, const SymState& state) {
  if (li == lj) throw InvalidArgument("ladder_exponential_diag3: slots must differ");
  SymState out = state;
  CVector& y = out.coefficients();
  state.basis().for_each([&](std::int64_t r, const std::vector<int>& n) {
    y(r) *= std::exp(0.5 * beta * double(n[static_cast<std::size_t>(li)] - n[static_cast<std::size_t>(lj)]));
  });
  return out;
}

/// exp(L t) rho0 through the disentangled product, each factor applied exactly.
inline SymState analytic_propagate(const LambdaParams& p, const SymState& rho0, double t) {
  using namespace lambda_slots;
  if (rho0.levels() != 3) throw InvalidArgument("analytic_propagate: state must have M = 3");
  if (rho0.systems() != p.N) throw InvalidArgument("analytic_propagate: state N differs from params N");
  const LambdaCoefficients c = lambda_coefficients(p);
  if (t == 0.0) return rho0;
  const BCHCoefficients b = bch_sl3(c, t);
  SymState x = rho0;
  x = ladder_exponential({s00, s22, b.betaM20}, x);
  x = ladder_exponential({s00, s11, b.betaM10}, x);
  x = ladder_exponential({s11, s22, b.betaM21}, x);
  x = ladder_exponential_diag3(s22, s00, b.beta3_20, x);
  x = ladder_exponential_diag3(s22, s11, b.beta3_21, x);
  x = ladder_exponential({s22, s11, b.betaP21}, x);
  x = ladder_exponential({s11, s00, b.betaP10}, x);
  x = ladder_exponential({s22, s00, b.betaP20}, x);
  x = ladder_exponential_diag3(s02, s01, c.alpha6 * t, x);
  x = ladder_exponential_diag3(s12, s10, c.alpha5 * t, x);
  x = ladder_exponential_diag3(s20, s10, c.alpha4 * t, x);
  x = ladder_exponential_diag3(s21, s01, c.alpha3 * t, x);
  x = ladder_exponential_diag3(s21, s12, c.alpha2 * t, x);
  x.coefficients() *= std::exp(c.alpha1 * t);
  return x;
}

// ---------------------------------------------------------------------------
// Closed-form expansion of exp(Lt) on one basis vector

enum class ClosedFormVariant {
  corrected,   // summation limits follow the running occupations
  as_printed,  // literal limits n00, n11, n22 and exponents as originally tabulated
};

namespace detail {

inline double binom(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

inline cd ipow(cd z, int k) {
  cd r = 1.0;
  for (int i = 0; i < k; ++i) r *= z;
  return r;
}

} // namespace detail

/// Coefficients of exp(Lt) Q_idx as a multi-sum over the eight ladder orders
/// i-, j-, k- (lowering 22->00, 11->00, 22->11) and k+, j+, i+ (raising
/// 11->22, 00->11, 00->22), with the coherence slots carried by C(t).
inline SymState closed_form_coefficients(const OccupationIndex& idx, const LambdaParams& p, double t,
                                         ClosedFormVariant variant = ClosedFormVariant::corrected) {
  using namespace lambda_slots;
  if (idx.levels() != 3) throw InvalidArgument("closed_form_coefficients: M must be 3");
  if (idx.systems() != p.N) throw InvalidArgument("closed_form_coefficients: index N differs from params N");
  const LambdaCoefficients c = lambda_coefficients(p);
  const BCHCoefficients b = bch_sl3(c, t);
  const auto& n = idx.occupations();
  const int n00 = n[s00], n11 = n[s11], n22 = n[s22];
  const int n01 = n[s01], n02 = n[s02], n10 = n[s10], n12 = n[s12], n20 = n[s20], n21 = n[s21];
  const bool lit = variant == ClosedFormVariant::as_printed;

  const cd ct = std::exp(c.alpha1 * t) * std::exp(0.5 * c.alpha6 * double(n02 - n01) * t) *
                std::exp(0.5 * c.alpha2 * double(n21 - n12) * t) * std::exp(0.5 * c.alpha3 * double(n21 - n01) * t) *
                std::exp(0.5 * c.alpha4 * double(n20 - n10) * t) * std::exp(0.5 * c.alpha5 * double(n12 - n10) * t);

  SymState out(make_basis(3, p.N));
  std::vector<int> target = n;
  for (int im = 0; im <= n22; ++im) {
    const cd w_im = detail::binom(n22, im) * detail::ipow(b.betaM20, im);
    for (int jm = 0; jm <= n11; ++jm) {
      const cd w_jm = w_im * detail::binom(n11, jm) * detail::ipow(b.betaM10, jm);
      for (int km = 0; km <= n22 - im; ++km) {
        const cd w_km = w_jm * detail::binom(n22 - im, km) * detail::ipow(b.betaM21, km);
        const int o00 = n00 + im + jm, o11 = n11 - jm + km, o22 = n22 - im - km;
        const double a21 = lit ? 0.5 * (n22 - o11) : 0.5 * (o22 - o11);
        const double a20 = lit ? 0.5 * (n22 - o00) : 0.5 * (o22 - o00);
        const cd w3 = w_km * std::exp(b.beta3_21 * a21) * std::exp(b.beta3_20 * a20);
        const int kp_max = lit ? n11 : o11;
        for (int kp = 0; kp <= kp_max; ++kp) {
          const cd w_kp = w3 * detail::binom(o11, kp) * detail::ipow(b.betaP21, kp);
          const int jp_max = lit ? n00 : o00;
          for (int jp = 0; jp <= jp_max; ++jp) {
            const cd w_jp = w_kp * detail::binom(o00, jp) * detail::ipow(b.betaP10, jp);
            const int ip_max = lit ? n00 : o00 - jp;
            for (int ip = 0; ip <= ip_max; ++ip) {
              const double bc = detail::binom(o00 - jp, ip);
              if (bc == 0.0) continue;
              const cd w = w_jp * bc * detail::ipow(b.betaP20, ip) * ct;
              const int v00 = o00 - jp - ip, v11 = o11 - kp + jp, v22 = o22 + kp + ip;
              if (v00 < 0 || v11 < 0 || v22 < 0) continue;
              target[s00] = v00;
              target[s11] = v11;
              target[s22] = v22;
              out.coefficients()(out.basis().rank(std::span<const int>(target))) += w;
            }
          }
        }
      }
    }
  }
  return out;
}

/// Closed form applied to every component of a state.
inline SymState closed_form_propagate(const LambdaParams& p, const SymState& rho0, double t,
                                      ClosedFormVariant variant = ClosedFormVariant::corrected) {
  SymState out(rho0.basis_ptr());
  rho0.basis().for_each([&](std::int64_t r, const std::vector<int>& n) {
    if (rho0[r] == cd{}) return;
    const SymState e = closed_form_coefficients(OccupationIndex(3, n), p, t, variant);
    out.coefficients() += rho0[r] * e.coefficients();
  });
  return out;
}

} // namespace symlind
