#pragma once

// Batch runs driven by a RunConfig.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "symlind/collective.hpp"
#include "symlind/error.hpp"
#include "symlind/evolution.hpp"
#include "symlind/io.hpp"
#include "symlind/lambda.hpp"
#include "symlind/sym_basis.hpp"
#include "symlind/validation.hpp"

namespace symlind {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitNumerical = 2 };

struct RunReport {
  int exit_code = kExitOk;
  std::string message;
  std::int64_t sym_size = 0;
  double max_trace_deviation = 0.0;
  double max_deviation = 0.0;  // lambda-analytic: numerical vs disentangled
  std::vector<CheckResult> checks;
};

namespace detail {

inline std::ofstream open_output(const std::string& path) {
  if (path.empty()) throw ConfigError("no output path given");
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write output file '" + path + "'");
  return out;
}

/// Exact M^(2N) as a decimal string.
inline std::string full_dimension_string(int levels, int systems) {
  unsigned __int128 d = 1;
  const unsigned __int128 limit = ~static_cast<unsigned __int128>(0) / static_cast<unsigned>(levels * levels);
  for (int k = 0; k < systems; ++k) {
    if (d > limit) throw ConfigError("dims: M^(2N) exceeds 128-bit range");
    d *= static_cast<unsigned>(levels * levels);
  }
  std::string s;
  do {
    s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(d % 10)));
    d /= 10;
  } while (d != 0);
  return s;
}

inline void write_json_trajectory(std::ostream& os, const std::vector<double>& times,
                                  const std::vector<ObservableSpec>& observables, const std::vector<SymState>& states) {
  json obs = json::object();
  for (const auto& o : observables) {
    json vals = json::array();
    for (const auto& s : states) vals.push_back(io::complex_to_json(collective_expectation(o, s)));
    obs[o.name] = std::move(vals);
  }
  os << json{{"time", times}, {"observables", std::move(obs)}}.dump(1) << '\n';
}

inline RunReport run_simulate(const RunConfig& c, const std::string& out_path) {
  RunReport rep;
  const BasisPtr basis = make_basis(c.model.levels(), c.N);
  rep.sym_size = basis->size();
  const SymLiouvillian l = assemble_sym_liouvillian(c.model.single_system(), basis);
  const SymState x0 = c.initial.build(basis);
  PropagationSpec spec;
  spec.t_grid = c.grid.points();
  spec.method = c.method;
  spec.tol = c.tol;
  spec.krylov_dim = c.krylov_dim;
  const auto traj = propagate(l, x0, spec);
  for (const auto& s : traj) rep.max_trace_deviation = std::max(rep.max_trace_deviation, std::abs(trace_functional(s) - 1.0));
  std::ofstream out = open_output(out_path);
  if (c.output_format == "json")
    write_json_trajectory(out, spec.t_grid, c.observables, traj);
  else
    write_trajectory_csv(out, spec.t_grid, c.observables, traj);
  return rep;
}

inline RunReport run_lambda_analytic(const RunConfig& c, const std::string& out_path) {
  RunReport rep;
  LambdaParams p = c.model.lambda;
  p.N = c.N;
  const BasisPtr basis = make_basis(3, c.N);
  rep.sym_size = basis->size();
  const SymLiouvillian l = assemble_sym_liouvillian(build_lambda_liouvillian(p), basis);
  const SymState x0 = c.initial.build(basis);
  PropagationSpec spec;
  spec.t_grid = c.grid.points();
  spec.method = c.method;
  spec.tol = c.tol;
  spec.krylov_dim = c.krylov_dim;
  const auto traj = propagate(l, x0, spec);
  std::vector<SymState> analytic;
  std::vector<double> deviation;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    analytic.push_back(analytic_propagate(p, x0, spec.t_grid[k]));
    deviation.push_back((traj[k].coefficients() - analytic.back().coefficients()).cwiseAbs().maxCoeff());
    rep.max_deviation = std::max(rep.max_deviation, deviation.back());
    rep.max_trace_deviation = std::max(rep.max_trace_deviation, std::abs(trace_functional(traj[k]) - 1.0));
  }
  std::ofstream out = open_output(out_path);
  if (c.output_format == "json") {
    json obs = json::object();
    for (const auto& o : c.observables) {
      json num = json::array(), ana = json::array();
      for (std::size_t k = 0; k < traj.size(); ++k) {
        num.push_back(io::complex_to_json(collective_expectation(o, traj[k])));
        ana.push_back(io::complex_to_json(collective_expectation(o, analytic[k])));
      }
      obs[o.name] = {{"numerical", std::move(num)}, {"analytic", std::move(ana)}};
    }
    out << json{{"time", spec.t_grid}, {"observables", std::move(obs)}, {"max_deviation", deviation}}.dump(1) << '\n';
    return rep;
  }
  out << "time";
  for (const auto& o : c.observables)
    out << ',' << o.name << "_num_re," << o.name << "_num_im," << o.name << "_ana_re," << o.name << "_ana_im";
  out << ",max_deviation\n";
  for (std::size_t k = 0; k < traj.size(); ++k) {
    out << format_double(spec.t_grid[k]);
    for (const auto& o : c.observables) {
      const cd a = collective_expectation(o, traj[k]), b = collective_expectation(o, analytic[k]);
      out << ',' << format_double(a.real()) << ',' << format_double(a.imag()) << ',' << format_double(b.real()) << ','
          << format_double(b.imag());
    }
    out << ',' << format_double(deviation[k]) << '\n';
  }
  return rep;
}

inline RunReport run_dims(const RunConfig& c, const std::string& out_path) {
  RunReport rep;
  std::ofstream out = open_output(out_path);
  out << "N,full_dimension,symmetric_dimension\n";
  for (int n = 1; n <= c.dims_max_n; ++n)
    out << n << ',' << full_dimension_string(c.model.M, n) << ',' << sym_dimension(c.model.M, n) << '\n';
  return rep;
}

/// Reduced-size invariant suites; the full-size versions run in the acceptance tests.
inline RunReport run_validate(const RunConfig& c, const std::string& out_path) {
  RunReport rep;
  PhysicalityStats phys;
  rep.checks.push_back(check_dimensions());
  rep.checks.push_back(check_appendix({2}));
  rep.checks.push_back(check_oracle(4, c.seed, &phys));
  rep.checks.push_back(check_ground_state_bch());
  rep.checks.push_back(check_disentangling(4, 6));
  rep.checks.push_back(check_triple_agreement(4, c.seed + 1, &phys));
  rep.checks.push_back(check_physicality(phys));
  rep.checks.push_back(check_ladder_actions(2));
  json arr = json::array();
  bool all = true;
  for (const auto& r : rep.checks) {
    all = all && r.passed;
    arr.push_back({{"name", r.name}, {"passed", r.passed}, {"value", r.value}, {"threshold", r.threshold}, {"detail", r.detail}});
  }
  std::ofstream out = open_output(out_path);
  out << json{{"passed", all}, {"checks", std::move(arr)}}.dump(1) << '\n';
  if (!all) {
    rep.exit_code = kExitNumerical;
    rep.message = "one or more invariant suites failed";
  }
  return rep;
}

} // namespace detail

/// Executes one configured run; errors become exit codes, never exceptions.
inline RunReport run(const RunConfig& c, const std::string& out_path) {
  try {
    switch (c.mode) {
      case Mode::simulate: return detail::run_simulate(c, out_path);
      case Mode::lambda_analytic: return detail::run_lambda_analytic(c, out_path);
      case Mode::validate: return detail::run_validate(c, out_path);
      case Mode::dims: return detail::run_dims(c, out_path);
    }
    RunReport r;
    r.exit_code = kExitConfig;
    r.message = "unknown mode";
    return r;
  } catch (const NumericalError& e) {
    RunReport r;
    r.exit_code = kExitNumerical;
    r.message = e.what();
    return r;
  } catch (const std::invalid_argument& e) {
    RunReport r;
    r.exit_code = kExitConfig;
    r.message = e.what();
    return r;
  } catch (const std::bad_alloc&) {
    RunReport r;
    r.exit_code = kExitNumerical;
    r.message = "out of memory";
    return r;
  }
}

} // namespace symlind
