#pragma once

// JSON forms of states and run configurations, and a coordinate-list export
// of the symmetric Liouvillian.

#include <complex>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "symlind/collective.hpp"
#include "symlind/error.hpp"
#include "symlind/evolution.hpp"
#include "symlind/lambda.hpp"
#include "symlind/liouville.hpp"
#include "symlind/sym_basis.hpp"

namespace symlind {

using json = nlohmann::json;

/// Config-level error (bad keys, values or files); maps to exit code 1.
class ConfigError : public InvalidArgument {
public:
  using InvalidArgument::InvalidArgument;
};

namespace io {

inline cd complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) return {j[0].get<double>(), j[1].get<double>()};
  throw ConfigError("expected a number or a [re, im] pair, got " + j.dump());
}

inline json complex_to_json(cd z) { return json::array({z.real(), z.imag()}); }

inline Eigen::MatrixXcd matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw ConfigError("expected a matrix (array of rows)");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) throw ConfigError("matrix rows have unequal length");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = complex_from_json(row[static_cast<std::size_t>(c)]);
  }
  return m;
}

inline json matrix_to_json(const Eigen::MatrixXcd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

} // namespace io

// ---------------------------------------------------------------------------
// SymState <-> {M, N, entries: [[n-tuple], re, im]}

inline json state_to_json(const SymState& s) {
  json entries = json::array();
  s.basis().for_each([&](std::int64_t r, const std::vector<int>& n) {
    if (s[r] != cd{}) entries.push_back(json::array({n, s[r].real(), s[r].imag()}));
  });
  return {{"M", s.levels()}, {"N", s.systems()}, {"entries", std::move(entries)}};
}

inline SymState state_from_json(const json& j) {
  const int m = j.at("M").get<int>();
  const int n = j.at("N").get<int>();
  SymState s(make_basis(m, n));
  for (const auto& e : j.at("entries")) {
    const OccupationIndex idx(m, e.at(0).get<std::vector<int>>());
    s.coefficients()(s.basis().rank(idx)) += cd(e.at(1).get<double>(), e.at(2).get<double>());
  }
  return s;
}

/// One line per nonzero: row col re im (0-based ranks).
inline void write_coo(std::ostream& os, const SparseMatrix& m) {
  os << "# rows " << m.rows() << " cols " << m.cols() << " nnz " << m.nonZeros() << '\n';
  for (Eigen::Index c = 0; c < m.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(m, c); it; ++it)
      os << it.row() << ' ' << it.col() << ' ' << format_double(it.value().real()) << ' '
         << format_double(it.value().imag()) << '\n';
}

// ---------------------------------------------------------------------------
// Run configuration

enum class Mode { simulate, lambda_analytic, validate, dims };

inline const char* mode_name(Mode m) {
  switch (m) {
    case Mode::simulate: return "simulate";
    case Mode::lambda_analytic: return "lambda-analytic";
    case Mode::validate: return "validate";
    case Mode::dims: return "dims";
  }
  return "?";
}

inline Mode parse_mode(const std::string& s) {
  if (s == "simulate") return Mode::simulate;
  if (s == "lambda-analytic") return Mode::lambda_analytic;
  if (s == "validate") return Mode::validate;
  if (s == "dims") return Mode::dims;
  throw ConfigError("unknown mode '" + s + "'");
}

/// Generic model given either by coefficients (h, a) or by a Hamiltonian
/// with jump channels; Lambda model by its rates and energies.
struct ModelSpec {
  enum class Kind { sindip, lambda } kind = Kind::sindip;
  int M = 2;
  bool channels = false;
  std::vector<cd> h;
  Eigen::MatrixXcd a;
  Operator hamiltonian;
  std::vector<JumpChannel> jumps;
  LambdaParams lambda;  // N is taken from RunConfig::N

  int levels() const { return kind == Kind::lambda ? 3 : M; }

  SuperMatrix single_system() const {
    if (kind == Kind::lambda) return lambda_single_atom(lambda);
    if (channels) return single_system_liouvillian(SInDiPModel::from_channels(hamiltonian, jumps));
    return single_system_liouvillian(SInDiPModel::with_gell_mann(M, h, a));
  }
};

struct InitialStateSpec {
  bool product = true;
  Operator rho1;
  std::vector<std::pair<std::vector<int>, cd>> entries;

  SymState build(BasisPtr basis) const {
    if (product) return product_state_expand(rho1, std::move(basis));
    SymState s(basis);
    for (const auto& [n, c] : entries) s.coefficients()(basis->rank(OccupationIndex(basis->levels(), n))) += c;
    return s;
  }
};

struct GridSpec {
  double start = 0.0;
  double stop = 1.0;
  int count = 11;
  std::vector<double> points() const { return linear_grid(start, stop, count); }
};

struct RunConfig {
  Mode mode = Mode::simulate;
  int N = 1;
  ModelSpec model;
  InitialStateSpec initial;
  GridSpec grid;
  std::vector<ObservableSpec> observables;
  std::string output_path;
  std::string output_format = "csv";
  Method method = Method::automatic;
  double tol = 1e-10;
  int krylov_dim = 30;
  std::uint64_t seed = 0;
  int dims_max_n = 10;
};

namespace io {

inline void model_from_json(const json& j, ModelSpec& m) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "lambda") {
    m.kind = ModelSpec::Kind::lambda;
    m.M = 3;
    m.lambda.gamma20 = j.at("gamma20").get<double>();
    m.lambda.gamma21 = j.at("gamma21").get<double>();
    m.lambda.N0 = j.value("N0", 0.0);
    const auto e = j.at("E").get<std::vector<double>>();
    if (e.size() != 3) throw ConfigError("lambda model: E must list three energies");
    m.lambda.E0 = e[0];
    m.lambda.E1 = e[1];
    m.lambda.E2 = e[2];
    return;
  }
  if (type != "sindip") throw ConfigError("unknown model type '" + type + "'");
  m.kind = ModelSpec::Kind::sindip;
  m.M = j.at("M").get<int>();
  if (m.M < 2) throw ConfigError("model: M must be >= 2");
  const std::string basis = j.value("basis", "gell-mann");
  if (basis != "gell-mann") throw ConfigError("model: only the gell-mann basis is supported");
  if (j.contains("hamiltonian")) {
    m.channels = true;
    m.hamiltonian = matrix_from_json(j.at("hamiltonian"));
    if (m.hamiltonian.rows() != m.M || m.hamiltonian.cols() != m.M) throw ConfigError("model: hamiltonian must be M x M");
    for (const auto& jc : j.value("jumps", json::array())) {
      JumpChannel c{matrix_from_json(jc.at("op")), jc.at("rate").get<double>()};
      m.jumps.push_back(std::move(c));
    }
  } else {
    m.channels = false;
    for (const auto& x : j.at("h")) m.h.push_back(complex_from_json(x));
    m.a = matrix_from_json(j.at("a"));
  }
}

inline json model_to_json(const ModelSpec& m) {
  if (m.kind == ModelSpec::Kind::lambda)
    return {{"type", "lambda"}, {"gamma20", m.lambda.gamma20}, {"gamma21", m.lambda.gamma21}, {"N0", m.lambda.N0},
            {"E", {m.lambda.E0, m.lambda.E1, m.lambda.E2}}};
  json j = {{"type", "sindip"}, {"M", m.M}, {"basis", "gell-mann"}};
  if (m.channels) {
    j["hamiltonian"] = matrix_to_json(m.hamiltonian);
    json jumps = json::array();
    for (const auto& c : m.jumps) jumps.push_back({{"op", matrix_to_json(c.op)}, {"rate", c.rate}});
    j["jumps"] = std::move(jumps);
  } else {
    json h = json::array();
    for (cd x : m.h) h.push_back(complex_to_json(x));
    j["h"] = std::move(h);
    j["a"] = matrix_to_json(m.a);
  }
  return j;
}

inline Operator observable_op(const json& j, int levels) {
  if (j.contains("dyad")) {
    const auto ij = j.at("dyad").get<std::vector<int>>();
    if (ij.size() != 2 || ij[0] < 0 || ij[1] < 0 || ij[0] >= levels || ij[1] >= levels)
      throw ConfigError("observable: dyad needs two level labels in [0, M)");
    return dyad(ij[0], ij[1], levels);
  }
  Operator op = matrix_from_json(j.at("op"));
  if (op.rows() != levels || op.cols() != levels) throw ConfigError("observable: operator must be M x M");
  return op;
}

} // namespace io

/// `forced` takes precedence over a "mode" key in the document.
inline RunConfig config_from_json(const json& j, std::optional<Mode> forced = std::nullopt) {
  try {
    RunConfig c;
    if (forced)
      c.mode = *forced;
    else if (j.contains("mode"))
      c.mode = parse_mode(j.at("mode").get<std::string>());
    else
      throw ConfigError("config: no mode given");
    c.seed = j.value("seed", std::uint64_t{0});
    c.tol = j.value("tol", 1e-10);
    c.krylov_dim = j.value("krylov_dim", 30);
    c.method = parse_method(j.value("method", std::string("auto")));
    if (j.contains("output")) {
      c.output_path = j["output"].value("path", std::string());
      c.output_format = j["output"].value("format", std::string("csv"));
      if (c.output_format != "csv" && c.output_format != "json") throw ConfigError("output.format must be csv or json");
    }
    if (c.mode == Mode::dims) {
      c.model.M = j.value("M", 3);
      c.dims_max_n = j.value("N_max", 10);
      if (c.model.M < 2 || c.dims_max_n < 1) throw ConfigError("dims: need M >= 2 and N_max >= 1");
      return c;
    }
    if (c.mode == Mode::validate && !j.contains("model")) return c;
    c.N = j.at("N").get<int>();
    if (c.N < 1) throw ConfigError("N must be >= 1");
    io::model_from_json(j.at("model"), c.model);
    c.model.lambda.N = c.N;
    if (c.mode == Mode::lambda_analytic && c.model.kind != ModelSpec::Kind::lambda)
      throw ConfigError("lambda-analytic mode needs a lambda model");
    const int m = c.model.levels();
    const json& init = j.at("initial_state");
    if (init.contains("product")) {
      c.initial.product = true;
      c.initial.rho1 = io::matrix_from_json(init.at("product"));
      if (c.initial.rho1.rows() != m) throw ConfigError("initial_state.product must be M x M");
    } else if (init.contains("basis")) {
      c.initial.product = false;
      for (const auto& e : init.at("basis"))
        c.initial.entries.emplace_back(e.at("n").get<std::vector<int>>(), io::complex_from_json(e.at("c")));
    } else {
      throw ConfigError("initial_state needs 'product' or 'basis'");
    }
    const json& g = j.at("t_grid");
    c.grid.start = g.at("start").get<double>();
    c.grid.stop = g.at("stop").get<double>();
    c.grid.count = g.at("count").get<int>();
    for (const auto& o : j.value("observables", json::array()))
      c.observables.push_back({o.at("name").get<std::string>(), io::observable_op(o, m)});
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

inline json config_to_json(const RunConfig& c) {
  json j = {{"mode", mode_name(c.mode)}, {"seed", c.seed}, {"tol", c.tol}, {"krylov_dim", c.krylov_dim},
            {"method", method_name(c.method)}};
  if (!c.output_path.empty() || c.output_format != "csv") j["output"] = {{"path", c.output_path}, {"format", c.output_format}};
  if (c.mode == Mode::dims) {
    j["M"] = c.model.M;
    j["N_max"] = c.dims_max_n;
    return j;
  }
  if (c.mode == Mode::validate && c.model.h.empty() && !c.model.channels && c.model.kind == ModelSpec::Kind::sindip) return j;
  j["N"] = c.N;
  j["model"] = io::model_to_json(c.model);
  if (c.initial.product) {
    j["initial_state"] = {{"product", io::matrix_to_json(c.initial.rho1)}};
  } else {
    json b = json::array();
    for (const auto& [n, z] : c.initial.entries) b.push_back({{"n", n}, {"c", io::complex_to_json(z)}});
    j["initial_state"] = {{"basis", std::move(b)}};
  }
  j["t_grid"] = {{"start", c.grid.start}, {"stop", c.grid.stop}, {"count", c.grid.count}};
  json obs = json::array();
  for (const auto& o : c.observables) obs.push_back({{"name", o.name}, {"op", io::matrix_to_json(o.op)}});
  j["observables"] = std::move(obs);
  return j;
}

inline RunConfig load_config(const std::string& path, std::optional<Mode> forced = std::nullopt) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j, forced);
}

} // namespace symlind
