#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <json.hpp>

#include "cli/model.hpp"
#include "thermoform/cli.hpp"

namespace thermoform::cli {

using nlohmann::json;

namespace {

[[noreturn]] void schema(const std::string& path, const std::string& reason) {
  throw Error(ErrorCode::SchemaError, path + ": " + reason);
}

[[noreturn]] void invalid(const std::string& reason) { throw Error(ErrorCode::ValidationError, reason); }

std::string member(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string element(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

void expect_object(const json& v, const std::string& path, std::initializer_list<const char*> keys) {
  if (!v.is_object()) schema(path.empty() ? "(root)" : path, "expected an object");
  for (const auto& [key, _] : v.items())
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; }))
      schema(member(path, key), "unknown key");
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) schema(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) schema(path, "expected a finite number");
  return x;
}

long long integer(const json& v, const std::string& path, long long lo, long long hi) {
  if (!v.is_number_integer()) schema(path, "expected an integer");
  const auto x = v.get<long long>();
  if (x < lo || x > hi) schema(path, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return x;
}

std::string text(const json& v, const std::string& path) {
  if (!v.is_string()) schema(path, "expected a string");
  return v.get<std::string>();
}

std::vector<double> numbers(const json& v, const std::string& path) {
  if (!v.is_array()) schema(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], element(path, i)));
  return out;
}

SystemSpec parse_system(const json& v) {
  expect_object(v, "system", {"alphabet_size", "adjacency"});
  if (!v.contains("alphabet_size")) schema("system.alphabet_size", "missing");
  if (!v.contains("adjacency")) schema("system.adjacency", "missing");
  SystemSpec s;
  s.alphabet_size = static_cast<int>(integer(v["alphabet_size"], "system.alphabet_size", 1, 4096));
  const json& rows = v["adjacency"];
  const auto k = static_cast<std::size_t>(s.alphabet_size);
  if (!rows.is_array()) schema("system.adjacency", "expected an array of rows");
  if (rows.size() != k) schema("system.adjacency", "expected " + std::to_string(k) + " rows");
  for (std::size_t i = 0; i < k; ++i) {
    const std::string path = element("system.adjacency", i);
    if (!rows[i].is_array()) schema(path, "expected an array");
    if (rows[i].size() != k) schema(path, "expected " + std::to_string(k) + " entries, found " + std::to_string(rows[i].size()));
    std::vector<int> row;
    for (std::size_t j = 0; j < k; ++j) row.push_back(static_cast<int>(integer(rows[i][j], element(path, j), 0, 1)));
    s.adjacency.push_back(std::move(row));
  }
  return s;
}

PotentialSpec parse_potential(const json& v, const std::string& path) {
  expect_object(v, path, {"range", "values"});
  PotentialSpec p;
  if (v.contains("range")) p.range = static_cast<int>(integer(v["range"], member(path, "range"), 1, 64));
  if (!v.contains("values")) schema(member(path, "values"), "missing");
  const json& values = v["values"];
  if (!values.is_object()) schema(member(path, "values"), "expected an object keyed by word");
  for (const auto& [word, x] : values.items()) p.values[word] = number(x, member(member(path, "values"), word));
  return p;
}

FunctionalSpec parse_functional(const json& v) {
  expect_object(v, "functional", {"kind", "parameters", "convex"});
  FunctionalSpec f;
  if (!v.contains("kind")) schema("functional.kind", "missing");
  f.kind = text(v["kind"], "functional.kind");
  if (f.kind != "linear" && f.kind != "quadratic" && f.kind != "constant")
    schema("functional.kind", "expected linear, quadratic or constant");
  if (v.contains("parameters")) {
    const json& p = v["parameters"];
    expect_object(p, "functional.parameters", {"c", "q", "offset"});
    if (p.contains("c")) f.c = numbers(p["c"], "functional.parameters.c");
    if (p.contains("offset")) f.offset = number(p["offset"], "functional.parameters.offset");
    if (p.contains("q")) {
      if (!p["q"].is_array()) schema("functional.parameters.q", "expected an array of rows");
      for (std::size_t i = 0; i < p["q"].size(); ++i) f.q.push_back(numbers(p["q"][i], element("functional.parameters.q", i)));
    }
  }
  if (f.kind == "quadratic" && f.q.empty()) schema("functional.parameters.q", "quadratic F needs q");
  if (f.kind != "quadratic" && !f.q.empty()) schema("functional.parameters.q", "only quadratic F takes q");
  if (f.kind == "constant" && !f.c.empty()) schema("functional.parameters.c", "constant F takes only offset");
  if (v.contains("convex")) {
    if (!v["convex"].is_boolean()) schema("functional.convex", "expected true or false");
    f.convex = v["convex"].get<bool>();
  }
  return f;
}

RunParameters parse_parameters(const json& v) {
  expect_object(v, "parameters",
                {"phi", "psi", "components", "T", "n", "q", "beta_grid", "beta0", "test_depth", "seed", "restarts",
                 "heuristic", "cap", "tolerances"});
  RunParameters p;
  const std::string at = "parameters";
  if (v.contains("phi")) p.phi = text(v["phi"], member(at, "phi"));
  if (v.contains("psi")) p.psi = text(v["psi"], member(at, "psi"));
  if (v.contains("components")) {
    const json& c = v["components"];
    if (!c.is_array() || c.empty()) schema(member(at, "components"), "expected a nonempty array of names");
    for (std::size_t i = 0; i < c.size(); ++i) p.components.push_back(text(c[i], element(member(at, "components"), i)));
  }
  if (v.contains("T")) {
    p.T = number(v["T"], member(at, "T"));
    if (!(*p.T > 0.0)) schema(member(at, "T"), "must be positive");
  }
  if (v.contains("n")) p.n = static_cast<int>(integer(v["n"], member(at, "n"), 1, 64));
  if (v.contains("q")) p.q = static_cast<int>(integer(v["q"], member(at, "q"), 1, 64));
  if (v.contains("beta_grid")) {
    p.beta_grid = numbers(v["beta_grid"], member(at, "beta_grid"));
    if (p.beta_grid->empty()) schema(member(at, "beta_grid"), "must not be empty");
  }
  if (v.contains("beta0")) p.beta0 = number(v["beta0"], member(at, "beta0"));
  if (v.contains("test_depth")) p.test_depth = static_cast<int>(integer(v["test_depth"], member(at, "test_depth"), 1, 16));
  if (v.contains("seed")) {
    if (!v["seed"].is_number_unsigned() && !(v["seed"].is_number_integer() && v["seed"].get<long long>() >= 0))
      schema(member(at, "seed"), "expected a nonnegative integer");
    p.seed = v["seed"].get<std::uint64_t>();
  }
  if (v.contains("restarts")) p.restarts = static_cast<int>(integer(v["restarts"], member(at, "restarts"), 1, 10000));
  if (v.contains("heuristic")) {
    if (!v["heuristic"].is_boolean()) schema(member(at, "heuristic"), "expected true or false");
    p.heuristic = v["heuristic"].get<bool>();
  }
  if (v.contains("cap"))
    p.cap = static_cast<std::size_t>(integer(v["cap"], member(at, "cap"), 1, std::numeric_limits<long long>::max()));
  p.tolerances = default_tolerances();
  if (v.contains("tolerances")) {
    const json& t = v["tolerances"];
    const std::string path = member(at, "tolerances");
    if (!t.is_object()) schema(path, "expected an object");
    for (const auto& [name, x] : t.items()) {
      if (!p.tolerances.contains(name)) schema(member(path, name), "unknown tolerance");
      const double tol = number(x, member(path, name));
      if (tol < 0.0) schema(member(path, name), "must be nonnegative");
      p.tolerances[name] = tol;
    }
  }
  return p;
}

OutputSpec parse_output(const json& v) {
  expect_object(v, "output", {"csv_path", "svg_path"});
  OutputSpec o;
  if (v.contains("csv_path")) o.csv_path = text(v["csv_path"], "output.csv_path");
  if (v.contains("svg_path")) o.svg_path = text(v["svg_path"], "output.svg_path");
  return o;
}

void check_command_requirements(const RunConfig& c) {
  const std::string& cmd = c.command;
  if (cmd != "verify" && !c.system) schema("system", "missing");
  if ((cmd == "nonlinear" || cmd == "nonlinear-induced") && !c.functional) schema("functional", "missing");
  if (cmd == "freeze-sweep" && !c.parameters.beta_grid) schema("parameters.beta_grid", "required by freeze-sweep");
  if (cmd == "estimate" && !c.parameters.n) schema("parameters.n", "required by estimate");
  if (!c.output.svg_path.empty() && cmd != "freeze-sweep") schema("output.svg_path", "only freeze-sweep draws a plot");
}

}  // namespace

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> table{
      {"identity", 1e-8},     // equalities in the property suites
      {"inequality", 1e-9},   // slack for inequalities
      {"freezing", 1e-7},     // gap below which the sweep counts as frozen
      {"gap", 1e-8},          // closed-form gap check in verify
      {"root", 1e-9},         // closed-form Bowen root check in verify
      {"permutation", 1e-12},
      {"recoding", 1e-6},
      {"karp", 1e-9},
      {"derivative", 1e-5},
  };
  return table;
}

RunConfig parse_config(std::string_view text_in, const std::string& default_command) {
  json root;
  try {
    root = json::parse(text_in);
  } catch (const json::parse_error& e) {
    schema("(root)", std::string("not valid JSON: ") + e.what());
  }
  expect_object(root, "", {"command", "system", "potentials", "functional", "parameters", "output"});

  RunConfig c;
  if (root.contains("command")) {
    c.command = text(root["command"], "command");
    if (!default_command.empty() && c.command != default_command)
      schema("command", "config says '" + c.command + "' but '" + default_command + "' was requested");
  } else {
    c.command = default_command;
  }
  if (c.command.empty()) schema("command", "missing");
  if (std::find(commands().begin(), commands().end(), c.command) == commands().end())
    schema("command", "unknown command '" + c.command + "'");

  if (root.contains("system")) c.system = parse_system(root["system"]);
  if (root.contains("potentials")) {
    const json& pots = root["potentials"];
    if (!pots.is_object()) schema("potentials", "expected an object keyed by name");
    for (const auto& [name, v] : pots.items()) c.potentials[name] = parse_potential(v, "potentials." + name);
  }
  if (root.contains("functional")) c.functional = parse_functional(root["functional"]);
  c.parameters = root.contains("parameters") ? parse_parameters(root["parameters"]) : parse_parameters(json::object());
  if (c.parameters.components.empty()) c.parameters.components = {c.parameters.phi};
  if (root.contains("output")) c.output = parse_output(root["output"]);

  check_command_requirements(c);
  if (c.command != "verify" || c.system) build_model(c);
  return c;
}

std::string render_config(const RunConfig& c) {
  json root = json::object();
  root["command"] = c.command;
  if (c.system) root["system"] = {{"alphabet_size", c.system->alphabet_size}, {"adjacency", c.system->adjacency}};
  if (!c.potentials.empty()) {
    json pots = json::object();
    for (const auto& [name, p] : c.potentials) {
      json values = json::object();
      for (const auto& [w, x] : p.values) values[w] = x;
      pots[name] = {{"range", p.range}, {"values", values}};
    }
    root["potentials"] = pots;
  }
  if (c.functional) {
    const auto& f = *c.functional;
    json params = {{"offset", f.offset}};
    if (!f.c.empty()) params["c"] = f.c;
    if (!f.q.empty()) params["q"] = f.q;
    json fn = {{"kind", f.kind}, {"parameters", params}};
    if (f.convex) fn["convex"] = *f.convex;
    root["functional"] = fn;
  }
  const auto& p = c.parameters;
  json params = {{"phi", p.phi},           {"psi", p.psi},       {"components", p.components},
                 {"beta0", p.beta0},       {"test_depth", p.test_depth}, {"seed", p.seed},
                 {"restarts", p.restarts}, {"heuristic", p.heuristic},   {"tolerances", p.tolerances}};
  if (p.T) params["T"] = *p.T;
  if (p.n) params["n"] = *p.n;
  if (p.q) params["q"] = *p.q;
  if (p.beta_grid) params["beta_grid"] = *p.beta_grid;
  if (p.cap) params["cap"] = *p.cap;
  root["parameters"] = params;
  json out = json::object();
  if (!c.output.csv_path.empty()) out["csv_path"] = c.output.csv_path;
  if (!c.output.svg_path.empty()) out["svg_path"] = c.output.svg_path;
  if (!out.empty()) root["output"] = out;
  return root.dump(2) + "\n";
}

// ---------------------------------------------------------------------------

std::vector<std::string> role_names(const RunConfig& c) {
  const std::string& cmd = c.command;
  const auto& p = c.parameters;
  if (cmd == "pressure" || cmd == "estimate") return {p.phi};
  if (cmd == "nonlinear") return p.components;
  if (cmd == "nonlinear-induced") {
    auto names = p.components;
    names.push_back(p.psi);
    return names;
  }
  if (cmd == "verify") return {};
  return {p.phi, p.psi};
}

bool uses_psi(const RunConfig& c) {
  return c.command != "pressure" && c.command != "estimate" && c.command != "nonlinear" && c.command != "verify";
}

Model build_model(const RunConfig& c) {
  if (!c.system) invalid("no system given");
  Model m{[&] {
    try {
      return Sft(c.system->alphabet_size, c.system->adjacency);
    } catch (const Error& e) {
      invalid(std::string("system: ") + e.what());
    }
  }(), {}, {}};
  const int k = c.system->alphabet_size;
  for (const auto& [name, spec] : c.potentials) {
    std::map<Word, double> table;
    for (const auto& [key, x] : spec.values) {
      try {
        table[parse_word(key, k)] = x;
      } catch (const Error& e) {
        invalid("potential '" + name + "': " + e.what());
      }
    }
    try {
      m.potentials.emplace(name, Potential::from_table(m.sft, spec.range, table, name));
    } catch (const Error& e) {
      invalid("potential '" + name + "': " + e.what());
    }
  }
  for (const auto& name : role_names(c))
    if (!m.potentials.contains(name)) invalid("potential '" + name + "' is referenced but not defined");

  if (uses_psi(c)) {
    for (const auto& [w, x] : m.potentials.at(c.parameters.psi).entries())
      if (!(x > 0.0))
        invalid("potential '" + c.parameters.psi + "' plays the role of ψ and has value " + std::to_string(x) +
                " on '" + word_to_string(w, k) + "'; ψ > 0 is required");
  }

  if (c.functional) {
    const auto& f = *c.functional;
    const auto d = c.parameters.components.size();
    if (f.kind != "constant" && f.c.size() != d)
      invalid("functional.parameters.c must have one entry per component (" + std::to_string(d) + ")");
    if (f.kind == "quadratic") {
      if (f.q.size() != d) invalid("functional.parameters.q must be " + std::to_string(d) + "×" + std::to_string(d));
      for (const auto& row : f.q)
        if (row.size() != d) invalid("functional.parameters.q must be " + std::to_string(d) + "×" + std::to_string(d));
    }
    try {
      m.functional = make_functional(f, static_cast<int>(d));
    } catch (const Error& e) {
      invalid(std::string("functional: ") + e.what());
    }
    if (f.convex && *f.convex != m.functional->convex())
      invalid(std::string("functional.convex is ") + (*f.convex ? "true" : "false") + " but Q says otherwise");
  }

  if (c.parameters.beta_grid && !std::is_sorted(c.parameters.beta_grid->begin(), c.parameters.beta_grid->end()))
    invalid("parameters.beta_grid must be sorted");
  return m;
}

NonlinearFunctional make_functional(const FunctionalSpec& f, int dimension) {
  if (f.kind == "constant") return NonlinearFunctional::constant(dimension, f.offset);
  if (f.kind == "linear") return NonlinearFunctional::linear(f.c, f.offset);
  Eigen::MatrixXd q(dimension, dimension);
  for (int i = 0; i < dimension; ++i)
    for (int j = 0; j < dimension; ++j) q(i, j) = f.q[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return NonlinearFunctional::quadratic(q, f.c, f.offset);
}

}  // namespace thermoform::cli
