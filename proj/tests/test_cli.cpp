#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "thermoform/cli.hpp"

using namespace thermoform;
using namespace thermoform::cli;
namespace fs = std::filesystem;

namespace {

const char* kFull2Induced = R"({
  "command": "induced",
  "system": {"alphabet_size": 2, "adjacency": [[1, 1], [1, 1]]},
  "potentials": {
    "phi": {"range": 1, "values": {"0": 0.0, "1": 0.0}},
    "psi": {"range": 1, "values": {"0": 1.0, "1": 2.0}}
  }
})";

const char* kSweep = R"({
  "command": "freeze-sweep",
  "system": {"alphabet_size": 2, "adjacency": [[1, 1], [1, 1]]},
  "potentials": {
    "phi": {"values": {"0": 1, "1": 0}},
    "psi": {"values": {"0": 1, "1": 1}}
  },
  "parameters": {"beta_grid": [1, 2, 3, 4, 5, 6]}
})";

ErrorCode code_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("config was accepted");
  return ErrorCode::InvalidArgument;
}

std::string message_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto at = s.find(from);
  REQUIRE(at != std::string::npos);
  return s.replace(at, from.size(), to);
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("thermoform_cli_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) { std::ofstream(path, std::ios::binary) << text; }

int lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

BetaSweep sweep_of(std::vector<double> phi, std::vector<double> psi, int to) {
  const Sft full = fixtures::full2();
  std::vector<double> betas;
  for (int b = 1; b <= to; ++b) betas.push_back(b);
  return beta_sweep(Potential::from_symbol_values(full, phi), Potential::from_symbol_values(full, psi), betas);
}

std::string attribute(const std::string& svg, const std::string& id) {
  const auto at = svg.find("id=\"" + id + "\"");
  REQUIRE(at != std::string::npos);
  const auto start = svg.find("points=\"", at) + 8;
  return svg.substr(start, svg.find('"', start) - start);
}

}  // namespace

TEST_CASE("parse_config fills defaults") {
  const auto c = parse_config(R"({"command": "pressure",
    "system": {"alphabet_size": 2, "adjacency": [[1,1],[1,1]]},
    "potentials": {"phi": {"values": {"0": 0, "1": 0}}}})");
  CHECK(c.command == "pressure");
  CHECK(c.parameters.seed == 0);
  CHECK(c.parameters.restarts == 20);
  CHECK(c.parameters.tolerances == default_tolerances());
  CHECK(c.parameters.tolerances.at("identity") == 1e-8);
  CHECK(c.parameters.tolerances.at("inequality") == 1e-9);
  CHECK(c.parameters.components == std::vector<std::string>{"phi"});
  CHECK(c.potentials.at("phi").range == 1);
  CHECK(c.output.csv_path.empty());
}

TEST_CASE("parse_config rejects bad input") {
  // ψ must be positive, and the message says so.
  const std::string zero_psi = replace(kFull2Induced, "\"1\": 2.0", "\"1\": 0.0");
  CHECK(code_of(zero_psi) == ErrorCode::ValidationError);
  CHECK(message_of(zero_psi).find("ψ > 0") != std::string::npos);

  const std::string ragged = replace(kFull2Induced, "[[1, 1], [1, 1]]", "[[1, 1], [1]]");
  CHECK(code_of(ragged) == ErrorCode::SchemaError);
  CHECK(message_of(ragged).find("system.adjacency[1]") != std::string::npos);

  CHECK(code_of(replace(kFull2Induced, "[[1, 1], [1, 1]]", "[[1, 2], [1, 1]]")) == ErrorCode::SchemaError);
  CHECK(code_of(replace(kSweep, ",\n  \"parameters\": {\"beta_grid\": [1, 2, 3, 4, 5, 6]}", "")) ==
        ErrorCode::SchemaError);
  CHECK(code_of(replace(kFull2Induced, "\"induced\"", "\"integrate\"")) == ErrorCode::SchemaError);
  CHECK(code_of("{not json") == ErrorCode::SchemaError);
  CHECK(code_of(replace(kFull2Induced, "\"system\"", "\"sytem\"")) == ErrorCode::SchemaError);
  // Missing window, missing role, empty column.
  CHECK(code_of(replace(kFull2Induced, ", \"1\": 0.0}", "}")) == ErrorCode::ValidationError);
  CHECK(code_of(replace(kFull2Induced, "\"psi\": {", "\"chi\": {")) == ErrorCode::ValidationError);
  CHECK(code_of(replace(kFull2Induced, "[[1, 1], [1, 1]]", "[[1, 0], [1, 0]]")) == ErrorCode::ValidationError);
  // Requested command must agree with the file.
  CHECK_THROWS_AS(parse_config(kFull2Induced, "pressure"), Error);
  CHECK(parse_config(replace(kFull2Induced, "\"command\": \"induced\",", ""), "induced").command == "induced");
}

TEST_CASE("functional block") {
  const std::string base = R"({"command": "nonlinear",
    "system": {"alphabet_size": 2, "adjacency": [[1,1],[1,1]]},
    "potentials": {"phi": {"values": {"0": 1, "1": 0}}},
    "functional": FN})";
  auto with = [&](const std::string& fn) { return replace(base, "FN", fn); };
  const auto c = parse_config(with(R"({"kind": "quadratic", "parameters": {"q": [[1]], "c": [0]}, "convex": true})"));
  CHECK(c.functional->kind == "quadratic");
  CHECK(code_of(with(R"({"kind": "quadratic", "parameters": {"q": [[-1]], "c": [0]}, "convex": true})")) ==
        ErrorCode::ValidationError);
  CHECK(code_of(with(R"({"kind": "linear", "parameters": {"c": [1, 2]}})")) == ErrorCode::ValidationError);
  CHECK(code_of(with(R"({"kind": "cubic"})")) == ErrorCode::SchemaError);
  CHECK(code_of(replace(base, ",\n    \"functional\": FN", "")) == ErrorCode::SchemaError);
}

TEST_CASE("render_config round trip") {
  auto c = parse_config(kSweep);
  c.parameters.seed = 1234567890123ULL;
  c.parameters.T = 0.1;
  c.parameters.tolerances["gap"] = 3e-11;
  c.output.csv_path = "out, with comma.csv";
  c.output.svg_path = "plot.svg";
  const auto again = parse_config(render_config(c));
  CHECK(again == c);
  CHECK(render_config(again) == render_config(c));

  const auto nl = parse_config(R"({"command": "nonlinear-induced",
    "system": {"alphabet_size": 3, "adjacency": [[1,1,0],[0,1,1],[1,0,1]]},
    "potentials": {"a": {"range": 2, "values": {"00": 1, "01": 0.5, "11": -1, "12": 0, "20": 0.25, "22": 2}},
                   "w": {"values": {"0": 1, "1": 2, "2": 3}}},
    "functional": {"kind": "quadratic", "parameters": {"q": [[2]], "c": [0.1], "offset": -1}},
    "parameters": {"phi": "a", "psi": "w", "components": ["a"], "q": 2, "n": 7}})");
  CHECK(parse_config(render_config(nl)) == nl);
}

TEST_CASE("formatting contract") {
  CHECK(format_number(std::log(2.0)) == "0.693147180560");
  CHECK(format_number(1.0) == "1.00000000000");
  CHECK(format_number(-2.5e-7) == "-2.50000000000e-07");

  CsvTable t{{"name", "value"}, {{"plain", "1"}, {"a,b", "2"}, {"say \"hi\"", "3"}}};
  CHECK(to_csv(t) == "name,value\nplain,1\n\"a,b\",2\n\"say \"\"hi\"\"\",3\n");
  CHECK_THROWS_AS(to_csv(CsvTable{{"x"}, {}}), Error);
  CHECK_THROWS_AS(to_csv(CsvTable{{"x"}, {{"1", "2"}}}), Error);

  TempDir dir;
  try {
    write_csv(CsvTable{{"x"}, {}}, dir.file("empty.csv"));
    FAIL("empty table written");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidArgument);
  }
  try {
    write_csv(t, dir.file("missing/dir/t.csv"));
    FAIL("wrote into a missing directory");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IoError);
  }
}

TEST_CASE("run: induced on the golden fixture") {
  std::ostringstream out, err;
  CHECK(run(parse_config(kFull2Induced), out, err) == 0);
  CHECK(out.str() == "method,T,q,value\nroot,,,0.481211825060\n");
  CHECK(std::abs(std::stod("0.481211825060") - 0.4812118) <= 1e-7);
}

TEST_CASE("run: sweep table, svg and determinism") {
  TempDir dir;
  auto c = parse_config(kSweep);
  c.output.csv_path = dir.file("a.csv");
  c.output.svg_path = dir.file("a.svg");
  std::ostringstream out, err;
  REQUIRE(run(c, out, err) == 0);
  CHECK(out.str().empty());
  CHECK(err.str().find("asymptotic") != std::string::npos);
  const std::string first = slurp(c.output.csv_path);
  const std::string first_svg = slurp(c.output.svg_path);
  CHECK(lines(first) == 7);
  CHECK(first.find('\r') == std::string::npos);
  CHECK(first.rfind("beta,pressure,ratio,scaled_entropy,asymptote,gap\n", 0) == 0);

  c.output.csv_path = dir.file("b.csv");
  c.output.svg_path = dir.file("b.svg");
  REQUIRE(run(c, out, err) == 0);
  CHECK(slurp(c.output.csv_path) == first);
  CHECK(slurp(c.output.svg_path) == first_svg);
}

TEST_CASE("run: error codes") {
  std::ostringstream out, err;
  auto c = parse_config(kFull2Induced);
  c.parameters.T = 5.0;
  c.parameters.q = 1;
  c.parameters.cap = 3;
  CHECK(run(c, out, err) == 2);
  CHECK(err.str().find("CapExceeded") != std::string::npos);
  CHECK(out.str().empty());

  TempDir dir;
  spit(dir.file("sweep.json"), replace(kSweep, ",\n  \"parameters\": {\"beta_grid\": [1, 2, 3, 4, 5, 6]}", ""));
  std::ostringstream out2, err2;
  CHECK(execute({"freeze-sweep", dir.file("sweep.json"), {}, {}, {}}, out2, err2) == 1);
  CHECK(err2.str().find("beta_grid") != std::string::npos);
  CHECK(execute({"induced", dir.file("nope.json"), {}, {}, {}}, out2, err2) == 1);

  spit(dir.file("induced.json"), kFull2Induced);
  CHECK(execute({"induced", dir.file("induced.json"), dir.file("no/such/dir.csv"), {}, {}}, out2, err2) == 2);
  CHECK(execute({"induced", dir.file("induced.json"), {}, dir.file("x.svg"), {}}, out2, err2) == 1);
  CHECK(execute({"induced", dir.file("induced.json"), dir.file("ok.csv"), {}, 7}, out2, err2) == 0);
  CHECK(slurp(dir.file("ok.csv")) == "method,T,q,value\nroot,,,0.481211825060\n");
}

TEST_CASE("the other commands produce tables") {
  const std::string sys = R"("system": {"alphabet_size": 2, "adjacency": [[1,1],[1,1]]},
    "potentials": {"phi": {"values": {"0": 1, "1": 0}}, "psi": {"values": {"0": 1, "1": 1}}})";
  auto table = [&](const std::string& command, const std::string& extra) {
    const auto c = parse_config("{\"command\": \"" + command + "\", " + sys + extra + "}");
    return compute(c).table;
  };
  const auto p = table("pressure", R"(, "parameters": {"n": 6})");
  CHECK(std::abs(std::stod(p.rows[0][3]) - std::log(1.0 + std::exp(1.0))) <= 1e-11);
  CHECK(p.rows.size() == 2);

  const auto z = table("zero-temp", "");
  CHECK(z.rows.size() == default_beta_schedule().size());
  CHECK(z.header.back() == "mass_11");
  CHECK(std::stod(z.rows.back()[2]) <= 1e-10);

  const auto m = table("max-ratio", "");
  CHECK(m.rows[0][0] == "1.00000000000");
  CHECK(m.rows[0][1] == "0");

  const auto e = table("estimate", R"(, "parameters": {"n": 5})");
  CHECK(e.rows.size() == 5);

  const auto nl = table("nonlinear", R"(, "functional": {"kind": "quadratic", "parameters": {"q": [[1]], "c": [0]}},
      "parameters": {"n": 8, "restarts": 4})");
  CHECK(std::abs(std::stod(nl.rows[0][2]) - 1.1453130) <= 1e-4);

  const auto ni = table("nonlinear-induced", R"(, "functional": {"kind": "linear", "parameters": {"c": [1]}},
      "parameters": {"restarts": 4})");
  CHECK(std::abs(std::stod(ni.rows[0][3]) - std::log(1.0 + std::exp(1.0))) <= 1e-5);
}

TEST_CASE("verify aggregates the suites") {
  std::ostringstream out, err;
  const auto c = parse_config(R"({"command": "verify", "parameters": {"seed": 0}})");
  CHECK(run(c, out, err) == 0);
  CHECK(out.str().find("FAIL") == std::string::npos);
  CHECK(out.str().find("induced properties") != std::string::npos);
  CHECK(out.str().find("Karp") != std::string::npos);

  // Injected fault: zero tolerance on identities.
  std::ostringstream out0, err0;
  const auto strict = parse_config(R"({"command": "verify", "parameters": {"tolerances": {"identity": 0}}})");
  CHECK(run(strict, out0, err0) != 0);
  CHECK(out0.str().find("FAIL") != std::string::npos);
}

TEST_CASE("render_sweep_svg") {
  const auto flat = sweep_of({0.4, 0.4}, {1.0, 1.0}, 6);
  const std::string a = render_sweep_svg(flat);
  CHECK(a.find("viewBox=\"0 0 800 500\"") != std::string::npos);
  CHECK(a.find("width=\"800\" height=\"500\"") != std::string::npos);
  // Constant φ: curve and asymptote are the same polyline.
  CHECK(attribute(a, "pressure") == attribute(a, "asymptote"));
  CHECK(render_sweep_svg(flat) == a);

  const auto full = sweep_of({1.0, 0.0}, {1.0, 1.0}, 6);
  for (std::size_t i = 0; i < full.gaps.size(); ++i) {
    CHECK(full.gaps[i] > 0.0);
    CHECK(std::abs(full.gaps[i] - std::log1p(std::exp(-full.betas[i]))) <= 1e-10);
  }
  const std::string b = render_sweep_svg(full);
  CHECK(attribute(b, "pressure") != attribute(b, "asymptote"));
  // Higher values sit at smaller y: every pressure point lies above the line.
  std::istringstream ps(attribute(b, "pressure")), ls(attribute(b, "asymptote"));
  std::string pp, lp;
  while (ps >> pp && ls >> lp) CHECK(std::stod(pp.substr(pp.find(',') + 1)) < std::stod(lp.substr(lp.find(',') + 1)));
  CHECK(b.find("largest gap 0.3133 at β = 1") != std::string::npos);

  auto single = full;
  single.betas.resize(1);
  single.pressures.resize(1);
  CHECK_THROWS_AS(render_sweep_svg(single), Error);
}
