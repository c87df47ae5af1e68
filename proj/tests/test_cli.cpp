#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli_app.hpp"
#include "oracles.hpp"

using namespace complement_lab;
using namespace complement_lab::testing;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "complement-lab");
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) {
    out.push_back(line);
  }
  return out;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string f; std::getline(in, f, ',');) {
    out.push_back(f);
  }
  return out;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("complement_lab_" + name)).string();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream(path) << text;
}

}  // namespace

TEST_CASE("analyze the three-path builtin") {
  const Outcome o = run({"analyze", "--builtin", "rangwala-roy", "--pair", "path,interference"});
  REQUIRE(o.code == 0);
  CHECK(o.out.find("Noncomplementary, Commuting") != std::string::npos);
}

TEST_CASE("analyze the qubit builtin") {
  const Outcome o = run({"analyze", "--builtin", "qubit-zx", "--pair", "Z,X"});
  REQUIRE(o.code == 0);
  CHECK(o.out.find("Complementary, TotallyNoncommuting") != std::string::npos);
  const Outcome csv = run({"analyze", "--builtin", "qubit-zx", "--pair", "Z,X", "--format", "csv"});
  REQUIRE(csv.code == 0);
  const auto rows = lines(csv.out);
  REQUIRE(rows.size() == 2);
  CHECK(fields(rows[1])[2] == "Complementary");
  CHECK(fields(rows[1])[3] == "TotallyNoncommuting");
  const Outcome json = run({"analyze", "--builtin", "qubit-zx", "--pair", "Z,X", "--format", "json"});
  REQUIRE(json.code == 0);
  CHECK(nlohmann::json::parse(json.out).at("analyses").size() == 1);
}

TEST_CASE("analyze input errors") {
  CHECK(run({"analyze", "--builtin", "qubit-zx", "--pair", "Z,Q"}).code == 2);
  CHECK(run({"analyze", "--builtin", "nope", "--pair", "Z,X"}).code == 2);
  CHECK(run({"analyze", "--builtin", "qubit-zx"}).code == 2);

  // A 3x3 matrix in a 2-dimensional file.
  const std::string path = temp_path("mismatch.json");
  write_file(path, R"({"version": 1, "dimension": 2,
    "matrices": {"A": [[1,0],[0,0],[0,0],[0,0]], "B": [[1,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0]]}})");
  const Outcome o = run({"analyze", "--file", path, "--pair", "A,B"});
  CHECK(o.code == 2);
  CHECK_FALSE(o.err.empty());

  write_file(path, "{ not json");
  CHECK(run({"analyze", "--file", path, "--pair", "A,B"}).code == 3);
  std::filesystem::remove(path);
}

TEST_CASE("simulate the three-path sweep") {
  const Outcome o =
      run({"simulate", "--builtin", "rangwala-roy", "--phi", "0:6.283:64", "--format", "csv"});
  REQUIRE(o.code == 0);
  const auto rows = lines(o.out);
  REQUIRE(rows.size() == 65);
  CHECK(rows[0] == "phi,p_Dr,p_Dt1,p_Dt2,anticoincidence");
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const auto f = fields(rows[k]);
    REQUIRE(f.size() == 5);
    CHECK(std::abs(std::stod(f[1]) - 0.5) <= 1e-12);
    CHECK(std::stod(f[4]) == 0.0);
  }
}

TEST_CASE("simulate the biprism") {
  const Outcome o = run({"simulate", "--builtin", "biprism", "--alpha2", "0.5", "--format", "csv"});
  REQUIRE(o.code == 0);
  const auto rows = lines(o.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == "p_Dr,p_Dt,anticoincidence");
  const auto f = fields(rows[1]);
  CHECK(std::abs(std::stod(f[0]) - 0.5) <= 1e-12);
  CHECK(std::abs(std::stod(f[1]) - 0.5) <= 1e-12);
}

TEST_CASE("simulate input errors") {
  CHECK(run({"simulate", "--builtin", "qubit-zx"}).code == 2);
  CHECK(run({"simulate", "--builtin", "rangwala-roy", "--phi", "0:1"}).code == 2);
  CHECK(run({"simulate", "--builtin", "rangwala-roy", "--phi", "0:1:x"}).code == 2);
  CHECK(run({"simulate", "--builtin", "biprism", "--phi", "0:1:3"}).code == 2);
}

TEST_CASE("duality tables") {
  const Outcome o = run({"duality", "--alpha2", "0:1:11", "--mu", "1"});
  REQUIRE(o.code == 0);
  int data_rows = 0;
  for (const auto& line : lines(o.out)) {
    if (line.empty() || line[0] == '#' || line.find("alpha2") != std::string::npos) {
      continue;
    }
    ++data_rows;
    CHECK(line.find("1.000000") != std::string::npos);
    CHECK(line.find("VIOLATION") == std::string::npos);
  }
  CHECK(data_rows == 11);

  const Outcome half = run({"duality", "--alpha2", "0.5", "--mu", "0.5", "--format", "csv"});
  REQUIRE(half.code == 0);
  const auto f = fields(lines(half.out)[1]);
  CHECK(std::abs(std::stod(f[2])) <= 1e-12);
  CHECK(std::abs(std::stod(f[3]) - 0.5) <= 1e-12);
  CHECK(std::abs(std::stod(f[4]) - 0.25) <= 1e-12);

  const Outcome one = run({"duality", "--alpha2", "1", "--mu", "0", "--format", "csv"});
  const auto g = fields(lines(one.out)[1]);
  CHECK(std::stod(g[2]) == 1.0);
  CHECK(std::stod(g[3]) == 0.0);

  CHECK(run({"duality", "--alpha2", "1:0"}).code == 2);
  CHECK(run({"duality", "--alpha2", "2"}).code == 2);
  CHECK(run({"duality", "--alpha2", "0.5", "--outside-wave"}).code == 2);
  CHECK(run({"duality", "--alpha2", "0.5", "--biprism", "2,3,1", "--outside-wave"}).code == 0);
}

TEST_CASE("grid syntax") {
  CHECK(cli::parse_grid("0.5") == std::vector<double>{0.5});
  CHECK(cli::parse_grid("0:1:3") == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(cli::parse_grid("0.1,0.2") == std::vector<double>{0.1, 0.2});
  CHECK_THROWS(cli::parse_grid(""));
  CHECK_THROWS(cli::parse_grid("0:1:0"));
}

TEST_CASE("output is deterministic") {
  const std::vector<std::string> args = {"analyze", "--builtin", "rangwala-roy", "--pair",
                                         "path,interference", "--format", "csv"};
  CHECK(run(args).out == run(args).out);
  const std::vector<std::string> sim = {"simulate", "--builtin", "rangwala-roy", "--phi",
                                        "0:6.283:16"};
  CHECK(run(sim).out == run(sim).out);
}

TEST_CASE("dump round-trips and the file reproduces the builtin") {
  const std::string path = temp_path("dump.json");
  const Outcome a = run({"analyze", "--builtin", "rangwala-roy", "--pair", "path,interference",
                         "--format", "csv", "--dump", path});
  REQUIRE(a.code == 0);
  std::ifstream in(path);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(parse_scene(text) == builtin::rangwala_roy());
  CHECK(dump_scene(parse_scene(text)) == text);

  const Outcome b =
      run({"analyze", "--file", path, "--pair", "path,interference", "--format", "csv"});
  REQUIRE(b.code == 0);
  CHECK(b.out == a.out);
  std::filesystem::remove(path);
}

TEST_CASE("run executes stored queries") {
  SceneFile f = builtin::qubit_zx();
  f.queries.push_back({"analyze", {{"pair", {"Z", "X"}}}});
  f.queries.push_back({"duality", {{"alpha2", "0:1:3"}}});
  const std::string path = temp_path("queries.json");
  write_file(path, dump_scene(f));
  const Outcome o = run({"run", path});
  REQUIRE(o.code == 0);
  CHECK(o.out.find("== query 0: analyze") != std::string::npos);
  CHECK(o.out.find("Complementary, TotallyNoncommuting") != std::string::npos);
  CHECK(o.out.find("== query 1: duality") != std::string::npos);

  f.queries.clear();
  write_file(path, dump_scene(f));
  CHECK(run({"run", path}).code == 2);
  std::filesystem::remove(path);
}

TEST_CASE("sample scenes run") {
  for (const char* name : {"mach_zehnder.json", "qutrit_pair.json"}) {
    const std::string path = std::string(COMPLEMENT_LAB_SCENES_DIR) + "/" + name;
    INFO(path);
    const Outcome o = run({"run", path});
    CHECK(o.code == 0);
    CHECK(o.err.empty());
  }
}
