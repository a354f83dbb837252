// Runs the larc executable on the fixture documents and checks exit codes
// and report contents.

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct Result {
  int code = -1;
  std::string out;
  std::string err;
  json report() const { return json::parse(out); }
};

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("larc_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Result larc(const std::string& args, const std::string& stdin_file = "") {
  const fs::path out = scratch() / "stdout.txt", err = scratch() / "stderr.txt";
  std::string cmd = std::string(LARC_BINARY) + " " + args + " >" + out.string() + " 2>" + err.string();
  if (!stdin_file.empty()) cmd += " <" + stdin_file;
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string data(const std::string& name) { return std::string(LARC_DATA_DIR) + "/" + name; }

std::string write_doc(const std::string& name, const std::string& content) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << content;
  return p.string();
}

bool mentions(const json& list, const std::string& needle) {
  for (const auto& s : list)
    if (s.get<std::string>().find(needle) != std::string::npos) return true;
  return false;
}

TEST(CliAnalyze, BlochIsControllable) {
  const auto r = larc("analyze " + data("bloch.json"));
  EXPECT_EQ(r.code, 0) << r.err;
  const auto j = r.report();
  EXPECT_EQ(j["verdict"], "controllable");
  EXPECT_EQ(j["closure_dim"], 3);
  EXPECT_EQ(j["tool"], "larc");
  EXPECT_EQ(j["command"], "analyze");
  EXPECT_EQ(j["input_digest"].get<std::string>().rfind("sha256:", 0), 0u);
}

TEST(CliAnalyze, ChainIsNotControllable) {
  const auto r = larc("analyze " + data("chain4.json"));
  EXPECT_EQ(r.code, 3) << r.err;
  const auto j = r.report();
  EXPECT_EQ(j["verdict"], "not_controllable");
  EXPECT_TRUE(mentions(j["diagnostics"], "e1"));
}

TEST(CliAnalyze, MalformedMatrixNamesTheField) {
  const auto r = larc("analyze " + data("malformed_not_skew.json"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("controls[1].matrix"), std::string::npos) << r.err;
  EXPECT_TRUE(r.out.empty());
}

TEST(CliAnalyze, Se2Documents) {
  EXPECT_EQ(larc("analyze " + data("se2_translations.json")).code, 0);
  EXPECT_EQ(larc("analyze " + data("unicycle.json")).code, 0);
}

TEST(CliAnalyze, InconclusiveAndAssertionConflict) {
  const auto drift = write_doc("drift.json", R"({"kind": "se", "n": 1,
      "drift": {"rotation": [[0]], "translation": [1]}})");
  EXPECT_EQ(larc("analyze " + drift).code, 4);
  const auto conflict = write_doc("conflict.json", R"({"kind": "se", "n": 2,
      "controls": [{"rotation": [[0, 0], [0, 0]], "translation": [1, 0]}], "assertions": {"compact": true}})");
  EXPECT_EQ(larc("analyze " + conflict).code, 2);
}

TEST(CliAnalyze, ProbeSeedAndToleranceFlags) {
  auto r = larc("analyze " + data("chain4.json") + " --probe 1,0,0,0 --seed 9");
  EXPECT_EQ(r.code, 3);
  auto j = r.report();
  EXPECT_EQ(j["rank_at_probe"], 0);
  EXPECT_EQ(j["seed"], 9);
  // a huge absolute threshold swallows every direction
  r = larc("analyze " + data("bloch.json") + " --tolerance 100");
  EXPECT_EQ(r.report()["rank_at_probe"], 0);
  EXPECT_EQ(larc("analyze " + data("bloch.json") + " --probe 1,0").code, 2);
  EXPECT_EQ(larc("analyze " + data("bloch.json") + " --tolerance -1").code, 2);
}

TEST(CliAnalyze, DeterministicApartFromTiming) {
  auto a = larc("analyze " + data("bloch.json") + " --seed 4").report();
  auto b = larc("analyze " + data("bloch.json") + " --seed 4").report();
  a.erase("elapsed_ms");
  b.erase("elapsed_ms");
  EXPECT_EQ(a.dump(), b.dump());
}

TEST(CliAnalyze, StdinAndAtomicOutput) {
  const fs::path target = scratch() / "report.json";
  const auto r = larc("analyze - -o " + target.string(), data("bloch.json"));
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(json::parse(slurp(target))["verdict"], "controllable");
  for (const auto& e : fs::directory_iterator(scratch()))
    EXPECT_EQ(e.path().filename().string().find(".tmp."), std::string::npos);
}

TEST(CliUsage, BadInvocations) {
  EXPECT_EQ(larc("").code, 1);
  EXPECT_EQ(larc("frobnicate x.json").code, 1);
  EXPECT_EQ(larc("analyze").code, 1);
  EXPECT_EQ(larc("analyze " + data("bloch.json") + " --seed notanumber").code, 1);
  EXPECT_EQ(larc("analyze /nonexistent/doc.json").code, 2);
}

TEST(CliGraph, Chain) {
  const auto r = larc("graph " + data("chain4.json") + " --cross-check");
  EXPECT_EQ(r.code, 3) << r.err;
  const auto j = r.report();
  EXPECT_FALSE(j["connected"].get<bool>());
  EXPECT_EQ(j["components"], json::parse("[[1], [2, 3, 4]]"));
  EXPECT_EQ(j["fixed_points"], json::parse("[[1.0, 0.0, 0.0, 0.0]]"));
  EXPECT_TRUE(j["cross_check"]["agrees"].get<bool>());
}

TEST(CliGraph, ConnectedExamples) {
  const auto tree = write_doc("tree.json", R"({"kind": "so", "n": 3, "controls": [{"edge": [1, 2]}, {"edge": [1, 3]}]})");
  auto r = larc("graph " + tree + " --cross-check");
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.report()["connected"].get<bool>());
  const auto single = write_doc("single.json", R"({"kind": "so", "n": 2, "controls": [{"edge": [1, 2]}]})");
  EXPECT_EQ(larc("graph " + single).code, 0);
}

TEST(CliGraph, NonEdgeGeneratorRejected) {
  const auto r = larc("graph " + data("bloch.json"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("edge"), std::string::npos);
}

TEST(CliOrbit, Chain) {
  auto r = larc("orbit " + data("chain4.json"));
  EXPECT_EQ(r.code, 0) << r.err;
  auto j = r.report();
  EXPECT_EQ(j["orbit_dim"], 2);
  EXPECT_TRUE(j["rank_constant"].get<bool>());
  EXPECT_EQ(j["local_dim_estimate"], 2);

  r = larc("orbit " + data("chain4.json") + " --probe 1,0,0,0");
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.report()["orbit_dim"], 0);
}

TEST(CliOrbit, FullSo3AndCsv) {
  const fs::path csv = scratch() / "orbit.csv";
  const auto r = larc("orbit " + data("full_so3.json") + " --count 40 --horizon 1.5 --csv " + csv.string());
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.report()["orbit_dim"], 2);
  const std::string text = slurp(csv);
  EXPECT_EQ(text.substr(0, text.find('\n')), "x1,x2,x3");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 41);
}

TEST(CliOrbit, TooFewSamplesIsASamplingError) {
  EXPECT_EQ(larc("orbit " + data("full_so3.json") + " --count 5").code, 5);
}

TEST(CliOrbit, NeedsABasePoint) {
  const auto doc = write_doc("noprobe.json", R"({"kind": "so", "n": 3, "controls": [{"edge": [1, 2]}]})");
  EXPECT_EQ(larc("orbit " + doc).code, 2);
}

TEST(CliSimulate, PiPulse) {
  const auto r = larc("simulate " + data("bloch_pi_pulse.json"));
  EXPECT_EQ(r.code, 0) << r.err;
  const auto x = r.report()["final_state"].get<std::vector<double>>();
  ASSERT_EQ(x.size(), 3u);
  EXPECT_NEAR(x[0], 0.0, 1e-9);
  EXPECT_NEAR(x[1], 0.0, 1e-9);
  EXPECT_NEAR(x[2], -1.0, 1e-9);
}

TEST(CliSimulate, ZeroScheduleIsConstant) {
  const auto sched = write_doc("zero.json", R"({"mesh": [0, 1, 2, 3], "values": [[0], [0], [0]]})");
  const auto doc = write_doc("static.json", R"({"kind": "so", "n": 3, "controls": [{"edge": [1, 2]}], "probe": [0.6, 0.8, 0]})");
  const auto r = larc("simulate " + doc + " --schedule " + sched);
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.report()["final_state"], json::parse("[0.6, 0.8, 0.0]"));
}

TEST(CliSimulate, ChainConfinedFromE2) {
  const fs::path csv = scratch() / "traj.csv";
  const auto r = larc("simulate " + data("chain4.json") + " --schedule " + data("chain4_schedule.json") +
                      " --oversample 10 --csv " + csv.string());
  EXPECT_EQ(r.code, 0) << r.err;
  std::istringstream in(slurp(csv));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,x1,x2,x3,x4");
  int rows = 0;
  while (std::getline(in, line)) {
    const auto first = line.find(','), second = line.find(',', first + 1);
    EXPECT_LE(std::abs(std::stod(line.substr(first + 1, second - first - 1))), 1e-9);
    ++rows;
  }
  EXPECT_EQ(rows, 51);
  EXPECT_EQ(r.report()["rank_histogram"], json::parse(R"({"2": 51})"));
}

TEST(CliSimulate, ScheduleErrors) {
  const auto wrong = write_doc("wrong.json", R"({"mesh": [0, 1], "values": [[1, 2, 3]]})");
  EXPECT_EQ(larc("simulate " + data("bloch.json") + " --schedule " + wrong).code, 2);
  EXPECT_EQ(larc("simulate " + data("bloch.json")).code, 2);
  const auto bad = write_doc("bad.json", R"({"mesh": [0, 0], "values": [[1, 2]]})");
  EXPECT_EQ(larc("simulate " + data("bloch.json") + " --schedule " + bad).code, 2);
}

}  // namespace
