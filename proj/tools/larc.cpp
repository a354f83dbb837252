// larc: controllability analysis of bilinear systems on matrix Lie group orbits.
//
// Exit codes: 0 controllable / success, 3 not controllable, 4 inconclusive,
// 1 usage error, 2 input error, 5 sampling error, 6 numerical failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "CLI11.hpp"
#include "larc/io.hpp"
#include "larc/larc.hpp"

namespace {

using namespace larc;

enum Exit { kOk = 0, kUsage = 1, kInput = 2, kNotControllable = 3, kInconclusive = 4, kSampling = 5, kNumerical = 6 };

struct Common {
  std::string input = "-";
  std::vector<double> probe;
  std::optional<std::uint64_t> seed;
  std::optional<double> tolerance;
  std::string output;
};

std::string read_input(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Write to a sibling temporary, then rename over the target.
void write_atomically(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  const std::filesystem::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError(path + ": cannot write");
    out << content;
    out.flush();
    if (!out) throw InputError(path + ": write failed");
  }
  std::filesystem::rename(tmp, target);
}

void emit(const Common& c, const json& report) {
  const std::string text = report.dump(2) + "\n";
  if (c.output.empty()) {
    std::cout << text << std::flush;
  } else {
    write_atomically(c.output, text);
  }
}

struct Loaded {
  std::string text;
  json raw;
  SystemDocument doc;
  GeneratorSet gens;
  std::uint64_t seed;
  TolerancePolicy tolerance;
  std::optional<StatePoint> probe;
};

Loaded load(const Common& c) {
  Loaded l{read_input(c.input), {}, {}, GeneratorSet(GeneratorKind::general, 1, std::nullopt, {Matrix::Zero(1, 1)}), 0, {}, {}};
  try {
    l.raw = json::parse(l.text);
  } catch (const json::parse_error& e) {
    throw DocumentError("$", std::string("invalid JSON: ") + e.what());
  }
  l.doc = parse_system(l.raw);
  l.gens = to_generators(l.doc);
  l.seed = c.seed ? *c.seed : l.doc.seed;
  l.tolerance = tolerance_of(l.doc);
  if (c.tolerance) {
    if (!(*c.tolerance > 0.0)) throw InputError("--tolerance must be > 0");
    l.tolerance.absolute = *c.tolerance;
  }
  std::optional<Vector> p = l.doc.probe;
  if (!c.probe.empty()) p = Eigen::Map<const Vector>(c.probe.data(), static_cast<Eigen::Index>(c.probe.size()));
  if (p) {
    if (p->size() != l.doc.n) throw DocumentError("probe", "expected " + std::to_string(l.doc.n) + " coordinates");
    l.probe = StatePoint::for_kind(l.doc.kind, *p);
  }
  return l;
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

int exit_for(Verdict v) {
  switch (v) {
    case Verdict::controllable:
      return kOk;
    case Verdict::not_controllable:
      return kNotControllable;
    case Verdict::inconclusive:
      return kInconclusive;
  }
  return kInconclusive;
}

std::string format_point(const Vector& v) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index k = 0; k < v.size(); ++k) os << (k ? ", " : "") << v(k);
  os << ")";
  return os.str();
}

AnalysisReport run_analysis(const Loaded& l) {
  AnalyzeOptions opt;
  opt.probe = l.probe;
  opt.seed = l.seed;
  opt.tolerance = l.tolerance;
  return analyze(l.gens, opt);
}

int cmd_analyze(const Common& c) {
  const auto start = std::chrono::steady_clock::now();
  const Loaded l = load(c);
  const AnalysisReport r = run_analysis(l);
  emit(c, report_document("analyze", l.text, to_json(r), elapsed_ms(start)));
  std::cerr << to_string(r.verdict) << ": rank " << r.rank_at_probe << " at " << format_point(r.probe_point.coords())
            << ", required " << r.required_rank << ", closure dimension " << r.closure_dim << "/"
            << r.ambient_algebra_dim << "\n";
  for (const auto& d : r.diagnostics) std::cerr << "  " << d << "\n";
  return exit_for(r.verdict);
}

int cmd_graph(const Common& c, bool cross_check) {
  const auto start = std::chrono::steady_clock::now();
  const Loaded l = load(c);
  if (l.doc.kind != GeneratorKind::skew) throw DocumentError("kind", "graph criterion needs kind so");
  const DocumentGraph g = document_graph(l.doc);
  const bool connected = is_connected(g.spec);
  const Verdict verdict = connected ? Verdict::controllable : Verdict::not_controllable;

  json body;
  body["n"] = g.spec.n();
  body["edges"] = g.spec.edges();
  body["connected"] = connected;
  body["verdict"] = to_string(verdict);
  body["components"] = components(g.spec);
  json fixed = json::array();
  for (const auto& p : fixed_points(g.spec)) fixed.push_back(to_json(p.coords()));
  body["fixed_points"] = fixed;
  int code = exit_for(verdict);
  if (cross_check) {
    const AnalysisReport r = run_analysis(l);
    const bool agree = r.verdict == verdict;
    body["cross_check"] = {{"rank_verdict", to_string(r.verdict)}, {"agrees", agree}};
    if (!agree) {
      std::cerr << "cross-check failed: graph says " << to_string(verdict) << ", rank test says "
                << to_string(r.verdict) << "\n";
      code = kInconclusive;
    }
  }
  emit(c, report_document("graph", l.text, body, elapsed_ms(start)));
  std::cerr << (connected ? "connected" : "not connected") << ": " << components(g.spec).size() << " component(s)\n";
  return code;
}

int cmd_orbit(const Common& c, int count, double horizon, const std::string& csv) {
  const auto start = std::chrono::steady_clock::now();
  const Loaded l = load(c);
  if (!l.probe) throw DocumentError("probe", "orbit needs a base point (document 'probe' or --probe)");
  const LieBasis basis = lie_closure(l.gens, l.tolerance);

  SampleOptions so;
  so.count = count;
  so.horizon = horizon;
  so.seed = l.seed;
  const OrbitSample sample = sample_orbit(l.gens, *l.probe, so);
  const RankConstancy constancy = verify_rank_constancy(basis, sample, l.tolerance);
  const int orbit_dim = rank_at(basis, *l.probe, l.tolerance);

  LocalSampleOptions lo;
  lo.count = count;
  lo.seed = l.seed;
  const int local_dim = estimate_local_dim(local_orbit_sample(l.gens, *l.probe, lo), *l.probe);

  if (!csv.empty()) {
    std::ostringstream os;
    write_orbit_csv(os, sample);
    write_atomically(csv, os.str());
  }

  json hist = json::object();
  for (const auto& [rank, n] : constancy.histogram) hist[std::to_string(rank)] = n;
  json body;
  body["base_point"] = to_json(l.probe->coords());
  body["orbit_dim"] = orbit_dim;
  body["closure_dim"] = basis.dim();
  body["rank_constant"] = constancy.constant;
  body["rank_histogram"] = hist;
  body["local_dim_estimate"] = local_dim;
  body["local_dim_agrees"] = local_dim == orbit_dim;
  body["count"] = count;
  body["horizon"] = horizon;
  body["seed"] = l.seed;
  emit(c, report_document("orbit", l.text, body, elapsed_ms(start)));
  std::cerr << "orbit dimension " << orbit_dim << ", rank " << (constancy.constant ? "constant" : "NOT constant")
            << " over " << count << " samples, local estimate " << local_dim << "\n";
  return constancy.constant ? kOk : kInconclusive;
}

int cmd_simulate(const Common& c, const std::string& schedule_path, int oversample, const std::string& csv) {
  const auto start = std::chrono::steady_clock::now();
  const Loaded l = load(c);
  if (!l.probe) throw DocumentError("probe", "simulate needs an initial state (document 'probe' or --probe)");
  json sched_json;
  if (!schedule_path.empty()) {
    try {
      sched_json = json::parse(read_input(schedule_path));
    } catch (const json::parse_error& e) {
      throw DocumentError("schedule", std::string("invalid JSON: ") + e.what());
    }
  } else if (l.raw.contains("schedule")) {
    sched_json = l.raw["schedule"];
  } else {
    throw DocumentError("schedule", "missing (document 'schedule' or --schedule)");
  }
  const ControlSchedule schedule = parse_schedule(sched_json);
  if (schedule.controls() != static_cast<int>(l.gens.controls().size())) {
    throw DocumentError("schedule.values", "expected " + std::to_string(l.gens.controls().size()) +
                                                " control values per interval, got " +
                                                std::to_string(schedule.controls()));
  }
  const Trajectory traj = run(l.gens, *l.probe, schedule, oversample);
  const ConservationSummary summary = summarize(traj, lie_closure(l.gens, l.tolerance), l.tolerance);

  if (!csv.empty()) {
    std::ostringstream os;
    write_trajectory_csv(os, traj);
    write_atomically(csv, os.str());
  }

  json hist = json::object();
  for (const auto& [rank, n] : summary.rank_histogram) hist[std::to_string(rank)] = n;
  json body;
  body["initial_state"] = to_json(l.probe->coords());
  body["final_state"] = to_json(traj.states.back().coords());
  body["final_time"] = traj.times.back();
  body["samples"] = traj.states.size();
  body["max_norm_drift"] = summary.max_norm_drift;
  body["rank_histogram"] = hist;
  body["oversample"] = oversample;
  emit(c, report_document("simulate", l.text, body, elapsed_ms(start)));
  std::cerr << traj.states.size() << " states, final " << format_point(traj.states.back().coords())
            << ", max norm drift " << summary.max_norm_drift << ", ranks along trajectory:";
  for (const auto& [rank, n] : summary.rank_histogram) std::cerr << " " << rank << "x" << n;
  std::cerr << "\n";
  return kOk;
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("input", c.input, "System document (JSON), '-' for stdin")->required();
  sub->add_option("--probe", c.probe, "Point x1,x2,... overriding the document probe")->delimiter(',');
  sub->add_option("--seed", c.seed, "Seed overriding the document seed");
  sub->add_option("--tolerance", c.tolerance, "Absolute rank threshold");
  sub->add_option("-o,--output", c.output, "Write the JSON report here (atomically) instead of stdout");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Controllability of bilinear systems via the Lie algebra rank condition"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(larc::kToolVersion));

  Common common;
  auto* analyze_cmd = app.add_subcommand("analyze", "Closure, rank and controllability verdict");
  add_common(analyze_cmd, common);

  bool cross_check = false;
  auto* graph_cmd = app.add_subcommand("graph", "Connectivity criterion for edge generators");
  add_common(graph_cmd, common);
  graph_cmd->add_flag("--cross-check", cross_check, "Also run the rank test and require agreement");

  int count = 100;
  double horizon = 2.0 * 3.14159265358979323846;
  std::string csv;
  auto* orbit_cmd = app.add_subcommand("orbit", "Sample the orbit of the probe and check rank constancy");
  add_common(orbit_cmd, common);
  orbit_cmd->add_option("--count", count, "Number of orbit samples")->check(CLI::PositiveNumber);
  orbit_cmd->add_option("--horizon", horizon, "Flow times are drawn from [-horizon, horizon]")->check(CLI::PositiveNumber);
  orbit_cmd->add_option("--csv", csv, "Write sampled points as CSV");

  std::string schedule;
  int oversample = 1;
  auto* sim_cmd = app.add_subcommand("simulate", "Integrate a piecewise-constant control schedule");
  add_common(sim_cmd, common);
  sim_cmd->add_option("--schedule", schedule, "Schedule document {mesh, values}");
  sim_cmd->add_option("--oversample", oversample, "States recorded per interval")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--csv", csv, "Write the trajectory as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (analyze_cmd->parsed()) return cmd_analyze(common);
    if (graph_cmd->parsed()) return cmd_graph(common, cross_check);
    if (orbit_cmd->parsed()) return cmd_orbit(common, count, horizon, csv);
    if (sim_cmd->parsed()) return cmd_simulate(common, schedule, oversample, csv);
  } catch (const SamplingError& e) {
    std::cerr << "sampling error: " << e.what() << "\n";
    return kSampling;
  } catch (const SaturationError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const AssertionError& e) {
    std::cerr << "assertion error: " << e.what() << "\n";
    return kInput;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "output error: " << e.what() << "\n";
    return kInput;
  }
  return kUsage;
}
