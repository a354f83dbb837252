#pragma once

// System documents (JSON), control schedules and report serialization.
//
// A system document:
//
//   {
//     "schema_version": "1",
//     "kind": "so" | "se" | "general",
//     "n": 4,
//     "drift": <block>,                      optional
//     "controls": [<block>, ...],
//     "assertions": {"compact": false, "proper_action": false,
//                    "drift_periodic": false, "finite_fundamental_group": false},
//     "probe": [x1, ..., xn],                optional
//     "seed": 0,
//     "tolerance": 1e-12                     optional absolute rank threshold
//   }
//
// A block is {"matrix": rows or flat row-major array}, {"edge": [i, j]}
// (kind so, Omega_ij = E_ij - E_ji) or {"rotation": rows, "translation": [..]}
// (kind se).

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <openssl/evp.h>

#include "json.hpp"
#include "larc/affine.hpp"
#include "larc/algebra.hpp"
#include "larc/graphcrit.hpp"
#include "larc/rankcond.hpp"
#include "larc/sim.hpp"

namespace larc {

using json = nlohmann::json;

inline constexpr const char* kSchemaVersion = "1";
inline constexpr const char* kToolVersion = "0.1.0";

/// Input error addressed to a field of the document, e.g. "controls[1].matrix".
class DocumentError : public InputError {
 public:
  DocumentError(const std::string& path, const std::string& message)
      : InputError(path + ": " + message), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct GeneratorBlock {
  enum class Form { matrix, edge, affine };
  Form form = Form::matrix;
  Matrix matrix;
  std::pair<int, int> edge{0, 0};
  Matrix rotation;
  Vector translation;
};

struct SystemDocument {
  std::string schema_version = kSchemaVersion;
  GeneratorKind kind = GeneratorKind::skew;
  int n = 0;
  std::optional<GeneratorBlock> drift;
  std::vector<GeneratorBlock> controls;
  GroupAssertions assertions;
  std::optional<Vector> probe;
  std::uint64_t seed = 0;
  std::optional<double> tolerance;
};

namespace detail {

inline double number_at(const json& j, const std::string& path) {
  if (!j.is_number()) throw DocumentError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw DocumentError(path, "non-finite number");
  return v;
}

inline Vector vector_at(const json& j, const std::string& path, std::optional<int> size = std::nullopt) {
  if (!j.is_array()) throw DocumentError(path, "expected an array of numbers");
  if (size && static_cast<int>(j.size()) != *size) {
    throw DocumentError(path, "expected " + std::to_string(*size) + " entries, got " + std::to_string(j.size()));
  }
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) v(static_cast<Eigen::Index>(k)) = number_at(j[k], path + "[" + std::to_string(k) + "]");
  return v;
}

// Nested rows, or a flat row-major array of dim*dim numbers.
inline Matrix matrix_at(const json& j, const std::string& path, int dim) {
  if (!j.is_array()) throw DocumentError(path, "expected a matrix (array of rows or flat row-major array)");
  Matrix m(dim, dim);
  if (!j.empty() && j.front().is_array()) {
    if (static_cast<int>(j.size()) != dim) {
      throw DocumentError(path, "expected " + std::to_string(dim) + " rows, got " + std::to_string(j.size()));
    }
    for (int r = 0; r < dim; ++r) m.row(r) = vector_at(j[r], path + "[" + std::to_string(r) + "]", dim).transpose();
    return m;
  }
  const Vector flat = vector_at(j, path, dim * dim);
  return unvectorize(flat, dim, dim);
}

inline bool bool_at(const json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key)) return false;
  if (!obj[key].is_boolean()) throw DocumentError(path + "." + key, "expected true or false");
  return obj[key].get<bool>();
}

inline GeneratorBlock block_at(const json& j, const std::string& path, GeneratorKind kind, int n) {
  if (!j.is_object()) throw DocumentError(path, "expected a generator block object");
  GeneratorBlock b;
  const int forms = int(j.contains("matrix")) + int(j.contains("edge")) + int(j.contains("rotation") || j.contains("translation"));
  if (forms != 1) throw DocumentError(path, "give exactly one of 'matrix', 'edge', or 'rotation'+'translation'");
  if (j.contains("matrix")) {
    b.form = GeneratorBlock::Form::matrix;
    b.matrix = matrix_at(j["matrix"], path + ".matrix", matrix_dim(kind, n));
    if (kind == GeneratorKind::skew && !is_skew(b.matrix)) throw DocumentError(path + ".matrix", "not skew-symmetric (kind so)");
    if (kind == GeneratorKind::affine) {
      if (!is_skew(b.matrix.topLeftCorner(n, n))) throw DocumentError(path + ".matrix", "rotation block not skew-symmetric");
      if (b.matrix.row(n).cwiseAbs().maxCoeff() != 0.0) throw DocumentError(path + ".matrix", "bottom row must be zero");
    }
  } else if (j.contains("edge")) {
    if (kind != GeneratorKind::skew) throw DocumentError(path + ".edge", "edge shorthand needs kind so");
    const auto& e = j["edge"];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
      throw DocumentError(path + ".edge", "expected [i, j] with integer vertex indices");
    }
    b.form = GeneratorBlock::Form::edge;
    b.edge = {e[0].get<int>(), e[1].get<int>()};
    try {
      b.matrix = omega(n, b.edge.first, b.edge.second);
    } catch (const InputError& err) {
      throw DocumentError(path + ".edge", err.what());
    }
  } else {
    if (kind != GeneratorKind::affine) throw DocumentError(path, "rotation/translation blocks need kind se");
    if (!j.contains("rotation") || !j.contains("translation")) {
      throw DocumentError(path, "se block needs both 'rotation' and 'translation'");
    }
    b.form = GeneratorBlock::Form::affine;
    b.rotation = matrix_at(j["rotation"], path + ".rotation", n);
    b.translation = vector_at(j["translation"], path + ".translation", n);
    if (!is_skew(b.rotation)) throw DocumentError(path + ".rotation", "not skew-symmetric");
    b.matrix = embed(AffineGenerator(b.rotation, b.translation));
  }
  return b;
}

}  // namespace detail

inline GeneratorKind parse_kind(const std::string& s) {
  if (s == "so") return GeneratorKind::skew;
  if (s == "se") return GeneratorKind::affine;
  if (s == "general") return GeneratorKind::general;
  throw DocumentError("kind", "expected \"so\", \"se\" or \"general\", got \"" + s + "\"");
}

inline SystemDocument parse_system(const json& j) {
  if (!j.is_object()) throw DocumentError("$", "system document must be a JSON object");
  SystemDocument doc;
  if (j.contains("schema_version")) {
    if (!j["schema_version"].is_string()) throw DocumentError("schema_version", "expected a string");
    doc.schema_version = j["schema_version"].get<std::string>();
    if (doc.schema_version != kSchemaVersion) {
      throw DocumentError("schema_version", "unsupported version \"" + doc.schema_version + "\"");
    }
  }
  if (!j.contains("kind") || !j["kind"].is_string()) throw DocumentError("kind", "missing or not a string");
  doc.kind = parse_kind(j["kind"].get<std::string>());
  if (!j.contains("n") || !j["n"].is_number_integer() || j["n"].get<int>() < 1) {
    throw DocumentError("n", "missing or not a positive integer");
  }
  doc.n = j["n"].get<int>();
  if (j.contains("drift") && !j["drift"].is_null()) doc.drift = detail::block_at(j["drift"], "drift", doc.kind, doc.n);
  if (j.contains("controls")) {
    if (!j["controls"].is_array()) throw DocumentError("controls", "expected an array of generator blocks");
    for (std::size_t k = 0; k < j["controls"].size(); ++k) {
      doc.controls.push_back(detail::block_at(j["controls"][k], "controls[" + std::to_string(k) + "]", doc.kind, doc.n));
    }
  }
  if (doc.controls.empty() && !doc.drift) throw DocumentError("controls", "need a drift or at least one control");
  if (j.contains("assertions")) {
    const auto& a = j["assertions"];
    if (!a.is_object()) throw DocumentError("assertions", "expected an object");
    doc.assertions.compact = detail::bool_at(a, "compact", "assertions");
    doc.assertions.proper_action = detail::bool_at(a, "proper_action", "assertions");
    doc.assertions.drift_periodic = detail::bool_at(a, "drift_periodic", "assertions");
    doc.assertions.finite_fundamental_group = detail::bool_at(a, "finite_fundamental_group", "assertions");
  }
  if (j.contains("probe") && !j["probe"].is_null()) doc.probe = detail::vector_at(j["probe"], "probe", doc.n);
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<std::int64_t>() >= 0)) {
      throw DocumentError("seed", "expected a non-negative integer");
    }
    doc.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("tolerance") && !j["tolerance"].is_null()) {
    const double t = detail::number_at(j["tolerance"], "tolerance");
    if (t <= 0.0) throw DocumentError("tolerance", "must be > 0");
    doc.tolerance = t;
  }
  return doc;
}

inline SystemDocument parse_system_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DocumentError("$", std::string("invalid JSON: ") + e.what());
  }
  return parse_system(j);
}

inline GeneratorSet to_generators(const SystemDocument& doc) {
  std::optional<Matrix> drift;
  if (doc.drift) drift = doc.drift->matrix;
  std::vector<Matrix> controls;
  for (const auto& b : doc.controls) controls.push_back(b.matrix);
  return GeneratorSet(doc.kind, doc.n, std::move(drift), std::move(controls), doc.assertions);
}

inline TolerancePolicy tolerance_of(const SystemDocument& doc) { return TolerancePolicy{doc.tolerance}; }

struct DocumentGraph {
  EdgeSpec spec;
  std::optional<std::pair<int, int>> drift_edge;
};

/// Edge data of a document whose generators are all edge blocks; the drift
/// edge is part of the graph.
inline DocumentGraph document_graph(const SystemDocument& doc) {
  std::vector<std::pair<int, int>> edges;
  std::optional<std::pair<int, int>> drift_edge;
  if (doc.drift) {
    if (doc.drift->form != GeneratorBlock::Form::edge) throw DocumentError("drift", "graph criterion needs edge blocks");
    drift_edge = doc.drift->edge;
    edges.push_back(doc.drift->edge);
  }
  for (std::size_t k = 0; k < doc.controls.size(); ++k) {
    if (doc.controls[k].form != GeneratorBlock::Form::edge) {
      throw DocumentError("controls[" + std::to_string(k) + "]", "graph criterion needs edge blocks");
    }
    edges.push_back(doc.controls[k].edge);
  }
  return {EdgeSpec(doc.n, edges), drift_edge};
}

/// {"mesh": [t0, ..., tK], "values": [[u...], ...]}
inline ControlSchedule parse_schedule(const json& j) {
  if (!j.is_object()) throw DocumentError("$", "schedule must be a JSON object");
  if (!j.contains("mesh")) throw DocumentError("mesh", "missing");
  if (!j.contains("values") || !j["values"].is_array()) throw DocumentError("values", "missing or not an array");
  const Vector mesh = detail::vector_at(j["mesh"], "mesh");
  std::vector<Vector> values;
  for (std::size_t k = 0; k < j["values"].size(); ++k) values.push_back(detail::vector_at(j["values"][k], "values[" + std::to_string(k) + "]"));
  try {
    return ControlSchedule(std::vector<double>(mesh.data(), mesh.data() + mesh.size()), std::move(values));
  } catch (const InputError& e) {
    throw DocumentError("schedule", e.what());
  }
}

// ---------------------------------------------------------------------------
// Reports

inline json to_json(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

inline Vector vector_from_json(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

inline json to_json(const GroupAssertions& a) {
  return {{"compact", a.compact},
          {"proper_action", a.proper_action},
          {"drift_periodic", a.drift_periodic},
          {"finite_fundamental_group", a.finite_fundamental_group}};
}

inline json to_json(const AnalysisReport& r) {
  json criteria = json::array();
  for (auto c : r.criteria_used) criteria.push_back(to_string(c));
  return {{"verdict", to_string(r.verdict)},
          {"kind", to_string(r.kind)},
          {"n", r.n},
          {"rank_at_probe", r.rank_at_probe},
          {"probe_point", {{"space", to_string(r.probe_point.space())}, {"coords", to_json(r.probe_point.coords())}}},
          {"required_rank", r.required_rank},
          {"orbit_dim", r.orbit_dim},
          {"closure_dim", r.closure_dim},
          {"ambient_algebra_dim", r.ambient_algebra_dim},
          {"sampled_ranks", r.sampled_ranks},
          {"group_larc", r.group_larc},
          {"mode", r.mode},
          {"criteria_used", criteria},
          {"assumptions", to_json(r.assumptions)},
          {"diagnostics", r.diagnostics},
          {"seed", r.seed}};
}

inline AnalysisReport report_from_json(const json& j) {
  AnalysisReport r;
  const auto verdict = j.at("verdict").get<std::string>();
  if (verdict == "controllable") r.verdict = Verdict::controllable;
  else if (verdict == "not_controllable") r.verdict = Verdict::not_controllable;
  else if (verdict == "inconclusive") r.verdict = Verdict::inconclusive;
  else throw DocumentError("verdict", "unknown verdict \"" + verdict + "\"");
  r.kind = parse_kind(j.at("kind").get<std::string>());
  r.n = j.at("n").get<int>();
  r.rank_at_probe = j.at("rank_at_probe").get<int>();
  const auto& p = j.at("probe_point");
  const Space space = p.at("space").get<std::string>() == "sphere" ? Space::sphere : Space::euclidean;
  r.probe_point = StatePoint::raw(space, vector_from_json(p.at("coords")));
  r.required_rank = j.at("required_rank").get<int>();
  r.orbit_dim = j.at("orbit_dim").get<int>();
  r.closure_dim = j.at("closure_dim").get<int>();
  r.ambient_algebra_dim = j.at("ambient_algebra_dim").get<int>();
  r.sampled_ranks = j.at("sampled_ranks").get<std::vector<int>>();
  r.group_larc = j.at("group_larc").get<bool>();
  r.mode = j.at("mode").get<std::string>();
  for (const auto& c : j.at("criteria_used")) {
    const auto s = c.get<std::string>();
    if (s == "single_point_rank") r.criteria_used.push_back(Criterion::single_point_rank);
    else if (s == "graph_connectivity") r.criteria_used.push_back(Criterion::graph_connectivity);
    else if (s == "group_larc") r.criteria_used.push_back(Criterion::group_larc);
    else throw DocumentError("criteria_used", "unknown criterion \"" + s + "\"");
  }
  const auto& a = j.at("assumptions");
  r.assumptions = {a.at("compact").get<bool>(), a.at("proper_action").get<bool>(), a.at("drift_periodic").get<bool>(),
                   a.at("finite_fundamental_group").get<bool>()};
  r.diagnostics = j.at("diagnostics").get<std::vector<std::string>>();
  r.seed = j.at("seed").get<std::uint64_t>();
  return r;
}

inline std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int k = 0; k < len; ++k) {
    char buf[3];
    std::snprintf(buf, sizeof buf, "%02x", digest[k]);
    hex += buf;
  }
  return hex;
}

/// Envelope around a command's output. `elapsed_ms` is the only field that
/// may differ between runs on identical input.
inline json report_document(const std::string& command, const std::string& input_text, json body, double elapsed_ms) {
  body["tool"] = "larc";
  body["version"] = kToolVersion;
  body["command"] = command;
  body["input_digest"] = "sha256:" + sha256_hex(input_text);
  body["elapsed_ms"] = elapsed_ms;
  return body;
}

}  // namespace larc
