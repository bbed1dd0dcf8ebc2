#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "distribution.hpp"
#include "error.hpp"
#include "functionals.hpp"
#include "grid_io.hpp"
#include "measure_map.hpp"
#include "metrics.hpp"
#include "sample.hpp"
#include "verify.hpp"

namespace graphonlab::io {

using nlohmann::json;

inline constexpr const char* kProfileFormat = "profile-v1";
inline constexpr const char* kDistFormat = "dist-v1";
inline constexpr const char* kMapFormat = "mpm-v1";
inline constexpr const char* kCutFormat = "cutnorm-v1";
inline constexpr const char* kVerifyFormat = "verify-v1";
inline constexpr const char* kGraphFormat = "sampled-graph-v1";

/// Shortest decimal that reads back to the same double.
inline std::string fmt_double(double v) {
  char buf[32];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError(path + ": malformed JSON (" + e.what() + ")");
  }
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path);
  out << text;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void require_format(const json& doc, const char* format) {
  if (!doc.is_object() || !doc.contains("format") || doc["format"] != format)
    throw ValidationError(std::string("expected a \"") + format + "\" document");
}

// ---------------------------------------------------------------------------
// Profiles

/// A sampled function on [0,1] as stored on disk; covers both degree and
/// level profiles.
struct ProfileData {
  std::string kind;  // "degree" | "level"
  std::string source;
  std::size_t m = 0;
  double eta = 0.0;
  bool exact = false;
  std::vector<double> values;

  friend bool operator==(const ProfileData&, const ProfileData&) = default;
};

inline ProfileData to_data(const DegreeProfile& p) { return {"degree", p.source, p.m, 0.0, p.exact, p.values}; }
inline ProfileData to_data(const LevelProfile& p) { return {"level", p.source, p.m, p.eta, false, p.values}; }

inline json profile_to_json(const ProfileData& p, const json& config = json::object()) {
  return {{"format", kProfileFormat}, {"kind", p.kind}, {"source", p.source}, {"m", p.m},
          {"eta", p.eta},           {"exact", p.exact}, {"values", p.values}, {"config", config}};
}

inline ProfileData profile_from_json(const json& doc) {
  require_format(doc, kProfileFormat);
  ProfileData p;
  try {
    p.kind = doc.at("kind").get<std::string>();
    p.source = doc.at("source").get<std::string>();
    p.m = doc.at("m").get<std::size_t>();
    p.eta = doc.at("eta").get<double>();
    p.exact = doc.at("exact").get<bool>();
    p.values = doc.at("values").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("profile: ") + e.what());
  }
  if (p.values.size() != p.m) throw ValidationError("profile: values length differs from m");
  return p;
}

/// CSV with a "# config:" comment line, a metadata comment and x,value rows.
inline std::string profile_to_csv(const ProfileData& p, const json& config = json::object()) {
  std::ostringstream os;
  os << "# config: " << config.dump() << '\n';
  os << "# profile: " << json{{"format", kProfileFormat}, {"kind", p.kind}, {"source", p.source},
                                {"m", p.m}, {"eta", p.eta}, {"exact", p.exact}}.dump()
     << '\n';
  os << "x,value\n";
  for (std::size_t k = 0; k < p.values.size(); ++k)
    os << fmt_double((static_cast<double>(k) + 0.5) / static_cast<double>(p.m)) << ','
       << fmt_double(p.values[k]) << '\n';
  return os.str();
}

namespace detail {

inline std::vector<std::vector<double>> csv_rows(const std::string& text, std::size_t columns,
                                                 std::vector<std::string>& comments) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<double>> rows;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      comments.push_back(line);
      continue;
    }
    if (!header) {
      header = true;
      continue;
    }
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0')
        throw ValidationError("csv: row " + std::to_string(rows.size() + 1) + " has a non-numeric cell");
      row.push_back(v);
    }
    if (row.size() != columns)
      throw ValidationError("csv: row " + std::to_string(rows.size() + 1) + " has " +
                            std::to_string(row.size()) + " cells");
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json comment_json(const std::vector<std::string>& comments, const std::string& tag) {
  const std::string prefix = "# " + tag + ": ";
  for (const auto& c : comments)
    if (c.rfind(prefix, 0) == 0) return json::parse(c.substr(prefix.size()));
  throw ValidationError("csv: missing \"" + prefix + "\" line");
}

}  // namespace detail

inline ProfileData profile_from_csv(const std::string& text) {
  std::vector<std::string> comments;
  const auto rows = detail::csv_rows(text, 2, comments);
  const auto meta = detail::comment_json(comments, "profile");
  ProfileData p;
  p.kind = meta.at("kind").get<std::string>();
  p.source = meta.at("source").get<std::string>();
  p.m = meta.at("m").get<std::size_t>();
  p.eta = meta.at("eta").get<double>();
  p.exact = meta.at("exact").get<bool>();
  for (const auto& r : rows) p.values.push_back(r[1]);
  if (p.values.size() != p.m) throw ValidationError("profile: row count differs from m");
  return p;
}

// ---------------------------------------------------------------------------
// Distributions

inline json dist_to_json(const EmpiricalDistribution& law, const json& config = json::object()) {
  json atoms = json::array();
  for (const auto& a : law.atoms()) atoms.push_back({a.value, a.weight});
  return {{"format", kDistFormat}, {"kind", "scalar"}, {"atoms", atoms}, {"config", config}};
}

inline json dist_to_json(const JointDistribution& law, const json& config = json::object()) {
  json atoms = json::array();
  for (const auto& a : law.atoms()) atoms.push_back({a.value.degree, a.value.level, a.weight});
  return {{"format", kDistFormat}, {"kind", "joint"}, {"atoms", atoms}, {"config", config}};
}

inline EmpiricalDistribution dist_from_json(const json& doc) {
  require_format(doc, kDistFormat);
  if (doc.value("kind", "") != "scalar") throw ValidationError("dist: expected kind \"scalar\"");
  std::vector<EmpiricalDistribution::Atom> atoms;
  try {
    for (const auto& a : doc.at("atoms")) atoms.push_back({a.at(0).get<double>(), a.at(1).get<double>()});
  } catch (const json::exception& e) {
    throw ValidationError(std::string("dist: ") + e.what());
  }
  return EmpiricalDistribution::from_atoms(std::move(atoms));
}

inline JointDistribution joint_from_json(const json& doc) {
  require_format(doc, kDistFormat);
  if (doc.value("kind", "") != "joint") throw ValidationError("dist: expected kind \"joint\"");
  std::vector<JointDistribution::Atom> atoms;
  try {
    for (const auto& a : doc.at("atoms"))
      atoms.push_back({{a.at(0).get<double>(), a.at(1).get<double>()}, a.at(2).get<double>()});
  } catch (const json::exception& e) {
    throw ValidationError(std::string("dist: ") + e.what());
  }
  return JointDistribution::from_atoms(std::move(atoms));
}

inline std::string dist_to_csv(const EmpiricalDistribution& law, const json& config = json::object()) {
  std::ostringstream os;
  os << "# config: " << config.dump() << '\n' << "# dist: {\"format\":\"" << kDistFormat << "\",\"kind\":\"scalar\"}\n";
  os << "value,weight,cdf\n";
  const auto& cum = law.cumulative();
  for (std::size_t i = 0; i < law.atoms().size(); ++i)
    os << fmt_double(law.atoms()[i].value) << ',' << fmt_double(law.atoms()[i].weight) << ',' << fmt_double(cum[i])
       << '\n';
  return os.str();
}

inline std::string dist_to_csv(const JointDistribution& law, const json& config = json::object()) {
  std::ostringstream os;
  os << "# config: " << config.dump() << '\n' << "# dist: {\"format\":\"" << kDistFormat << "\",\"kind\":\"joint\"}\n";
  os << "degree,level,weight\n";
  for (const auto& a : law.atoms())
    os << fmt_double(a.value.degree) << ',' << fmt_double(a.value.level) << ',' << fmt_double(a.weight) << '\n';
  return os.str();
}

inline EmpiricalDistribution dist_from_csv(const std::string& text) {
  std::vector<std::string> comments;
  const auto rows = detail::csv_rows(text, 3, comments);
  std::vector<EmpiricalDistribution::Atom> atoms;
  for (const auto& r : rows) atoms.push_back({r[0], r[1]});
  return EmpiricalDistribution::from_atoms(std::move(atoms));
}

inline JointDistribution joint_from_csv(const std::string& text) {
  std::vector<std::string> comments;
  const auto rows = detail::csv_rows(text, 3, comments);
  std::vector<JointDistribution::Atom> atoms;
  for (const auto& r : rows) atoms.push_back({{r[0], r[1]}, r[2]});
  return JointDistribution::from_atoms(std::move(atoms));
}

// ---------------------------------------------------------------------------
// Maps

inline json map_to_json(const MeasurePreservingMap& phi) {
  json ops = json::array();
  for (const auto& op : phi.ops()) {
    if (const auto* ex = std::get_if<Exchange>(&op)) {
      std::vector<int> perm;
      for (int p : ex->perm) perm.push_back(p + 1);
      ops.push_back({{"kind", "exchange"}, {"k", ex->k}, {"perm", perm}});
    } else {
      ops.push_back({{"kind", "expand"}, {"m", std::get<Expand>(op).m}});
    }
  }
  return {{"format", kMapFormat}, {"ops", ops}};
}

inline MeasurePreservingMap map_from_json(const json& doc) {
  require_format(doc, kMapFormat);
  std::vector<MapOp> ops;
  try {
    for (const auto& op : doc.at("ops")) {
      const auto kind = op.at("kind").get<std::string>();
      if (kind == "exchange") {
        Exchange ex{op.at("k").get<int>(), {}};
        for (int p : op.at("perm").get<std::vector<int>>()) ex.perm.push_back(p - 1);
        ops.emplace_back(std::move(ex));
      } else if (kind == "expand") {
        ops.emplace_back(Expand{op.at("m").get<int>()});
      } else {
        throw ValidationError("map: unknown op kind \"" + kind + "\"");
      }
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("map: ") + e.what());
  }
  try {
    return MeasurePreservingMap(std::move(ops));
  } catch (const DomainError& e) {
    throw ValidationError(std::string("map: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Metrics, verification and samples

inline json cut_to_json(const CutNormResult& r, const json& config = json::object()) {
  std::vector<std::size_t> rows, cols;
  for (auto i : r.rows) rows.push_back(i + 1);
  for (auto j : r.columns) cols.push_back(j + 1);
  return {{"format", kCutFormat}, {"value", r.value}, {"S", rows},        {"T", cols},
          {"method", to_string(r.method)}, {"iterations", r.iterations}, {"config", config}};
}

inline json step_to_json(const ProofStepReport& s) {
  return {{"id", s.id},           {"claim", s.claim}, {"claimed", s.claimed}, {"computed", s.computed},
          {"tolerance", s.tolerance}, {"pass", s.pass}, {"detail", s.detail}};
}

inline json certificate_to_json(const ContradictionCertificate& c) {
  json j = {{"law_h", dist_to_json(c.law_h)["atoms"]},
            {"law_h1", dist_to_json(c.law_h1)["atoms"]},
            {"forced_h1", c.forced_h1 ? json(*c.forced_h1) : json(nullptr)},
            {"tv_distance", c.tv_distance},
            {"tv_resolution", c.tv_resolution},
            {"verdict", to_string(c.verdict)},
            {"statement", c.statement}};
  return j;
}

inline json verify_to_json(const VerifyReport& r, const json& config = json::object()) {
  json steps = json::array();
  for (const auto& s : r.steps) steps.push_back(step_to_json(s));
  return {{"format", kVerifyFormat},
          {"graphon", r.graphon},
          {"m", r.m},
          {"seed", r.seed},
          {"steps", steps},
          {"certificate", certificate_to_json(r.certificate)},
          {"expected_verdict", to_string(r.expected)},
          {"all_steps_pass", r.all_steps_pass()},
          {"verdict_matches", r.verdict_matches()},
          {"config", config}};
}

/// Human-readable step table.
inline std::string verify_table(const VerifyReport& r) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-28s %-6s %14s %14s %12s\n", "step", "pass", "claimed", "computed", "tolerance");
  os << line;
  for (const auto& s : r.steps) {
    std::snprintf(line, sizeof line, "%-28s %-6s %14.8g %14.8g %12.3g\n", s.id.c_str(), s.pass ? "yes" : "NO",
                  s.claimed, s.computed, s.tolerance);
    os << line;
  }
  os << "TV(law h, law h1) = " << fmt_double(r.certificate.tv_distance) << "  verdict "
     << to_string(r.certificate.verdict) << " (expected " << to_string(r.expected) << ")\n";
  os << r.certificate.statement << '\n';
  return os.str();
}

/// One "i j" line per edge, 1-based, i < j.
inline std::string edge_list(const SampledGraph& g) {
  std::ostringstream os;
  for (const auto& [i, j] : g.edges()) os << i + 1 << ' ' << j + 1 << '\n';
  return os.str();
}

inline json graph_metadata(const SampledGraph& g, const std::string& graphon, const json& config = json::object()) {
  return {{"format", kGraphFormat}, {"n", g.n()},           {"seed", g.seed()},
          {"graphon", graphon},     {"edges", g.edge_count()}, {"positions", g.positions()},
          {"config", config}};
}

/// Rebuilds a graph from its edge list and metadata.
inline SampledGraph graph_from_files(const std::string& edges_text, const json& meta) {
  require_format(meta, kGraphFormat);
  const auto n = meta.at("n").get<std::size_t>();
  SampledGraph g(n, meta.at("positions").get<std::vector<double>>(), meta.at("seed").get<std::uint64_t>());
  std::istringstream in(edges_text);
  std::size_t i = 0, j = 0, line = 0;
  while (in >> i >> j) {
    ++line;
    if (i < 1 || j <= i || j > n) throw ValidationError("edge list: bad pair on line " + std::to_string(line));
    g.set_edge(i - 1, j - 1);
  }
  if (!in.eof()) throw ValidationError("edge list: malformed line " + std::to_string(line + 1));
  return g;
}

}  // namespace graphonlab::io
