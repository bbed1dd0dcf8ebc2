// graphonlab command-line driver.

#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "graphonlab.hpp"

namespace gl = graphonlab;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitCapacity = 3;
constexpr int kExitVerification = 4;

struct RunConfig {
  std::string subcommand;
  std::string graphon = "counterexample";
  double p = 0.5;
  double t = 0.6;
  std::size_t m = gl::kDefaultResolution;
  std::size_t n = gl::kDefaultGridSize;
  std::uint64_t seed = 20240001;
  std::string out = ".";
  std::string format = "json";
  std::string discretize = "cell-average";
  double eta = -1.0;  // negative: graphon default
  std::string map;    // mpm-v1 file
  std::string ops;    // inline ops, e.g. "exchange:4:3,1,4,2;expand:2"
  std::string other;  // second graphon for cutnorm/distance
  std::string method = "exhaustive";
  std::string n_list = "128,256,512,1024";
  std::string baseline;
  std::size_t bins = 64;

  [[nodiscard]] json to_json() const {
    return {{"subcommand", subcommand}, {"graphon", graphon}, {"p", p},           {"t", t},
            {"m", m},                   {"n", n},             {"seed", seed},     {"out", out},
            {"format", format},         {"discretize", discretize}, {"eta", eta}, {"map", map},
            {"ops", ops},               {"other", other},     {"method", method}, {"n_list", n_list},
            {"baseline", baseline},     {"bins", bins}};
  }
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) parts.push_back(item);
  return parts;
}

double parse_double(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw gl::DomainError("invalid number for " + what + ": \"" + s + "\"");
  return v;
}

std::size_t parse_size(const std::string& s, const std::string& what) {
  const double v = parse_double(s, what);
  if (v < 0 || v != std::floor(v)) throw gl::DomainError("invalid integer for " + what + ": \"" + s + "\"");
  return static_cast<std::size_t>(v);
}

/// Graphon argument: a family name, "family:param", or a path to a grid file.
gl::GraphonHandle make_graphon(const std::string& spec, const RunConfig& cfg) {
  const auto parts = split(spec, ':');
  const std::string family = parts.empty() ? "" : parts[0];
  auto param = [&](double fallback) { return parts.size() > 1 ? parse_double(parts[1], spec) : fallback; };
  if (family == "counterexample") return gl::AnalyticGraphon::counterexample();
  if (family == "constant") return gl::AnalyticGraphon::constant(param(cfg.p));
  if (family == "product") return gl::AnalyticGraphon::product();
  if (family == "threshold") return gl::AnalyticGraphon::threshold(param(cfg.t));
  if (std::filesystem::exists(spec)) return gl::load_grid(spec);
  throw gl::DomainError("unknown graphon \"" + spec +
                        "\" (expected counterexample, constant[:p], product, threshold[:t] or a grid file)");
}

gl::MeasurePreservingMap make_map(const RunConfig& cfg) {
  if (!cfg.map.empty() && !cfg.ops.empty()) throw gl::DomainError("--map and --ops are mutually exclusive");
  if (!cfg.map.empty()) return gl::io::map_from_json(gl::io::read_json_file(cfg.map));
  std::vector<gl::MapOp> ops;
  for (const auto& item : split(cfg.ops, ';')) {
    const auto f = split(item, ':');
    if (f.size() == 2 && f[0] == "expand") {
      ops.emplace_back(gl::Expand{static_cast<int>(parse_size(f[1], "expand factor"))});
    } else if (f.size() == 3 && f[0] == "exchange") {
      gl::Exchange ex{static_cast<int>(parse_size(f[1], "exchange blocks")), {}};
      for (const auto& v : split(f[2], ',')) ex.perm.push_back(static_cast<int>(parse_size(v, "permutation")) - 1);
      ops.emplace_back(std::move(ex));
    } else {
      throw gl::DomainError("invalid op \"" + item + "\" (expected exchange:k:p1,..,pk or expand:m)");
    }
  }
  return gl::MeasurePreservingMap(std::move(ops));
}

gl::DiscretizeMode discretize_mode(const RunConfig& cfg) {
  if (cfg.discretize == "midpoint") return gl::DiscretizeMode::midpoint;
  return gl::DiscretizeMode::cell_average;
}

/// Grids are used as-is; everything else is discretized at --n.
gl::GridGraphon as_grid(const gl::GraphonHandle& w, const RunConfig& cfg) {
  if (const auto* g = w.grid()) return *g;
  return gl::discretize(w, cfg.n, discretize_mode(cfg));
}

double eta_for(const gl::GraphonHandle& w, const RunConfig& cfg) {
  return cfg.eta < 0.0 ? w.default_eta() : cfg.eta;
}

class Output {
 public:
  explicit Output(const RunConfig& cfg) : dir_(cfg.out) { std::filesystem::create_directories(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void json_file(const std::string& name, const json& doc) const {
    gl::io::write_text(path(name), doc.dump(2) + "\n");
    std::cout << "wrote " << path(name) << '\n';
  }
  void text_file(const std::string& name, const std::string& text) const {
    gl::io::write_text(path(name), text);
    std::cout << "wrote " << path(name) << '\n';
  }

 private:
  std::filesystem::path dir_;
};

void write_profile(const RunConfig& cfg, const Output& out, const std::string& stem, const gl::io::ProfileData& p) {
  if (cfg.format == "csv")
    out.text_file(stem + ".csv", gl::io::profile_to_csv(p, cfg.to_json()));
  else
    out.json_file(stem + ".json", gl::io::profile_to_json(p, cfg.to_json()));
}

template <typename Law>
void write_law(const RunConfig& cfg, const Output& out, const std::string& stem, const Law& law) {
  if (cfg.format == "csv")
    out.text_file(stem + ".csv", gl::io::dist_to_csv(law, cfg.to_json()));
  else
    out.json_file(stem + ".json", gl::io::dist_to_json(law, cfg.to_json()));
}

void print_summary(const std::string& label, const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  std::cout << label << ": m=" << v.size() << " min=" << gl::io::fmt_double(*lo)
            << " max=" << gl::io::fmt_double(*hi)
            << " mean=" << gl::io::fmt_double(gl::exact_sum(v) / static_cast<double>(v.size())) << '\n';
}

// ---------------------------------------------------------------------------
// Subcommands

int cmd_build(const RunConfig& cfg) {
  const auto w = make_graphon(cfg.graphon, cfg);
  const auto g = gl::discretize(w, cfg.n, discretize_mode(cfg));
  Output out(cfg);
  gl::save_grid(g, out.path("grid.json"), {{"config", cfg.to_json()}, {"graphon", w.describe()}});
  std::cout << "wrote " << out.path("grid.json") << " (n=" << g.n() << ")\n";
  return kExitOk;
}

int cmd_degrees(const RunConfig& cfg) {
  const auto w = make_graphon(cfg.graphon, cfg);
  const auto p = gl::degree(w, cfg.m);
  print_summary("degree profile of " + w.describe(), p.values);
  write_profile(cfg, Output(cfg), "degrees", gl::io::to_data(p));
  return kExitOk;
}

int cmd_levels(const RunConfig& cfg) {
  const auto w = make_graphon(cfg.graphon, cfg);
  const auto p = gl::level_functional(w, cfg.m, eta_for(w, cfg));
  print_summary("level profile of " + w.describe() + " (eta=" + gl::io::fmt_double(p.eta) + ")", p.values);
  write_profile(cfg, Output(cfg), "levels", gl::io::to_data(p));
  return kExitOk;
}

int cmd_laws(const RunConfig& cfg) {
  const auto w = make_graphon(cfg.graphon, cfg);
  const auto s = gl::degree_level_samples(w, cfg.m, eta_for(w, cfg));
  const auto dl = gl::degree_law(s.degree);
  const auto ll = gl::level_law(s.level);
  const auto jl = gl::joint_law(s);
  std::cout << "degree law: " << dl.atoms().size() << " atoms; level law: " << ll.atoms().size()
            << " atoms; joint law: " << jl.atoms().size() << " atoms\n";
  for (const auto& a : ll.atoms())
    if (a.weight >= 0.01)
      std::cout << "  Leb{h = " << gl::io::fmt_double(a.value) << "} = " << gl::io::fmt_double(a.weight) << '\n';
  Output out(cfg);
  write_law(cfg, out, "degree_law", dl);
  write_law(cfg, out, "level_law", ll);
  write_law(cfg, out, "joint_law", jl);
  return kExitOk;
}

int cmd_pullback(const RunConfig& cfg) {
  const auto w = make_graphon(cfg.graphon, cfg);
  const auto phi = make_map(cfg);
  const auto pulled = gl::pullback(w, phi);
  const auto grid = as_grid(pulled, cfg);
  const auto before = gl::joint_law(gl::degree_level_samples(w, cfg.m, eta_for(w, cfg)));
  const auto after = gl::joint_law(gl::degree_level_samples(pulled, cfg.m, eta_for(w, cfg)));
  const double ks = gl::ks_distance(before, after);
  std::cout << "pullback of " << w.describe() << " along " << phi.ops().size() << " op(s)\n"
            << "joint (D,h) law KS distance to the original: " << gl::io::fmt_double(ks) << '\n';
  Output out(cfg);
  out.json_file("map.json", gl::io::map_to_json(phi));
  gl::save_grid(grid, out.path("pullback_grid.json"),
                {{"config", cfg.to_json()}, {"graphon", pulled.describe()}, {"joint_law_ks", ks}});
  std::cout << "wrote " << out.path("pullback_grid.json") << '\n';
  return kExitOk;
}

int cmd_sort(const RunConfig& cfg) {
  const auto g = as_grid(make_graphon(cfg.graphon, cfg), cfg);
  const auto s = gl::degree_sort(g);
  std::vector<std::size_t> order;
  for (auto i : s.order) order.push_back(i + 1);
  const auto before = gl::pattern_densities(g);
  const auto after = gl::pattern_densities(s.sorted);
  std::cout << "degree-sorted grid, n=" << g.n() << "; triangle density " << gl::io::fmt_double(before.triangle)
            << " -> " << gl::io::fmt_double(after.triangle) << '\n';
  Output out(cfg);
  gl::save_grid(s.sorted, out.path("sorted_grid.json"), {{"config", cfg.to_json()}, {"order", order}});
  std::cout << "wrote " << out.path("sorted_grid.json") << '\n';
  out.json_file("sort.json", {{"format", "degree-sort-v1"},
                              {"order", order},
                              {"degrees", s.sorted.row_means()},
                              {"config", cfg.to_json()}});
  return kExitOk;
}

gl::CutMethod cut_method(const RunConfig& cfg) {
  if (cfg.method == "exhaustive") return gl::CutMethod::exhaustive;
  if (cfg.method == "local-search") return gl::CutMethod::local_search;
  throw gl::DomainError("unknown cut-norm method \"" + cfg.method + "\"");
}

std::pair<gl::GridGraphon, gl::GridGraphon> grid_pair(const RunConfig& cfg) {
  auto a = as_grid(make_graphon(cfg.graphon, cfg), cfg);
  auto b = cfg.other.empty() ? gl::GridGraphon::constant(a.n(), 0.0) : as_grid(make_graphon(cfg.other, cfg), cfg);
  if (a.n() != b.n())
    throw gl::ValidationError("block counts differ: " + std::to_string(a.n()) + " vs " + std::to_string(b.n()));
  return {std::move(a), std::move(b)};
}

int cmd_cutnorm(const RunConfig& cfg) {
  const auto [a, b] = grid_pair(cfg);
  gl::CutNormOptions opt;
  opt.seed = cfg.seed;
  const auto r = gl::cut_norm(gl::StepKernel::difference(a, b), cut_method(cfg), opt);
  const auto certificate = gl::cut_value(gl::StepKernel::difference(a, b), r.rows, r.columns);
  std::cout << "cut norm " << gl::io::fmt_double(r.value) << " (" << gl::to_string(r.method) << ", "
            << r.iterations << " iterations); certificate |S|=" << r.rows.size() << " |T|=" << r.columns.size()
            << " recomputes to " << gl::io::fmt_double(certificate) << '\n';
  Output(cfg).json_file("cutnorm.json", gl::io::cut_to_json(r, cfg.to_json()));
  return kExitOk;
}

int cmd_distance(const RunConfig& cfg) {
  if (cfg.other.empty()) throw gl::DomainError("distance needs --other");
  const auto [a, b] = grid_pair(cfg);
  gl::CutDistanceOptions opt;
  opt.seed = cfg.seed;
  opt.cut.seed = cfg.seed;
  const auto upper = gl::cut_distance_upper(a, b, opt);
  const auto lower = gl::invariant_lower_bound(a, b);
  const double l1 = gl::l1_distance(a, b);
  std::vector<std::size_t> perm;
  for (auto i : upper.permutation) perm.push_back(i + 1);
  std::cout << "l1 " << gl::io::fmt_double(l1) << "\ncut distance upper bound " << gl::io::fmt_double(upper.value)
            << " (" << upper.search << ", " << upper.bound << ")\ninvariant lower bound "
            << gl::io::fmt_double(lower.value) << " (witness " << (lower.witness.empty() ? "none" : lower.witness)
            << ")\ndegree-law KS " << gl::io::fmt_double(lower.degree_law_ks)
            << (lower.inequivalent ? " (certifies inequivalence)" : "") << '\n';
  auto dens = [](const gl::PatternDensities& d) {
    return json{{"edge", d.edge}, {"path2", d.path2}, {"triangle", d.triangle}, {"cycle4", d.cycle4}};
  };
  Output(cfg).json_file("distance.json", {{"format", "distance-v1"},
                                          {"l1", l1},
                                          {"upper", {{"value", upper.value},
                                                     {"permutation", perm},
                                                     {"search", upper.search},
                                                     {"bound", upper.bound},
                                                     {"evaluated", upper.evaluated},
                                                     {"seed", upper.seed}}},
                                          {"lower", {{"value", lower.value},
                                                     {"witness", lower.witness},
                                                     {"densities_a", dens(lower.a)},
                                                     {"densities_b", dens(lower.b)},
                                                     {"degree_law_ks", lower.degree_law_ks},
                                                     {"inequivalent", lower.inequivalent}}},
                                          {"config", cfg.to_json()}});
  return kExitOk;
}

int cmd_verify(const RunConfig& cfg) {
  const auto w = make_graphon(cfg.graphon, cfg);
  const auto* family = w.analytic();
  if (family == nullptr) throw gl::DomainError("verify needs an analytic graphon family");
  gl::VerifyConfig vc;
  vc.m = cfg.m;
  vc.seed = cfg.seed;
  vc.degree_bins = cfg.bins;
  gl::ProofPipeline pipeline(*family, make_map(cfg), vc);
  const auto report = pipeline.run();
  std::cout << "graphon " << report.graphon << ", m=" << report.m << ", seed=" << report.seed << '\n'
            << gl::io::verify_table(report);
  Output out(cfg);
  out.json_file("verify.json", gl::io::verify_to_json(report, cfg.to_json()));
  if (cfg.format == "csv") {
    std::ostringstream os;
    os << "# config: " << cfg.to_json().dump() << "\nstep,pass,claimed,computed,tolerance\n";
    for (const auto& s : report.steps)
      os << s.id << ',' << (s.pass ? 1 : 0) << ',' << gl::io::fmt_double(s.claimed) << ','
         << gl::io::fmt_double(s.computed) << ',' << gl::io::fmt_double(s.tolerance) << '\n';
    out.text_file("verify.csv", os.str());
  }
  return report.ok() ? kExitOk : kExitVerification;
}

int cmd_sample(const RunConfig& cfg) {
  const auto w = make_graphon(cfg.graphon, cfg);
  const auto g = gl::sample_graph(w, cfg.n, cfg.seed);
  const auto degrees = gl::normalized_degrees(g);
  const auto law = gl::EmpiricalDistribution::from_samples(degrees);
  std::optional<double> ks;
  if (const auto* a = w.analytic()) ks = gl::ks_distance(law, gl::FamilyClaims(*a).degree_law()).distance;
  const double density = g.n() > 1 ? 2.0 * static_cast<double>(g.edge_count()) /
                                         (static_cast<double>(g.n()) * static_cast<double>(g.n() - 1))
                                   : 0.0;
  std::cout << "sampled " << g.n() << " vertices, " << g.edge_count() << " edges, edge density "
            << gl::io::fmt_double(density) << '\n';
  if (ks) std::cout << "KS(normalized degrees, Law(D)) = " << gl::io::fmt_double(*ks) << '\n';
  Output out(cfg);
  out.text_file("edges.txt", gl::io::edge_list(g));
  auto meta = gl::io::graph_metadata(g, w.describe(), cfg.to_json());
  meta["edge_density"] = density;
  if (ks) meta["degree_law_ks"] = *ks;
  out.json_file("graph.json", meta);
  return kExitOk;
}

int cmd_diverge(const RunConfig& cfg) {
  const auto w = make_graphon(cfg.graphon, cfg);
  std::vector<std::size_t> ns;
  for (const auto& s : split(cfg.n_list, ',')) ns.push_back(parse_size(s, "--n-list"));
  const auto rows = gl::sorted_discretization_divergence(w, ns, discretize_mode(cfg));
  json table = json::array();
  std::ostringstream csv;
  csv << "# config: " << cfg.to_json().dump() << "\nn_coarse,n_fine,l1\n";
  std::cout << "n_coarse n_fine l1\n";
  for (const auto& r : rows) {
    std::cout << r.coarse << ' ' << r.fine << ' ' << gl::io::fmt_double(r.l1) << '\n';
    table.push_back({{"n_coarse", r.coarse}, {"n_fine", r.fine}, {"l1", r.l1}});
    csv << r.coarse << ',' << r.fine << ',' << gl::io::fmt_double(r.l1) << '\n';
  }
  Output out(cfg);
  if (cfg.format == "csv")
    out.text_file("diverge.csv", csv.str());
  else
    out.json_file("diverge.json", {{"format", "diverge-v1"}, {"graphon", w.describe()}, {"rows", table},
                                   {"config", cfg.to_json()}});
  if (cfg.baseline.empty()) return kExitOk;

  const auto base = gl::io::read_json_file(cfg.baseline);
  const auto& brows = base.at("rows");
  bool match = brows.size() == rows.size();
  for (std::size_t i = 0; match && i < rows.size(); ++i)
    match = brows[i].at("n_coarse").get<std::size_t>() == rows[i].coarse &&
            brows[i].at("n_fine").get<std::size_t>() == rows[i].fine &&
            std::fabs(brows[i].at("l1").get<double>() - rows[i].l1) <= 1e-9;
  std::cout << "baseline " << cfg.baseline << (match ? ": match within 1e-9\n" : ": MISMATCH\n");
  return match ? kExitOk : kExitVerification;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graphonlab: graphon invariants, pull-backs, cut metrics and the increasing-degree obstruction"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string n_text = std::to_string(cfg.n);

  struct Entry {
    const char* name;
    const char* help;
    int (*run)(const RunConfig&);
  };
  const std::vector<Entry> entries{
      {"build", "discretize a graphon into a grid file", cmd_build},
      {"degrees", "degree profile D(x) at m midpoints", cmd_degrees},
      {"levels", "level functional h(x) at m midpoints", cmd_levels},
      {"laws", "degree, level and joint (D,h) laws", cmd_laws},
      {"pullback", "pull a graphon back along a measure-preserving map", cmd_pullback},
      {"sort", "relabel grid blocks by nondecreasing degree", cmd_sort},
      {"cutnorm", "cut norm of a grid (or of a difference with --other)", cmd_cutnorm},
      {"distance", "L1, cut-distance upper bound and invariant lower bound", cmd_distance},
      {"verify", "run the increasing-degree obstruction pipeline", cmd_verify},
      {"sample", "sample a W-random graph", cmd_sample},
      {"diverge", "L1 distances between degree-sorted discretizations", cmd_diverge},
  };

  int (*selected)(const RunConfig&) = nullptr;
  for (const auto& e : entries) {
    auto* sub = app.add_subcommand(e.name, e.help);
    sub->add_option("--graphon,-g", cfg.graphon,
                    "counterexample | constant[:p] | product | threshold[:t] | path to a grid file")
        ->capture_default_str();
    sub->add_option("--p", cfg.p, "constant family value")->capture_default_str();
    sub->add_option("--t", cfg.t, "threshold family parameter, W = 1{x+y > 2t}")->capture_default_str();
    sub->add_option("--m,-m", cfg.m, "sampling resolution for profiles and laws")
        ->capture_default_str()
        ->check(CLI::Range(std::size_t{1}, std::size_t{1} << 24));
    auto* n_opt = sub->add_option("--n,-n", n_text,
                                  "grid size or vertex count; for diverge a comma-separated increasing list "
                                  "(default 128,256,512,1024)")
                      ->capture_default_str();
    sub->add_option("--seed", cfg.seed, "seed recorded in every artifact")->capture_default_str();
    sub->add_option("--out,-o", cfg.out, "output directory")->capture_default_str();
    sub->add_option("--format", cfg.format, "artifact format")
        ->capture_default_str()
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--discretize", cfg.discretize, "discretization rule")
        ->capture_default_str()
        ->check(CLI::IsMember({"midpoint", "cell-average"}));
    sub->add_option("--eta", cfg.eta, "level tolerance (default 0 analytic, 1e-6 grids)");
    sub->add_option("--map", cfg.map, "measure-preserving map file (mpm-v1)");
    sub->add_option("--ops", cfg.ops, "inline map, e.g. \"exchange:4:3,1,4,2;expand:2\" (1-based perm)");
    sub->add_option("--other", cfg.other, "second graphon for cutnorm/distance");
    sub->add_option("--method", cfg.method, "cut-norm method")
        ->capture_default_str()
        ->check(CLI::IsMember({"exhaustive", "local-search"}));
    sub->add_option("--baseline", cfg.baseline, "diverge.json to compare against within 1e-9");
    sub->add_option("--bins", cfg.bins, "degree bins for conditional means")->capture_default_str();
    const auto run = e.run;
    const std::string name = e.name;
    sub->callback([&cfg, &selected, &n_text, n_opt, run, name] {
      cfg.subcommand = name;
      selected = run;
      if (name == "diverge") {
        if (n_opt->count() > 0) cfg.n_list = n_text;
      } else {
        cfg.n = parse_size(n_text, "--n");
        if (cfg.n == 0) throw gl::DomainError("--n must be positive");
      }
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const gl::DomainError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    return selected(cfg);
  } catch (const gl::CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << '\n';
    return kExitCapacity;
  } catch (const gl::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const gl::DomainError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
}
