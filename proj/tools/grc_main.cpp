// Batch front end: read graphs or matrices, run the coarsening pipelines,
// and emit JSON/CSV artifacts. Every artifact embeds the run configuration,
// so a report is reproducible from its own header. Multiple inputs are
// processed by a small worker pool; each pipeline is sequential and seeded.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "grc/coarsen_match.hpp"
#include "grc/errors.hpp"
#include "grc/graph.hpp"
#include "grc/hierarchy.hpp"
#include "grc/interpolate.hpp"
#include "grc/io.hpp"
#include "grc/ordering.hpp"
#include "grc/quality.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Everything a report needs to be re-run. Serialized into each artifact.
struct RunConfig {
  std::string command;
  std::vector<std::string> inputs;
  std::string format;  // "" = by extension
  std::string method;
  json params = json::object();
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  std::vector<std::string> reports;
};

json run_config_json(const RunConfig& c) {
  return json{{"command", c.command}, {"inputs", c.inputs},
              {"format", c.format},   {"method", c.method},
              {"params", c.params},   {"seed", c.seed},
              {"out_dir", c.out_dir}, {"reports", c.reports}};
}

void write_text(const fs::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw grc::IoError("cannot open " + path.string() + " for writing");
  out << body;
  if (!out) throw grc::IoError("short write to " + path.string());
}

void write_json_file(const fs::path& path, const json& j) { write_text(path, j.dump() + "\n"); }

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw grc::IoError("cannot open " + path);
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    throw grc::IoError(path + ": " + e.what());
  }
}

std::vector<int> int_array(const json& j, const std::string& what) {
  if (!j.is_array()) throw grc::IoError(what + ": expected a JSON array of integers");
  std::vector<int> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number_integer()) throw grc::IoError(what + ": expected a JSON array of integers");
    out.push_back(v.get<int>());
  }
  return out;
}

// Exit codes: 0 clean, 1 a pipeline rejected its input mathematically,
// 2 file/format trouble. The worst input wins for the process.
int classify(std::exception_ptr ep, std::string& message) {
  try {
    std::rethrow_exception(ep);
  } catch (const grc::IoError& e) {
    message = e.what();
    return 2;
  } catch (const std::exception& e) {
    message = e.what();
    return 1;
  }
}

struct InputOutcome {
  int code = 0;
  std::string line;  // human summary (stdout) or error (stderr)
};

// Run `work` over every input with a few threads; outcomes keep input order.
std::vector<InputOutcome> run_pool(const std::vector<std::string>& inputs,
                                   const std::function<std::string(const std::string&)>& work) {
  std::vector<InputOutcome> outcomes(inputs.size());
  std::atomic<std::size_t> next{0};
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= inputs.size()) return;
      try {
        outcomes[i].line = work(inputs[i]);
      } catch (...) {
        std::string msg;
        outcomes[i].code = classify(std::current_exception(), msg);
        outcomes[i].line = inputs[i] + ": error: " + msg;
      }
    }
  };
  unsigned workers = std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;
  workers = std::min<unsigned>(workers, static_cast<unsigned>(inputs.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < workers; ++t) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  return outcomes;
}

int report_outcomes(const std::vector<InputOutcome>& outcomes) {
  int worst = 0;
  for (const auto& o : outcomes) {
    if (o.code == 0)
      std::cout << o.line << "\n";
    else
      std::cerr << o.line << "\n";
    worst = std::max(worst, o.code);
  }
  return worst;
}

// Distinct output directories per input; a duplicate stem would make two
// workers race on the same files.
void require_unique_stems(const std::vector<std::string>& inputs) {
  std::set<std::string> seen;
  for (const auto& p : inputs) {
    const std::string stem = fs::path(p).stem().string();
    if (!seen.insert(stem).second)
      throw grc::IoError("two inputs share the output stem '" + stem +
                         "'; rename one or run them separately");
  }
}

double graph_density(const grc::Graph& g) {
  const double n = g.num_nodes();
  if (n < 2) return 0.0;
  return 2.0 * static_cast<double>(g.num_edges()) / (n * (n - 1.0));
}

// ---------------------------------------------------------------- coarsen

struct CoarsenArgs {
  std::vector<std::string> inputs;
  std::string method = "hem";
  int levels = 1;
  int min_nodes = 2;
  int target_nc = 0;
  double ratio = 0.0;
  double omega = 0.5;
  int steps = 20;
  double tau = 0.5;
  int rank = 0;
  std::string variant;    // lesc: leverage variant; spectral: qr|polar
  std::string direction;  // lesc visit order override
  std::string retain = "spectral";
  std::uint64_t seed = 1;
  std::string format;
  std::string out_dir = ".";
};

grc::LeverageVariant leverage_variant_from(const std::string& s) {
  if (s.empty() || s == "pinv_truncated") return grc::LeverageVariant::pinv_truncated;
  if (s == "pinv") return grc::LeverageVariant::pinv;
  if (s == "decay") return grc::LeverageVariant::decay;
  if (s == "full_decay") return grc::LeverageVariant::full_decay;
  throw grc::IoError("unknown leverage variant '" + s +
                     "' (expected decay, full_decay, pinv, or pinv_truncated)");
}

grc::MethodSpec method_from_args(const CoarsenArgs& a) {
  if (a.method == "hem") return grc::HemMethod{};
  if (a.method == "indset") return grc::IndsetMethod{};
  if (a.method == "algdist") {
    grc::AlgdistMethod m;
    m.options.omega = a.omega;
    m.options.steps = a.steps;
    return m;
  }
  if (a.method == "lesc") {
    grc::LescMethod m;
    m.n_c_target = a.target_nc;
    m.leverage.variant = leverage_variant_from(a.variant);
    m.leverage.rank = a.rank;
    m.leverage.tau = a.tau;
    if (a.direction == "asc")
      m.options.direction = grc::LescDirection::ascending;
    else if (a.direction == "desc")
      m.options.direction = grc::LescDirection::descending;
    else if (!a.direction.empty())
      throw grc::IoError("unknown direction '" + a.direction + "' (expected asc or desc)");
    return m;
  }
  if (a.method == "kron") {
    grc::KronMethod m;
    if (a.retain.rfind("file:", 0) == 0) {
      const std::string path = a.retain.substr(5);
      m.retained_level0 = int_array(read_json_file(path), path);
    } else if (a.retain != "spectral") {
      throw grc::IoError("unknown retain spec '" + a.retain + "' (expected spectral or file:PATH)");
    }
    return m;
  }
  if (a.method == "spectral") {
    grc::SpectralMethod m;
    m.m = a.rank > 0 ? a.rank : 1;
    if (a.target_nc > 0) m.groups = std::max(1, a.target_nc / m.m);
    if (a.variant == "polar")
      m.polar = true;
    else if (!a.variant.empty() && a.variant != "qr")
      throw grc::IoError("unknown spectral variant '" + a.variant + "' (expected qr or polar)");
    return m;
  }
  throw grc::IoError("unknown method '" + a.method + "'");
}

json coarsen_params_json(const CoarsenArgs& a) {
  json p{{"levels", a.levels}, {"min_nodes", a.min_nodes}, {"ratio", a.ratio}};
  if (a.method == "algdist") {
    p["omega"] = a.omega;
    p["steps"] = a.steps;
  } else if (a.method == "lesc") {
    p["target_nc"] = a.target_nc;
    p["tau"] = a.tau;
    p["rank"] = a.rank;
    p["variant"] = a.variant.empty() ? "pinv_truncated" : a.variant;
    p["direction"] = a.direction.empty() ? "auto" : a.direction;
  } else if (a.method == "kron") {
    p["retain"] = a.retain;
  } else if (a.method == "spectral") {
    p["preserved_per_group"] = a.rank > 0 ? a.rank : 1;
    p["target_nc"] = a.target_nc;
    p["variant"] = a.variant == "polar" ? "polar" : "qr";
  }
  return p;
}

int cmd_coarsen(const CoarsenArgs& args) {
  require_unique_stems(args.inputs);
  const grc::MethodSpec method = method_from_args(args);  // fail fast on bad flags

  RunConfig cfg;
  cfg.command = "coarsen";
  cfg.inputs = args.inputs;
  cfg.format = args.format;
  cfg.method = args.method;
  cfg.params = coarsen_params_json(args);
  cfg.seed = args.seed;
  cfg.out_dir = args.out_dir;
  cfg.reports = {"hierarchy.json", "summary.json", "level_<l>.mtx"};
  const json cfg_json = run_config_json(cfg);

  auto work = [&](const std::string& input) -> std::string {
    grc::Graph g = grc::read_graph(input, args.format);
    grc::StopRule stop;
    stop.max_levels = args.levels;
    stop.min_nodes = args.min_nodes;
    stop.ratio = args.ratio;
    grc::Hierarchy h = grc::coarsen_hierarchy(g, method, stop, args.seed);

    // Everything below is already computed; now produce the artifact set.
    const fs::path dir = fs::path(args.out_dir) / fs::path(input).stem();
    fs::create_directories(dir);

    json hier = grc::hierarchy_to_json(h);
    hier["run_config"] = cfg_json;
    write_json_file(dir / "hierarchy.json", hier);

    json levels = json::array();
    std::ostringstream sizes;
    sizes << "[";
    for (std::size_t l = 0; l < h.graphs.size(); ++l) {
      const grc::Graph& gl = h.graphs[l];
      levels.push_back(json{{"level", l},
                            {"nodes", gl.num_nodes()},
                            {"edges", gl.num_edges()},
                            {"density", graph_density(gl)}});
      grc::write_graph_mtx(gl, (dir / ("level_" + std::to_string(l) + ".mtx")).string());
      sizes << (l ? ", " : "") << gl.num_nodes();
      if (!gl.node_ids.empty()) {
        // Elimination methods: which previous-level nodes this level kept.
        json r{{"format", "retained-set"},
               {"level", l},
               {"indexing", "level-" + std::to_string(l - 1)},
               {"ids", gl.node_ids},
               {"run_config", cfg_json}};
        write_json_file(dir / ("retained_" + std::to_string(l) + ".json"), r);
      }
    }
    sizes << "]";
    json summary{{"format", "coarsen-summary"},
                 {"method", args.method},
                 {"levels", levels},
                 {"stalled", h.stalled},
                 {"run_config", cfg_json}};
    write_json_file(dir / "summary.json", summary);

    std::string note = h.stalled ? " (stalled)" : "";
    return input + ": levels " + sizes.str() + note + " -> " + dir.string();
  };

  return report_outcomes(run_pool(args.inputs, work));
}

// ---------------------------------------------------------------- metrics

struct MetricsArgs {
  std::string fine;
  std::string hierarchy;
  std::string coarse;
  std::string parents;
  std::string retained;
  int level = -1;  // -1: deepest
  std::uint64_t seed = 1;
  std::string format;
  std::string out_dir = ".";
};

// Transfer used to lift a level: the spectral methods record their own
// operator; everything else compares through the uniform transfer of the
// recorded partition.
grc::InterpolationOp step_transfer(const grc::HierarchyStep& step) {
  if (step.op.variant == grc::InterpVariant::spectral_p) return step.op;
  return grc::build_uniform_p(step.map);
}

grc::QualityReport sigma_report(const Eigen::MatrixXd& fine, const Eigen::MatrixXd& lifted) {
  grc::QualityReport rep;
  rep.sigma = grc::sigma_similarity(fine, lifted);
  rep.sigma_squared = rep.sigma * rep.sigma;
  if (std::isfinite(rep.sigma)) rep.sandwich = grc::eig_sandwich_check(fine, lifted, rep.sigma);
  return rep;
}

int cmd_metrics(const MetricsArgs& args) {
  const int with_hier = !args.hierarchy.empty();
  const int with_parents = !args.parents.empty();
  const int with_retained = !args.retained.empty();
  if (with_hier + with_parents + with_retained != 1)
    throw grc::IoError("pick one comparison: --hierarchy, --coarse+--parents, or --coarse+--retained");
  if ((with_parents || with_retained) && args.coarse.empty())
    throw grc::IoError("--parents/--retained need --coarse");
  if (with_hier && !args.coarse.empty())
    throw grc::IoError("--hierarchy and --coarse are mutually exclusive");

  RunConfig cfg;
  cfg.command = "metrics";
  cfg.inputs = {args.fine};
  if (!args.hierarchy.empty()) cfg.inputs.push_back(args.hierarchy);
  if (!args.coarse.empty()) cfg.inputs.push_back(args.coarse);
  if (!args.parents.empty()) cfg.inputs.push_back(args.parents);
  if (!args.retained.empty()) cfg.inputs.push_back(args.retained);
  cfg.format = args.format;
  cfg.seed = args.seed;
  cfg.out_dir = args.out_dir;
  cfg.reports = {"quality.json", "eigpairs.csv"};
  json cfg_json = run_config_json(cfg);

  grc::Graph g = grc::read_graph(args.fine, args.format);
  grc::QualityReport rep;
  std::string mode;
  int level = args.level;

  if (with_hier) {
    mode = "hierarchy";
    grc::Hierarchy h = grc::load_hierarchy(args.hierarchy);
    if (level < 0) level = h.levels();
    if (level < 1 || level > h.levels())
      throw std::invalid_argument("level " + std::to_string(level) +
                                  " not in this hierarchy (1.." + std::to_string(h.levels()) + ")");
    if (h.graphs[0].num_nodes() != g.num_nodes())
      throw std::invalid_argument("hierarchy was built on a graph with " +
                                  std::to_string(h.graphs[0].num_nodes()) +
                                  " nodes, the fine graph has " +
                                  std::to_string(g.num_nodes()));
    grc::SpMat form = grc::laplacian(h.graphs[level]).matrix;
    for (int l = level - 1; l >= 0; --l) form = grc::lift(form, step_transfer(h.steps[l]));
    rep = sigma_report(Eigen::MatrixXd(grc::laplacian(g).matrix), Eigen::MatrixXd(form));
    rep.notes.push_back("lifted level " + std::to_string(level) + " of " + args.hierarchy);
  } else if (with_parents) {
    mode = "parents";
    grc::Graph gc = grc::read_graph(args.coarse, args.format);
    grc::CoarseMap map;
    map.parent = int_array(read_json_file(args.parents), args.parents);
    map.n_c = gc.num_nodes();
    // External maps carry no matching history; tag every node the same way.
    map.tags.assign(map.parent.size(), grc::NodeTag::matched);
    if (static_cast<int>(map.parent.size()) != g.num_nodes())
      throw std::invalid_argument("parent map length " + std::to_string(map.parent.size()) +
                                  " does not match the fine graph (" +
                                  std::to_string(g.num_nodes()) + " nodes)");
    grc::validate_coarse_map(map);
    grc::InterpolationOp p = grc::build_uniform_p(map);
    const Eigen::MatrixXd lifted =
        Eigen::MatrixXd(grc::lift(grc::laplacian(gc).matrix, p));
    rep = sigma_report(Eigen::MatrixXd(grc::laplacian(g).matrix), lifted);
    rep.notes.push_back("coarse form lifted through the uniform transfer");
  } else {
    mode = "retained";
    grc::Graph gc = grc::read_graph(args.coarse, args.format);
    std::vector<int> retained = int_array(read_json_file(args.retained), args.retained);
    rep.resistance = grc::resistance_error(g, gc, retained, 0, args.seed);
    rep.notes.push_back("effective-resistance comparison over all retained pairs");
  }

  fs::create_directories(args.out_dir);
  json q = grc::quality_report_to_json(rep);
  q["mode"] = mode;
  if (with_hier) q["level"] = level;
  q["run_config"] = cfg_json;
  write_json_file(fs::path(args.out_dir) / "quality.json", q);
  write_text(fs::path(args.out_dir) / "eigpairs.csv", grc::eig_table_csv(rep.sandwich));

  std::ostringstream line;
  line << args.fine << ": ";
  if (rep.resistance) {
    line << "resistance max_rel_err " << rep.resistance->max_rel_err << " over "
         << rep.resistance->pairs << " pairs";
  } else {
    line << "sigma " << rep.sigma << ", subspace dim " << rep.sandwich.subspace_dim
         << ", max violation " << rep.sandwich.max_violation;
  }
  line << " -> " << args.out_dir;
  std::cout << line.str() << "\n";
  return 0;
}

// ------------------------------------------------------------------ order

struct OrderArgs {
  std::vector<std::string> inputs;
  int levels = 1;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
};

int cmd_order(const OrderArgs& args) {
  require_unique_stems(args.inputs);

  RunConfig cfg;
  cfg.command = "order";
  cfg.inputs = args.inputs;
  cfg.format = "mtx";
  cfg.params = json{{"levels", args.levels}};
  cfg.seed = args.seed;
  cfg.out_dir = args.out_dir;
  cfg.reports = {"permutation.json", "permutation.txt", "blocks.json", "spy.csv"};
  const json cfg_json = run_config_json(cfg);

  auto work = [&](const std::string& input) -> std::string {
    const grc::SpMat m = grc::read_matrix_mtx(input);
    grc::BlockOrdering ord = grc::coarsen_order(m, args.levels);

    const int n = static_cast<int>(m.rows());
    std::vector<int> position(n, 0);  // original index -> permuted row
    for (int r = 0; r < n; ++r) position[ord.permutation[r]] = r;
    std::vector<std::pair<int, int>> spy;
    spy.reserve(static_cast<std::size_t>(m.nonZeros()));
    for (int k = 0; k < m.outerSize(); ++k)
      for (grc::SpMat::InnerIterator it(m, k); it; ++it)
        spy.emplace_back(position[it.row()], position[it.col()]);
    std::sort(spy.begin(), spy.end());

    const fs::path dir = fs::path(args.out_dir) / fs::path(input).stem();
    fs::create_directories(dir);

    json perm{{"format", "block-ordering"},
              {"permutation", ord.permutation},
              {"block_sizes", ord.level_block_sizes},
              {"levels_requested", ord.levels_requested},
              {"levels_achieved", ord.levels_achieved},
              {"run_config", cfg_json}};
    write_json_file(dir / "permutation.json", perm);

    std::ostringstream txt;
    for (const int v : ord.permutation) txt << v << "\n";
    write_text(dir / "permutation.txt", txt.str());

    json blocks{{"format", "block-structure"},
                {"block_sizes", ord.level_block_sizes},
                {"levels_requested", ord.levels_requested},
                {"levels_achieved", ord.levels_achieved},
                {"run_config", cfg_json}};
    write_json_file(dir / "blocks.json", blocks);

    std::ostringstream csv;
    csv << "row,col\n";
    for (const auto& [r, c] : spy) csv << r << "," << c << "\n";
    write_text(dir / "spy.csv", csv.str());

    std::ostringstream line;
    line << input << ": blocks [";
    for (std::size_t i = 0; i < ord.level_block_sizes.size(); ++i)
      line << (i ? ", " : "") << ord.level_block_sizes[i];
    line << "], depth " << ord.levels_achieved << "/" << ord.levels_requested << " -> "
         << dir.string();
    if (ord.levels_achieved < ord.levels_requested)
      line << " (stopped early: no further coupling to split)";
    return line.str();
  };

  return report_outcomes(run_pool(args.inputs, work));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multilevel graph coarsening, reduction, and ordering toolkit"};
  app.require_subcommand(1);

  CoarsenArgs ca;
  CLI::App* coarsen = app.add_subcommand("coarsen", "build a coarsening hierarchy per input graph");
  coarsen->add_option("inputs", ca.inputs, "graph files")->required()->expected(-1);
  coarsen->add_option("--method", ca.method, "hem|lesc|algdist|indset|kron|spectral")
      ->check(CLI::IsMember({"hem", "lesc", "algdist", "indset", "kron", "spectral"}));
  coarsen->add_option("--levels", ca.levels, "coarsening steps to attempt");
  coarsen->add_option("--min-nodes", ca.min_nodes, "stop at or below this size");
  coarsen->add_option("--target-nc", ca.target_nc,
                      "coarse node target at the first level (lesc, spectral)");
  coarsen->add_option("--ratio", ca.ratio, "stop once n_level <= ratio * n_0");
  coarsen->add_option("--omega", ca.omega, "smoothing damping (algdist)");
  coarsen->add_option("--steps", ca.steps, "smoothing steps (algdist)");
  coarsen->add_option("--tau", ca.tau, "decay temperature (lesc)");
  coarsen->add_option("--rank", ca.rank,
                      "leverage rank (lesc) / eigenvectors preserved per group (spectral)");
  coarsen->add_option("--variant", ca.variant,
                      "lesc: decay|full_decay|pinv|pinv_truncated; spectral: qr|polar");
  coarsen->add_option("--direction", ca.direction, "lesc visit order: asc|desc")
      ->check(CLI::IsMember({"asc", "desc"}));
  coarsen->add_option("--retain", ca.retain, "kron retained set: spectral or file:PATH");
  coarsen->add_option("--seed", ca.seed, "root seed");
  coarsen->add_option("--format", ca.format, "input format: mtx|edgelist (default: by extension)")
      ->check(CLI::IsMember({"mtx", "edgelist"}));
  coarsen->add_option("--out", ca.out_dir, "output directory (one subdirectory per input)");

  MetricsArgs ma;
  CLI::App* metrics =
      app.add_subcommand("metrics", "compare a fine graph against a coarse form");
  metrics->add_option("--fine", ma.fine, "fine graph file")->required();
  metrics->add_option("--hierarchy", ma.hierarchy, "hierarchy JSON produced by coarsen");
  metrics->add_option("--level", ma.level, "hierarchy level to compare (default: deepest)");
  metrics->add_option("--coarse", ma.coarse, "coarse graph file");
  metrics->add_option("--parents", ma.parents, "JSON parent array (fine node -> group 1..n_c)");
  metrics->add_option("--retained", ma.retained, "JSON retained-node array (resistance mode)");
  metrics->add_option("--seed", ma.seed, "seed echoed into the report");
  metrics->add_option("--format", ma.format, "graph format: mtx|edgelist")
      ->check(CLI::IsMember({"mtx", "edgelist"}));
  metrics->add_option("--out", ma.out_dir, "output directory");

  OrderArgs oa;
  CLI::App* order = app.add_subcommand("order", "nested two-block ordering of square matrices");
  order->add_option("inputs", oa.inputs, "MatrixMarket files")->required()->expected(-1);
  order->add_option("--levels", oa.levels, "nesting depth to attempt");
  order->add_option("--seed", oa.seed, "seed echoed into the report");
  order->add_option("--out", oa.out_dir, "output directory (one subdirectory per input)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;  // help/version exit clean, usage trouble is 2
  }

  try {
    if (coarsen->parsed()) return cmd_coarsen(ca);
    if (metrics->parsed()) return cmd_metrics(ma);
    return cmd_order(oa);
  } catch (const grc::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
