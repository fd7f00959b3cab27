#include "grc/hierarchy.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include "grc/rng.hpp"

namespace grc {

namespace {

const char* kind_name(LaplacianKind k) {
  return k == LaplacianKind::combinatorial ? "combinatorial" : "normalized";
}

const char* variant_name(LeverageVariant v) {
  switch (v) {
    case LeverageVariant::decay: return "decay";
    case LeverageVariant::full_decay: return "full_decay";
    case LeverageVariant::pinv: return "pinv";
    default: return "pinv_truncated";
  }
}

const char* interp_name(InterpVariant v) {
  switch (v) {
    case InterpVariant::binary_c: return "binary_c";
    case InterpVariant::uniform_p: return "uniform_p";
    default: return "spectral_p";
  }
}

InterpVariant interp_from(const std::string& s) {
  if (s == "binary_c") return InterpVariant::binary_c;
  if (s == "uniform_p") return InterpVariant::uniform_p;
  if (s == "spectral_p") return InterpVariant::spectral_p;
  throw IoError("hierarchy: unknown operator variant '" + s + "'");
}

struct StepResult {
  Graph coarse;
  HierarchyStep step;
};

InterpolationOp partition_op(const CoarseMap& map, InterpVariant variant) {
  return variant == InterpVariant::uniform_p ? build_uniform_p(map) : build_c(map);
}

// Contract a level graph through the recorded operator: weighted Galerkin
// product on the adjacency, diagonal (intra-group) weight dropped.
Graph contract_graph(const Graph& g, const InterpolationOp& op, bool binarize) {
  GalerkinOptions gopts;
  gopts.adjacency = true;
  gopts.binarize = binarize;
  return graph_from_adjacency(galerkin_coarse(SpMat(g.adjacency()), op, gopts));
}

std::optional<StepResult> build_step(const Graph& cur, const MethodSpec& method, int level,
                                     std::uint64_t seed, InterpVariant op_variant) {
  const int n = cur.num_nodes();
  StepResult r;
  r.step.seed = seed;
  r.step.method = method_name(method);
  r.step.params = nlohmann::json::object();

  if (std::holds_alternative<HemMethod>(method)) {
    r.step.map = hem(cur);
    r.step.op = partition_op(r.step.map, op_variant);
    r.coarse = contract_graph(cur, r.step.op, false);
  } else if (const auto* ls = std::get_if<LescMethod>(&method)) {
    LeverageOptions lev = ls->leverage;
    lev.eigs.seed = seed;
    if (lev.rank > 0) lev.rank = std::min(lev.rank, n - 1);  // deep levels shrink past the default
    const LeverageScores scores = leverage_scores(cur, lev);
    const int target = (level == 0 && ls->n_c_target > 0) ? ls->n_c_target : (n + 1) / 2;
    r.step.map = lesc(cur, scores, target, seed, ls->options);
    r.step.op = partition_op(r.step.map, op_variant);
    r.coarse = contract_graph(cur, r.step.op, false);
    r.step.params = {{"variant", variant_name(scores.variant)},
                     {"rank", scores.rank},
                     {"tau", scores.tau},
                     {"kind", kind_name(lev.kind)},
                     {"n_c_target", target}};
  } else if (const auto* ad = std::get_if<AlgdistMethod>(&method)) {
    AlgdistOptions aopts = ad->options;
    aopts.eigs.seed = seed;
    const AlgebraicDistances d = algebraic_distances(cur, seed, aopts);
    r.step.map = algdist_matching(cur, d);
    r.step.op = partition_op(r.step.map, op_variant);
    r.coarse = contract_graph(cur, r.step.op, false);
    r.step.params = {{"omega", d.omega},
                     {"steps", d.steps},
                     {"lambda2_scaled", d.lambda2_scaled}};
  } else if (std::holds_alternative<IndsetMethod>(method)) {
    const std::vector<int> s = maximal_independent_set(cur, seed);
    auto [gc, red] = indset_coarsen(cur, s);
    r.step.map = coarse_map_from_members(cur, s);
    r.step.op = partition_op(r.step.map, op_variant);
    r.coarse = std::move(gc);
    r.step.params = {{"set_size", static_cast<int>(s.size())}};
  } else if (const auto* kr = std::get_if<KronMethod>(&method)) {
    std::vector<int> retained;
    const char* source;
    if (level == 0 && !kr->retained_level0.empty()) {
      retained = kr->retained_level0;
      source = "explicit";
    } else {
      EigsOptions eopts;
      eopts.seed = seed;
      retained = spectral_downsample(cur, kr->polarity_kind, eopts);
      source = "spectral";
    }
    auto [gc, red] = kron_reduce(cur, retained);
    r.step.map = coarse_map_from_retained(cur, retained);
    r.step.op = partition_op(r.step.map, op_variant);
    r.coarse = std::move(gc);
    r.step.params = {{"polarity_kind", kind_name(kr->polarity_kind)},
                     {"retained_size", static_cast<int>(retained.size())},
                     {"retained_source", source}};
  } else {
    const auto& sp = std::get<SpectralMethod>(method);
    if (sp.m < 1) throw std::invalid_argument("spectral coarsening: need at least one vector");
    const int k = sp.groups > 0 ? sp.groups : std::max(1, n / (2 * sp.m));
    if (sp.m * k >= n || sp.m + 1 > n) return std::nullopt;  // cannot shrink: stall
    const CoarseMap part = default_preserve_partition(cur, k);
    EigsOptions eopts;
    eopts.seed = seed;
    const EigenBasis basis = eigs(laplacian(cur), sp.m + 1, SpectrumEnd::smallest, eopts);
    if (sp.m == 1) {
      r.step.op = preserve_one(cur, basis.vectors.col(1), part);
    } else {
      PreserveManyOptions popts;
      popts.polar = sp.polar;
      r.step.op = preserve_many(cur, basis.vectors.rightCols(sp.m), part, popts);
    }
    r.step.map = part;
    r.coarse = contract_graph(cur, r.step.op, true);  // signed entries: binarize
    r.step.params = {{"m", sp.m},
                     {"groups", k},
                     {"polar", sp.polar},
                     {"vectors", "smallest_nontrivial"}};
  }
  return r;
}

}  // namespace

std::string method_name(const MethodSpec& method) {
  if (std::holds_alternative<HemMethod>(method)) return "hem";
  if (std::holds_alternative<LescMethod>(method)) return "lesc";
  if (std::holds_alternative<AlgdistMethod>(method)) return "algdist";
  if (std::holds_alternative<IndsetMethod>(method)) return "indset";
  if (std::holds_alternative<KronMethod>(method)) return "kron";
  return "spectral";
}

Hierarchy coarsen_hierarchy(const Graph& g, const MethodSpec& method, const StopRule& stop,
                            std::uint64_t root_seed, const HierarchyOptions& opts) {
  if (stop.max_levels < 0) throw std::invalid_argument("coarsen_hierarchy: negative level budget");
  Hierarchy h;
  h.graphs.push_back(g);
  h.method = method_name(method);
  h.root_seed = root_seed;

  const double ratio_floor = stop.ratio > 0.0 ? std::ceil(stop.ratio * g.num_nodes()) : 0.0;
  for (int level = 0; level < stop.max_levels; ++level) {
    const Graph& cur = h.graphs.back();
    if (cur.num_nodes() <= stop.min_nodes) break;
    if (stop.ratio > 0.0 && cur.num_nodes() <= ratio_floor) break;

    auto result = build_step(cur, method, level, level_seed(root_seed, level), opts.op_variant);
    if (!result || result->coarse.num_nodes() >= cur.num_nodes()) {
      h.stalled = true;  // the step failed to shrink the graph; drop it
      break;
    }
    h.steps.push_back(std::move(result->step));
    h.graphs.push_back(std::move(result->coarse));
  }
  return h;
}

Eigen::VectorXd project_to_level(const Hierarchy& h, const Eigen::VectorXd& x, int level) {
  if (level < 0 || level > h.levels())
    throw std::invalid_argument("project_to_level: level out of range");
  if (x.size() != h.graphs[0].num_nodes())
    throw std::invalid_argument("project_to_level: vector length does not match level 0");
  Eigen::VectorXd v = x;
  for (int l = 0; l < level; ++l) v = h.steps[l].op.matrix.transpose() * v;
  return v;
}

Eigen::VectorXd prolong_from_level(const Hierarchy& h, const Eigen::VectorXd& xc, int level) {
  if (level < 0 || level > h.levels())
    throw std::invalid_argument("prolong_from_level: level out of range");
  if (xc.size() != h.graphs[level].num_nodes())
    throw std::invalid_argument("prolong_from_level: vector length does not match the level");
  Eigen::VectorXd v = xc;
  for (int l = level - 1; l >= 0; --l) v = h.steps[l].op.matrix * v;
  return v;
}

nlohmann::json hierarchy_to_json(const Hierarchy& h) {
  nlohmann::json levels = nlohmann::json::array();
  for (const Graph& g : h.graphs) {
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& e : g.edges()) edges.push_back({e.u, e.v, e.w});
    nlohmann::json lvl = {{"n", g.num_nodes()},
                          {"m", static_cast<std::int64_t>(g.num_edges())},
                          {"edges", std::move(edges)}};
    if (!g.node_ids.empty()) lvl["node_ids"] = g.node_ids;
    levels.push_back(std::move(lvl));
  }
  nlohmann::json steps = nlohmann::json::array();
  for (std::size_t l = 0; l < h.steps.size(); ++l) {
    const HierarchyStep& s = h.steps[l];
    nlohmann::json tags = nlohmann::json::array();
    for (const NodeTag t : s.map.tags) tags.push_back(static_cast<int>(t));
    nlohmann::json js = {{"level", static_cast<int>(l)},
                         {"method", s.method},
                         {"seed", s.seed},
                         {"params", s.params},
                         {"n_c", s.map.n_c},
                         {"parent", s.map.parent},
                         {"tags", std::move(tags)},
                         {"op_variant", interp_name(s.op.variant)},
                         {"op_cols", s.op.coarse_size()}};
    if (s.op.variant == InterpVariant::spectral_p) {
      nlohmann::json entries = nlohmann::json::array();
      for (int k = 0; k < s.op.matrix.outerSize(); ++k)
        for (SpMat::InnerIterator it(s.op.matrix, k); it; ++it)
          entries.push_back({static_cast<int>(it.row()), static_cast<int>(it.col()), it.value()});
      js["op_entries"] = std::move(entries);
    }
    steps.push_back(std::move(js));
  }
  return nlohmann::json{{"format", "hierarchy"},
                        {"version", 1},
                        {"method", h.method},
                        {"root_seed", h.root_seed},
                        {"stalled", h.stalled},
                        {"levels", std::move(levels)},
                        {"steps", std::move(steps)}};
}

Hierarchy hierarchy_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.value("format", "") != "hierarchy")
    throw IoError("hierarchy: not a hierarchy document");
  Hierarchy h;
  h.method = j.at("method").get<std::string>();
  h.root_seed = j.at("root_seed").get<std::uint64_t>();
  h.stalled = j.value("stalled", false);

  for (const auto& lvl : j.at("levels")) {
    std::vector<WeightedEdge> edge_list;
    for (const auto& e : lvl.at("edges"))
      edge_list.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<double>()});
    Graph g = build_graph(edge_list, lvl.at("n").get<int>());
    if (lvl.contains("node_ids")) g.node_ids = lvl.at("node_ids").get<std::vector<int>>();
    h.graphs.push_back(std::move(g));
  }
  for (const auto& js : j.at("steps")) {
    HierarchyStep s;
    s.method = js.at("method").get<std::string>();
    s.seed = js.at("seed").get<std::uint64_t>();
    s.params = js.value("params", nlohmann::json::object());
    s.map.n_c = js.at("n_c").get<int>();
    s.map.parent = js.at("parent").get<std::vector<int>>();
    for (const auto& t : js.at("tags")) s.map.tags.push_back(static_cast<NodeTag>(t.get<int>()));
    validate_coarse_map(s.map);
    const InterpVariant variant = interp_from(js.at("op_variant").get<std::string>());
    if (variant == InterpVariant::spectral_p) {
      const int cols = js.at("op_cols").get<int>();
      std::vector<Eigen::Triplet<double>> trips;
      for (const auto& e : js.at("op_entries"))
        trips.emplace_back(e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<double>());
      s.op.variant = variant;
      s.op.map = s.map;
      s.op.matrix.resize(s.map.num_fine(), cols);
      s.op.matrix.setFromTriplets(trips.begin(), trips.end());
      s.op.matrix.makeCompressed();
    } else {
      s.op = partition_op(s.map, variant);
    }
    h.steps.push_back(std::move(s));
  }
  if (h.graphs.size() != h.steps.size() + 1)
    throw IoError("hierarchy: level/step count mismatch");
  return h;
}

std::string serialize_hierarchy(const Hierarchy& h) { return hierarchy_to_json(h).dump() + "\n"; }

void save_hierarchy(const Hierarchy& h, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << serialize_hierarchy(h);
  if (!out) throw IoError("write failed on '" + path + "'");
}

Hierarchy load_hierarchy(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
  try {
    return hierarchy_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": malformed hierarchy: " + e.what());
  }
}

}  // namespace grc
