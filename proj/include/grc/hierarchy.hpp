#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "grc/coarsen_match.hpp"
#include "grc/graph.hpp"
#include "grc/interpolate.hpp"
#include "grc/reduce.hpp"

namespace grc {

// Per-level coarsener choices. Each struct carries the method's knobs; the
// driver derives anything left at its zero value (targets, group counts).
struct HemMethod {};

struct LescMethod {
  LeverageOptions leverage;
  LescOptions options;
  int n_c_target = 0;  // 0: aim for half the current level
};

struct AlgdistMethod {
  AlgdistOptions options;
};

struct IndsetMethod {};

struct KronMethod {
  // Retained set per level comes from spectral polarity on this Laplacian
  // form, unless an explicit level-0 set is given (used once, then polarity).
  LaplacianKind polarity_kind = LaplacianKind::normalized;
  std::vector<int> retained_level0;
};

struct SpectralMethod {
  int m = 1;       // eigenvectors preserved per group
  int groups = 0;  // 0: floor(n / (2m)), so the coarse size is about n/2
  bool polar = false;
};

using MethodSpec =
    std::variant<HemMethod, LescMethod, AlgdistMethod, IndsetMethod, KronMethod, SpectralMethod>;

std::string method_name(const MethodSpec& method);

struct StopRule {
  int max_levels = 1;   // coarsening steps budget
  int min_nodes = 2;    // stop once the current level is this small or smaller
  double ratio = 0.0;   // stop once n_level <= ratio * n_0 (0 disables)
};

struct HierarchyStep {
  CoarseMap map;
  InterpolationOp op;
  std::string method;
  std::uint64_t seed = 0;        // the level seed actually used
  nlohmann::json params;         // method knobs, for the serialized record
};

// graphs[l] is the level-l graph; steps[l] connects level l to level l+1,
// so graphs.size() == steps.size() + 1 and node counts strictly decrease.
// A step that fails to shrink the graph is discarded and `stalled` is set.
struct Hierarchy {
  std::vector<Graph> graphs;
  std::vector<HierarchyStep> steps;
  std::string method;
  std::uint64_t root_seed = 0;
  bool stalled = false;

  int levels() const { return static_cast<int>(steps.size()); }
};

struct HierarchyOptions {
  // Transfer operator recorded per level (the spectral method always records
  // its own spectral operator).
  InterpVariant op_variant = InterpVariant::binary_c;
};

// Repeats the chosen coarsener until a stop rule fires. Level l draws seed
// level_seed(root_seed, l), so a single root seed reproduces the whole run.
// Elimination methods (indset, kron) record a derived provenance map; their
// level graphs come from the Schur complement, not from the map.
Hierarchy coarsen_hierarchy(const Graph& g, const MethodSpec& method, const StopRule& stop,
                            std::uint64_t root_seed, const HierarchyOptions& opts = {});

// Restriction x -> P^T x applied level by level down to `level`
// (level 0 returns x unchanged).
Eigen::VectorXd project_to_level(const Hierarchy& h, const Eigen::VectorXd& x, int level);

// Prolongation x_c -> P x_c from `level` back to level 0.
Eigen::VectorXd prolong_from_level(const Hierarchy& h, const Eigen::VectorXd& xc, int level);

// JSON round trip. Serialization is canonical: sorted keys, shortest
// round-trip floats, no environment-dependent content — identical runs
// produce identical bytes.
nlohmann::json hierarchy_to_json(const Hierarchy& h);
Hierarchy hierarchy_from_json(const nlohmann::json& j);
std::string serialize_hierarchy(const Hierarchy& h);
Hierarchy load_hierarchy(const std::string& path);
void save_hierarchy(const Hierarchy& h, const std::string& path);

}  // namespace grc
