#pragma once

#include <string>

#include "grc/errors.hpp"
#include "grc/graph.hpp"

namespace grc {

// MatrixMarket coordinate files. Graph readers accept real/integer/pattern
// fields with symmetric or general symmetry; pattern entries get weight 1.0.
// A general file must actually be symmetric (structurally and numerically
// within 1e-12 relative) to be read as a graph; each unordered pair counts
// once. Ids are 1-based on disk and 0-based in memory.
Graph read_graph_mtx(const std::string& path);
void write_graph_mtx(const Graph& g, const std::string& path);

// Plain edge list: one "i j [w]" per line, 0-based ids, optional weight
// (default 1.0), '#' starts a comment. Node count is max id + 1.
Graph read_graph_edgelist(const std::string& path);
void write_graph_edgelist(const Graph& g, const std::string& path);

// Dispatch on explicit format name ("mtx" / "edgelist") or, when format is
// empty, on the file extension (.mtx/.mm vs anything else).
Graph read_graph(const std::string& path, const std::string& format = "");
void write_graph(const Graph& g, const std::string& path, const std::string& format = "");

// General square sparse matrix, for the reordering front end. Symmetric and
// skew-symmetric files are expanded; no symmetry is required of general ones.
SpMat read_matrix_mtx(const std::string& path);
void write_matrix_mtx(const SpMat& m, const std::string& path);

}  // namespace grc
