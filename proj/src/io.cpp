#include "grc/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace grc {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

// %.17g: enough digits to round-trip any double exactly.
std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct MmHeader {
  std::string field;     // real | integer | pattern
  std::string symmetry;  // general | symmetric | skew-symmetric
  long rows = 0, cols = 0, nnz = 0;
};

// Parses the banner, skips comments, reads the size line. Leaves the stream
// positioned at the first data entry.
MmHeader read_mm_header(std::ifstream& in, const std::string& path) {
  std::string line;
  if (!std::getline(in, line)) throw IoError(path + ": empty file");
  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (lower(tag) != "%%matrixmarket" || lower(object) != "matrix")
    throw IoError(path + ": not a MatrixMarket matrix file");
  if (lower(format) != "coordinate")
    throw IoError(path + ": only coordinate format is supported");
  field = lower(field);
  symmetry = lower(symmetry);
  if (field != "real" && field != "integer" && field != "pattern")
    throw IoError(path + ": unsupported field type '" + field + "'");
  if (symmetry != "general" && symmetry != "symmetric" && symmetry != "skew-symmetric")
    throw IoError(path + ": unsupported symmetry '" + symmetry + "'");
  if (field == "pattern" && symmetry == "skew-symmetric")
    throw IoError(path + ": skew-symmetric pattern makes no sense");

  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '%') continue;
    break;
  }
  MmHeader h;
  h.field = field;
  h.symmetry = symmetry;
  std::istringstream size_line(line);
  if (!(size_line >> h.rows >> h.cols >> h.nnz) || h.rows < 0 || h.cols < 0 || h.nnz < 0)
    throw IoError(path + ": malformed size line");
  return h;
}

struct MmEntry {
  int i, j;
  double v;
};

std::vector<MmEntry> read_mm_entries(std::ifstream& in, const MmHeader& h,
                                     const std::string& path) {
  std::vector<MmEntry> entries;
  entries.reserve(static_cast<std::size_t>(h.nnz));
  std::string line;
  long seen = 0;
  while (seen < h.nnz) {
    if (!std::getline(in, line)) throw IoError(path + ": unexpected end of file");
    if (line.empty() || line[0] == '%') continue;
    std::istringstream row(line);
    long i, j;
    double v = 1.0;
    if (!(row >> i >> j)) throw IoError(path + ": malformed entry line '" + line + "'");
    if (h.field != "pattern" && !(row >> v))
      throw IoError(path + ": entry line missing value: '" + line + "'");
    if (i < 1 || i > h.rows || j < 1 || j > h.cols)
      throw IoError(path + ": entry (" + std::to_string(i) + ", " + std::to_string(j) +
                    ") outside declared " + std::to_string(h.rows) + " x " +
                    std::to_string(h.cols) + " shape");
    entries.push_back({static_cast<int>(i - 1), static_cast<int>(j - 1), v});
    ++seen;
  }
  return entries;
}

}  // namespace

Graph read_graph_mtx(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  const MmHeader h = read_mm_header(in, path);
  if (h.rows != h.cols)
    throw IoError(path + ": adjacency matrix must be square, got " + std::to_string(h.rows) +
                  " x " + std::to_string(h.cols));
  if (h.symmetry == "skew-symmetric")
    throw IoError(path + ": a skew-symmetric matrix is not a graph adjacency");
  const auto entries = read_mm_entries(in, h, path);

  int loops = 0;
  std::vector<WeightedEdge> edge_list;
  if (h.symmetry == "symmetric") {
    for (const auto& e : entries) {
      if (e.i == e.j) {
        ++loops;
        continue;
      }
      edge_list.push_back({std::min(e.i, e.j), std::max(e.i, e.j), e.v});
    }
  } else {
    // General file read as a graph: both directions must be present and
    // agree; each unordered pair becomes one edge.
    std::map<std::pair<int, int>, std::pair<double, double>> pairs;  // (upper sum, lower sum)
    std::map<std::pair<int, int>, std::pair<bool, bool>> present;
    double vmax = 0.0;
    for (const auto& e : entries) {
      if (e.i == e.j) {
        ++loops;
        continue;
      }
      vmax = std::max(vmax, std::abs(e.v));
      const std::pair<int, int> key{std::min(e.i, e.j), std::max(e.i, e.j)};
      if (e.i < e.j) {
        pairs[key].first += e.v;
        present[key].first = true;
      } else {
        pairs[key].second += e.v;
        present[key].second = true;
      }
    }
    for (const auto& [key, flags] : present) {
      const auto& sums = pairs[key];
      if (!flags.first || !flags.second ||
          std::abs(sums.first - sums.second) > 1e-12 * std::max(1.0, vmax))
        throw IoError(path + ": general file is not symmetric at (" +
                      std::to_string(key.first + 1) + ", " + std::to_string(key.second + 1) +
                      "); cannot read as a graph");
      edge_list.push_back({key.first, key.second, sums.first});
    }
  }

  try {
    Graph g = build_graph(edge_list, static_cast<int>(h.rows));
    g.self_loops_dropped += loops;
    return g;
  } catch (const std::invalid_argument& e) {
    throw IoError(path + ": " + e.what());
  }
}

void write_graph_mtx(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  const auto edge_list = g.edges();
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << g.num_nodes() << " " << g.num_nodes() << " " << edge_list.size() << "\n";
  // Lower triangle, 1-based.
  for (const auto& e : edge_list)
    out << (e.v + 1) << " " << (e.u + 1) << " " << fmt_double(e.w) << "\n";
  if (!out) throw IoError("write failed on '" + path + "'");
}

Graph read_graph_edgelist(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::vector<WeightedEdge> edge_list;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream row(line);
    long u, v;
    double w = 1.0;
    if (!(row >> u >> v))
      throw IoError(path + ":" + std::to_string(line_no) + ": expected 'i j [w]'");
    row >> w;
    if (u < 0 || v < 0)
      throw IoError(path + ":" + std::to_string(line_no) + ": negative node id");
    edge_list.push_back({static_cast<int>(u), static_cast<int>(v), w});
  }
  try {
    return build_graph(edge_list);
  } catch (const std::invalid_argument& e) {
    throw IoError(path + ": " + e.what());
  }
}

void write_graph_edgelist(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "# nodes " << g.num_nodes() << " edges " << g.num_edges() << "\n";
  for (const auto& e : g.edges())
    out << e.u << " " << e.v << " " << fmt_double(e.w) << "\n";
  if (!out) throw IoError("write failed on '" + path + "'");
}

namespace {

bool has_mtx_extension(const std::string& path) {
  const auto dot = path.rfind('.');
  if (dot == std::string::npos) return false;
  const std::string ext = lower(path.substr(dot + 1));
  return ext == "mtx" || ext == "mm";
}

}  // namespace

Graph read_graph(const std::string& path, const std::string& format) {
  if (format == "mtx" || (format.empty() && has_mtx_extension(path))) return read_graph_mtx(path);
  if (format == "edgelist" || format.empty()) return read_graph_edgelist(path);
  throw IoError("unknown graph format '" + format + "' (use mtx or edgelist)");
}

void write_graph(const Graph& g, const std::string& path, const std::string& format) {
  if (format == "mtx" || (format.empty() && has_mtx_extension(path))) {
    write_graph_mtx(g, path);
    return;
  }
  if (format == "edgelist" || format.empty()) {
    write_graph_edgelist(g, path);
    return;
  }
  throw IoError("unknown graph format '" + format + "' (use mtx or edgelist)");
}

SpMat read_matrix_mtx(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  const MmHeader h = read_mm_header(in, path);
  if (h.rows != h.cols)
    throw IoError(path + ": expected a square matrix, got " + std::to_string(h.rows) + " x " +
                  std::to_string(h.cols));
  const auto entries = read_mm_entries(in, h, path);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(entries.size() * 2);
  for (const auto& e : entries) {
    trips.emplace_back(e.i, e.j, e.v);
    if (e.i != e.j && h.symmetry == "symmetric") trips.emplace_back(e.j, e.i, e.v);
    if (e.i != e.j && h.symmetry == "skew-symmetric") trips.emplace_back(e.j, e.i, -e.v);
  }
  SpMat m(h.rows, h.cols);
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();
  return m;
}

void write_matrix_mtx(const SpMat& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.rows() << " " << m.cols() << " " << m.nonZeros() << "\n";
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it)
      out << (it.row() + 1) << " " << (it.col() + 1) << " " << fmt_double(it.value()) << "\n";
  if (!out) throw IoError("write failed on '" + path + "'");
}

}  // namespace grc
