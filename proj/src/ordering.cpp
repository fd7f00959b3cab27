#include "grc/ordering.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "grc/errors.hpp"

namespace grc {

namespace {

struct RowColScales {
  Eigen::VectorXd delta_row;
  Eigen::VectorXd delta_col;
};

// Average stored magnitude per row and per column. Explicit zeros are
// ignored both in the sum and in the count.
RowColScales matrix_scales(const SpMat& m) {
  const int n = static_cast<int>(m.rows());
  Eigen::VectorXd rsum = Eigen::VectorXd::Zero(n), csum = Eigen::VectorXd::Zero(n);
  Eigen::VectorXi rcnt = Eigen::VectorXi::Zero(n), ccnt = Eigen::VectorXi::Zero(n);
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it) {
      if (it.value() == 0.0) continue;
      const double a = std::abs(it.value());
      rsum[it.row()] += a;
      ++rcnt[it.row()];
      csum[it.col()] += a;
      ++ccnt[it.col()];
    }
  RowColScales s;
  s.delta_row = Eigen::VectorXd::Zero(n);
  s.delta_col = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    if (rcnt[i] > 0) s.delta_row[i] = rsum[i] / rcnt[i];
    if (ccnt[i] > 0) s.delta_col[i] = csum[i] / ccnt[i];
  }
  return s;
}

void require_square(const SpMat& m, const char* who) {
  if (m.rows() != m.cols())
    throw std::invalid_argument(std::string(who) + ": matrix must be square");
}

}  // namespace

OrderingWeights edge_weights(const SpMat& m) {
  require_square(m, "edge_weights");
  RowColScales s = matrix_scales(m);
  OrderingWeights out;
  out.delta_row = std::move(s.delta_row);
  out.delta_col = std::move(s.delta_col);
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it) {
      if (it.row() == it.col() || it.value() == 0.0) continue;
      const double a = std::abs(it.value());
      const double w =
          std::min(a / out.delta_row[it.row()], a / out.delta_col[it.col()]);
      out.w.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), w);
    }
  return out;
}

Eigen::VectorXd pivot_impacts(const SpMat& m) {
  require_square(m, "pivot_impacts");
  const RowColScales s = matrix_scales(m);
  const int n = static_cast<int>(m.rows());
  Eigen::VectorXd sigma = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < n; ++k) {
    const double diag = std::abs(m.coeff(k, k));
    if (diag == 0.0) continue;
    sigma[k] = diag / (s.delta_row[k] * s.delta_col[k]);
  }
  return sigma;
}

BlockOrdering coarsen_order(const SpMat& m, int levels) {
  require_square(m, "coarsen_order");
  if (levels < 1) throw std::invalid_argument("coarsen_order: need at least one level");
  const int n = static_cast<int>(m.rows());
  BlockOrdering out;
  out.levels_requested = levels;
  if (n == 0) return out;

  std::vector<int> active(n);
  for (int i = 0; i < n; ++i) active[i] = i;

  while (out.levels_achieved < levels && !active.empty()) {
    const int na = static_cast<int>(active.size());
    // Submatrix on the active set, in local (position) indexing. The active
    // list stays sorted, so local order agrees with original order.
    std::vector<int> pos(n, -1);
    for (int i = 0; i < na; ++i) pos[active[i]] = i;
    std::vector<Eigen::Triplet<double>> trips;
    for (int k = 0; k < m.outerSize(); ++k)
      for (SpMat::InnerIterator it(m, k); it; ++it) {
        const int li = pos[it.row()], lj = pos[it.col()];
        if (li >= 0 && lj >= 0 && it.value() != 0.0)
          trips.emplace_back(li, lj, it.value());
      }
    SpMat sub(na, na);
    sub.setFromTriplets(trips.begin(), trips.end());

    OrderingWeights ew = edge_weights(sub);
    if (ew.w.empty()) break;  // nothing couples the remaining indices
    const Eigen::VectorXd sigma = pivot_impacts(sub);

    std::stable_sort(ew.w.begin(), ew.w.end(),
                     [](const Eigen::Triplet<double>& a, const Eigen::Triplet<double>& b) {
                       if (a.value() != b.value()) return a.value() > b.value();
                       if (a.row() != b.row()) return a.row() < b.row();
                       return a.col() < b.col();
                     });

    // 0 undecided, 1 coarse, 2 fine
    std::vector<unsigned char> state(na, 0);
    for (const auto& t : ew.w) {
      const int i = t.row(), j = t.col();
      if (state[i] != 0 || state[j] != 0) continue;
      if (sigma[i] >= sigma[j]) {
        state[i] = 1;
        state[j] = 2;
      } else {
        state[j] = 1;
        state[i] = 2;
      }
    }

    std::vector<int> coarse, fine;
    for (int i = 0; i < na; ++i)
      (state[i] == 1 ? coarse : fine).push_back(active[i]);
    if (coarse.empty()) break;

    out.permutation.insert(out.permutation.end(), coarse.begin(), coarse.end());
    out.level_block_sizes.push_back(static_cast<int>(coarse.size()));
    active = std::move(fine);
    ++out.levels_achieved;
  }

  out.permutation.insert(out.permutation.end(), active.begin(), active.end());
  out.level_block_sizes.push_back(static_cast<int>(active.size()));
  return out;
}

}  // namespace grc
