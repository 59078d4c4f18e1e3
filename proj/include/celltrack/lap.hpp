#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

namespace celltrack {

/// Dense row-major cost matrix with an admissibility mask.
struct CostMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> entries;
  std::vector<std::uint8_t> forbidden;

  CostMatrix() = default;
  CostMatrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), entries(r * c, fill), forbidden(r * c, 0) {}

  double& at(std::size_t r, std::size_t c) { return entries[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return entries[r * cols + c]; }
  bool is_forbidden(std::size_t r, std::size_t c) const { return forbidden[r * cols + c] != 0; }
  void set_forbidden(std::size_t r, std::size_t c, bool f = true) { forbidden[r * cols + c] = f ? 1 : 0; }
  bool empty() const noexcept { return rows == 0 || cols == 0; }
};

using Matching = std::vector<std::pair<std::size_t, std::size_t>>;

/// Sum of entries over the pairs, accumulated in ascending (row, col) order so
/// two routes producing the same matching report bit-identical totals.
inline double total_cost(const CostMatrix& c, Matching pairs) {
  std::sort(pairs.begin(), pairs.end());
  double sum = 0.0;
  for (const auto& [r, col] : pairs) sum += c.at(r, col);
  return sum;
}

namespace detail {

// Shortest augmenting path solver for a dense rows <= cols problem
// (Jonker-Volgenant style, no initialization phase). Every row gets a column.
// Returns col4row.
inline std::vector<std::ptrdiff_t> solve_rows_le_cols(std::size_t nr, std::size_t nc,
                                                      const std::vector<double>& cost) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(nr, 0.0), v(nc, 0.0), path_cost(nc);
  std::vector<std::ptrdiff_t> path(nc, -1), col4row(nr, -1), row4col(nc, -1);
  std::vector<std::size_t> remaining(nc);
  std::vector<char> row_done(nr), col_done(nc);

  for (std::size_t cur_row = 0; cur_row < nr; ++cur_row) {
    double min_val = 0.0;
    std::size_t num_remaining = nc;
    for (std::size_t it = 0; it < nc; ++it) remaining[it] = nc - it - 1;
    std::fill(row_done.begin(), row_done.end(), 0);
    std::fill(col_done.begin(), col_done.end(), 0);
    std::fill(path_cost.begin(), path_cost.end(), kInf);

    std::ptrdiff_t sink = -1;
    std::size_t i = cur_row;
    while (sink == -1) {
      std::ptrdiff_t index = -1;
      double lowest = kInf;
      row_done[i] = 1;
      for (std::size_t it = 0; it < num_remaining; ++it) {
        const std::size_t j = remaining[it];
        const double r = min_val + cost[i * nc + j] - u[i] - v[j];
        if (r < path_cost[j]) {
          path[j] = static_cast<std::ptrdiff_t>(i);
          path_cost[j] = r;
        }
        // Prefer an unassigned column on ties: it ends the search immediately.
        if (path_cost[j] < lowest || (path_cost[j] == lowest && row4col[j] == -1)) {
          lowest = path_cost[j];
          index = static_cast<std::ptrdiff_t>(it);
        }
      }
      min_val = lowest;
      if (min_val == kInf || index < 0) throw std::runtime_error("assignment problem is infeasible");

      const std::size_t j = remaining[static_cast<std::size_t>(index)];
      if (row4col[j] == -1) {
        sink = static_cast<std::ptrdiff_t>(j);
      } else {
        i = static_cast<std::size_t>(row4col[j]);
      }
      col_done[j] = 1;
      remaining[static_cast<std::size_t>(index)] = remaining[--num_remaining];
    }

    // Dual update.
    u[cur_row] += min_val;
    for (std::size_t r = 0; r < nr; ++r) {
      if (row_done[r] && r != cur_row) {
        u[r] += min_val - path_cost[static_cast<std::size_t>(col4row[r])];
      }
    }
    for (std::size_t c = 0; c < nc; ++c) {
      if (col_done[c]) v[c] -= min_val - path_cost[c];
    }

    // Augment along the alternating path back to cur_row.
    auto j = static_cast<std::size_t>(sink);
    while (true) {
      const auto r = static_cast<std::size_t>(path[j]);
      row4col[j] = static_cast<std::ptrdiff_t>(r);
      const std::ptrdiff_t prev = col4row[r];
      col4row[r] = static_cast<std::ptrdiff_t>(j);
      if (r == cur_row) break;
      j = static_cast<std::size_t>(prev);
    }
  }
  return col4row;
}

}  // namespace detail

/// Minimum-cost matching of size min(rows, cols). Forbidden entries are replaced
/// by a sentinel larger than any achievable sum of admissible entries, so the
/// solver uses as few of them as possible; pairs landing on one are dropped.
/// Output is sorted by row.
inline Matching lap_solve(const CostMatrix& c) {
  if (c.entries.size() != c.rows * c.cols || c.forbidden.size() != c.rows * c.cols) {
    throw std::invalid_argument("cost matrix storage does not match its shape");
  }
  if (c.empty()) return {};

  double abs_sum = 0.0;
  for (std::size_t k = 0; k < c.entries.size(); ++k) {
    if (c.forbidden[k]) continue;
    if (!std::isfinite(c.entries[k])) throw std::invalid_argument("cost matrix has a non-finite entry");
    abs_sum += std::abs(c.entries[k]);
  }
  const double sentinel = 2.0 * abs_sum + 1.0;

  const bool transpose = c.rows > c.cols;
  const std::size_t nr = transpose ? c.cols : c.rows;
  const std::size_t nc = transpose ? c.rows : c.cols;
  std::vector<double> work(nr * nc);
  for (std::size_t r = 0; r < c.rows; ++r) {
    for (std::size_t col = 0; col < c.cols; ++col) {
      const double value = c.is_forbidden(r, col) ? sentinel : c.at(r, col);
      if (transpose) {
        work[col * nc + r] = value;
      } else {
        work[r * nc + col] = value;
      }
    }
  }

  const auto col4row = detail::solve_rows_le_cols(nr, nc, work);
  Matching out;
  for (std::size_t i = 0; i < nr; ++i) {
    const auto j = static_cast<std::size_t>(col4row[i]);
    const std::size_t r = transpose ? j : i;
    const std::size_t col = transpose ? i : j;
    if (!c.is_forbidden(r, col)) out.emplace_back(r, col);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline constexpr std::size_t kBruteForceMaxDim = 9;

/// Exhaustive minimum over all maximal injective row/column maps. Same
/// forbidden-entry semantics as lap_solve. Ties go to the lexicographically
/// smallest sorted pair list. Test oracle; factorial cost.
inline Matching brute_force_lap(const CostMatrix& c) {
  if (std::min(c.rows, c.cols) > kBruteForceMaxDim) {
    throw std::invalid_argument("brute_force_lap: min dimension exceeds " +
                                std::to_string(kBruteForceMaxDim));
  }
  if (c.empty()) return {};

  const bool transpose = c.rows > c.cols;
  const std::size_t small = transpose ? c.cols : c.rows;
  const std::size_t large = transpose ? c.rows : c.cols;

  struct Score {
    std::size_t forbidden = 0;
    double cost = 0.0;
  };
  Matching best;
  Score best_score{std::numeric_limits<std::size_t>::max(), 0.0};

  std::vector<std::size_t> pick(small);
  std::vector<char> used(large, 0);

  auto evaluate = [&]() {
    Matching m;
    Score s;
    for (std::size_t i = 0; i < small; ++i) {
      const std::size_t r = transpose ? pick[i] : i;
      const std::size_t col = transpose ? i : pick[i];
      if (c.is_forbidden(r, col)) {
        ++s.forbidden;
      } else {
        m.emplace_back(r, col);
      }
    }
    std::sort(m.begin(), m.end());
    s.cost = total_cost(c, m);
    const bool better = s.forbidden < best_score.forbidden ||
                        (s.forbidden == best_score.forbidden &&
                         (s.cost < best_score.cost || (s.cost == best_score.cost && m < best)));
    if (better) {
      best_score = s;
      best = std::move(m);
    }
  };

  auto recurse = [&](auto&& self, std::size_t depth) -> void {
    if (depth == small) {
      evaluate();
      return;
    }
    for (std::size_t j = 0; j < large; ++j) {
      if (used[j]) continue;
      used[j] = 1;
      pick[depth] = j;
      self(self, depth + 1);
      used[j] = 0;
    }
  };
  recurse(recurse, 0);
  return best;
}

}  // namespace celltrack
