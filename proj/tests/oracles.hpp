#pragma once

// Reference computations used by the tests. None of them touch the library's solver or
// builders, so an agreement is evidence rather than a tautology.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

/// Gaussian elimination with partial pivoting; nullopt when singular.
inline std::optional<std::vector<double>> solve_dense(Matrix a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    }
    if (std::abs(a[p][c]) < 1e-10) return std::nullopt;
    std::swap(a[p], a[c]);
    std::swap(b[p], b[c]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

/// min c.x s.t. A x <= b, lo <= x <= hi (all finite) by visiting every basic solution.
struct VertexResult {
  bool feasible = false;
  double objective = std::numeric_limits<double>::infinity();
  std::vector<double> x;
};

inline VertexResult vertex_enumeration(const std::vector<double>& c, const Matrix& a, const std::vector<double>& b,
                                       const std::vector<double>& lo, const std::vector<double>& hi) {
  const std::size_t n = c.size();
  // All constraints as g.x <= h: rows, then x_i <= hi_i, then -x_i <= -lo_i.
  Matrix g = a;
  std::vector<double> h = b;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> e(n, 0.0);
    e[i] = 1.0;
    g.push_back(e);
    h.push_back(hi[i]);
    e[i] = -1.0;
    g.push_back(e);
    h.push_back(-lo[i]);
  }
  const std::size_t m = g.size();
  VertexResult best;
  std::vector<std::size_t> pick(n);
  // Enumerate n-subsets of the m constraints.
  std::vector<bool> mask(m, false);
  std::fill(mask.begin(), mask.begin() + static_cast<long>(n), true);
  do {
    Matrix sys;
    std::vector<double> rhs;
    for (std::size_t i = 0; i < m; ++i) {
      if (mask[i]) {
        sys.push_back(g[i]);
        rhs.push_back(h[i]);
      }
    }
    auto x = solve_dense(sys, rhs);
    if (!x) continue;
    bool ok = true;
    for (std::size_t i = 0; i < m && ok; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += g[i][k] * (*x)[k];
      ok = s <= h[i] + 1e-9 * (1.0 + std::abs(h[i]));
    }
    if (!ok) continue;
    double obj = 0.0;
    for (std::size_t k = 0; k < n; ++k) obj += c[k] * (*x)[k];
    best.feasible = true;
    if (obj < best.objective) {
      best.objective = obj;
      best.x = *x;
    }
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return best;
}

/// Cost of serving net demand from the grid alone: energy on max(net, 0), the peak of each
/// period, minus the terminal credit p_term * e0. `boundaries` starts at 0 and excludes N.
inline double no_storage_cost(const std::vector<double>& net, const std::vector<double>& buy, double peak_price,
                              const std::vector<int>& boundaries, double p_term, double e0, double step_hours = 1.0) {
  double total = 0.0;
  for (std::size_t t = 0; t < net.size(); ++t) total += buy[t] * std::max(net[t], 0.0) * step_hours;
  for (std::size_t q = 0; q < boundaries.size(); ++q) {
    const int end = q + 1 < boundaries.size() ? boundaries[q + 1] : static_cast<int>(net.size());
    double peak = 0.0;
    for (int t = boundaries[q]; t < end; ++t) peak = std::max(peak, net[t]);
    total += peak_price * peak;
  }
  return total - p_term * e0;
}

/// Least squares for three regressors through the 3x3 normal equations, by Cramer's rule.
inline std::vector<double> normal_equations3(const Matrix& x, const std::vector<double>& y) {
  // Columns are scaled to unit max first; I, I^2 and I*T differ by orders of magnitude.
  double scale[3] = {0.0, 0.0, 0.0};
  for (const auto& row : x) {
    for (int i = 0; i < 3; ++i) scale[i] = std::max(scale[i], std::abs(row[i]));
  }
  double m[3][3] = {};
  double v[3] = {};
  for (std::size_t r = 0; r < y.size(); ++r) {
    for (int i = 0; i < 3; ++i) {
      v[i] += x[r][i] / scale[i] * y[r];
      for (int j = 0; j < 3; ++j) m[i][j] += x[r][i] / scale[i] * x[r][j] / scale[j];
    }
  }
  auto det = [](const double a[3][3]) {
    return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
           a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  };
  const double d = det(m);
  std::vector<double> out(3);
  for (int k = 0; k < 3; ++k) {
    double mk[3][3];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) mk[i][j] = j == k ? v[i] : m[i][j];
    }
    out[k] = det(mk) / d / scale[k];
  }
  return out;
}

}  // namespace oracle
