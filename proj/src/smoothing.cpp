#include "smoothrank/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "smoothrank/error.hpp"

namespace smoothrank {

Grid::Grid(double lo, double hi) : lo_(lo), hi_(hi) {
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw NumericError("grid range must be finite with lo < hi");
  }
  step_ = (hi - lo) / static_cast<double>(kGridSize - 1);
}

std::vector<double> Grid::points() const {
  std::vector<double> out(kGridSize);
  for (std::size_t k = 0; k < kGridSize; ++k) out[k] = (*this)[k];
  return out;
}

namespace {

// Quantile with linear interpolation between order statistics (R type 7).
double quantile_sorted(const std::vector<double>& sorted, double p) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

double bandwidth_nrd0(std::span<const double> xs) {
  const std::size_t n = xs.size();
  double max_abs = 0.0;
  for (double x : xs) max_abs = std::max(max_abs, std::abs(x));
  const double fallback = std::max(1e-3 * max_abs, 1e-6);
  if (n < 2) return fallback;

  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));

  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);

  double spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0)) spread = sd;
  if (!(spread > 0.0)) return fallback;
  return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

double optcosine_kernel(double u) {
  if (std::abs(u) > 1.0) return 0.0;
  return std::numbers::pi / 4.0 * std::cos(std::numbers::pi * u / 2.0);
}

std::vector<double> kde_on_grid(std::span<const double> xs, double bw, const Grid& grid,
                                Execution exec) {
  if (!(bw > 0.0)) throw NumericError("bandwidth must be positive");
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  const double norm = 1.0 / (static_cast<double>(sorted.size()) * bw);
  std::vector<double> out(grid.size(), 0.0);

  auto point = [&](std::size_t k) {
    const double r = grid[k];
    auto first = std::lower_bound(sorted.begin(), sorted.end(), r - bw);
    double acc = 0.0;
    for (auto it = first; it != sorted.end() && *it <= r + bw; ++it) {
      acc += optcosine_kernel((r - *it) / bw);
    }
    out[k] = acc * norm;
  };

  const auto n = static_cast<std::ptrdiff_t>(grid.size());
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < n; ++k) point(static_cast<std::size_t>(k));
  } else {
    for (std::ptrdiff_t k = 0; k < n; ++k) point(static_cast<std::size_t>(k));
  }
  return out;
}

DensityEstimate kde_cosine(std::span<const double> xs, double bw, Execution exec) {
  if (xs.empty()) throw DataError("density estimate needs at least one value");
  const auto [mn, mx] = std::minmax_element(xs.begin(), xs.end());
  DensityEstimate d;
  d.bandwidth = bw;
  d.grid = Grid(*mn - 3.0 * bw, *mx + 3.0 * bw);
  d.values = kde_on_grid(xs, bw, d.grid, exec);
  return d;
}

namespace {

struct SortedSample {
  std::vector<double> x;
  std::vector<double> y;
};

SortedSample sort_by_x(std::span<const double> x, std::span<const double> y) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  SortedSample s;
  s.x.reserve(x.size());
  s.y.reserve(x.size());
  for (std::size_t i : order) {
    s.x.push_back(x[i]);
    s.y.push_back(y[i]);
  }
  return s;
}

double local_linear(const SortedSample& s, std::size_t q, double t) {
  const std::size_t n = s.x.size();
  // The q nearest points of a sorted sample form a contiguous window.
  std::size_t left = static_cast<std::size_t>(
      std::lower_bound(s.x.begin(), s.x.end(), t) - s.x.begin());
  std::size_t right = left;
  while (right - left < q) {
    if (left == 0) {
      ++right;
    } else if (right == n) {
      --left;
    } else if (t - s.x[left - 1] <= s.x[right] - t) {
      --left;
    } else {
      ++right;
    }
  }

  double d_max = 0.0;
  for (std::size_t j = left; j < right; ++j) d_max = std::max(d_max, std::abs(s.x[j] - t));

  double sw = 0.0;
  double swx = 0.0;
  double swy = 0.0;
  std::vector<double> w(right - left);
  for (std::size_t j = left; j < right; ++j) {
    double wj = 1.0;
    if (d_max > 0.0) {
      const double u = std::abs(s.x[j] - t) / d_max;
      const double c = 1.0 - u * u * u;
      wj = c * c * c;
    }
    w[j - left] = wj;
    sw += wj;
    swx += wj * s.x[j];
    swy += wj * s.y[j];
  }
  if (!(sw > 0.0)) {
    // Every window point sits on the window edge (q = 1, or a target equidistant from two
    // points): weight them equally.
    std::fill(w.begin(), w.end(), 1.0);
    sw = static_cast<double>(w.size());
    swx = 0.0;
    swy = 0.0;
    for (std::size_t j = left; j < right; ++j) {
      swx += s.x[j];
      swy += s.y[j];
    }
  }
  const double xbar = swx / sw;
  const double ybar = swy / sw;

  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t j = left; j < right; ++j) {
    const double dx = s.x[j] - xbar;
    sxx += w[j - left] * dx * dx;
    sxy += w[j - left] * dx * (s.y[j] - ybar);
  }
  // Degenerate local design: every weighted point sits at the same x.
  if (!(sxx > 1e-14 * sw * d_max * d_max)) return ybar;
  return ybar + sxy / sxx * (t - xbar);
}

}  // namespace

std::vector<double> loess_fit(std::span<const double> x, std::span<const double> y,
                              const LoessConfig& cfg, std::span<const double> targets,
                              Execution exec) {
  if (x.size() != y.size()) throw DataError("loess: x and y differ in length");
  if (x.size() < 2) throw DataError("loess: need at least 2 points");
  if (!(cfg.span > 0.0 && cfg.span <= 1.0)) throw DataError("loess: span must be in (0, 1]");

  const SortedSample s = sort_by_x(x, y);
  const auto n = static_cast<double>(s.x.size());
  const std::size_t q = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::ceil(cfg.span * n - 1e-9)), 1, s.x.size());

  std::vector<double> out(targets.size());
  const auto m = static_cast<std::ptrdiff_t>(targets.size());
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < m; ++i) out[i] = local_linear(s, q, targets[i]);
  } else {
    for (std::ptrdiff_t i = 0; i < m; ++i) out[i] = local_linear(s, q, targets[i]);
  }
  return out;
}

std::vector<double> smooth_density(const Grid& grid, std::span<const double> values,
                                   const LoessConfig& cfg, Execution exec) {
  const std::vector<double> pts = grid.points();
  std::vector<double> out = loess_fit(pts, values, cfg, pts, exec);
  for (double& v : out) v = std::max(v, 0.0);
  return out;
}

}  // namespace smoothrank
