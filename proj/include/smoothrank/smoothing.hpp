#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "smoothrank/parallel.hpp"

namespace smoothrank {

inline constexpr std::size_t kGridSize = 512;

/// kGridSize equally spaced points on [lo, hi].
class Grid {
 public:
  Grid() = default;
  Grid(double lo, double hi);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double step() const { return step_; }
  std::size_t size() const { return kGridSize; }
  double operator[](std::size_t k) const {
    return k + 1 == kGridSize ? hi_ : lo_ + static_cast<double>(k) * step_;
  }
  std::vector<double> points() const;

 private:
  double lo_ = 0.0;
  double hi_ = 1.0;
  double step_ = 1.0 / (kGridSize - 1);
};

struct DensityEstimate {
  Grid grid;
  std::vector<double> values;
  double bandwidth = 0.0;
};

/// 0.9 * min(sd, IQR/1.34) * n^(-1/5), falling back to sd when the IQR collapses and to
/// max(1e-3 * max|x|, 1e-6) when both vanish.
double bandwidth_nrd0(std::span<const double> xs);

/// Kernel K(u) = pi/4 * cos(pi*u/2) on |u| <= 1.
double optcosine_kernel(double u);

/// Density of `xs` on `grid` with the cosine kernel at bandwidth `bw`.
std::vector<double> kde_on_grid(std::span<const double> xs, double bw, const Grid& grid,
                                Execution exec = Execution::parallel);

/// Grid spans [min - 3 bw, max + 3 bw].
DensityEstimate kde_cosine(std::span<const double> xs, double bw,
                           Execution exec = Execution::parallel);

struct LoessConfig {
  double span = 0.75;
  static constexpr int degree = 1;
};

/// Local linear regression with tricube weights over the ceil(span*n) nearest points.
/// Throws DataError with fewer than two points.
std::vector<double> loess_fit(std::span<const double> x, std::span<const double> y,
                              const LoessConfig& cfg, std::span<const double> targets,
                              Execution exec = Execution::parallel);

/// LOESS of a density onto its own grid, negatives clamped to 0.
std::vector<double> smooth_density(const Grid& grid, std::span<const double> values,
                                   const LoessConfig& cfg = {},
                                   Execution exec = Execution::parallel);

}  // namespace smoothrank
