#include "smoothrank/marginal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "smoothrank/dataset.hpp"
#include "smoothrank/error.hpp"

namespace smoothrank {

ClassPriors ClassPriors::from_counts(std::size_t n1, std::size_t n2) {
  if (n1 == 0 || n2 == 0) throw DataError("class priors need both classes present");
  const double total = static_cast<double>(n1 + n2);
  ClassPriors p;
  p.pi1 = static_cast<double>(n1) / total;
  p.pi2 = 1.0 - p.pi1;
  return p;
}

ClassDensities class_densities(std::span<const double> col, const BinaryLabels& labels,
                               const LoessConfig& loess, Execution exec) {
  if (col.size() != labels.size()) throw DataError("feature column and labels differ in length");
  std::vector<double> pooled;
  std::vector<double> class1;
  std::vector<double> class2;
  for (std::size_t i = 0; i < col.size(); ++i) {
    if (is_missing(col[i])) continue;
    pooled.push_back(col[i]);
    (labels[i] == 1 ? class1 : class2).push_back(col[i]);
  }

  ClassDensities d;
  d.n_used = pooled.size();
  d.dead = true;
  if (class1.size() < 2 || class2.size() < 2) return d;
  const auto [mn, mx] = std::minmax_element(pooled.begin(), pooled.end());
  if (!(*mx > *mn)) return d;

  d.bandwidth = bandwidth_nrd0(pooled);
  d.grid = Grid(*mn - 3.0 * d.bandwidth, *mx + 3.0 * d.bandwidth);
  d.g1 = smooth_density(d.grid, kde_on_grid(class1, d.bandwidth, d.grid, exec), loess, exec);
  d.g2 = smooth_density(d.grid, kde_on_grid(class2, d.bandwidth, d.grid, exec), loess, exec);
  d.priors = ClassPriors::from_counts(class1.size(), class2.size());
  d.dead = false;
  return d;
}

std::optional<double> raw_q(double g1, double g2, const ClassPriors& priors, double threshold) {
  const double mixture = priors.pi1 * g1 + priors.pi2 * g2;
  if (mixture < threshold) return std::nullopt;
  return (g1 - g2) / mixture;
}

std::size_t MarginalPredictor::unmasked_count() const {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{0}));
}

MarginalPredictor dead_predictor(std::size_t n_used) {
  MarginalPredictor p;
  p.grid = Grid(0.0, 1.0);
  p.raw_q.assign(kGridSize, kMissing);
  p.q_smooth.assign(kGridSize, kMissing);
  p.mask.assign(kGridSize, 1);
  p.n_train_used = n_used;
  p.dead = true;
  return p;
}

MarginalPredictor fit_marginal(std::span<const double> col, const BinaryLabels& labels,
                               const MarginalConfig& cfg, Execution exec) {
  double center = 0.0;
  double scale = 1.0;
  std::vector<double> values(col.begin(), col.end());
  if (cfg.standardize) {
    double sum = 0.0;
    std::size_t n = 0;
    for (double v : values) {
      if (!is_missing(v)) {
        sum += v;
        ++n;
      }
    }
    if (n >= 2) {
      center = sum / static_cast<double>(n);
      double ss = 0.0;
      for (double v : values) {
        if (!is_missing(v)) ss += (v - center) * (v - center);
      }
      const double sd = std::sqrt(ss / static_cast<double>(n - 1));
      if (sd > 0.0) scale = sd;
    }
    for (double& v : values) {
      if (!is_missing(v)) v = (v - center) / scale;
    }
  }

  const ClassDensities dens = class_densities(values, labels, cfg.loess, exec);
  if (dens.dead) return dead_predictor(dens.n_used);

  MarginalPredictor p;
  p.grid = dens.grid;
  p.priors = dens.priors;
  p.n_train_used = dens.n_used;
  p.center = center;
  p.scale = scale;
  p.raw_q.assign(kGridSize, kMissing);
  p.q_smooth.assign(kGridSize, kMissing);
  p.mask.assign(kGridSize, 1);

  std::vector<double> xs;
  std::vector<double> qs;
  std::vector<std::size_t> where;
  for (std::size_t k = 0; k < kGridSize; ++k) {
    if (auto q = raw_q(dens.g1[k], dens.g2[k], dens.priors, cfg.mask_threshold)) {
      p.raw_q[k] = *q;
      p.mask[k] = 0;
      xs.push_back(p.grid[k]);
      qs.push_back(*q);
      where.push_back(k);
    }
  }
  if (where.size() < 2) {
    MarginalPredictor dead = dead_predictor(dens.n_used);
    dead.grid = dens.grid;
    dead.raw_q = p.raw_q;
    return dead;
  }

  const std::vector<double> smooth = loess_fit(xs, qs, cfg.loess, xs, exec);
  for (std::size_t i = 0; i < where.size(); ++i) p.q_smooth[where[i]] = smooth[i];
  p.dead = false;
  return p;
}

double evaluate(const MarginalPredictor& p, double x) {
  if (p.dead || is_missing(x)) return kMissing;
  const double z = (x - p.center) / p.scale;
  const std::size_t last = kGridSize - 1;
  auto at = [&](std::size_t k) { return p.mask[k] ? kMissing : p.q_smooth[k]; };

  if (z <= p.grid.lo()) return at(0);
  if (z >= p.grid.hi()) return at(last);

  auto k = static_cast<std::size_t>(std::floor((z - p.grid.lo()) / p.grid.step()));
  k = std::min(k, last - 1);
  while (k > 0 && p.grid[k] > z) --k;
  while (k + 1 < last && p.grid[k + 1] <= z) ++k;

  const double left = p.grid[k];
  if (z == left) return at(k);
  if (p.mask[k] || p.mask[k + 1]) return kMissing;
  const double t = (z - left) / (p.grid[k + 1] - left);
  return p.q_smooth[k] + t * (p.q_smooth[k + 1] - p.q_smooth[k]);
}

}  // namespace smoothrank
