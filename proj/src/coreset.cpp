#include "ncs/coreset.hpp"

#include "ncs/cost.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ncs {
namespace {

void check_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("coreset: eps must lie in (0, 1)");
}

/// Uniform draw of m distinct values from `pool` (partial Fisher-Yates),
/// returned in ascending order so output is stable.
std::vector<Index> sample_without_replacement(std::vector<Index> pool, Index m,
                                              SeededRng& rng) {
  const Index n = static_cast<Index>(pool.size());
  for (Index i = 0; i < m; ++i) {
    const Index j =
        i + static_cast<Index>(rng.next_below(static_cast<std::uint64_t>(n - i)));
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
  }
  pool.resize(static_cast<std::size_t>(m));
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace

CnSampleSize cn_sample_size(Index k, double eps, Index n) {
  check_eps(eps);
  if (k < 1) throw std::invalid_argument("cn_sample_size: k must be >= 1");
  const double raw = 3.0 * std::pow(static_cast<double>(k), 1.5) / (eps * eps);
  CnSampleSize size;
  size.requested = std::max<Index>(1, static_cast<Index>(raw));
  size.used = std::min(size.requested, n);
  size.clamped = size.used < size.requested;
  return size;
}

Index cn_alpha_cluster_cap(double eps) {
  check_eps(eps);
  return std::max<Index>(
      1, static_cast<Index>(9.0 / eps + 6.0 / (eps * eps)));
}

WeightedPointSet build_cn(const Dataset& data, double eps, Index k,
                          const SeededRng& rng) {
  check_eps(eps);
  const Index n = data.size();

  SeededRng opt_rng = rng.child(0);
  const SolveResult approx = estimate_opt(data, k, opt_rng);
  const std::vector<int> labels = assign(data, approx.centers);
  const Vector sq =
      detail::min_squared_distances(data.points(), approx.centers.centers());

  std::vector<Index> cluster_size(static_cast<std::size_t>(k), 0);
  for (int label : labels) ++cluster_size[static_cast<std::size_t>(label)];

  Vector score(n);
  for (Index i = 0; i < n; ++i) {
    const auto members = cluster_size[static_cast<std::size_t>(labels[i])];
    score[i] = 1.0 / (static_cast<double>(k) * static_cast<double>(members));
    if (approx.cost > 0.0) score[i] += sq[i] / approx.cost;
  }
  const double total_score = score.sum();

  Vector cumulative(n);
  std::partial_sum(score.data(), score.data() + n, cumulative.data());

  const Index m = cn_sample_size(k, eps, n).used;
  SeededRng draw_rng = rng.child(1);
  Matrix points(m, data.dim());
  Vector weights(m);
  for (Index j = 0; j < m; ++j) {
    const double target = draw_rng.next_double() * total_score;
    const Index pick = std::min<Index>(
        n - 1, std::lower_bound(cumulative.data(), cumulative.data() + n, target) -
                   cumulative.data());
    points.row(j) = data.point(pick);
    weights[j] = total_score / (static_cast<double>(m) * score[pick]);
  }
  return WeightedPointSet(std::move(points), std::move(weights));
}

CnAlphaResult build_cn_alpha(const Dataset& data, double eps,
                             double noise_level, Index k,
                             const SeededRng& rng) {
  CnAlphaOptions options;
  options.eps = eps;
  options.noise_level = noise_level;
  return build_cn_alpha(data, options, k, rng);
}

CnAlphaResult build_cn_alpha(const Dataset& data, const CnAlphaOptions& options,
                             Index k, const SeededRng& rng) {
  check_eps(options.eps);
  SeededRng opt_rng = rng.child(0);
  const SolveResult approx = estimate_opt(data, k, opt_rng);
  return build_cn_alpha_with_centers(data, approx.centers, options, rng);
}

CnAlphaResult build_cn_alpha_with_centers(const Dataset& data,
                                          const CenterSet& centers,
                                          const CnAlphaOptions& options,
                                          const SeededRng& rng) {
  check_eps(options.eps);
  if (!(options.noise_level >= 0.0))
    throw std::invalid_argument("build_cn_alpha: noise level must be >= 0");
  require_same_dim(data.dim(), centers.dim(), "build_cn_alpha");

  const Index k = centers.k();
  const Index d = data.dim();
  const std::vector<int> labels = assign(data, centers);
  const Vector sq =
      detail::min_squared_distances(data.points(), centers.centers());

  std::vector<std::vector<Index>> members(static_cast<std::size_t>(k));
  for (Index i = 0; i < data.size(); ++i)
    members[static_cast<std::size_t>(labels[i])].push_back(i);

  const double level_term =
      1.0 + options.noise_level * static_cast<double>(k) * static_cast<double>(d);
  const double sqrt_d = std::sqrt(static_cast<double>(d));

  CnAlphaTrace trace;
  trace.centers = centers.centers();
  trace.rms_radius.resize(k);
  trace.filter_radius.resize(k);
  trace.cluster_size.resize(static_cast<std::size_t>(k));
  trace.filtered_size.resize(static_cast<std::size_t>(k));
  trace.sample_size.resize(static_cast<std::size_t>(k));
  {
    detail::CompensatedSum total;
    for (Index i = 0; i < data.size(); ++i) total.add(sq[i]);
    trace.opt_estimate = total.value();
  }

  const Index cap = cn_alpha_cluster_cap(options.eps);

  std::vector<Index> picked;
  std::vector<double> picked_weight;
  std::vector<int> picked_cluster;

  for (Index c = 0; c < k; ++c) {
    const auto& cluster = members[static_cast<std::size_t>(c)];
    if (cluster.empty())
      throw ConstructionError("build_cn_alpha: cluster " + std::to_string(c) +
                              " is empty under the supplied centers");

    detail::CompensatedSum cluster_cost;
    for (Index i : cluster) cluster_cost.add(sq[i]);
    const double rms =
        std::sqrt(cluster_cost.value() / static_cast<double>(cluster.size()));

    double radius = 0.0;
    switch (options.radius_rule) {
      case RadiusRule::Empirical:
        radius = rms + sqrt_d * std::log(10.0 * level_term);
        break;
      case RadiusRule::Theoretical: {
        const double alpha_gap =
            std::sqrt(std::max(options.alpha - 1.0, 1e-12));
        radius = 3.0 * rms + sqrt_d * std::log(level_term / alpha_gap);
        break;
      }
    }
    radius = std::max(radius, rms);

    std::vector<Index> inside;
    const double radius_sq = radius * radius;
    for (Index i : cluster)
      if (sq[i] <= radius_sq) inside.push_back(i);
    if (inside.empty())
      throw ConstructionError("build_cn_alpha: radius filter removed cluster " +
                              std::to_string(c) + " entirely");

    const Index filtered = static_cast<Index>(inside.size());
    const Index sample = std::min(filtered, cap);
    SeededRng cluster_rng = rng.child(static_cast<std::uint64_t>(c) + 1);
    std::vector<Index> chosen =
        sample_without_replacement(std::move(inside), sample, cluster_rng);

    const double weight =
        static_cast<double>(filtered) / static_cast<double>(sample);
    for (Index i : chosen) {
      picked.push_back(i);
      picked_weight.push_back(weight);
      picked_cluster.push_back(static_cast<int>(c));
    }

    trace.rms_radius[c] = rms;
    trace.filter_radius[c] = radius;
    trace.cluster_size[static_cast<std::size_t>(c)] =
        static_cast<Index>(cluster.size());
    trace.filtered_size[static_cast<std::size_t>(c)] = filtered;
    trace.sample_size[static_cast<std::size_t>(c)] = sample;
  }

  const Index total = static_cast<Index>(picked.size());
  Matrix points(total, d);
  Vector weights(total);
  for (Index j = 0; j < total; ++j) {
    points.row(j) = data.point(picked[static_cast<std::size_t>(j)]);
    weights[j] = picked_weight[static_cast<std::size_t>(j)];
  }
  return CnAlphaResult{
      WeightedPointSet(std::move(points), std::move(weights),
                       std::move(picked_cluster)),
      std::move(trace)};
}

CoresetSummary coreset_summary(const WeightedPointSet& coreset) {
  if (coreset.size() < 1)
    throw std::invalid_argument("coreset_summary: empty coreset");
  CoresetSummary summary;
  summary.size = coreset.size();
  summary.total_weight = coreset.total_weight();
  return summary;
}

CoresetSummary coreset_summary(const WeightedPointSet& coreset,
                               const CnAlphaTrace& trace) {
  CoresetSummary summary = coreset_summary(coreset);
  for (std::size_t c = 0; c < trace.cluster_size.size(); ++c)
    summary.retention.push_back(static_cast<double>(trace.filtered_size[c]) /
                                static_cast<double>(trace.cluster_size[c]));
  return summary;
}

namespace testing {

WeightedPointSet uniform_sample_with_replacement(const Dataset& data, Index m,
                                                 SeededRng& rng) {
  if (m < 1)
    throw std::invalid_argument("uniform_sample_with_replacement: m must be >= 1");
  Matrix points(m, data.dim());
  for (Index j = 0; j < m; ++j) {
    const Index pick = static_cast<Index>(
        rng.next_below(static_cast<std::uint64_t>(data.size())));
    points.row(j) = data.point(pick);
  }
  return WeightedPointSet(std::move(points), Vector::Ones(m));
}

}  // namespace testing
}  // namespace ncs
