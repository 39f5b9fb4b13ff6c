#include "ncs/assumptions.hpp"

#include "ncs/cost.hpp"
#include "ncs/solver.hpp"

#include <algorithm>
#include <cmath>

namespace ncs {

GammaEstimate estimate_gamma(const Dataset& data, Index k, SeededRng& rng) {
  if (k < 2) throw std::invalid_argument("estimate_gamma: k must be >= 2");
  SolveConfig cfg;
  cfg.restarts = 10;

  cfg.k = k;
  cfg.seed = rng.child(1).state();
  const SolveResult at_k = solve(data, cfg);

  cfg.k = k - 1;
  cfg.seed = rng.child(2).state();
  const SolveResult at_k_minus_1 = solve(data, cfg);

  GammaEstimate estimate;
  estimate.opt_k = at_k.cost;
  estimate.opt_k_minus_1 = at_k_minus_1.cost;
  if (!(at_k.cost > 0.0))
    throw std::invalid_argument("estimate_gamma: k-means cost is zero");
  estimate.gamma_hat = at_k_minus_1.cost / at_k.cost - 1.0;
  return estimate;
}

StabilityVerdict check_stability(double gamma_hat, double alpha, double theta,
                                 Index n, Index d, Index k, double opt) {
  if (!(opt > 0.0))
    throw std::invalid_argument("check_stability: opt must be > 0");
  StabilityVerdict verdict;
  double alpha_gap = std::sqrt(alpha - 1.0);
  if (!(alpha > 1.0)) {
    alpha_gap = 1e-6;
    verdict.alpha_clamped = true;
  }
  const double log_term =
      std::log(static_cast<double>(k) * static_cast<double>(d) / alpha_gap);
  const double effective_alpha = std::max(alpha, 1.0);
  verdict.threshold =
      effective_alpha *
      (1.0 + theta * static_cast<double>(n) * static_cast<double>(d) *
                 log_term * log_term / opt);
  verdict.satisfied = gamma_hat >= verdict.threshold;
  return verdict;
}

namespace {

RadiusReport radii_from_distances(const std::vector<int>& labels,
                                  const Vector& sq, Index k) {
  RadiusReport report;
  report.max_radius.assign(static_cast<std::size_t>(k), 0.0);
  report.rms_radius.assign(static_cast<std::size_t>(k), 0.0);
  report.cluster_empty.assign(static_cast<std::size_t>(k), true);

  std::vector<detail::CompensatedSum> sums(static_cast<std::size_t>(k));
  std::vector<Index> counts(static_cast<std::size_t>(k), 0);
  for (Index i = 0; i < sq.size(); ++i) {
    const auto c = static_cast<std::size_t>(labels[static_cast<std::size_t>(i)]);
    sums[c].add(sq[i]);
    ++counts[c];
    report.max_radius[c] = std::max(report.max_radius[c], sq[i]);
  }

  report.max_ratio = 0.0;
  for (std::size_t c = 0; c < static_cast<std::size_t>(k); ++c) {
    if (counts[c] == 0) continue;
    report.cluster_empty[c] = false;
    report.max_radius[c] = std::sqrt(report.max_radius[c]);
    report.rms_radius[c] =
        std::sqrt(sums[c].value() / static_cast<double>(counts[c]));
    // A perfectly tight cluster (r = rms = 0) passes by convention.
    const double ratio = (report.rms_radius[c] > 0.0)
                             ? report.max_radius[c] / report.rms_radius[c]
                             : 1.0;
    report.max_ratio = std::max(report.max_ratio, ratio);
  }
  report.ok = report.max_ratio <= 8.0;
  return report;
}

}  // namespace

RadiusReport radius_ratios(const Dataset& data, const CenterSet& centers) {
  require_same_dim(data.dim(), centers.dim(), "radius_ratios");
  std::vector<int> labels;
  const Vector sq = detail::min_squared_distances(data.points(),
                                                  centers.centers(), &labels);
  return radii_from_distances(labels, sq, centers.k());
}

TrimmedRadiusReport trimmed_radius_ratios(const Dataset& data,
                                          const CenterSet& centers,
                                          double trim_fraction) {
  if (!(trim_fraction >= 0.0 && trim_fraction < 1.0))
    throw std::invalid_argument(
        "trimmed_radius_ratios: trim fraction must lie in [0, 1)");
  require_same_dim(data.dim(), centers.dim(), "trimmed_radius_ratios");

  std::vector<int> labels;
  const Vector sq = detail::min_squared_distances(data.points(),
                                                  centers.centers(), &labels);
  const Index n = data.size();
  const Index remove = static_cast<Index>(
      std::ceil(trim_fraction * static_cast<double>(n)));

  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::nth_element(order.begin(), order.begin() + (n - remove), order.end(),
                   [&](Index a, Index b) { return sq[a] < sq[b]; });

  std::vector<char> keep(static_cast<std::size_t>(n), 1);
  for (Index i = n - remove; i < n; ++i)
    keep[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = 0;

  std::vector<int> kept_labels;
  std::vector<double> kept_sq;
  kept_labels.reserve(static_cast<std::size_t>(n - remove));
  for (Index i = 0; i < n; ++i) {
    if (!keep[static_cast<std::size_t>(i)]) continue;
    kept_labels.push_back(labels[static_cast<std::size_t>(i)]);
    kept_sq.push_back(sq[i]);
  }

  TrimmedRadiusReport trimmed;
  trimmed.removed = remove;
  Vector kept_vec = Eigen::Map<Vector>(kept_sq.data(),
                                       static_cast<Index>(kept_sq.size()));
  trimmed.report = radii_from_distances(kept_labels, kept_vec, centers.k());

  const RadiusReport before = radii_from_distances(labels, sq, centers.k());
  for (std::size_t c = 0; c < trimmed.report.cluster_empty.size(); ++c)
    if (trimmed.report.cluster_empty[c] && !before.cluster_empty[c])
      trimmed.cluster_lost = true;
  return trimmed;
}

AssumptionReport check_assumptions(const Dataset& data, Index k, double alpha,
                                   double theta, std::uint64_t seed,
                                   double trim_fraction) {
  SeededRng rng(seed);
  const GammaEstimate gamma = estimate_gamma(data, k, rng);
  const StabilityVerdict stability = check_stability(
      gamma.gamma_hat, alpha, theta, data.size(), data.dim(), k, gamma.opt_k);

  SolveConfig cfg;
  cfg.k = k;
  cfg.restarts = 10;
  cfg.seed = rng.child(3).state();
  const SolveResult solution = solve(data, cfg);
  const RadiusReport radii = radius_ratios(data, solution.centers);
  const TrimmedRadiusReport trimmed =
      trimmed_radius_ratios(data, solution.centers, trim_fraction);

  AssumptionReport report;
  report.gamma_hat = gamma.gamma_hat;
  report.gamma_threshold = stability.threshold;
  report.stability_ok = stability.satisfied;
  report.threshold_alpha_clamped = stability.alpha_clamped;
  report.max_radius_ratio = radii.max_ratio;
  report.outliers_ok = radii.ok;
  report.trimmed_max_radius_ratio = trimmed.report.max_ratio;
  report.trimmed_outliers_ok = trimmed.report.ok;
  return report;
}

}  // namespace ncs
