#pragma once

#include "ncs/rng.hpp"
#include "ncs/solver.hpp"
#include "ncs/types.hpp"

#include <string>
#include <vector>

namespace ncs {

/// Requested and actually used sample size for the sensitivity-sampling
/// construction: floor(3 * k^1.5 / eps^2), clamped to n.
struct CnSampleSize {
  Index requested = 0;
  Index used = 0;
  bool clamped = false;
};
CnSampleSize cn_sample_size(Index k, double eps, Index n);

/// Per-cluster cap of the cluster-wise uniform construction:
/// floor(9/eps + 6/eps^2).
Index cn_alpha_cluster_cap(double eps);

/// How the filter radius R_i is formed from the per-cluster RMS radius.
enum class RadiusRule {
  Empirical,    // R_i = r_i + sqrt(d) * log(10 * (1 + theta*k*d))
  Theoretical,  // R_i = 3*r_i + sqrt(d) * log((1 + theta*k*d) / sqrt(alpha-1))
};

struct CnAlphaOptions {
  double eps = 0.1;
  double noise_level = 0.0;  // theta-equivalent level entering R_i
  RadiusRule radius_rule = RadiusRule::Empirical;
  double alpha = 1.01;       // used by the Theoretical radius rule only
};

/// Per-cluster record of the cluster-wise construction.
struct CnAlphaTrace {
  Matrix centers;                    // approximate centers, one per row
  Vector rms_radius;                 // r_i
  Vector filter_radius;              // R_i >= r_i
  std::vector<Index> cluster_size;   // |P_i| under the centers
  std::vector<Index> filtered_size;  // points surviving the radius filter
  std::vector<Index> sample_size;    // |S_i|
  double opt_estimate = 0.0;         // cost of the data under the centers
};

struct CnAlphaResult {
  WeightedPointSet coreset;
  CnAlphaTrace trace;
};

/// Sensitivity (importance) sampling against a cheap approximate solution:
/// score(p) = d^2(p, C~)/OPT~ + 1/(k * |cluster(p)|), then m i.i.d. draws
/// with probability proportional to score and weight 1/(m * q(p)). The
/// weighted cost of any fixed center set is unbiased for cost(data, C).
WeightedPointSet build_cn(const Dataset& data, double eps, Index k,
                          const SeededRng& rng);

/// Cluster-wise uniform sampling: partition by a cheap approximate
/// solution, drop points outside B(c_i, R_i), then sample
/// min(|P'_i|, floor(9/eps + 6/eps^2)) points per cluster without
/// replacement, weighted |P'_i|/|S_i|.
CnAlphaResult build_cn_alpha(const Dataset& data, double eps,
                             double noise_level, Index k,
                             const SeededRng& rng);
CnAlphaResult build_cn_alpha(const Dataset& data, const CnAlphaOptions& options,
                             Index k, const SeededRng& rng);

/// Same construction from externally supplied centers (the algorithm takes
/// an approximate center set as input; this entry point makes that explicit).
CnAlphaResult build_cn_alpha_with_centers(const Dataset& data,
                                          const CenterSet& centers,
                                          const CnAlphaOptions& options,
                                          const SeededRng& rng);

/// Size and weight accounting for report tables.
struct CoresetSummary {
  Index size = 0;
  double total_weight = 0.0;
  std::vector<double> retention;  // |P'_i| / |P_i| per cluster (empty for CN)
};
CoresetSummary coreset_summary(const WeightedPointSet& coreset);
CoresetSummary coreset_summary(const WeightedPointSet& coreset,
                               const CnAlphaTrace& trace);

namespace testing {
/// Uniform sampling with replacement, exposed for sampling-theory checks.
WeightedPointSet uniform_sample_with_replacement(const Dataset& data, Index m,
                                                 SeededRng& rng);
}  // namespace testing

}  // namespace ncs
