#pragma once

#include "ncs/types.hpp"

namespace ncs {

/// n/2 points at -1 and n/2 at +1 on the line. The 1-means optimum is 0
/// with cost exactly n.
Dataset gen_two_point(Index n);

/// Four sites on the line at -(2 + beta/2)*sqrt(2), -beta*sqrt(2)/2,
/// +beta*sqrt(2)/2, (2 + beta/2)*sqrt(2), n/4 points each. For beta >= 2
/// the 3-means optimum merges an outer pair: OPT(3) = n and OPT(2) = 2n.
Dataset gen_beta_grid(Index n, double beta);

/// 1-median instance where a tiny coreset preserves the optimum but not
/// the cost scale: P has n-1 points at 0 and one at 1; the companion
/// coreset S has n-1 points at 0 and one at 1/n (unit weights).
struct OutlierMedianInstance {
  Dataset data;
  WeightedPointSet coreset;
};
OutlierMedianInstance gen_outlier_median(Index n);

/// n points at 100*n*e_i in R^n, clustered with k = n-1: the optimum
/// merges one pair of basis points, at cost 10000*n^2.
struct LowerBoundInstance {
  Dataset data;
  Index k;                // n - 1
  double opt;             // 10000 * n^2
};
LowerBoundInstance gen_lower_bound_instance(Index n);

}  // namespace ncs
