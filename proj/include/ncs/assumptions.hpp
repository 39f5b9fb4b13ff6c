#pragma once

#include "ncs/rng.hpp"
#include "ncs/types.hpp"

#include <cstdint>
#include <vector>

namespace ncs {

/// Diagnostics for the cost-stability and limited-outlier assumptions.
struct AssumptionReport {
  double gamma_hat = 0.0;       // OPT~(k-1)/OPT~(k) - 1
  double gamma_threshold = 0.0;
  bool stability_ok = false;
  double max_radius_ratio = 0.0;          // max_i r_i / rms_i
  double trimmed_max_radius_ratio = 0.0;  // same after the 1% trim
  bool outliers_ok = false;               // max ratio <= 8
  bool trimmed_outliers_ok = false;
  bool threshold_alpha_clamped = false;
};

struct GammaEstimate {
  double gamma_hat = 0.0;
  double opt_k = 0.0;
  double opt_k_minus_1 = 0.0;
};

/// Cost-stability estimate via the 10-restart solver at k and k-1.
GammaEstimate estimate_gamma(const Dataset& data, Index k, SeededRng& rng);

struct StabilityVerdict {
  bool satisfied = false;
  double threshold = 0.0;
  bool alpha_clamped = false;  // alpha <= 1 forced the guarded form
};

/// Compares gamma_hat against alpha * (1 + theta*n*d*log^2(k*d/sqrt(alpha-1))/opt)
/// with all hidden constants set to 1. For alpha <= 1, sqrt(alpha-1) is
/// clamped to 1e-6 and the verdict flagged.
StabilityVerdict check_stability(double gamma_hat, double alpha, double theta,
                                 Index n, Index d, Index k, double opt);

struct RadiusReport {
  double max_ratio = 0.0;
  std::vector<double> max_radius;   // r_i per cluster
  std::vector<double> rms_radius;   // average (RMS) radius per cluster
  std::vector<bool> cluster_empty;  // excluded clusters
  bool ok = false;                  // max_ratio <= 8
};

/// Per-cluster max and RMS radii under the supplied centers. A cluster of
/// points coinciding with its center reports ratio 1; empty clusters are
/// excluded and flagged.
RadiusReport radius_ratios(const Dataset& data, const CenterSet& centers);

struct TrimmedRadiusReport {
  RadiusReport report;
  Index removed = 0;
  bool cluster_lost = false;  // trimming emptied some cluster
};

/// Drops the ceil(trim_fraction * n) points farthest from their assigned
/// center (globally), then recomputes radius_ratios with the same centers.
TrimmedRadiusReport trimmed_radius_ratios(const Dataset& data,
                                          const CenterSet& centers,
                                          double trim_fraction);

/// Full diagnostic combining the pieces above (default trim 1%).
AssumptionReport check_assumptions(const Dataset& data, Index k, double alpha,
                                   double theta, std::uint64_t seed,
                                   double trim_fraction = 0.01);

}  // namespace ncs
