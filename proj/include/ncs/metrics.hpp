#pragma once

#include "ncs/noise.hpp"
#include "ncs/rng.hpp"
#include "ncs/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ncs {

enum class Algorithm { CN, CNAlpha };

std::string algorithm_name(Algorithm alg);

/// One benchmark measurement: empirical ratio, theoretical bound, and their
/// quotient kappa (kappa <= 1 means the bound held empirically).
struct QualityReport {
  std::string algorithm;
  double eps = 0.0;
  double noise_level = 0.0;
  double r_tilde = 0.0;
  double u = 1.0;
  double kappa = 0.0;
};

QualityReport make_quality_report(Algorithm alg, double eps, double noise_level,
                                  double r_tilde, double u);

/// Random k-center sets drawn per coordinate from the bounding box of the
/// evaluated dataset; the sampled surrogate for suprema over all center sets.
class CandidateCenters {
 public:
  CandidateCenters(std::vector<Matrix> sets, Index k, Index dim);

  Index count() const { return static_cast<Index>(sets_.size()); }
  Index k() const { return k_; }
  Index dim() const { return dim_; }
  const Matrix& set(Index i) const { return sets_[static_cast<std::size_t>(i)]; }
  const std::vector<Matrix>& sets() const { return sets_; }

 private:
  std::vector<Matrix> sets_;
  Index k_;
  Index dim_;
};

CandidateCenters sample_candidate_centers(const Dataset& data, Index count,
                                          Index k, SeededRng& rng);

/// Ratio cost(P, C_S) / cost(P, C_P) with both center sets produced by the
/// 10-restart solver on S and P respectively.
double empirical_ratio(const Dataset& data, const WeightedPointSet& coreset,
                       Index k, std::uint64_t seed);

/// Closed-form bound u on the true approximation ratio, with all hidden
/// constants set to 1:
///   CN:       (1 + eps + T + sqrt(T))^2          with T = level*n*d / opt
///   CNAlpha:  1 + eps + level*k*d/opt + T
/// Correlated noise replaces level*d by level*trace(Sigma).
double theoretical_bound(Algorithm alg, double eps, const NoiseSpec& noise,
                         Index n, Index d, Index k, double opt_estimate);

/// Advisory (k,z) generalization with unit constants:
/// (1 + eps + T + T^(1/z))^2 with T = level * n * d^(z/2) / opt.
double kz_bound(double eps, double level, Index n, Index d, double z,
                double opt_estimate);

/// Advisory sample size per cluster from the refined analysis
/// (unit constants): k log k/(eps - delta) + (alpha-1) k log k/(eps-delta)^2
/// with delta = sqrt(alpha-1)*theta*n*d/(alpha*opt). Infinity when
/// eps <= delta.
double cn_alpha_theoretical_size(Index k, double eps, double alpha,
                                 double theta, Index n, Index d, double opt);

/// Alternate bound keeping the sqrt(alpha-1) cross-terms:
/// 1 + eps + theta*k*d/opt + (sqrt(alpha-1)/alpha)*(sqrt(theta*k*d*opt) + theta*n*d)/opt.
double cn_alpha_refined_bound(double eps, double alpha, double theta, Index n,
                              Index d, Index k, double opt);

/// max over candidates of |cost(A,C) - cost(B,C)| / cost(A,C); candidates
/// with cost(A,C) = 0 are skipped. A lower bound on the worst-case relative
/// cost deviation.
double estimate_err(const WeightedPointSet& a, const Dataset& b,
                    const CandidateCenters& candidates,
                    PowerZ z = PowerZ::kmeans());
double estimate_err(const Dataset& a, const Dataset& b,
                    const CandidateCenters& candidates,
                    PowerZ z = PowerZ::kmeans());

struct ErrAlphaEstimate {
  double value = 0.0;
  bool fallback = false;  // alpha > 1 search retained no candidate
};

/// For alpha = 1: cost(B, C_A)/cost(B, C_B) - 1 with both center sets from
/// the 10-restart solver. For alpha > 1 the solver optimum is additionally
/// perturbed by random center jitters and swaps; candidates that stay
/// alpha-approximate on A widen the supremum search (a lower-bound
/// estimate). z = 1 is supported for the exactly solvable case
/// (k = 1, d = 1, alpha = 1), where the optima are weighted medians.
ErrAlphaEstimate estimate_err_alpha(const WeightedPointSet& a, const Dataset& b,
                                    Index k, double alpha, std::uint64_t seed,
                                    PowerZ z = PowerZ::kmeans());
ErrAlphaEstimate estimate_err_alpha(const Dataset& a, const Dataset& b, Index k,
                                    double alpha, std::uint64_t seed,
                                    PowerZ z = PowerZ::kmeans());

/// Per-candidate check of the composition inequality
/// |cost(P,C) - cost(S,C)| <= (eps_c + 2*eps'_c) * cost(S,C).
struct CompositionReport {
  Index candidates = 0;   // candidates evaluated on all three sets
  Index checked = 0;      // candidates meeting the eps_c < 1 precondition
  Index violations = 0;
  double worst_slack = 0.0;  // min over checked of (rhs - lhs)/cost(S,C)
  double err_s_phat = 0.0;   // max-form estimates over the shared list
  double err_phat_p = 0.0;
  double err_s_p = 0.0;
  bool aggregate_holds = false;  // err_s_p <= err_s_phat + 2*err_phat_p
};

CompositionReport check_composition(const WeightedPointSet& coreset,
                                    const Dataset& noisy, const Dataset& clean,
                                    const CandidateCenters& candidates,
                                    PowerZ z = PowerZ::kmeans());

/// Checks r_P(C) <= (1 + Err)^2 * alpha over candidates with r_S(C) <= alpha.
/// Violations are possible only through estimator slack and are reported,
/// not fatal.
struct ErrToRReport {
  Index alpha_candidates = 0;
  Index violations = 0;
  double err_estimate = 0.0;
  double bound = 0.0;        // (1 + err_estimate)^2 * alpha
  double worst_ratio = 0.0;  // max r_P(C) among alpha-approximate candidates
};

ErrToRReport check_err_to_r(const Dataset& data, const WeightedPointSet& coreset,
                            const CandidateCenters& candidates, double alpha,
                            std::uint64_t seed);

enum class MergeVerdict { Pass, Fail, Degenerate, PreconditionUnverified };

struct MergeBoundReport {
  MergeVerdict verdict = MergeVerdict::Degenerate;
  double kappa = 0.0;
  double tau = 0.0;
  double eps = 0.0;  // max of the two per-part estimates
  double lhs = 0.0;  // estimated Err_{1+(alpha-1)kappa} of the union
  double rhs = 0.0;  // alpha' * tau * (1 + eps) - 1
  double margin = 0.0;
};

/// Evaluates the weak-mergeability inequality
/// Err_{1+(alpha-1)kappa}(S1 u S2, P1 u P2) < alpha' * tau * (1 + eps) - 1
/// after spot-checking the inclusion precondition on sampled candidates.
MergeBoundReport check_merge_bound(const WeightedPointSet& s1, const Dataset& p1,
                                   const WeightedPointSet& s2, const Dataset& p2,
                                   Index k, double alpha, double alpha_prime,
                                   std::uint64_t seed);

/// 1-D grid spec for the exhaustive Err oracle: `points` grid positions per
/// center spanning [min - padding*range, max + padding*range].
struct GridSpec1D {
  Index points = 201;
  double padding = 1.0;
};

/// Exact maximum of the Err ratio over the center grid (Cartesian product
/// for k = 2); the test oracle for estimate_err on tiny 1-D instances.
double brute_force_err_1d(const WeightedPointSet& a, const Dataset& b, Index k,
                          PowerZ z, const GridSpec1D& grid);
double brute_force_err_1d(const Dataset& a, const Dataset& b, Index k, PowerZ z,
                          const GridSpec1D& grid);

}  // namespace ncs
