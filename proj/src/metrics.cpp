#include "ncs/metrics.hpp"

#include "ncs/cost.hpp"
#include "ncs/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ncs {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double cost_on(const WeightedPointSet& data, const Matrix& centers, double z) {
  return detail::cost_of_points(data.points(), centers, &data.weights(), z);
}

double cost_on(const Dataset& data, const Matrix& centers, double z) {
  return detail::cost_of_points(data.points(), centers, nullptr, z);
}

template <typename A, typename B>
double estimate_err_impl(const A& a, const B& b,
                         const CandidateCenters& candidates, double z) {
  if (candidates.count() < 1)
    throw std::invalid_argument("estimate_err: candidate list is empty");
  require_same_dim(a.dim(), b.dim(), "estimate_err");
  require_same_dim(a.dim(), candidates.dim(), "estimate_err");
  double worst = -1.0;
  for (Index i = 0; i < candidates.count(); ++i) {
    const Matrix& centers = candidates.set(i);
    const double denom = cost_on(a, centers, z);
    if (denom <= 0.0) continue;
    worst = std::max(worst, std::abs(denom - cost_on(b, centers, z)) / denom);
  }
  if (worst < 0.0)
    throw std::invalid_argument(
        "estimate_err: every candidate had zero cost on the evaluated set");
  return worst;
}

/// Jittered variations of a solved center set used to search the
/// alpha-approximate neighborhood.
std::vector<Matrix> jitter_candidates(const Matrix& base,
                                      const Eigen::Ref<const Matrix>& points,
                                      double scale, Index count,
                                      SeededRng& rng) {
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(count));
  for (Index j = 0; j < count; ++j) {
    SeededRng cand_rng = rng.child(static_cast<std::uint64_t>(j));
    Matrix centers = base;
    const double magnitude = (0.05 + 0.55 * cand_rng.next_double()) * scale;
    for (Index c = 0; c < centers.rows(); ++c)
      for (Index col = 0; col < centers.cols(); ++col)
        centers(c, col) += magnitude * sample_standard_normal(cand_rng);
    if (cand_rng.next_double() < 0.3) {
      const Index which = static_cast<Index>(
          cand_rng.next_below(static_cast<std::uint64_t>(centers.rows())));
      const Index pick = static_cast<Index>(
          cand_rng.next_below(static_cast<std::uint64_t>(points.rows())));
      centers.row(which) = points.row(pick);
    }
    out.push_back(std::move(centers));
  }
  return out;
}

/// Exact weighted 1-median on the line.
double line_median(const Eigen::Ref<const Matrix>& points,
                   const Vector* weights) {
  std::vector<Index> order(static_cast<std::size_t>(points.rows()));
  for (Index i = 0; i < points.rows(); ++i)
    order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(),
            [&](Index x, Index y) { return points(x, 0) < points(y, 0); });
  double total = 0.0;
  for (Index i = 0; i < points.rows(); ++i)
    total += weights ? (*weights)[i] : 1.0;
  double acc = 0.0;
  for (Index i : order) {
    acc += weights ? (*weights)[i] : 1.0;
    if (acc >= total / 2.0) return points(i, 0);
  }
  return points(order.back(), 0);
}

template <typename A>
ErrAlphaEstimate median_err_alpha(const A& a, const Dataset& b) {
  const Vector* weights = nullptr;
  if constexpr (std::is_same_v<A, WeightedPointSet>) weights = &a.weights();
  Matrix center_a(1, 1), center_b(1, 1);
  center_a(0, 0) = line_median(a.points(), weights);
  center_b(0, 0) = line_median(b.points(), nullptr);
  const double opt_b = cost_on(b, center_b, 1.0);
  if (!(opt_b > 0.0))
    throw std::invalid_argument("estimate_err_alpha: reference optimum is zero");
  return {cost_on(b, center_a, 1.0) / opt_b - 1.0, false};
}

template <typename A>
ErrAlphaEstimate estimate_err_alpha_impl(const A& a, const Dataset& b, Index k,
                                         double alpha, std::uint64_t seed,
                                         double z) {
  if (!(alpha >= 1.0))
    throw std::invalid_argument("estimate_err_alpha: alpha must be >= 1");
  require_same_dim(a.dim(), b.dim(), "estimate_err_alpha");
  if (z != 2.0) {
    if (z != 1.0 || k != 1 || a.dim() != 1 || alpha != 1.0)
      throw std::invalid_argument(
          "estimate_err_alpha: z != 2 is supported only for k = 1, d = 1, "
          "alpha = 1");
    return median_err_alpha(a, b);
  }

  const SeededRng base(seed);
  SolveConfig cfg;
  cfg.k = k;
  cfg.restarts = 10;

  cfg.seed = base.child(1).state();
  const SolveResult on_a = solve(a, cfg);
  cfg.seed = base.child(2).state();
  const SolveResult on_b = solve(b, cfg);
  if (!(on_b.cost > 0.0))
    throw std::invalid_argument("estimate_err_alpha: reference optimum is zero");

  const double base_value =
      cost(b, on_a.centers, PowerZ::kmeans()) / on_b.cost - 1.0;
  if (alpha == 1.0) return {base_value, false};

  double best = base_value;
  bool retained_any = false;
  if (on_a.cost > 0.0) {
    double total_weight = static_cast<double>(a.size());
    if constexpr (std::is_same_v<A, WeightedPointSet>)
      total_weight = a.total_weight();
    const double scale = std::sqrt(on_a.cost / std::max(total_weight, 1.0));

    SeededRng jitter_rng = base.child(3);
    const std::vector<Matrix> candidates = jitter_candidates(
        on_a.centers.centers(), a.points(), scale, 128, jitter_rng);
    for (const Matrix& centers : candidates) {
      const double r_a = cost_on(a, centers, 2.0) / on_a.cost;
      if (r_a > alpha) continue;
      retained_any = true;
      const double r_b = cost_on(b, centers, 2.0) / on_b.cost;
      best = std::max(best, r_b / r_a - 1.0);
    }
  }
  return {best, !retained_any};
}

WeightedPointSet concat(const WeightedPointSet& a, const WeightedPointSet& b) {
  Matrix points(a.size() + b.size(), a.dim());
  points.topRows(a.size()) = a.points();
  points.bottomRows(b.size()) = b.points();
  Vector weights(a.size() + b.size());
  weights.head(a.size()) = a.weights();
  weights.tail(b.size()) = b.weights();
  return WeightedPointSet(std::move(points), std::move(weights));
}

Dataset concat(const Dataset& a, const Dataset& b) {
  Matrix points(a.size() + b.size(), a.dim());
  points.topRows(a.size()) = a.points();
  points.bottomRows(b.size()) = b.points();
  return Dataset(std::move(points));
}

template <typename A>
double brute_force_err_1d_impl(const A& a, const Dataset& b, Index k, double z,
                               const GridSpec1D& grid) {
  if (a.dim() != 1 || b.dim() != 1)
    throw std::invalid_argument("brute_force_err_1d: inputs must be 1-D");
  if (k < 1 || k > 2)
    throw std::invalid_argument("brute_force_err_1d: k must be 1 or 2");
  if (grid.points < 2 || grid.points > 501)
    throw std::invalid_argument("brute_force_err_1d: grid size must be in [2, 501]");

  const double lo_data =
      std::min(a.points().minCoeff(), b.points().minCoeff());
  const double hi_data =
      std::max(a.points().maxCoeff(), b.points().maxCoeff());
  const double range = std::max(hi_data - lo_data, 1e-12);
  const double lo = lo_data - grid.padding * range;
  const double hi = hi_data + grid.padding * range;
  const double step = (hi - lo) / static_cast<double>(grid.points - 1);

  double worst = 0.0;
  Matrix centers(k, 1);
  const Index second_limit = (k == 2) ? grid.points : 1;
  for (Index i = 0; i < grid.points; ++i) {
    centers(0, 0) = lo + step * static_cast<double>(i);
    for (Index j = 0; j < second_limit; ++j) {
      if (k == 2) {
        if (j < i) continue;  // center sets are unordered
        centers(1, 0) = lo + step * static_cast<double>(j);
      }
      const double denom = cost_on(a, centers, z);
      if (denom <= 0.0) continue;
      worst = std::max(worst, std::abs(denom - cost_on(b, centers, z)) / denom);
    }
  }
  return worst;
}

}  // namespace

std::string algorithm_name(Algorithm alg) {
  return alg == Algorithm::CN ? "cn" : "cn_alpha";
}

QualityReport make_quality_report(Algorithm alg, double eps, double noise_level,
                                  double r_tilde, double u) {
  if (!(u >= 1.0))
    throw std::invalid_argument("QualityReport: bound u must be >= 1");
  QualityReport report;
  report.algorithm = algorithm_name(alg);
  report.eps = eps;
  report.noise_level = noise_level;
  report.r_tilde = r_tilde;
  report.u = u;
  report.kappa = r_tilde / u;
  return report;
}

CandidateCenters::CandidateCenters(std::vector<Matrix> sets, Index k, Index dim)
    : sets_(std::move(sets)), k_(k), dim_(dim) {
  if (sets_.empty())
    throw std::invalid_argument("CandidateCenters: need at least one set");
  for (const Matrix& m : sets_)
    if (m.rows() != k_ || m.cols() != dim_)
      throw std::invalid_argument("CandidateCenters: inconsistent shapes");
}

CandidateCenters sample_candidate_centers(const Dataset& data, Index count,
                                          Index k, SeededRng& rng) {
  if (count < 1 || k < 1)
    throw std::invalid_argument("sample_candidate_centers: count and k must be >= 1");
  const Vector lo = data.points().colwise().minCoeff();
  const Vector hi = data.points().colwise().maxCoeff();
  std::vector<Matrix> sets;
  sets.reserve(static_cast<std::size_t>(count));
  for (Index s = 0; s < count; ++s) {
    Matrix centers(k, data.dim());
    for (Index c = 0; c < k; ++c)
      for (Index j = 0; j < data.dim(); ++j)
        centers(c, j) = lo[j] + (hi[j] - lo[j]) * rng.next_double();
    sets.push_back(std::move(centers));
  }
  return CandidateCenters(std::move(sets), k, data.dim());
}

double empirical_ratio(const Dataset& data, const WeightedPointSet& coreset,
                       Index k, std::uint64_t seed) {
  const SeededRng base(seed);
  SolveConfig cfg;
  cfg.k = k;
  cfg.restarts = 10;

  cfg.seed = base.child(1).state();
  const SolveResult on_coreset = solve(coreset, cfg);
  cfg.seed = base.child(2).state();
  const SolveResult on_data = solve(data, cfg);

  const double numer = cost(data, on_coreset.centers, PowerZ::kmeans());
  const double denom = cost(data, on_data.centers, PowerZ::kmeans());
  if (denom <= 0.0) return numer <= 0.0 ? 1.0 : kInf;
  return numer / denom;
}

double theoretical_bound(Algorithm alg, double eps, const NoiseSpec& noise,
                         Index n, Index d, Index k, double opt_estimate) {
  if (!(opt_estimate > 0.0))
    throw std::invalid_argument("theoretical_bound: opt estimate must be > 0");
  noise.validate(d);
  const double n_term = noise.expected_noise_energy(n, d) / opt_estimate;
  const double k_term = noise.expected_noise_energy(k, d) / opt_estimate;
  switch (alg) {
    case Algorithm::CN: {
      const double s = 1.0 + eps + n_term + std::sqrt(n_term);
      return s * s;
    }
    case Algorithm::CNAlpha:
      return 1.0 + eps + k_term + n_term;
  }
  return 1.0;
}

double kz_bound(double eps, double level, Index n, Index d, double z,
                double opt_estimate) {
  if (!(z >= 1.0)) throw std::invalid_argument("kz_bound: z must be >= 1");
  if (!(opt_estimate > 0.0))
    throw std::invalid_argument("kz_bound: opt estimate must be > 0");
  const double t = level * static_cast<double>(n) *
                   std::pow(static_cast<double>(d), z / 2.0) / opt_estimate;
  const double s = 1.0 + eps + t + std::pow(t, 1.0 / z);
  return s * s;
}

double cn_alpha_theoretical_size(Index k, double eps, double alpha,
                                 double theta, Index n, Index d, double opt) {
  if (!(alpha >= 1.0))
    throw std::invalid_argument("cn_alpha_theoretical_size: alpha must be >= 1");
  if (!(opt > 0.0))
    throw std::invalid_argument("cn_alpha_theoretical_size: opt must be > 0");
  const double delta = std::sqrt(alpha - 1.0) * theta * static_cast<double>(n) *
                       static_cast<double>(d) / (alpha * opt);
  if (eps <= delta) return kInf;
  const double klogk =
      static_cast<double>(k) * std::log(std::max(2.0, static_cast<double>(k)));
  const double gap = eps - delta;
  return klogk / gap + (alpha - 1.0) * klogk / (gap * gap);
}

double cn_alpha_refined_bound(double eps, double alpha, double theta, Index n,
                              Index d, Index k, double opt) {
  if (!(alpha >= 1.0))
    throw std::invalid_argument("cn_alpha_refined_bound: alpha must be >= 1");
  if (!(opt > 0.0))
    throw std::invalid_argument("cn_alpha_refined_bound: opt must be > 0");
  const double nd = static_cast<double>(n) * static_cast<double>(d);
  const double kd = static_cast<double>(k) * static_cast<double>(d);
  return 1.0 + eps + theta * kd / opt +
         std::sqrt(alpha - 1.0) / alpha *
             (std::sqrt(theta * kd * opt) + theta * nd) / opt;
}

double estimate_err(const WeightedPointSet& a, const Dataset& b,
                    const CandidateCenters& candidates, PowerZ z) {
  return estimate_err_impl(a, b, candidates, z.value());
}

double estimate_err(const Dataset& a, const Dataset& b,
                    const CandidateCenters& candidates, PowerZ z) {
  return estimate_err_impl(a, b, candidates, z.value());
}

ErrAlphaEstimate estimate_err_alpha(const WeightedPointSet& a, const Dataset& b,
                                    Index k, double alpha, std::uint64_t seed,
                                    PowerZ z) {
  return estimate_err_alpha_impl(a, b, k, alpha, seed, z.value());
}

ErrAlphaEstimate estimate_err_alpha(const Dataset& a, const Dataset& b, Index k,
                                    double alpha, std::uint64_t seed, PowerZ z) {
  return estimate_err_alpha_impl(a, b, k, alpha, seed, z.value());
}

CompositionReport check_composition(const WeightedPointSet& coreset,
                                    const Dataset& noisy, const Dataset& clean,
                                    const CandidateCenters& candidates,
                                    PowerZ z) {
  CompositionReport report;
  report.worst_slack = kInf;
  double err_s_phat = 0.0, err_phat_p = 0.0, err_s_p = 0.0;
  for (Index i = 0; i < candidates.count(); ++i) {
    const Matrix& centers = candidates.set(i);
    const double on_s = cost_on(coreset, centers, z.value());
    const double on_phat = cost_on(noisy, centers, z.value());
    const double on_p = cost_on(clean, centers, z.value());
    if (on_s <= 0.0 || on_phat <= 0.0) continue;
    ++report.candidates;

    const double eps_c = std::abs(on_phat - on_s) / on_s;
    const double eps_prime = std::abs(on_p - on_phat) / on_phat;
    err_s_phat = std::max(err_s_phat, eps_c);
    err_phat_p = std::max(err_phat_p, eps_prime);
    err_s_p = std::max(err_s_p, std::abs(on_p - on_s) / on_s);

    if (eps_c >= 1.0) continue;  // precondition of the inequality
    ++report.checked;
    const double lhs = std::abs(on_p - on_s);
    const double rhs = (eps_c + 2.0 * eps_prime) * on_s;
    if (lhs > rhs * (1.0 + 1e-9)) ++report.violations;
    report.worst_slack = std::min(report.worst_slack, (rhs - lhs) / on_s);
  }
  report.err_s_phat = err_s_phat;
  report.err_phat_p = err_phat_p;
  report.err_s_p = err_s_p;
  report.aggregate_holds =
      err_s_p <= err_s_phat + 2.0 * err_phat_p + 1e-12;
  return report;
}

ErrToRReport check_err_to_r(const Dataset& data, const WeightedPointSet& coreset,
                            const CandidateCenters& candidates, double alpha,
                            std::uint64_t seed) {
  if (!(alpha >= 1.0))
    throw std::invalid_argument("check_err_to_r: alpha must be >= 1");
  const SeededRng base(seed);
  SolveConfig cfg;
  cfg.k = candidates.k();
  cfg.restarts = 10;

  cfg.seed = base.child(1).state();
  const SolveResult on_coreset = solve(coreset, cfg);
  cfg.seed = base.child(2).state();
  const SolveResult on_data = solve(data, cfg);
  if (!(on_coreset.cost > 0.0) || !(on_data.cost > 0.0))
    throw std::invalid_argument("check_err_to_r: degenerate optimum");

  ErrToRReport report;
  report.err_estimate = estimate_err(coreset, data, candidates);
  report.bound = (1.0 + report.err_estimate) * (1.0 + report.err_estimate) * alpha;
  for (Index i = 0; i < candidates.count(); ++i) {
    const Matrix& centers = candidates.set(i);
    const double r_s = cost_on(coreset, centers, 2.0) / on_coreset.cost;
    if (r_s > alpha) continue;
    ++report.alpha_candidates;
    const double r_p = cost_on(data, centers, 2.0) / on_data.cost;
    report.worst_ratio = std::max(report.worst_ratio, r_p);
    if (r_p > report.bound * (1.0 + 1e-9)) ++report.violations;
  }
  return report;
}

MergeBoundReport check_merge_bound(const WeightedPointSet& s1, const Dataset& p1,
                                   const WeightedPointSet& s2, const Dataset& p2,
                                   Index k, double alpha, double alpha_prime,
                                   std::uint64_t seed) {
  if (!(alpha >= 1.0 && alpha_prime >= 1.0 && alpha_prime <= alpha))
    throw std::invalid_argument(
        "check_merge_bound: need 1 <= alpha' <= alpha");
  const SeededRng base(seed);
  SolveConfig cfg;
  cfg.k = k;
  cfg.restarts = 10;

  auto solved = [&](const auto& set, std::uint64_t stream) {
    SolveConfig local = cfg;
    local.seed = base.child(stream).state();
    return solve(set, local);
  };

  const SolveResult opt_s1 = solved(s1, 1);
  const SolveResult opt_s2 = solved(s2, 2);
  const SolveResult opt_p1 = solved(p1, 3);
  const SolveResult opt_p2 = solved(p2, 4);
  const WeightedPointSet s_union = concat(s1, s2);
  const Dataset p_union = concat(p1, p2);
  const SolveResult opt_su = solved(s_union, 5);

  MergeBoundReport report;
  if (!(opt_s1.cost > 0.0) || !(opt_s2.cost > 0.0) || !(opt_su.cost > 0.0) ||
      !(opt_p1.cost > 0.0) || !(opt_p2.cost > 0.0)) {
    report.verdict = MergeVerdict::Degenerate;
    return report;
  }

  report.kappa = std::min(opt_s1.cost, opt_s2.cost) / opt_su.cost;
  const double q1 = opt_s1.cost / opt_p1.cost;
  const double q2 = opt_s2.cost / opt_p2.cost;
  report.tau = std::max(q1 / q2, q2 / q1);

  const ErrAlphaEstimate e1 =
      estimate_err_alpha(s1, p1, k, alpha, base.child(6).state());
  const ErrAlphaEstimate e2 =
      estimate_err_alpha(s2, p2, k, alpha, base.child(7).state());
  report.eps = std::max(e1.value, e2.value);

  // Spot-check the inclusion precondition on jittered candidates around each
  // part's optimum: alpha'-approximate sets for one part must stay
  // alpha-approximate for the other.
  SeededRng pre_rng = base.child(8);
  const auto spot_check = [&](const SolveResult& own, const WeightedPointSet& self,
                              const SolveResult& other_opt,
                              const WeightedPointSet& other) {
    const double scale =
        std::sqrt(own.cost / std::max(self.total_weight(), 1.0));
    const std::vector<Matrix> cands = jitter_candidates(
        own.centers.centers(), self.points(), scale, 32, pre_rng);
    for (const Matrix& centers : cands) {
      const double r_self = cost_on(self, centers, 2.0) / own.cost;
      if (r_self > alpha_prime) continue;
      const double r_other = cost_on(other, centers, 2.0) / other_opt.cost;
      if (r_other > alpha) return false;
    }
    return true;
  };
  if (!spot_check(opt_s1, s1, opt_s2, s2) ||
      !spot_check(opt_s2, s2, opt_s1, s1)) {
    report.verdict = MergeVerdict::PreconditionUnverified;
    return report;
  }

  const double merged_alpha = 1.0 + (alpha - 1.0) * report.kappa;
  report.lhs = estimate_err_alpha(s_union, p_union, k,
                                  std::max(1.0, merged_alpha),
                                  base.child(9).state())
                   .value;
  report.rhs = alpha_prime * report.tau * (1.0 + report.eps) - 1.0;
  report.margin = report.rhs - report.lhs;
  // Strict inequality generically; equality only at the degenerate boundary
  // (exact coresets of identical structure), which still counts as holding.
  report.verdict = report.lhs < report.rhs + 1e-12 ? MergeVerdict::Pass
                                                   : MergeVerdict::Fail;
  return report;
}

double brute_force_err_1d(const WeightedPointSet& a, const Dataset& b, Index k,
                          PowerZ z, const GridSpec1D& grid) {
  return brute_force_err_1d_impl(a, b, k, z.value(), grid);
}

double brute_force_err_1d(const Dataset& a, const Dataset& b, Index k, PowerZ z,
                          const GridSpec1D& grid) {
  return brute_force_err_1d_impl(a, b, k, z.value(), grid);
}

}  // namespace ncs
