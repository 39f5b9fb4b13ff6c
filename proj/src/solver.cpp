#include "ncs/solver.hpp"

#include "ncs/parallel.hpp"

#include <algorithm>
#include <optional>
#include <cmath>
#include <limits>
#include <vector>

namespace ncs {
namespace {

Index count_positive_weights(const Vector& w) {
  Index count = 0;
  for (Index i = 0; i < w.size(); ++i)
    if (w[i] > 0.0) ++count;
  return count;
}

/// Draw an index with probability mass[i] / sum(mass); mass must be
/// nonnegative with a positive total.
Index draw_from(const Vector& mass, double total, SeededRng& rng) {
  const double target = rng.next_double() * total;
  double acc = 0.0;
  Index last = -1;
  for (Index i = 0; i < mass.size(); ++i) {
    if (mass[i] <= 0.0) continue;
    acc += mass[i];
    last = i;
    if (acc >= target) return i;
  }
  return last;  // guards against accumulated rounding at the top end
}

CenterSet seed_impl(const Matrix& points, const Vector& weights, Index k,
                    SeededRng& rng) {
  const Index n = points.rows();
  if (k < 1) throw std::invalid_argument("kmeanspp_seed: k must be >= 1");
  if (k > count_positive_weights(weights))
    throw std::invalid_argument(
        "kmeanspp_seed: k exceeds the number of points with positive weight");

  std::vector<Index> chosen;
  chosen.reserve(static_cast<std::size_t>(k));
  std::vector<char> taken(static_cast<std::size_t>(n), 0);

  chosen.push_back(draw_from(weights, weights.sum(), rng));
  taken[static_cast<std::size_t>(chosen.back())] = 1;

  Vector dist2 =
      (points.rowwise() - points.row(chosen.back())).rowwise().squaredNorm();

  Vector mass(n);
  while (static_cast<Index>(chosen.size()) < k) {
    double total = 0.0;
    for (Index i = 0; i < n; ++i) {
      mass[i] = taken[static_cast<std::size_t>(i)] ? 0.0 : weights[i] * dist2[i];
      total += mass[i];
    }
    Index next;
    if (total > 0.0) {
      next = draw_from(mass, total, rng);
    } else {
      // All remaining candidates coincide with chosen centers; fall back to
      // weight-proportional draws over the untaken indices.
      for (Index i = 0; i < n; ++i)
        mass[i] = taken[static_cast<std::size_t>(i)] ? 0.0 : weights[i];
      next = draw_from(mass, mass.sum(), rng);
    }
    taken[static_cast<std::size_t>(next)] = 1;
    chosen.push_back(next);
    dist2 = dist2.cwiseMin(
        (points.rowwise() - points.row(next)).rowwise().squaredNorm());
  }

  Matrix centers(k, points.cols());
  for (Index i = 0; i < k; ++i) centers.row(i) = points.row(chosen[i]);
  return CenterSet(centers);
}

SolveResult lloyd_impl(const Matrix& points, const Vector& weights,
                       const CenterSet& init, int max_iter, double tol) {
  require_same_dim(points.cols(), init.dim(), "lloyd");
  const Index n = points.rows();
  const Index k = init.k();
  Matrix centers = init.centers();

  std::vector<int> labels;
  Vector sq = detail::min_squared_distances(points, centers, &labels);

  auto weighted_cost = [&]() {
    detail::CompensatedSum total;
    for (Index i = 0; i < n; ++i) total.add(weights[i] * sq[i]);
    return total.value();
  };

  double current = weighted_cost();
  for (int iter = 0; iter < max_iter; ++iter) {
    Matrix sums = Matrix::Zero(k, points.cols());
    Vector mass = Vector::Zero(k);
    for (Index i = 0; i < n; ++i) {
      const Index c = labels[static_cast<std::size_t>(i)];
      sums.row(c) += weights[i] * points.row(i);
      mass[c] += weights[i];
    }
    for (Index c = 0; c < k; ++c) {
      if (mass[c] > 0.0) {
        centers.row(c) = sums.row(c) / mass[c];
      } else {
        // Reseed an empty cluster at the point farthest from its center.
        Index farthest = 0;
        double worst = -1.0;
        for (Index i = 0; i < n; ++i) {
          if (weights[i] <= 0.0) continue;
          if (sq[i] > worst) {
            worst = sq[i];
            farthest = i;
          }
        }
        centers.row(c) = points.row(farthest);
        sq[farthest] = 0.0;
        labels[static_cast<std::size_t>(farthest)] = static_cast<int>(c);
      }
    }

    sq = detail::min_squared_distances(points, centers, &labels);
    const double next = weighted_cost();
    if (next > current * (1.0 + 1e-9) + 1e-12)
      throw std::logic_error("lloyd: cost increased across an iteration");
    const double improvement = current - next;
    current = next;
    if (current <= 0.0) break;
    if (improvement <= tol * current) break;
  }
  return SolveResult{CenterSet(std::move(centers)), current};
}

SolveResult solve_impl(const Matrix& points, const Vector& weights,
                       const SolveConfig& cfg) {
  if (cfg.restarts < 1)
    throw std::invalid_argument("solve: restarts must be >= 1");
  const SeededRng base(cfg.seed);

  // Restarts run in parallel with per-restart substreams; results land in
  // per-restart slots and selection scans by index, so the winner does not
  // depend on scheduling (ties go to the lowest restart index).
  std::vector<std::optional<SolveResult>> results(
      static_cast<std::size_t>(cfg.restarts));
  detail::parallel_for(cfg.restarts, [&](Index r) {
    SeededRng rng = base.child(static_cast<std::uint64_t>(r));
    CenterSet init = seed_impl(points, weights, cfg.k, rng);
    results[static_cast<std::size_t>(r)] =
        lloyd_impl(points, weights, init, cfg.max_iter, cfg.tol);
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < results.size(); ++r)
    if (results[r]->cost < results[best]->cost) best = r;
  return std::move(*results[best]);
}

}  // namespace

CenterSet kmeanspp_seed(const WeightedPointSet& data, Index k, SeededRng& rng) {
  return seed_impl(data.points(), data.weights(), k, rng);
}

CenterSet kmeanspp_seed(const Dataset& data, Index k, SeededRng& rng) {
  return seed_impl(data.points(), Vector::Ones(data.size()), k, rng);
}

SolveResult lloyd(const WeightedPointSet& data, const CenterSet& init,
                  int max_iter, double tol) {
  return lloyd_impl(data.points(), data.weights(), init, max_iter, tol);
}

SolveResult lloyd(const Dataset& data, const CenterSet& init, int max_iter,
                  double tol) {
  return lloyd_impl(data.points(), Vector::Ones(data.size()), init, max_iter,
                    tol);
}

SolveResult solve(const WeightedPointSet& data, const SolveConfig& cfg) {
  return solve_impl(data.points(), data.weights(), cfg);
}

SolveResult solve(const Dataset& data, const SolveConfig& cfg) {
  return solve_impl(data.points(), Vector::Ones(data.size()), cfg);
}

SolveResult estimate_opt(const WeightedPointSet& data, Index k, SeededRng& rng) {
  CenterSet init = kmeanspp_seed(data, k, rng);
  return lloyd(data, init, /*max_iter=*/5, /*tol=*/0.0);
}

SolveResult estimate_opt(const Dataset& data, Index k, SeededRng& rng) {
  CenterSet init = kmeanspp_seed(data, k, rng);
  return lloyd(data, init, /*max_iter=*/5, /*tol=*/0.0);
}

}  // namespace ncs
