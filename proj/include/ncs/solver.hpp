#pragma once

#include "ncs/cost.hpp"
#include "ncs/rng.hpp"
#include "ncs/types.hpp"

#include <cstdint>

namespace ncs {

/// Protocol for the multi-restart k-means solver.
struct SolveConfig {
  Index k = 1;
  int max_iter = 300;
  int restarts = 10;
  double tol = 1e-4;  // relative cost-improvement stopping threshold
  std::uint64_t seed = 0;
};

struct SolveResult {
  CenterSet centers;
  double cost = 0.0;
};

/// D^2 seeding: the first center is drawn proportionally to weight, each
/// subsequent one proportionally to weight * d^2(p, chosen). Picks k
/// distinct input points (by index).
CenterSet kmeanspp_seed(const WeightedPointSet& data, Index k, SeededRng& rng);
CenterSet kmeanspp_seed(const Dataset& data, Index k, SeededRng& rng);

/// Weighted Lloyd refinement (z = 2). Alternates assignment and weighted
/// means until max_iter rounds or the relative improvement drops below tol.
/// Clusters that lose all weight are reseeded to the point farthest from
/// its assigned center. The cost sequence is non-increasing.
SolveResult lloyd(const WeightedPointSet& data, const CenterSet& init,
                  int max_iter, double tol = 1e-4);
SolveResult lloyd(const Dataset& data, const CenterSet& init, int max_iter,
                  double tol = 1e-4);

/// Best of cfg.restarts independent seed+lloyd runs (ties break to the
/// lowest restart index). Deterministic given cfg.seed.
SolveResult solve(const WeightedPointSet& data, const SolveConfig& cfg);
SolveResult solve(const Dataset& data, const SolveConfig& cfg);

/// Cheap cost estimate used inside coreset constructions: one k-means++
/// seeding followed by five Lloyd rounds. Returns the center set and its
/// cost.
SolveResult estimate_opt(const WeightedPointSet& data, Index k, SeededRng& rng);
SolveResult estimate_opt(const Dataset& data, Index k, SeededRng& rng);

}  // namespace ncs
