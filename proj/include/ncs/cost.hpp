#pragma once

#include "ncs/types.hpp"

#include <utility>
#include <vector>

namespace ncs {

namespace detail {

/// Kahan-compensated accumulator. Clustering costs sum millions of terms;
/// compensation keeps the total independent of point ordering to ~1 ulp.
class CompensatedSum {
 public:
  void add(double x) {
    const double y = x - carry_;
    const double t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

/// Squared distance from every row of `points` to its nearest row of
/// `centers`; `labels`, when non-null, receives the argmin index with ties
/// broken toward the lowest center index.
Vector min_squared_distances(const Eigen::Ref<const Matrix>& points,
                             const Eigen::Ref<const Matrix>& centers,
                             std::vector<int>* labels = nullptr);

/// Weighted (k,z) cost of rows against centers; pass weights = nullptr for
/// unit weights.
double cost_of_points(const Eigen::Ref<const Matrix>& points,
                      const Eigen::Ref<const Matrix>& centers,
                      const Vector* weights, double z);

}  // namespace detail

/// Sum over points of w(x) * min_c ||x - c||^z (w = 1 for a Dataset).
double cost(const Dataset& data, const CenterSet& centers,
            PowerZ z = PowerZ::kmeans());
double cost(const WeightedPointSet& data, const CenterSet& centers,
            PowerZ z = PowerZ::kmeans());

/// Index of the nearest center per point; ties break to the lowest index.
std::vector<int> assign(const Dataset& data, const CenterSet& centers);
std::vector<int> assign(const WeightedPointSet& data, const CenterSet& centers);

/// (Weighted) centroid; the exact 1-means optimum for z = 2.
Vector mean(const Dataset& data);
Vector mean(const WeightedPointSet& data);

/// Self-test hook for the 1-means decomposition: returns
///   lhs = cost(P, {c})
///   rhs = cost(P, {mean(P)}) + n * ||c - mean(P)||^2
/// which agree to ~1e-9 relative for any finite input.
std::pair<double, double> one_mean_cost_identity_check(const Dataset& data,
                                                       const Vector& c);

}  // namespace ncs
