#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ncs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Thrown when a requested construction cannot be completed
/// (e.g. a radius filter empties a cluster).
class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exponent of the clustering cost: z = 2 for k-means, z = 1 for k-median.
class PowerZ {
 public:
  explicit PowerZ(double z) : z_(z) {
    if (!(z >= 1.0)) throw std::invalid_argument("PowerZ: z must be >= 1");
  }
  static PowerZ kmeans() { return PowerZ(2.0); }
  static PowerZ kmedian() { return PowerZ(1.0); }
  double value() const { return z_; }

 private:
  double z_;
};

/// An immutable set of n points in R^d, one point per row.
class Dataset {
 public:
  explicit Dataset(Matrix points) : points_(std::move(points)) {
    if (points_.rows() < 1 || points_.cols() < 1)
      throw std::invalid_argument("Dataset: need n >= 1 points with d >= 1");
    if (!points_.allFinite())
      throw std::invalid_argument("Dataset: coordinates must be finite");
  }

  Index size() const { return points_.rows(); }
  Index dim() const { return points_.cols(); }
  const Matrix& points() const { return points_; }
  auto point(Index i) const { return points_.row(i); }

 private:
  Matrix points_;
};

/// An ordered list of k centers (rows). Centers may coincide.
class CenterSet {
 public:
  explicit CenterSet(Matrix centers) : centers_(std::move(centers)) {
    if (centers_.rows() < 1 || centers_.cols() < 1)
      throw std::invalid_argument("CenterSet: need k >= 1 centers with d >= 1");
    if (!centers_.allFinite())
      throw std::invalid_argument("CenterSet: coordinates must be finite");
  }

  Index k() const { return centers_.rows(); }
  Index dim() const { return centers_.cols(); }
  const Matrix& centers() const { return centers_; }
  auto center(Index i) const { return centers_.row(i); }

 private:
  Matrix centers_;
};

/// Points with nonnegative weights; the representation of a coreset.
///
/// Cluster-wise constructions record each point's source cluster so the
/// per-cluster weight conservation invariant stays checkable downstream;
/// source_clusters is empty for constructions without that structure.
class WeightedPointSet {
 public:
  WeightedPointSet(Matrix points, Vector weights)
      : WeightedPointSet(std::move(points), std::move(weights), {}) {}

  WeightedPointSet(Matrix points, Vector weights, std::vector<int> source_clusters)
      : points_(std::move(points)),
        weights_(std::move(weights)),
        source_clusters_(std::move(source_clusters)) {
    if (points_.rows() < 1 || points_.cols() < 1)
      throw std::invalid_argument("WeightedPointSet: need n >= 1 points with d >= 1");
    if (weights_.size() != points_.rows())
      throw std::invalid_argument("WeightedPointSet: one weight per point required");
    if (!points_.allFinite() || !weights_.allFinite())
      throw std::invalid_argument("WeightedPointSet: entries must be finite");
    if ((weights_.array() < 0.0).any())
      throw std::invalid_argument("WeightedPointSet: weights must be >= 0");
    if (!source_clusters_.empty() &&
        source_clusters_.size() != static_cast<std::size_t>(points_.rows()))
      throw std::invalid_argument("WeightedPointSet: one source cluster per point");
  }

  Index size() const { return points_.rows(); }
  Index dim() const { return points_.cols(); }
  const Matrix& points() const { return points_; }
  const Vector& weights() const { return weights_; }
  double total_weight() const { return weights_.sum(); }
  const std::vector<int>& source_clusters() const { return source_clusters_; }

  /// View a plain dataset as unit-weighted points.
  static WeightedPointSet from_dataset(const Dataset& data) {
    return WeightedPointSet(data.points(), Vector::Ones(data.size()));
  }

 private:
  Matrix points_;
  Vector weights_;
  std::vector<int> source_clusters_;
};

inline void require_same_dim(Index a, Index b, const std::string& what) {
  if (a != b)
    throw std::invalid_argument(what + ": dimension mismatch (" +
                                std::to_string(a) + " vs " + std::to_string(b) + ")");
}

}  // namespace ncs
