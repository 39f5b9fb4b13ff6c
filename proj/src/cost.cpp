#include "ncs/cost.hpp"

#include <cmath>

namespace ncs {
namespace detail {

Vector min_squared_distances(const Eigen::Ref<const Matrix>& points,
                             const Eigen::Ref<const Matrix>& centers,
                             std::vector<int>* labels) {
  const Index n = points.rows();
  const Index k = centers.rows();
  Vector best = (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
  if (labels) labels->assign(static_cast<std::size_t>(n), 0);
  Vector cur(n);
  for (Index c = 1; c < k; ++c) {
    cur = (points.rowwise() - centers.row(c)).rowwise().squaredNorm();
    for (Index i = 0; i < n; ++i) {
      if (cur[i] < best[i]) {
        best[i] = cur[i];
        if (labels) (*labels)[static_cast<std::size_t>(i)] = static_cast<int>(c);
      }
    }
  }
  return best;
}

double cost_of_points(const Eigen::Ref<const Matrix>& points,
                      const Eigen::Ref<const Matrix>& centers,
                      const Vector* weights, double z) {
  const Vector sq = min_squared_distances(points, centers);
  const double half_z = z / 2.0;
  CompensatedSum total;
  for (Index i = 0; i < sq.size(); ++i) {
    const double w = weights ? (*weights)[i] : 1.0;
    if (w == 0.0) continue;
    const double dz = (z == 2.0) ? sq[i] : std::pow(sq[i], half_z);
    total.add(w * dz);
  }
  return total.value();
}

}  // namespace detail

namespace {

void check_cost_inputs(Index data_dim, const CenterSet& centers) {
  require_same_dim(data_dim, centers.dim(), "cost");
}

}  // namespace

double cost(const Dataset& data, const CenterSet& centers, PowerZ z) {
  check_cost_inputs(data.dim(), centers);
  return detail::cost_of_points(data.points(), centers.centers(), nullptr,
                                z.value());
}

double cost(const WeightedPointSet& data, const CenterSet& centers, PowerZ z) {
  check_cost_inputs(data.dim(), centers);
  return detail::cost_of_points(data.points(), centers.centers(),
                                &data.weights(), z.value());
}

std::vector<int> assign(const Dataset& data, const CenterSet& centers) {
  require_same_dim(data.dim(), centers.dim(), "assign");
  std::vector<int> labels;
  detail::min_squared_distances(data.points(), centers.centers(), &labels);
  return labels;
}

std::vector<int> assign(const WeightedPointSet& data, const CenterSet& centers) {
  require_same_dim(data.dim(), centers.dim(), "assign");
  std::vector<int> labels;
  detail::min_squared_distances(data.points(), centers.centers(), &labels);
  return labels;
}

Vector mean(const Dataset& data) {
  return data.points().colwise().mean();
}

Vector mean(const WeightedPointSet& data) {
  const double total = data.total_weight();
  if (!(total > 0.0))
    throw std::invalid_argument("mean: total weight must be positive");
  return (data.weights().transpose() * data.points()).transpose() / total;
}

std::pair<double, double> one_mean_cost_identity_check(const Dataset& data,
                                                       const Vector& c) {
  require_same_dim(data.dim(), c.size(), "one_mean_cost_identity_check");
  Matrix single(1, c.size());
  single.row(0) = c.transpose();
  const CenterSet at_c(single);

  const Vector mu = mean(data);
  Matrix mu_row(1, mu.size());
  mu_row.row(0) = mu.transpose();
  const CenterSet at_mu(mu_row);

  const double lhs = cost(data, at_c);
  const double rhs = cost(data, at_mu) +
                     static_cast<double>(data.size()) * (c - mu).squaredNorm();
  return {lhs, rhs};
}

}  // namespace ncs
