#include "ncs/synthetic.hpp"

#include <cmath>
#include <numbers>

namespace ncs {

Dataset gen_two_point(Index n) {
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("gen_two_point: n must be even and >= 2");
  Matrix points(n, 1);
  points.col(0).head(n / 2).setConstant(-1.0);
  points.col(0).tail(n / 2).setConstant(1.0);
  return Dataset(points);
}

Dataset gen_beta_grid(Index n, double beta) {
  if (n < 4 || n % 4 != 0)
    throw std::invalid_argument("gen_beta_grid: n must be divisible by 4");
  if (!(beta >= 2.0))
    throw std::invalid_argument("gen_beta_grid: beta must be >= 2");
  const double s = std::numbers::sqrt2;
  const double sites[4] = {-(2.0 + beta / 2.0) * s, -beta * s / 2.0,
                           beta * s / 2.0, (2.0 + beta / 2.0) * s};
  const Index per_site = n / 4;
  Matrix points(n, 1);
  for (int site = 0; site < 4; ++site)
    points.col(0).segment(site * per_site, per_site).setConstant(sites[site]);
  return Dataset(points);
}

OutlierMedianInstance gen_outlier_median(Index n) {
  if (n < 2) throw std::invalid_argument("gen_outlier_median: n must be >= 2");
  Matrix data_points = Matrix::Zero(n, 1);
  data_points(n - 1, 0) = 1.0;
  Matrix coreset_points = Matrix::Zero(n, 1);
  coreset_points(n - 1, 0) = 1.0 / static_cast<double>(n);
  return OutlierMedianInstance{
      Dataset(data_points),
      WeightedPointSet(coreset_points, Vector::Ones(n))};
}

LowerBoundInstance gen_lower_bound_instance(Index n) {
  if (n < 4)
    throw std::invalid_argument("gen_lower_bound_instance: n must be >= 4");
  const double scale = 100.0 * static_cast<double>(n);
  Matrix points = scale * Matrix::Identity(n, n);
  const double opt = 10000.0 * static_cast<double>(n) * static_cast<double>(n);
  return LowerBoundInstance{Dataset(points), n - 1, opt};
}

}  // namespace ncs
