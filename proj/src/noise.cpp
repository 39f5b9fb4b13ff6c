#include "ncs/noise.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

namespace ncs {

NoiseSpec NoiseSpec::model_i(double theta, NoiseFamily family) {
  if (!(theta >= 0.0 && theta <= 1.0))
    throw std::invalid_argument("NoiseSpec: theta must lie in [0, 1]");
  NoiseSpec spec;
  spec.model = NoiseModel::PerPoint;
  spec.family = family;
  spec.level = theta;
  return spec;
}

NoiseSpec NoiseSpec::model_ii(double sigma2, NoiseFamily family) {
  if (!(sigma2 >= 0.0))
    throw std::invalid_argument("NoiseSpec: sigma^2 must be >= 0");
  NoiseSpec spec;
  spec.model = NoiseModel::PerCoord;
  spec.family = family;
  spec.level = sigma2;
  return spec;
}

NoiseSpec NoiseSpec::correlated(double sigma2, Matrix sigma) {
  if (!(sigma2 >= 0.0))
    throw std::invalid_argument("NoiseSpec: sigma^2 must be >= 0");
  NoiseSpec spec;
  spec.model = NoiseModel::Correlated;
  spec.family = NoiseFamily::Gaussian;
  spec.level = sigma2;
  spec.covariance = std::move(sigma);
  return spec;
}

double NoiseSpec::expected_noise_energy(Index n, Index d) const {
  switch (model) {
    case NoiseModel::PerPoint:
    case NoiseModel::PerCoord:
      return level * static_cast<double>(n) * static_cast<double>(d);
    case NoiseModel::Correlated:
      return level * static_cast<double>(n) * covariance->trace();
  }
  return 0.0;
}

double NoiseSpec::effective_theta(Index d) const {
  if (model == NoiseModel::Correlated)
    return level * covariance->trace() / static_cast<double>(d);
  return level;
}

void NoiseSpec::validate(Index d) const {
  if (model != NoiseModel::Correlated) return;
  if (!covariance.has_value())
    throw std::invalid_argument("NoiseSpec: correlated model needs a covariance");
  if (covariance->rows() != d || covariance->cols() != d)
    throw std::invalid_argument("NoiseSpec: covariance must be d x d");
}

double sample_standard_normal(SeededRng& rng) {
  const double u1 = rng.next_double_open();
  const double u2 = rng.next_double();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

double sample_unit_noise(NoiseFamily family, SeededRng& rng) {
  switch (family) {
    case NoiseFamily::Gaussian:
      return sample_standard_normal(rng);
    case NoiseFamily::Laplace: {
      // Laplace(0, b) has variance 2b^2; b = 1/sqrt(2) gives variance 1.
      const double b = 1.0 / std::numbers::sqrt2;
      const double u = rng.next_double() - 0.5;
      const double mag = std::log1p(-2.0 * std::abs(u));  // log(1 - 2|u|)
      return (u < 0.0) ? b * mag : -b * mag;
    }
    case NoiseFamily::Uniform: {
      const double half_width = std::sqrt(3.0);
      return (2.0 * rng.next_double() - 1.0) * half_width;
    }
  }
  return 0.0;
}

namespace {

/// Symmetric square root of a PSD matrix. Eigenvalues within -1e-12 of zero
/// are clamped to zero; anything more negative is rejected as non-PSD.
Matrix psd_square_root(const Matrix& sigma) {
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-9)
    throw std::invalid_argument("perturb: covariance must be symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma);
  Vector values = eig.eigenvalues();
  const double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
  for (Index i = 0; i < values.size(); ++i) {
    if (values[i] < -1e-12 * scale)
      throw std::invalid_argument("perturb: covariance is not PSD");
    values[i] = std::max(values[i], 0.0);
  }
  return eig.eigenvectors() * values.cwiseSqrt().asDiagonal() *
         eig.eigenvectors().transpose();
}

}  // namespace

PerturbResult perturb(const Dataset& data, const NoiseSpec& spec,
                      const SeededRng& rng) {
  const Index n = data.size();
  const Index d = data.dim();
  spec.validate(d);

  Matrix noise = Matrix::Zero(n, d);
  Index perturbed = 0;

  switch (spec.model) {
    case NoiseModel::PerPoint: {
      const double theta = spec.level;
      for (Index i = 0; i < n; ++i) {
        SeededRng point_rng = rng.child(static_cast<std::uint64_t>(i));
        if (point_rng.next_double() >= theta) continue;
        for (Index j = 0; j < d; ++j)
          noise(i, j) = sample_unit_noise(spec.family, point_rng);
        ++perturbed;
      }
      break;
    }
    case NoiseModel::PerCoord: {
      const double sd = std::sqrt(spec.level);
      for (Index i = 0; i < n; ++i) {
        SeededRng point_rng = rng.child(static_cast<std::uint64_t>(i));
        for (Index j = 0; j < d; ++j)
          noise(i, j) = sd * sample_unit_noise(spec.family, point_rng);
      }
      perturbed = (spec.level > 0.0) ? n : 0;
      break;
    }
    case NoiseModel::Correlated: {
      const Matrix root = std::sqrt(spec.level) * psd_square_root(*spec.covariance);
      Vector gauss(d);
      for (Index i = 0; i < n; ++i) {
        SeededRng point_rng = rng.child(static_cast<std::uint64_t>(i));
        for (Index j = 0; j < d; ++j)
          gauss[j] = sample_standard_normal(point_rng);
        noise.row(i) = (root * gauss).transpose();
      }
      perturbed = (spec.level > 0.0) ? n : 0;
      break;
    }
  }

  return PerturbResult{Dataset(data.points() + noise), std::move(noise),
                       perturbed};
}

Matrix random_covariance(Index d, SeededRng& rng) {
  if (d < 1) throw std::invalid_argument("random_covariance: d must be >= 1");
  Matrix gauss(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) gauss(i, j) = sample_standard_normal(rng);
  Eigen::HouseholderQR<Matrix> qr(gauss);
  Matrix q = qr.householderQ();
  // Fix column signs so the basis is a deterministic function of the draws.
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < d; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);

  Vector eigenvalues(d);
  for (Index i = 0; i < d; ++i)
    eigenvalues[i] = 0.05 + rng.next_double();  // bounded away from singular
  eigenvalues *= static_cast<double>(d) / eigenvalues.sum();

  return q * eigenvalues.asDiagonal() * q.transpose();
}

}  // namespace ncs
