#pragma once

#include "ncs/rng.hpp"
#include "ncs/types.hpp"

#include <optional>

namespace ncs {

/// Zero-mean, unit-variance base distributions for coordinate noise:
/// N(0,1), Laplace(0, 1/sqrt(2)), Uniform[-sqrt(3), sqrt(3)].
enum class NoiseFamily { Gaussian, Laplace, Uniform };

enum class NoiseModel {
  PerPoint,    // model I:  each point perturbed with probability theta
  PerCoord,    // model II: every coordinate perturbed with variance sigma^2
  Correlated,  // Gaussian N(0, sigma^2 * Sigma) per point
};

/// Which noise is applied and how strong it is.
struct NoiseSpec {
  NoiseModel model = NoiseModel::PerPoint;
  NoiseFamily family = NoiseFamily::Gaussian;
  double level = 0.0;  // theta for PerPoint, sigma^2 otherwise
  std::optional<Matrix> covariance;  // Correlated only; symmetric PSD

  static NoiseSpec model_i(double theta, NoiseFamily family = NoiseFamily::Gaussian);
  static NoiseSpec model_ii(double sigma2, NoiseFamily family = NoiseFamily::Gaussian);
  static NoiseSpec correlated(double sigma2, Matrix sigma);

  /// E[ sum_p ||xi_p||^2 ] for n points in d dimensions:
  /// theta*n*d, sigma^2*n*d, or sigma^2*n*trace(Sigma).
  double expected_noise_energy(Index n, Index d) const;

  /// The level that plays theta's role in radius and bound formulas:
  /// theta, sigma^2, or sigma^2*trace(Sigma)/d.
  double effective_theta(Index d) const;

  void validate(Index d) const;
};

/// One draw from the unit-variance base distribution.
double sample_unit_noise(NoiseFamily family, SeededRng& rng);

/// Standard normal draw (Box-Muller, one value per call).
double sample_standard_normal(SeededRng& rng);

struct PerturbResult {
  Dataset noisy;          // same point order as the input
  Matrix noise;           // realized xi_p per row (zero rows for untouched points)
  Index perturbed_count;  // points that received noise
};

/// Apply `spec` to every point of P. Each point draws from its own
/// substream of `rng`, so the result is independent of evaluation order.
PerturbResult perturb(const Dataset& data, const NoiseSpec& spec,
                      const SeededRng& rng);

/// Random symmetric PSD covariance with trace(Sigma) = d: random orthogonal
/// basis, random positive eigenvalues, rescaled.
Matrix random_covariance(Index d, SeededRng& rng);

}  // namespace ncs
