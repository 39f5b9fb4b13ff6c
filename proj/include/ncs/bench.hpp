#pragma once

#include "ncs/coreset.hpp"
#include "ncs/metrics.hpp"
#include "ncs/noise.hpp"
#include "ncs/parallel.hpp"
#include "ncs/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ncs {

/// Column schema for CSV ingestion: names listed as continuous are parsed,
/// everything else is dropped.
struct CsvSchema {
  std::vector<std::string> continuous;

  /// Parse a schema file with one "<column-name> <kind>" pair per line;
  /// kind "continuous" selects the column.
  static CsvSchema from_file(const std::string& path);
};

struct LoadedCsv {
  Dataset data;
  Index dropped_rows = 0;                   // unparsable or missing values
  std::vector<std::string> constant_columns;  // standardized with the variance floor
};

/// Reads the continuous columns of a headered CSV, drops rows with missing
/// ('?' or empty) or unparsable values, then z-scores each column
/// (variance floor 1e-12; constant columns are flagged).
LoadedCsv load_csv(const std::string& path, const CsvSchema& schema);

/// Uniform subsample of m rows without replacement, order-preserving.
Dataset subsample(const Dataset& data, Index m, std::uint64_t seed);

struct ExperimentConfig {
  Index k = 10;
  std::vector<double> eps_values = {0.1, 0.15, 0.2, 0.25, 0.3};
  NoiseModel noise_model = NoiseModel::PerPoint;
  NoiseFamily noise_family = NoiseFamily::Gaussian;
  std::vector<double> noise_levels = {0.0, 0.01, 0.05, 0.25};
  std::optional<Matrix> covariance;  // correlated model; generated when absent
  int trials = 10;
  std::uint64_t seed = 0;
  std::vector<Algorithm> algorithms = {Algorithm::CN, Algorithm::CNAlpha};
  double alpha = 1.0;
};

/// One averaged benchmark cell.
struct ExperimentRow {
  std::string algorithm;
  double eps = 0.0;
  double noise_level = 0.0;
  double mean_size = 0.0;
  double mean_r_tilde = 0.0;
  double mean_u = 0.0;
  double mean_kappa = 0.0;
  int trials = 0;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;
};

/// Runs the (algorithm x eps x level) grid with `trials` repetitions per
/// cell and averages the metrics. Each trial perturbs the data, builds the
/// coreset from the noisy set, and evaluates the ratio against the clean
/// set. All randomness derives from config.seed; rows come back in grid
/// order regardless of the worker count (NCS_THREADS, default all cores).
std::vector<ExperimentRow> run_grid(const Dataset& data,
                                    const ExperimentConfig& config);

struct BetaSweepPoint {
  double beta = 0.0;
  double err_hat = 0.0;
  double err1_hat = 0.0;
};

/// Error-metric comparison series over the four-site line instance:
/// for each beta, perturb at theta and estimate both metrics.
std::vector<BetaSweepPoint> run_beta_sweep(Index n, double beta_min,
                                           double beta_max, double step,
                                           double theta, Index candidates,
                                           std::uint64_t seed);

enum class EmitFormat { Csv, JsonLines, MarkdownTable };

EmitFormat parse_emit_format(const std::string& name);

/// Renders rows with a stable column order
/// (algorithm, eps, level, size, r_tilde, u, kappa, trials, seed).
/// Markdown rounds reals to three decimals; csv/json keep full precision.
std::string emit(const std::vector<ExperimentRow>& rows, EmitFormat format);
std::string emit(const std::vector<BetaSweepPoint>& series, EmitFormat format);

}  // namespace ncs
