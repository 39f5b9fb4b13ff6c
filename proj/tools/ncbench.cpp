// Command-line front end: benchmark grids, error-metric sweeps, one-shot
// coreset builds, assumption diagnostics, and the always-on property checks.

#include <CLI11.hpp>

#include "ncs/assumptions.hpp"
#include "ncs/bench.hpp"
#include "ncs/coreset.hpp"
#include "ncs/cost.hpp"
#include "ncs/metrics.hpp"
#include "ncs/noise.hpp"
#include "ncs/selftest.hpp"
#include "ncs/solver.hpp"
#include "ncs/synthetic.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBadConfig = 1;
constexpr int kExitDataError = 2;
constexpr int kExitInternal = 3;

ncs::NoiseModel parse_model(const std::string& name) {
  if (name == "I" || name == "i" || name == "per-point")
    return ncs::NoiseModel::PerPoint;
  if (name == "II" || name == "ii" || name == "per-coord")
    return ncs::NoiseModel::PerCoord;
  if (name == "correlated") return ncs::NoiseModel::Correlated;
  throw CLI::ValidationError("--noise-model", "expected I, II, or correlated");
}

ncs::NoiseFamily parse_family(const std::string& name) {
  if (name == "gaussian") return ncs::NoiseFamily::Gaussian;
  if (name == "laplace") return ncs::NoiseFamily::Laplace;
  if (name == "uniform") return ncs::NoiseFamily::Uniform;
  throw CLI::ValidationError("--family",
                             "expected gaussian, laplace, or uniform");
}

/// Loads either --dataset/--schema or a --synthetic spec like
/// "two-point:n=10000" / "beta-grid:n=10000,beta=2.5".
ncs::Dataset load_input(const std::string& dataset_path,
                        const std::string& schema_path,
                        const std::string& synthetic, ncs::Index subsample_to,
                        std::uint64_t seed) {
  std::optional<ncs::Dataset> data;
  if (!synthetic.empty()) {
    std::string kind = synthetic;
    ncs::Index n = 10000;
    double beta = 2.5;
    if (const auto colon = synthetic.find(':'); colon != std::string::npos) {
      kind = synthetic.substr(0, colon);
      std::stringstream args(synthetic.substr(colon + 1));
      std::string item;
      while (std::getline(args, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = item.substr(0, eq);
        const std::string value = item.substr(eq + 1);
        if (key == "n") n = std::stoll(value);
        if (key == "beta") beta = std::stod(value);
      }
    }
    if (kind == "two-point")
      data = ncs::gen_two_point(n);
    else if (kind == "beta-grid")
      data = ncs::gen_beta_grid(n, beta);
    else
      throw CLI::ValidationError(
          "--synthetic", "expected two-point[:n=..] or beta-grid[:n=..,beta=..]");
  } else {
    if (dataset_path.empty())
      throw CLI::ValidationError("--dataset",
                                 "either --dataset or --synthetic is required");
    if (schema_path.empty())
      throw CLI::ValidationError("--schema",
                                 "a schema file is required with --dataset");
    const ncs::CsvSchema schema = ncs::CsvSchema::from_file(schema_path);
    const ncs::LoadedCsv loaded = ncs::load_csv(dataset_path, schema);
    if (loaded.dropped_rows > 0)
      std::cerr << "warning: dropped " << loaded.dropped_rows
                << " rows with missing or unparsable values\n";
    for (const std::string& column : loaded.constant_columns)
      std::cerr << "warning: column '" << column
                << "' is constant; standardized with divisor 1\n";
    data = loaded.data;
  }
  if (subsample_to > 0 && subsample_to < data->size())
    data = ncs::subsample(*data, subsample_to, seed);
  return *data;
}

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Coreset construction and evaluation for k-means clustering under "
      "stochastic noise"};
  app.require_subcommand(1);

  std::string dataset_path, schema_path, synthetic, out_path,
      format_name = "csv";
  std::string model_name = "I", family_name = "gaussian",
              alg_name = "cn,cnalpha";
  std::vector<double> eps_values{0.1, 0.15, 0.2, 0.25, 0.3};
  std::vector<double> levels{0.0, 0.01, 0.05, 0.25};
  ncs::Index k = 10, subsample_to = 0, candidates = 500, sweep_n = 10000;
  int trials = 10;
  std::uint64_t seed = 1;
  double alpha = 1.0, eps_single = 0.2, level_single = 0.0, trim = 0.01;
  double beta_min = 2.0, beta_max = 3.0, beta_step = 0.05, theta_sweep = 1.0;

  const auto add_data_options = [&](CLI::App* cmd) {
    cmd->add_option("--dataset", dataset_path, "CSV file with a header row");
    cmd->add_option("--schema", schema_path,
                    "schema file: one '<column> <kind>' per line, kind "
                    "'continuous' selects the column");
    cmd->add_option(
        "--synthetic", synthetic,
        "synthetic instance: two-point[:n=..] or beta-grid[:n=..,beta=..]");
    cmd->add_option("--subsample", subsample_to, "uniform subsample size");
    cmd->add_option("--seed", seed, "master seed");
  };

  CLI::App* bench = app.add_subcommand("bench", "run the benchmark grid");
  add_data_options(bench);
  bench->add_option("--k", k, "number of centers");
  bench->add_option("--eps", eps_values, "tolerance grid")->delimiter(',');
  bench->add_option("--levels", levels, "noise level grid")->delimiter(',');
  bench->add_option("--noise-model", model_name, "I, II, or correlated");
  bench->add_option("--family", family_name, "gaussian, laplace, or uniform");
  bench->add_option("--trials", trials, "repetitions per cell");
  bench->add_option("--alg", alg_name, "algorithms: cn, cnalpha, or cn,cnalpha");
  bench->add_option("--alpha", alpha, "approximation slack for reports");
  bench->add_option("--out", out_path, "output file (default stdout)");
  bench->add_option("--format", format_name,
                    "csv, json-lines, or markdown-table");

  CLI::App* sweep =
      app.add_subcommand("sweep", "error-metric comparison series");
  sweep->add_option("--n", sweep_n, "points in the synthetic instance");
  sweep->add_option("--beta-min", beta_min, "series start");
  sweep->add_option("--beta-max", beta_max, "series end");
  sweep->add_option("--step", beta_step, "series step");
  sweep->add_option("--theta", theta_sweep, "noise level");
  sweep->add_option("--candidates", candidates, "candidate center sets");
  sweep->add_option("--seed", seed, "master seed");
  sweep->add_option("--out", out_path, "output file (default stdout)");
  sweep->add_option("--format", format_name,
                    "csv, json-lines, or markdown-table");

  CLI::App* coreset =
      app.add_subcommand("coreset", "one-shot build and summary");
  add_data_options(coreset);
  coreset->add_option("--k", k, "number of centers");
  coreset->add_option("--eps", eps_single, "tolerance");
  coreset->add_option("--alg", alg_name, "cn or cnalpha");
  coreset->add_option("--level", level_single,
                      "noise level entering the filter radius");
  coreset->add_option("--out", out_path, "write the coreset as CSV");

  CLI::App* check = app.add_subcommand("check", "assumption diagnostics");
  add_data_options(check);
  check->add_option("--k", k, "number of centers");
  check->add_option("--alpha", alpha, "approximation slack in the threshold");
  check->add_option("--level", level_single, "noise level in the threshold");
  check->add_option("--trim", trim, "trim fraction for the outlier check");

  CLI::App* selftest =
      app.add_subcommand("selftest", "always-on statistical property checks");
  (void)selftest;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kExitOk : kExitBadConfig;
  }

  try {
    if (bench->parsed()) {
      const ncs::Dataset data =
          load_input(dataset_path, schema_path, synthetic, subsample_to, seed);
      ncs::ExperimentConfig config;
      config.k = k;
      config.eps_values = eps_values;
      config.noise_levels = levels;
      config.noise_model = parse_model(model_name);
      config.noise_family = parse_family(family_name);
      config.trials = trials;
      config.seed = seed;
      config.alpha = alpha;
      config.algorithms.clear();
      std::stringstream algs(alg_name);
      std::string item;
      while (std::getline(algs, item, ',')) {
        if (item == "cn")
          config.algorithms.push_back(ncs::Algorithm::CN);
        else if (item == "cnalpha" || item == "cn_alpha")
          config.algorithms.push_back(ncs::Algorithm::CNAlpha);
        else
          throw CLI::ValidationError("--alg", "expected cn or cnalpha");
      }
      const auto rows = ncs::run_grid(data, config);
      write_output(ncs::emit(rows, ncs::parse_emit_format(format_name)),
                   out_path);
      return kExitOk;
    }

    if (sweep->parsed()) {
      const auto series = ncs::run_beta_sweep(
          sweep_n, beta_min, beta_max, beta_step, theta_sweep, candidates, seed);
      write_output(ncs::emit(series, ncs::parse_emit_format(format_name)),
                   out_path);
      return kExitOk;
    }

    if (coreset->parsed()) {
      const ncs::Dataset data =
          load_input(dataset_path, schema_path, synthetic, subsample_to, seed);
      const ncs::SeededRng rng(seed);
      std::ostringstream header;
      const ncs::WeightedPointSet built = [&]() {
        if (alg_name == "cn" || alg_name == "cn,cnalpha") {
          const ncs::CnSampleSize size =
              ncs::cn_sample_size(k, eps_single, data.size());
          if (size.clamped)
            std::cerr << "warning: requested sample size " << size.requested
                      << " exceeds n; clamped to " << size.used << '\n';
          return ncs::build_cn(data, eps_single, k, rng);
        }
        const ncs::CnAlphaResult result =
            ncs::build_cn_alpha(data, eps_single, level_single, k, rng);
        const double opt = result.trace.opt_estimate;
        if (opt > 0.0 &&
            level_single > opt / (static_cast<double>(data.size()) *
                                  static_cast<double>(data.dim())))
          std::cerr << "warning: noise level exceeds opt/(n*d); the regime "
                       "behind the construction's guarantees may not apply\n";
        const ncs::CoresetSummary summary =
            ncs::coreset_summary(result.coreset, result.trace);
        header << "# per-cluster retention:";
        for (double r : summary.retention) header << ' ' << r;
        header << '\n';
        return result.coreset;
      }();
      std::ostringstream rows;
      rows << header.str() << "# size: " << built.size()
           << " total_weight: " << built.total_weight() << '\n';
      for (ncs::Index j = 0; j < built.dim(); ++j) rows << 'x' << j << ',';
      rows << "weight\n";
      rows.precision(17);
      for (ncs::Index i = 0; i < built.size(); ++i) {
        for (ncs::Index j = 0; j < built.dim(); ++j)
          rows << built.points()(i, j) << ',';
        rows << built.weights()[i] << '\n';
      }
      write_output(rows.str(), out_path);
      return kExitOk;
    }

    if (check->parsed()) {
      const ncs::Dataset data =
          load_input(dataset_path, schema_path, synthetic, subsample_to, seed);
      const ncs::AssumptionReport report =
          ncs::check_assumptions(data, k, alpha, level_single, seed, trim);
      std::cout << "gamma_hat: " << report.gamma_hat << '\n'
                << "gamma_threshold: " << report.gamma_threshold
                << (report.threshold_alpha_clamped ? " (alpha clamped)" : "")
                << '\n'
                << "stability_ok: " << (report.stability_ok ? "yes" : "no")
                << '\n'
                << "max_radius_ratio: " << report.max_radius_ratio << '\n'
                << "trimmed_max_radius_ratio: "
                << report.trimmed_max_radius_ratio << '\n'
                << "outliers_ok: " << (report.outliers_ok ? "yes" : "no") << '\n'
                << "trimmed_outliers_ok: "
                << (report.trimmed_outliers_ok ? "yes" : "no") << '\n';
      return kExitOk;
    }

    if (selftest->parsed())
      return ncs::run_selftest(std::cout) == 0 ? kExitOk : kExitInternal;
  } catch (const CLI::ValidationError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitBadConfig;
  } catch (const std::invalid_argument& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitBadConfig;
  } catch (const std::runtime_error& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitDataError;
  } catch (const std::exception& err) {
    std::cerr << "internal error: " << err.what() << '\n';
    return kExitInternal;
  }
  return kExitBadConfig;
}
