#include "ncs/bench.hpp"

#include "ncs/parallel.hpp"
#include "ncs/solver.hpp"
#include "ncs/synthetic.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace ncs {
namespace {

std::string trim(const std::string& s) {
  std::size_t begin = s.find_first_not_of(" \t\r\n\"");
  std::size_t end = s.find_last_not_of(" \t\r\n\"");
  if (begin == std::string::npos) return "";
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> fields;
  std::stringstream stream(line);
  std::string field;
  while (std::getline(stream, field, delim)) fields.push_back(trim(field));
  if (!line.empty() && line.back() == delim) fields.push_back("");
  return fields;
}

std::string format_full(double value) {
  std::ostringstream out;
  out << std::setprecision(17) << value;
  return out.str();
}

std::string format_fixed3(double value) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3) << value;
  return out.str();
}

}  // namespace

CsvSchema CsvSchema::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("schema: cannot open " + path);
  CsvSchema schema;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string name, kind;
    if (!(fields >> name >> kind)) continue;
    if (kind == "continuous") schema.continuous.push_back(name);
  }
  return schema;
}

LoadedCsv load_csv(const std::string& path, const CsvSchema& schema) {
  if (schema.continuous.empty())
    throw std::invalid_argument("load_csv: schema lists no continuous columns");
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_csv: cannot open " + path);

  std::string header;
  if (!std::getline(in, header))
    throw std::runtime_error("load_csv: empty file " + path);
  const char delim =
      std::count(header.begin(), header.end(), ';') >
              std::count(header.begin(), header.end(), ',')
          ? ';'
          : ',';
  const std::vector<std::string> names = split(header, delim);

  std::vector<std::size_t> columns;
  for (const std::string& want : schema.continuous) {
    const auto it = std::find(names.begin(), names.end(), want);
    if (it == names.end())
      throw std::invalid_argument("load_csv: column '" + want +
                                  "' not present in " + path);
    columns.push_back(static_cast<std::size_t>(it - names.begin()));
  }

  std::vector<double> values;
  Index rows = 0;
  Index dropped = 0;
  std::string line;
  std::vector<double> row(columns.size());
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split(line, delim);
    bool ok = true;
    for (std::size_t j = 0; j < columns.size() && ok; ++j) {
      if (columns[j] >= fields.size()) {
        ok = false;
        break;
      }
      const std::string& field = fields[columns[j]];
      if (field.empty() || field == "?") {
        ok = false;
        break;
      }
      char* end = nullptr;
      const double parsed = std::strtod(field.c_str(), &end);
      if (end == field.c_str() || *end != '\0' || !std::isfinite(parsed)) {
        ok = false;
        break;
      }
      row[j] = parsed;
    }
    if (!ok) {
      ++dropped;
      continue;
    }
    values.insert(values.end(), row.begin(), row.end());
    ++rows;
  }
  if (rows == 0)
    throw std::runtime_error("load_csv: no usable rows in " + path);

  const Index d = static_cast<Index>(columns.size());
  Matrix points(rows, d);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < d; ++j)
      points(i, j) = values[static_cast<std::size_t>(i * d + j)];

  LoadedCsv loaded{Dataset(points), dropped, {}};

  // z-score per column; constant columns keep divisor 1 and are flagged.
  for (Index j = 0; j < d; ++j) {
    const double mu = points.col(j).mean();
    const double var = (points.col(j).array() - mu).square().mean();
    double divisor = std::sqrt(var);
    if (var < 1e-12) {
      divisor = 1.0;
      loaded.constant_columns.push_back(schema.continuous[static_cast<std::size_t>(j)]);
    }
    points.col(j) = (points.col(j).array() - mu) / divisor;
  }
  loaded.data = Dataset(std::move(points));
  return loaded;
}

Dataset subsample(const Dataset& data, Index m, std::uint64_t seed) {
  const Index n = data.size();
  if (m < 1 || m > n)
    throw std::invalid_argument("subsample: m must lie in [1, n]");
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  SeededRng rng(seed);
  for (Index i = 0; i < m; ++i) {
    const Index j =
        i + static_cast<Index>(rng.next_below(static_cast<std::uint64_t>(n - i)));
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }
  order.resize(static_cast<std::size_t>(m));
  std::sort(order.begin(), order.end());
  Matrix points(m, data.dim());
  for (Index i = 0; i < m; ++i)
    points.row(i) = data.point(order[static_cast<std::size_t>(i)]);
  return Dataset(std::move(points));
}

namespace {

struct CellStats {
  int trials = 0;
  double size = 0.0;
  double r_tilde = 0.0;
  double u = 0.0;
  double kappa = 0.0;
  std::string error;
};

NoiseSpec make_spec(const ExperimentConfig& config, double level,
                    const std::optional<Matrix>& covariance) {
  switch (config.noise_model) {
    case NoiseModel::PerPoint:
      return NoiseSpec::model_i(level, config.noise_family);
    case NoiseModel::PerCoord:
      return NoiseSpec::model_ii(level, config.noise_family);
    case NoiseModel::Correlated:
      return NoiseSpec::correlated(level, *covariance);
  }
  throw std::invalid_argument("run_grid: unknown noise model");
}

}  // namespace

std::vector<ExperimentRow> run_grid(const Dataset& data,
                                    const ExperimentConfig& config) {
  if (config.trials < 1)
    throw std::invalid_argument("run_grid: trials must be >= 1");
  for (double eps : config.eps_values)
    if (!(eps > 0.0 && eps < 1.0))
      throw std::invalid_argument("run_grid: eps values must lie in (0, 1)");
  if (config.eps_values.empty() || config.noise_levels.empty() ||
      config.algorithms.empty())
    throw std::invalid_argument("run_grid: empty grid axis");

  const SeededRng master(config.seed);
  const Index n = data.size();
  const Index d = data.dim();

  std::optional<Matrix> covariance = config.covariance;
  if (config.noise_model == NoiseModel::Correlated && !covariance) {
    SeededRng cov_rng = master.child(0xC0);
    covariance = random_covariance(d, cov_rng);
  }

  // Clean-data reference solutions, one per trial, shared across all cells.
  std::vector<double> clean_cost(static_cast<std::size_t>(config.trials));
  detail::parallel_for(config.trials, [&](Index t) {
    SolveConfig cfg;
    cfg.k = config.k;
    cfg.restarts = 10;
    cfg.seed = master.child(0xA0).child(static_cast<std::uint64_t>(t)).state();
    clean_cost[static_cast<std::size_t>(t)] = solve(data, cfg).cost;
  });

  const Index levels = static_cast<Index>(config.noise_levels.size());
  const Index eps_count = static_cast<Index>(config.eps_values.size());
  const Index algs = static_cast<Index>(config.algorithms.size());
  const Index cells = algs * eps_count * levels;

  std::vector<CellStats> stats(static_cast<std::size_t>(cells));
  std::vector<std::string> trial_errors(
      static_cast<std::size_t>(levels * config.trials));

  // One task per (noise level, trial): perturb once, then evaluate every
  // (algorithm, eps) cell on the shared noisy dataset.
  struct TrialOutcome {
    bool ok = false;
    double size = 0.0;
    double r_tilde = 0.0;
    double u = 0.0;
    double kappa = 0.0;
  };
  std::vector<TrialOutcome> outcomes(
      static_cast<std::size_t>(cells * config.trials));

  detail::parallel_for(levels * config.trials, [&](Index task) {
    const Index level_idx = task / config.trials;
    const Index trial = task % config.trials;
    const double level = config.noise_levels[static_cast<std::size_t>(level_idx)];
    const SeededRng task_rng =
        master.child(0xB0).child(static_cast<std::uint64_t>(task));
    try {
      const NoiseSpec spec = make_spec(config, level, covariance);
      const PerturbResult perturbed = perturb(data, spec, task_rng.child(1));

      SolveConfig cfg;
      cfg.k = config.k;
      cfg.restarts = 10;
      cfg.seed = task_rng.child(2).state();
      const double opt_estimate = solve(perturbed.noisy, cfg).cost;

      for (Index a = 0; a < algs; ++a) {
        const Algorithm alg = config.algorithms[static_cast<std::size_t>(a)];
        for (Index e = 0; e < eps_count; ++e) {
          const double eps = config.eps_values[static_cast<std::size_t>(e)];
          const Index cell = (a * eps_count + e) * levels + level_idx;
          TrialOutcome& out = outcomes[static_cast<std::size_t>(
              cell * config.trials + trial)];
          try {
            const SeededRng build_rng = task_rng.child(3).child(
                static_cast<std::uint64_t>(a * eps_count + e));
            WeightedPointSet coreset = [&]() {
              if (alg == Algorithm::CN)
                return build_cn(perturbed.noisy, eps, config.k, build_rng);
              return build_cn_alpha(perturbed.noisy, eps,
                                    spec.effective_theta(d), config.k,
                                    build_rng)
                  .coreset;
            }();

            SolveConfig coreset_cfg;
            coreset_cfg.k = config.k;
            coreset_cfg.restarts = 10;
            coreset_cfg.seed = build_rng.child(4).state();
            const SolveResult on_coreset = solve(coreset, coreset_cfg);
            const double numer =
                cost(data, on_coreset.centers, PowerZ::kmeans());
            const double denom = clean_cost[static_cast<std::size_t>(trial)];

            out.size = static_cast<double>(coreset.size());
            out.r_tilde = numer / denom;
            out.u = theoretical_bound(alg, eps, spec, n, d, config.k,
                                      opt_estimate);
            out.kappa = out.r_tilde / out.u;
            out.ok = true;
          } catch (const std::exception& err) {
            trial_errors[static_cast<std::size_t>(level_idx * config.trials +
                                                  trial)] = err.what();
          }
        }
      }
    } catch (const std::exception& err) {
      trial_errors[static_cast<std::size_t>(level_idx * config.trials + trial)] =
          err.what();
    }
  });

  for (Index cell = 0; cell < cells; ++cell) {
    CellStats& s = stats[static_cast<std::size_t>(cell)];
    for (int t = 0; t < config.trials; ++t) {
      const TrialOutcome& out =
          outcomes[static_cast<std::size_t>(cell * config.trials + t)];
      if (!out.ok) continue;
      ++s.trials;
      s.size += out.size;
      s.r_tilde += out.r_tilde;
      s.u += out.u;
      s.kappa += out.kappa;
    }
  }

  std::vector<ExperimentRow> rows;
  rows.reserve(static_cast<std::size_t>(cells));
  for (Index a = 0; a < algs; ++a) {
    for (Index e = 0; e < eps_count; ++e) {
      for (Index l = 0; l < levels; ++l) {
        const Index cell = (a * eps_count + e) * levels + l;
        const CellStats& s = stats[static_cast<std::size_t>(cell)];
        ExperimentRow row;
        row.algorithm =
            algorithm_name(config.algorithms[static_cast<std::size_t>(a)]);
        row.eps = config.eps_values[static_cast<std::size_t>(e)];
        row.noise_level = config.noise_levels[static_cast<std::size_t>(l)];
        row.trials = s.trials;
        row.seed = config.seed;
        if (s.trials > 0) {
          const double count = static_cast<double>(s.trials);
          row.mean_size = s.size / count;
          row.mean_r_tilde = s.r_tilde / count;
          row.mean_u = s.u / count;
          row.mean_kappa = s.kappa / count;
        } else {
          row.failed = true;
          for (int t = 0; t < config.trials; ++t) {
            const std::string& err = trial_errors[static_cast<std::size_t>(
                l * config.trials + t)];
            if (!err.empty()) {
              row.error = err;
              break;
            }
          }
          if (row.error.empty()) row.error = "all trials failed";
        }
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

std::vector<BetaSweepPoint> run_beta_sweep(Index n, double beta_min,
                                           double beta_max, double step,
                                           double theta, Index candidates,
                                           std::uint64_t seed) {
  if (!(step > 0.0))
    throw std::invalid_argument("run_beta_sweep: step must be > 0");
  const SeededRng master(seed);
  const Index points =
      static_cast<Index>(std::floor((beta_max - beta_min) / step + 0.5)) + 1;

  std::vector<BetaSweepPoint> series(static_cast<std::size_t>(points));
  detail::parallel_for(points, [&](Index i) {
    const double beta = beta_min + step * static_cast<double>(i);
    const SeededRng point_rng = master.child(static_cast<std::uint64_t>(i));
    const Dataset data = gen_beta_grid(n, beta);
    const PerturbResult perturbed =
        perturb(data, NoiseSpec::model_i(theta), point_rng.child(1));

    SeededRng cand_rng = point_rng.child(2);
    const CandidateCenters cands =
        sample_candidate_centers(perturbed.noisy, candidates, 3, cand_rng);

    BetaSweepPoint& out = series[static_cast<std::size_t>(i)];
    out.beta = beta;
    out.err_hat = estimate_err(perturbed.noisy, data, cands);
    out.err1_hat =
        estimate_err_alpha(perturbed.noisy, data, 3, 1.0, point_rng.child(3).state())
            .value;
  });
  return series;
}

EmitFormat parse_emit_format(const std::string& name) {
  if (name == "csv") return EmitFormat::Csv;
  if (name == "jsonl" || name == "json-lines") return EmitFormat::JsonLines;
  if (name == "md" || name == "markdown" || name == "markdown-table")
    return EmitFormat::MarkdownTable;
  throw std::invalid_argument("unknown output format: " + name);
}

std::string emit(const std::vector<ExperimentRow>& rows, EmitFormat format) {
  if (rows.empty()) throw std::invalid_argument("emit: no rows");
  std::ostringstream out;
  switch (format) {
    case EmitFormat::Csv: {
      out << "algorithm,eps,level,size,r_tilde,u,kappa,trials,seed\n";
      for (const ExperimentRow& row : rows) {
        out << row.algorithm << ',' << format_full(row.eps) << ','
            << format_full(row.noise_level) << ',' << format_full(row.mean_size)
            << ',' << format_full(row.mean_r_tilde) << ','
            << format_full(row.mean_u) << ',' << format_full(row.mean_kappa)
            << ',' << row.trials << ',' << row.seed << '\n';
      }
      break;
    }
    case EmitFormat::JsonLines: {
      for (const ExperimentRow& row : rows) {
        nlohmann::json record{
            {"algorithm", row.algorithm}, {"eps", row.eps},
            {"level", row.noise_level},   {"size", row.mean_size},
            {"r_tilde", row.mean_r_tilde}, {"u", row.mean_u},
            {"kappa", row.mean_kappa},    {"trials", row.trials},
            {"seed", row.seed}};
        if (row.failed) record["error"] = row.error;
        out << record.dump() << '\n';
      }
      break;
    }
    case EmitFormat::MarkdownTable: {
      out << "| algorithm | eps | level | size | r_tilde | u | kappa | trials |\n";
      out << "|---|---|---|---|---|---|---|---|\n";
      for (const ExperimentRow& row : rows) {
        out << "| " << row.algorithm << " | " << format_fixed3(row.eps) << " | "
            << format_fixed3(row.noise_level) << " | "
            << format_fixed3(row.mean_size) << " | "
            << format_fixed3(row.mean_r_tilde) << " | "
            << format_fixed3(row.mean_u) << " | " << format_fixed3(row.mean_kappa)
            << " | " << row.trials << " |\n";
      }
      break;
    }
  }
  return out.str();
}

std::string emit(const std::vector<BetaSweepPoint>& series, EmitFormat format) {
  if (series.empty()) throw std::invalid_argument("emit: no rows");
  std::ostringstream out;
  switch (format) {
    case EmitFormat::Csv: {
      out << "beta,err_hat,err1_hat\n";
      for (const BetaSweepPoint& point : series)
        out << format_full(point.beta) << ',' << format_full(point.err_hat)
            << ',' << format_full(point.err1_hat) << '\n';
      break;
    }
    case EmitFormat::JsonLines: {
      for (const BetaSweepPoint& point : series)
        out << nlohmann::json{{"beta", point.beta},
                              {"err_hat", point.err_hat},
                              {"err1_hat", point.err1_hat}}
                   .dump()
            << '\n';
      break;
    }
    case EmitFormat::MarkdownTable: {
      out << "| beta | err_hat | err1_hat |\n|---|---|---|\n";
      for (const BetaSweepPoint& point : series)
        out << "| " << format_fixed3(point.beta) << " | "
            << format_fixed3(point.err_hat) << " | "
            << format_fixed3(point.err1_hat) << " |\n";
      break;
    }
  }
  return out.str();
}

}  // namespace ncs
