#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ncs/bench.hpp"
#include "ncs/noise.hpp"
#include "ncs/solver.hpp"

#include <cstdio>
#include <map>
#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace ncs;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& contents) {
    static int counter = 0;
    path = "ncs_test_tmp_" + std::to_string(counter++) + ".csv";
    std::ofstream out(path);
    out << contents;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

Dataset blobs(Index per_cluster, Index sites, SeededRng& rng) {
  Matrix pts(per_cluster * sites, 2);
  for (Index c = 0; c < sites; ++c)
    for (Index i = 0; i < per_cluster; ++i) {
      pts(c * per_cluster + i, 0) =
          20.0 * static_cast<double>(c) + sample_standard_normal(rng);
      pts(c * per_cluster + i, 1) = sample_standard_normal(rng);
    }
  return Dataset(pts);
}

}  // namespace

TEST_CASE("csv loading selects continuous columns and standardizes") {
  const TempFile file(
      "age,job,salary,flat\n"
      "30,clerk,100,5\n"
      "40,smith,200,5\n"
      "50,cook,300,5\n");
  CsvSchema schema;
  schema.continuous = {"age", "salary", "flat"};
  const LoadedCsv loaded = load_csv(file.path, schema);
  CHECK(loaded.data.size() == 3);
  CHECK(loaded.data.dim() == 3);
  CHECK(loaded.dropped_rows == 0);
  // z-scored: mean 0, population variance 1
  for (Index j = 0; j < 2; ++j) {
    CHECK(loaded.data.points().col(j).mean() == doctest::Approx(0.0));
    CHECK(loaded.data.points().col(j).squaredNorm() / 3.0 ==
          doctest::Approx(1.0));
  }
  // constant column: divisor 1, flagged
  REQUIRE(loaded.constant_columns.size() == 1);
  CHECK(loaded.constant_columns[0] == "flat");
  CHECK(loaded.data.points().col(2).isZero(1e-12));
}

TEST_CASE("rows with missing or unparsable values are dropped and counted") {
  const TempFile file(
      "a,b\n"
      "1,2\n"
      "?,3\n"
      "4,\n"
      "5,abc\n"
      "6,7\n");
  CsvSchema schema;
  schema.continuous = {"a", "b"};
  const LoadedCsv loaded = load_csv(file.path, schema);
  CHECK(loaded.data.size() == 2);
  CHECK(loaded.dropped_rows == 3);
}

TEST_CASE("semicolon-delimited files with quoted headers parse") {
  const TempFile file(
      "\"age\";\"job\";\"duration\"\n"
      "30;\"admin\";100\n"
      "31;\"tech\";110\n");
  CsvSchema schema;
  schema.continuous = {"age", "duration"};
  const LoadedCsv loaded = load_csv(file.path, schema);
  CHECK(loaded.data.size() == 2);
  CHECK(loaded.data.dim() == 2);
}

TEST_CASE("csv loading errors are typed") {
  const TempFile file("a,b\n1,2\n");
  CsvSchema empty;
  CHECK_THROWS_AS(load_csv(file.path, empty), std::invalid_argument);
  CsvSchema missing;
  missing.continuous = {"nope"};
  CHECK_THROWS_AS(load_csv(file.path, missing), std::invalid_argument);
  CsvSchema ok;
  ok.continuous = {"a"};
  CHECK_THROWS_AS(load_csv("does_not_exist.csv", ok), std::runtime_error);
}

TEST_CASE("schema files list column kinds") {
  const TempFile file(
      "age continuous\n"
      "job categorical\n"
      "duration continuous\n");
  const CsvSchema schema = CsvSchema::from_file(file.path);
  REQUIRE(schema.continuous.size() == 2);
  CHECK(schema.continuous[0] == "age");
  CHECK(schema.continuous[1] == "duration");
}

TEST_CASE("subsample is seeded, order-preserving, and size-exact") {
  SeededRng rng(1);
  const Dataset data = blobs(50, 2, rng);
  const Dataset a = subsample(data, 30, 99);
  const Dataset b = subsample(data, 30, 99);
  CHECK(a.points() == b.points());
  CHECK(a.size() == 30);

  const Dataset all = subsample(data, data.size(), 5);
  CHECK(all.points() == data.points());  // identity permutation of membership
  CHECK_THROWS_AS(subsample(data, data.size() + 1, 5), std::invalid_argument);

  // order preserved: consecutive rows appear in original order
  const Dataset c = subsample(data, 10, 123);
  for (Index i = 0; i + 1 < c.size(); ++i) {
    Index pos_a = -1, pos_b = -1;
    for (Index r = 0; r < data.size(); ++r) {
      if (pos_a < 0 && data.points().row(r) == c.points().row(i)) pos_a = r;
      if (data.points().row(r) == c.points().row(i + 1)) pos_b = r;
    }
    CHECK(pos_a < pos_b);
  }
}

TEST_CASE("markdown output renders three decimals") {
  ExperimentRow row;
  row.algorithm = "cn_alpha";
  row.eps = 0.2;
  row.noise_level = 0.01;
  row.mean_size = 1940.0;
  row.mean_r_tilde = 1.1559;
  row.mean_u = 1.234;
  row.mean_kappa = 0.937;
  row.trials = 10;
  const std::string table = emit({row}, EmitFormat::MarkdownTable);
  CHECK(table.find("1.156") != std::string::npos);
  CHECK(table.find("0.937") != std::string::npos);
}

TEST_CASE("csv output round-trips at full precision") {
  ExperimentRow row;
  row.algorithm = "cn";
  row.eps = 0.1;
  row.noise_level = 0.05;
  row.mean_size = 9486.0;
  row.mean_r_tilde = 1.0403999999999999;
  row.mean_u = 2.0012941740066981;
  row.mean_kappa = row.mean_r_tilde / row.mean_u;
  row.trials = 10;
  const std::string csv = emit({row}, EmitFormat::Csv);

  std::istringstream in(csv);
  std::string header, line;
  std::getline(in, header);
  CHECK(header == "algorithm,eps,level,size,r_tilde,u,kappa,trials,seed");
  std::getline(in, line);
  std::istringstream fields(line);
  std::string field;
  std::getline(fields, field, ',');
  CHECK(field == "cn");
  std::getline(fields, field, ',');
  CHECK(std::strtod(field.c_str(), nullptr) == row.eps);
  std::getline(fields, field, ',');
  CHECK(std::strtod(field.c_str(), nullptr) == row.noise_level);
  std::getline(fields, field, ',');
  CHECK(std::strtod(field.c_str(), nullptr) == row.mean_size);
  std::getline(fields, field, ',');
  CHECK(std::strtod(field.c_str(), nullptr) == row.mean_r_tilde);
  std::getline(fields, field, ',');
  CHECK(std::strtod(field.c_str(), nullptr) == row.mean_u);
  std::getline(fields, field, ',');
  CHECK(std::strtod(field.c_str(), nullptr) == row.mean_kappa);
}

TEST_CASE("emit rejects empty input and unknown formats") {
  CHECK_THROWS_AS(emit(std::vector<ExperimentRow>{}, EmitFormat::Csv),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_emit_format("yaml"), std::invalid_argument);
  CHECK(parse_emit_format("markdown-table") == EmitFormat::MarkdownTable);
  CHECK(parse_emit_format("json-lines") == EmitFormat::JsonLines);
}

TEST_CASE("grid runs are deterministic and size-stable") {
  SeededRng data_rng(2);
  const Dataset data = blobs(60, 3, data_rng);

  ExperimentConfig config;
  config.k = 3;
  config.eps_values = {0.2, 0.3};
  config.noise_levels = {0.0, 0.25};
  config.trials = 2;
  config.seed = 77;

  const std::vector<ExperimentRow> rows = run_grid(data, config);
  CHECK(rows.size() == 2 * 2 * 2);

  // the sensitivity-sampling coreset size depends only on (k, eps)
  for (const ExperimentRow& row : rows) {
    CHECK_FALSE(row.failed);
    if (row.algorithm == "cn") {
      const double expected =
          static_cast<double>(cn_sample_size(3, row.eps, data.size()).used);
      CHECK(row.mean_size == doctest::Approx(expected));
    }
    if (row.algorithm == "cn_alpha" && row.noise_level == 0.0) {
      CHECK(row.mean_r_tilde <= 1.0 + row.eps + 0.1);
    }
  }

  const std::string first = emit(rows, EmitFormat::Csv);
  const std::string second = emit(run_grid(data, config), EmitFormat::Csv);
  CHECK(first == second);

  // worker count must not affect the result
  setenv("NCS_THREADS", "1", 1);
  const std::string serial = emit(run_grid(data, config), EmitFormat::Csv);
  setenv("NCS_THREADS", "4", 1);
  const std::string parallel = emit(run_grid(data, config), EmitFormat::Csv);
  unsetenv("NCS_THREADS");
  CHECK(serial == first);
  CHECK(parallel == first);
}

TEST_CASE("grid cells that cannot run are marked, not fatal") {
  // k = 6 over five distinct sites: the noisy-data solve covers every site
  // exactly, so the bound's cost estimate degenerates to zero and every
  // cell reports an error instead of aborting the run.
  Matrix pts(10, 1);
  pts << 0, 0, 10, 10, 20, 20, 30, 30, 40, 40;
  const Dataset data{Matrix(pts)};

  ExperimentConfig config;
  config.k = 6;
  config.eps_values = {0.3};
  config.noise_levels = {0.0};
  config.trials = 2;
  config.seed = 5;

  const std::vector<ExperimentRow> rows = run_grid(data, config);
  REQUIRE(rows.size() == 2);
  for (const ExperimentRow& row : rows) {
    CHECK(row.failed);
    CHECK_FALSE(row.error.empty());
    CHECK(row.trials == 0);
  }
}

TEST_CASE("correlated-noise grids generate a covariance and stay deterministic") {
  SeededRng data_rng(31);
  const Dataset data = blobs(80, 2, data_rng);

  ExperimentConfig config;
  config.k = 2;
  config.eps_values = {0.3};
  config.noise_model = NoiseModel::Correlated;
  config.noise_levels = {0.0, 0.5};
  config.trials = 2;
  config.seed = 8;

  const std::vector<ExperimentRow> rows = run_grid(data, config);
  REQUIRE(rows.size() == 4);
  for (const ExperimentRow& row : rows) {
    CHECK_FALSE(row.failed);
    CHECK(row.mean_u >= 1.0);
  }
  CHECK(emit(rows, EmitFormat::Csv) ==
        emit(run_grid(data, config), EmitFormat::Csv));

  // a supplied covariance is honored
  config.covariance = Matrix::Identity(2, 2);
  CHECK_FALSE(run_grid(data, config).empty());
}

TEST_CASE("cluster-wise tightness beats sensitivity sampling cell-wise") {
  SeededRng data_rng(21);
  const Dataset data = blobs(300, 5, data_rng);

  ExperimentConfig config;
  config.k = 5;
  config.eps_values = {0.2, 0.3};
  config.noise_levels = {0.0, 0.25};
  config.trials = 3;
  config.seed = 13;

  const std::vector<ExperimentRow> rows = run_grid(data, config);
  std::map<std::pair<double, double>, double> cn_kappa;
  for (const ExperimentRow& row : rows) {
    REQUIRE_FALSE(row.failed);
    if (row.algorithm == "cn")
      cn_kappa[{row.eps, row.noise_level}] = row.mean_kappa;
  }
  for (const ExperimentRow& row : rows) {
    if (row.algorithm != "cn_alpha") continue;
    CHECK(row.mean_kappa > cn_kappa.at({row.eps, row.noise_level}));
    CHECK(row.mean_kappa <= 1.0);
  }
}

TEST_CASE("beta sweep emits the full series") {
  const std::vector<BetaSweepPoint> series =
      run_beta_sweep(400, 2.0, 3.0, 0.05, 0.0, 50, 9);
  CHECK(series.size() == 21);
  CHECK(series.front().beta == doctest::Approx(2.0));
  CHECK(series.back().beta == doctest::Approx(3.0));
  for (const BetaSweepPoint& point : series) {
    CHECK(point.err_hat == doctest::Approx(0.0));      // theta = 0
    CHECK(std::abs(point.err1_hat) <= 0.02);           // solver slack only
  }
  const std::string csv = emit(series, EmitFormat::Csv);
  CHECK(csv.rfind("beta,err_hat,err1_hat\n", 0) == 0);
  CHECK_THROWS_AS(run_beta_sweep(400, 2.0, 3.0, 0.0, 0.0, 10, 9),
                  std::invalid_argument);
}
