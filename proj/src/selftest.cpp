#include "ncs/selftest.hpp"

#include "ncs/coreset.hpp"
#include "ncs/cost.hpp"
#include "ncs/metrics.hpp"
#include "ncs/noise.hpp"
#include "ncs/synthetic.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace ncs {

int run_selftest(std::ostream& out) {
  int failures = 0;
  const auto report = [&](const std::string& name, bool ok,
                          const std::string& detail) {
    out << (ok ? "[pass] " : "[FAIL] ") << name;
    if (!detail.empty()) out << " (" << detail << ")";
    out << '\n';
    if (!ok) ++failures;
  };
  std::ostringstream detail;

  {  // 1-means decomposition identity, 1000 random draws at 1e-9
    SeededRng rng(101);
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
      const Index n = 2 + static_cast<Index>(rng.next_below(40));
      const Index d = 1 + static_cast<Index>(rng.next_below(6));
      Matrix pts(n, d);
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < d; ++j) pts(i, j) = sample_standard_normal(rng);
      Vector c(d);
      for (Index j = 0; j < d; ++j) c[j] = 3.0 * sample_standard_normal(rng);
      const auto [lhs, rhs] = one_mean_cost_identity_check(Dataset(pts), c);
      worst =
          std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
    }
    detail.str("");
    detail << "worst relative gap " << worst;
    report("one-mean cost identity", worst <= 1e-9, detail.str());
  }

  {  // cluster-wise weight conservation, exact
    SeededRng data_rng(102);
    Matrix pts(600, 2);
    for (Index c = 0; c < 3; ++c)
      for (Index i = 0; i < 200; ++i) {
        pts(c * 200 + i, 0) =
            40.0 * static_cast<double>(c) + sample_standard_normal(data_rng);
        pts(c * 200 + i, 1) = sample_standard_normal(data_rng);
      }
    const CnAlphaResult result =
        build_cn_alpha(Dataset(pts), 0.2, 0.05, 3, SeededRng(103));
    double worst = 0.0;
    std::vector<double> mass(3, 0.0);
    for (Index i = 0; i < result.coreset.size(); ++i)
      mass[static_cast<std::size_t>(
          result.coreset.source_clusters()[static_cast<std::size_t>(i)])] +=
          result.coreset.weights()[i];
    for (std::size_t c = 0; c < 3; ++c)
      worst = std::max(
          worst, std::abs(mass[c] -
                          static_cast<double>(result.trace.filtered_size[c])));
    detail.str("");
    detail << "worst cluster-mass gap " << worst;
    report("cluster-wise weight conservation", worst <= 1e-9, detail.str());
  }

  {  // sensitivity-sampling unbiasedness, 1e4 rebuilds at 1%
    SeededRng data_rng(104);
    Matrix pts(30, 2);
    for (Index i = 0; i < 30; ++i)
      for (Index j = 0; j < 2; ++j) pts(i, j) = sample_standard_normal(data_rng);
    const Dataset data(pts);
    Matrix probe(2, 2);
    for (Index i = 0; i < 2; ++i)
      for (Index j = 0; j < 2; ++j)
        probe(i, j) = sample_standard_normal(data_rng);
    const CenterSet probe_set(probe);
    const double reference = cost(data, probe_set);
    double mean_cost = 0.0;
    for (int t = 0; t < 10000; ++t)
      mean_cost += cost(
          build_cn(data, 0.9, 2, SeededRng(static_cast<std::uint64_t>(t))),
          probe_set);
    mean_cost /= 10000.0;
    detail.str("");
    detail << "mean " << mean_cost << " vs " << reference;
    report("sensitivity sampling unbiasedness",
           std::abs(mean_cost - reference) <= 0.01 * reference, detail.str());
  }

  {  // noise energy for the three models, 100 trials at 3 SE
    Matrix pts(2000, 10);
    for (Index i = 0; i < 2000; ++i)
      for (Index j = 0; j < 10; ++j) pts(i, j) = static_cast<double>((i + j) % 5);
    const Dataset data(pts);
    SeededRng cov_rng(105);
    const Matrix sigma = random_covariance(10, cov_rng);
    const NoiseSpec specs[3] = {NoiseSpec::model_i(0.4),
                                NoiseSpec::model_ii(0.6),
                                NoiseSpec::correlated(0.5, sigma)};
    bool all_ok = true;
    detail.str("");
    for (const NoiseSpec& spec : specs) {
      double mean_energy = 0.0, var = 0.0;
      std::vector<double> vals;
      for (int t = 0; t < 100; ++t) {
        const PerturbResult r =
            perturb(data, spec, SeededRng(static_cast<std::uint64_t>(t) + 7));
        vals.push_back(r.noise.squaredNorm());
        mean_energy += vals.back();
      }
      mean_energy /= 100.0;
      for (double v : vals) var += (v - mean_energy) * (v - mean_energy);
      var /= 99.0;
      const double se = std::sqrt(var / 100.0);
      const double expected = spec.expected_noise_energy(2000, 10);
      if (std::abs(mean_energy - expected) > 3.0 * se) all_ok = false;
      detail << "[" << mean_energy << " vs " << expected << "] ";
    }
    report("noise energy concentration", all_ok, detail.str());
  }

  {  // uniform-subsample center movement within 20% of opt/(n*m)
    SeededRng data_rng(106);
    Matrix pts(200, 3);
    for (Index i = 0; i < 200; ++i)
      for (Index j = 0; j < 3; ++j) pts(i, j) = sample_standard_normal(data_rng);
    const Dataset cluster(pts);
    const Vector mu = mean(cluster);
    double opt = 0.0;
    for (Index i = 0; i < 200; ++i)
      opt += (cluster.point(i).transpose() - mu).squaredNorm();
    const double expected = opt / (200.0 * 10.0);
    double drift = 0.0;
    for (int t = 0; t < 1000; ++t) {
      SeededRng rng(static_cast<std::uint64_t>(t) + 19);
      drift +=
          (mean(testing::uniform_sample_with_replacement(cluster, 10, rng)) - mu)
              .squaredNorm();
    }
    drift /= 1000.0;
    detail.str("");
    detail << "mean drift " << drift << " vs " << expected;
    report("subsample center movement",
           std::abs(drift - expected) <= 0.2 * expected, detail.str());
  }

  {  // noisy center movement below 10*theta*d/n
    SeededRng data_rng(107);
    Matrix pts(500, 4);
    for (Index i = 0; i < 500; ++i)
      for (Index j = 0; j < 4; ++j)
        pts(i, j) = 0.3 * sample_standard_normal(data_rng);
    const Dataset cluster(pts);
    const Vector mu = mean(cluster);
    double drift = 0.0;
    for (int t = 0; t < 1000; ++t)
      drift += (mean(perturb(cluster, NoiseSpec::model_i(0.5),
                             SeededRng(static_cast<std::uint64_t>(t)))
                         .noisy) -
                mu)
                   .squaredNorm();
    drift /= 1000.0;
    const double bound = 10.0 * 0.5 * 4.0 / 500.0;
    detail.str("");
    detail << "mean drift " << drift << " vs bound " << bound;
    report("noisy center movement", drift <= bound, detail.str());
  }

  {  // per-candidate composition inequality, all candidates
    bool all_hold = true;
    Index checked = 0;
    for (int trial = 0; trial < 20; ++trial) {
      SeededRng rng(300 + static_cast<std::uint64_t>(trial));
      Matrix pts(40, 2);
      for (Index i = 0; i < 40; ++i)
        for (Index j = 0; j < 2; ++j) pts(i, j) = sample_standard_normal(rng);
      const Dataset clean(pts);
      const PerturbResult noisy =
          perturb(clean, NoiseSpec::model_i(0.3), rng.child(1));
      const WeightedPointSet coreset =
          build_cn(noisy.noisy, 0.5, 2, rng.child(2));
      SeededRng cand_rng = rng.child(3);
      const CandidateCenters candidates =
          sample_candidate_centers(noisy.noisy, 200, 2, cand_rng);
      const CompositionReport result =
          check_composition(coreset, noisy.noisy, clean, candidates);
      checked += result.checked;
      if (result.violations != 0 || !result.aggregate_holds) all_hold = false;
    }
    detail.str("");
    detail << checked << " candidates checked";
    report("composition inequality", all_hold && checked > 0, detail.str());
  }

  {  // sampled error never beats the grid oracle on grid-aligned candidates
    bool all_ok = true;
    for (int trial = 0; trial < 50; ++trial) {
      SeededRng rng(400 + static_cast<std::uint64_t>(trial));
      const Index n = 4 + static_cast<Index>(rng.next_below(6));
      Matrix a(n, 1), b(n, 1);
      for (Index i = 0; i < n; ++i) {
        a(i, 0) = 2.0 * sample_standard_normal(rng);
        b(i, 0) = a(i, 0) + 0.3 * sample_standard_normal(rng);
      }
      GridSpec1D grid;
      grid.points = 501;
      const double lo_data = std::min(a.minCoeff(), b.minCoeff());
      const double hi_data = std::max(a.maxCoeff(), b.maxCoeff());
      const double lo = lo_data - (hi_data - lo_data);
      const double step = (hi_data + (hi_data - lo_data) - lo) /
                          static_cast<double>(grid.points - 1);
      SeededRng cand_rng = rng.child(1);
      std::vector<Matrix> sets;
      for (int s = 0; s < 500; ++s) {
        Matrix m(1, 1);
        m(0, 0) = lo + step * static_cast<double>(cand_rng.next_below(501));
        sets.push_back(m);
      }
      const Dataset da(a), db(b);
      const double sampled =
          estimate_err(da, db, CandidateCenters(std::move(sets), 1, 1));
      if (sampled > brute_force_err_1d(da, db, 1, PowerZ::kmeans(), grid) + 1e-9)
        all_ok = false;
    }
    report("sampled error below grid supremum", all_ok, "50 instances");
  }

  {  // the outlier instance separates the two error metrics
    const OutlierMedianInstance instance = gen_outlier_median(10);
    const double err1 = estimate_err_alpha(instance.coreset, instance.data, 1,
                                           1.0, 7, PowerZ::kmedian())
                            .value;
    GridSpec1D grid;
    grid.points = 301;
    const double err = brute_force_err_1d(instance.coreset, instance.data, 1,
                                          PowerZ::kmedian(), grid);
    detail.str("");
    detail << "err1 " << err1 << ", grid err " << err;
    report("outlier instance separates the metrics",
           std::abs(err1) <= 1e-9 && std::abs(err - 9.0) <= 1e-9, detail.str());
  }

  return failures;
}

}  // namespace ncs
