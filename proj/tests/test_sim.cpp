#include <filesystem>

#include "test_util.hpp"

namespace sepec {
namespace {

sim::ExperimentConfig small_config(Setup setup) {
  sim::ExperimentConfig cfg;
  cfg.setup = setup;
  cfg.num_runs = 4;
  cfg.K = 4;
  cfg.T = 100;
  cfg.contexts = 3;
  cfg.d = 2;
  cfg.logged_size = 60;
  cfg.seed = 7;
  cfg.eps_grid = {0.1, 0.2};
  cfg.methods = {"sepec", "mixture", "safeod", "uniform", "ab", "oracle-truth"};
  return cfg;
}

TEST(Config, Validation) {
  auto cfg = small_config(Setup::Mab);
  EXPECT_NO_THROW(cfg.validate());
  cfg.num_runs = 0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg = small_config(Setup::Mab);
  cfg.eps_grid = {0.0};
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg = small_config(Setup::Mab);
  cfg.alpha = 1.0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg = small_config(Setup::Mab);
  cfg.methods = {"sepec_pi"};
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg = small_config(Setup::Lb);
  cfg.methods = {"sepec_pi"};
  EXPECT_NO_THROW(cfg.validate());
}

TEST(GenerateMab, EqualNoiseGivesUniformPolicy) {
  EXPECT_TRUE(PolicyVector::normalized(Vec::Constant(4, 0.3)).weights().isApprox(Vec::Constant(4, 0.25)));
}

TEST(GenerateMab, DeterministicAndNormalized) {
  const auto cfg = small_config(Setup::Mab);
  Rng a(5), b(5);
  const auto x = sim::generate_mab_instance(cfg, a), y = sim::generate_mab_instance(cfg, b);
  EXPECT_EQ(x.h1, y.h1);
  testing::expect_vec_near(x.instance.means(), y.instance.means(), 0.0);
  testing::expect_vec_near(x.pi0.weights(), y.pi0.weights(), 0.0);
  testing::expect_simplex(x.pi1.weights());
}

TEST(GenerateMab, HypothesisFrequency) {
  const auto cfg = small_config(Setup::Mab);
  Rng rng(6);
  int h1 = 0;
  for (int i = 0; i < 10000; ++i) h1 += sim::generate_mab_instance(cfg, rng).h1;
  EXPECT_NEAR(h1 / 10000.0, 0.5, 0.02);
}

TEST(GenerateMab, InformedTargetWinsOnAverageUnderH1) {
  const auto cfg = small_config(Setup::Mab);
  Rng rng(7);
  double h1_diff = 0.0, h0_diff = 0.0;
  int n1 = 0, n0 = 0;
  for (int i = 0; i < 4000; ++i) {
    const auto b = sim::generate_mab_instance(cfg, rng);
    const double d = policy_value(b.instance, b.pi1) - policy_value(b.instance, b.pi0);
    (b.h1 ? h1_diff : h0_diff) += d;
    (b.h1 ? n1 : n0) += 1;
  }
  EXPECT_GT(h1_diff / n1, 0.0);
  EXPECT_LT(h0_diff / n0, 0.0);
}

TEST(GenerateCmab, SingleContextAndDirichletMean) {
  auto cfg = small_config(Setup::Cmab);
  cfg.contexts = 1;
  Rng rng(8);
  EXPECT_EQ(sim::generate_cmab_instance(cfg, rng).pi0.context_probs()[0], 1.0);
  cfg.contexts = 30;
  Vec mean = Vec::Zero(30);
  for (int i = 0; i < 10000; ++i) mean += sim::generate_cmab_instance(cfg, rng).pi0.context_probs();
  mean /= 10000.0;
  for (Eigen::Index x = 0; x < 30; ++x) EXPECT_NEAR(mean[x], 1.0 / 30.0, 0.01);
  Rng a(3), b(3);
  testing::expect_vec_near(sim::generate_cmab_instance(cfg, a).pi1.stacked(),
                           sim::generate_cmab_instance(cfg, b).pi1.stacked(), 0.0);
}

TEST(GenerateLb, UnitNormPositiveArms) {
  auto cfg = small_config(Setup::Lb);
  cfg.K = 20;
  cfg.d = 5;
  Rng rng(9);
  for (int i = 0; i < 50; ++i) {
    const auto b = sim::generate_lb_instance(cfg, rng);
    const Mat& x = b.instance.arm_features();
    for (Eigen::Index a = 0; a < x.rows(); ++a) EXPECT_NEAR(x.row(a).norm(), 1.0, 1e-12);
    EXPECT_TRUE((b.instance.arm_means().array() > 0.0).all());
    testing::expect_simplex(b.pi0.weights());
  }
}

TEST(GenerateLb, OneDimensionSameSign) {
  auto cfg = small_config(Setup::Lb);
  cfg.d = 1;
  cfg.K = 6;
  Rng rng(10);
  for (int i = 0; i < 100; ++i) {
    const auto b = sim::generate_lb_instance(cfg, rng);
    const double sign = b.instance.theta_star()[0] > 0.0 ? 1.0 : -1.0;
    for (Eigen::Index a = 0; a < 6; ++a) EXPECT_EQ(b.instance.arm_features()(a, 0), sign);
  }
}

TEST(SafetyLoss, Examples) {
  const MabInstance zero(Vec::Zero(3), Vec::Zero(3), 1.0);
  EXPECT_EQ(sim::safety_loss(std::vector<std::size_t>(10, 1), zero, PolicyVector::uniform(3), 0.1), 0.0);
  const MabInstance two(Vec{{0.0, 1.0}}, Vec::Zero(2), 1.0);
  EXPECT_NEAR(sim::safety_loss(std::vector<std::size_t>(100, 0), two, PolicyVector::point_mass(2, 1), 0.1), 90.0,
              1e-12);
}

TEST(SafetyLoss, BaselineActionsLoseAlmostNothing) {
  Rng rng(11);
  const auto inst = MabInstance::gaussian(Vec{{0.2, 0.5, 0.9}}, 1.0);
  const PolicyVector pi0(Vec{{0.3, 0.3, 0.4}});
  const std::size_t t = 500;
  double total = 0.0;
  for (int i = 0; i < 10000; ++i) total += sim::safety_loss(sample_allocation(pi0, t, rng), inst, pi0, 0.1);
  EXPECT_LE(total / 10000.0, 1e-2 * t * policy_value(inst, pi0));
}

TEST(RunExperiment, OracleTruthHasZeroRmse) {
  for (sepec::Setup s : {Setup::Mab, Setup::Cmab, Setup::Lb}) {
    const auto res = sim::run_experiment(small_config(s));
    bool found = false;
    for (const auto& row : res.aggregates)
      if (row.method == "oracle-truth") {
        EXPECT_EQ(row.rmse, 0.0);
        found = true;
      }
    EXPECT_TRUE(found) << to_string(s);
  }
}

TEST(RunExperiment, RecordCountAndInvariants) {
  for (sepec::Setup s : {Setup::Mab, Setup::Cmab, Setup::Lb}) {
    auto cfg = small_config(s);
    if (s == Setup::Lb) cfg.methods.push_back("sepec_pi");
    const auto res = sim::run_experiment(cfg);
    EXPECT_EQ(res.records.size() + res.skipped.size(), cfg.num_runs * cfg.methods.size() * cfg.eps_grid.size());
    for (const auto& r : res.records) {
      EXPECT_GE(r.safety_loss, 0.0);
      EXPECT_TRUE(std::isfinite(r.estimate));
    }
  }
}

TEST(RunExperiment, DeterministicAcrossJobs) {
  auto cfg = small_config(Setup::Mab);
  cfg.num_runs = 6;
  const auto a = io::records_to_csv(sim::run_experiment(cfg, 1).records);
  const auto b = io::records_to_csv(sim::run_experiment(cfg, 3).records);
  EXPECT_EQ(a, b);
  cfg.num_runs = 1;
  EXPECT_EQ(io::records_to_csv(sim::run_experiment(cfg).records), io::records_to_csv(sim::run_experiment(cfg).records));
}

TEST(RunExperiment, MethodOrderDoesNotPerturbRandomness) {
  auto cfg = small_config(Setup::Mab);
  const auto a = sim::run_experiment(cfg).records;
  std::reverse(cfg.methods.begin(), cfg.methods.end());
  const auto b = sim::run_experiment(cfg).records;
  auto pick = [](const std::vector<sim::RunRecord>& rs) {
    std::vector<double> out;
    for (const auto& r : rs)
      if (r.method == "sepec") out.push_back(r.estimate);
    return out;
  };
  EXPECT_EQ(pick(a), pick(b));
}

TEST(RunExperiment, NullSizeControlled) {
  auto cfg = small_config(Setup::Mab);
  cfg.K = 10;
  cfg.T = 500;
  cfg.num_runs = 400;
  cfg.eps_grid = {0.2};
  cfg.methods = {"uniform"};
  const auto res = sim::run_experiment(cfg);
  int null = 0, rej = 0;
  for (const auto& r : res.records)
    if (!r.h1) {
      ++null;
      rej += r.rejected;
    }
  ASSERT_GT(null, 100);
  EXPECT_LE(static_cast<double>(rej) / null, cfg.alpha + 0.04);
}

TEST(Aggregate, HandComputed) {
  std::vector<sim::RunRecord> rs{{"m", 0.1, 1, true, 1.0, 0.0, true, 2.0, 0.0},
                                 {"m", 0.1, 2, false, 0.0, 1.0, true, 0.0, 0.0},
                                 {"m", 0.1, 3, true, 2.0, 2.0, false, 1.0, 0.0},
                                 {"n", 0.2, 1, false, 0.0, 0.0, false, 0.0, 0.0}};
  const auto rows = sim::aggregate(rs);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].method, "m");
  EXPECT_NEAR(rows[0].rmse, std::sqrt(2.0 / 3.0), 1e-15);
  EXPECT_NEAR(rows[0].power, 0.5, 1e-15);
  EXPECT_NEAR(rows[0].mean_safety_loss, 1.0, 1e-15);
  EXPECT_EQ(rows[0].n_runs, 3u);
  EXPECT_TRUE(std::isnan(rows[1].power));
}

TEST(Csv, EmptyIsHeaderOnly) {
  EXPECT_EQ(io::records_to_csv({}), std::string(io::kRecordHeader) + "\n");
}

TEST(Csv, RoundTrip) {
  std::vector<sim::RunRecord> rs{{"sepec", 0.05, 12345678901234ULL, true, 0.123456789012, -0.5, true, 3.25, 0.0},
                                 {"with,comma \"q\"", 0.2, 2, false, -1e-300, 1e10, false, 0.0, 0.0}};
  const auto back = io::records_from_csv(io::records_to_csv(rs));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].method, rs[1].method);
  EXPECT_EQ(back[0].seed, rs[0].seed);
  EXPECT_EQ(back[0].estimate, io::round_trip(rs[0].estimate));
  EXPECT_EQ(io::records_to_csv(back), io::records_to_csv(rs));
}

TEST(Csv, RowCountMatchesGrid) {
  auto cfg = small_config(Setup::Mab);
  cfg.num_runs = 20;
  cfg.methods = {"mixture", "uniform", "ab", "oracle-truth", "safeod"};
  cfg.eps_grid = {0.05, 0.1, 0.2, 0.5};
  const auto res = sim::run_experiment(cfg);
  ASSERT_TRUE(res.skipped.empty());
  const auto text = io::records_to_csv(res.records);
  EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')), 1 + 20 * 5 * 4);
}

TEST(Csv, AggregatesRoundTrip) {
  const auto res = sim::run_experiment(small_config(Setup::Mab));
  const auto rows = sim::aggregate(io::rounded(res.records));
  const auto back = io::aggregates_from_csv(io::aggregates_to_csv(rows));
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_NEAR(back[i].rmse, rows[i].rmse, 1e-8 * (1 + rows[i].rmse));
}

TEST(Svg, OneSeriesPerMethod) {
  const auto res = sim::run_experiment(small_config(Setup::Mab));
  const auto svg = io::line_chart_svg(res.aggregates, io::Metric::Rmse);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  std::size_t lines = 0;
  for (auto p = svg.find("<polyline"); p != std::string::npos; p = svg.find("<polyline", p + 1)) ++lines;
  EXPECT_EQ(lines, small_config(Setup::Mab).methods.size());
}

}  // namespace
}  // namespace sepec
