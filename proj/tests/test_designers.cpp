#include "test_util.hpp"

namespace sepec {
namespace {

using testing::random_simplex;
using testing::random_unit_interval;

const PolicyVector kPi0(Vec{{0.4, 0.1, 0.5}});
const PolicyVector kPi1(Vec{{0.1, 0.4, 0.5}});

double surrogate(const PolicyVector& pi0, const PolicyVector& pi1, const Vec& x) {
  return opt::ipw_surrogate((pi1.weights() - pi0.weights()).array().square(), x);
}

// A random point of {x in simplex : x >= (1 - eps) pi0}.
Vec random_feasible(const PolicyVector& pi0, double eps, Rng& rng) {
  return (1.0 - eps) * pi0.weights() + eps * random_simplex(pi0.size(), rng);
}

TEST(DesignMabWorstcase, IllustrativeExample) {
  const auto one = design_mab_worstcase(kPi0, kPi1, 1.0);
  testing::expect_vec_near(one.policy, Vec{{0.5, 0.5, 0.0}}, 1e-12);
  EXPECT_NEAR(one.objective, 0.09 / 0.5 + 0.09 / 0.5, 1e-12);
  const auto small = design_mab_worstcase(kPi0, kPi1, 0.1);
  testing::expect_vec_near(small.policy, Vec{{0.36, 0.19, 0.45}}, 1e-12);
  EXPECT_GE(small.certificate, -1e-9);
}

TEST(DesignMabWorstcase, SamePoliciesObjectiveZero) {
  const auto res = design_mab_worstcase(kPi0, kPi0, 0.3);
  EXPECT_EQ(res.objective, 0.0);
  testing::expect_simplex(res.policy);
  EXPECT_TRUE((res.policy.array() >= 0.7 * kPi0.weights().array() - 1e-15).all());
}

TEST(DesignMabWorstcase, EpsilonChecks) {
  EXPECT_THROW(design_mab_worstcase(kPi0, kPi1, 0.0), InfeasibleError);
  EXPECT_THROW(design_mab_worstcase(kPi0, kPi1, -0.5), InfeasibleError);
  EXPECT_THROW(design_mab_worstcase(kPi0, kPi1, 1.5), InvalidArgument);
}

TEST(DesignMabWorstcase, DoublyRobustWeights) {
  const auto res = design_mab_worstcase(kPi0, kPi1, 1.0, WeightMode::DoublyRobust);
  const Vec w = kPi1.weights().array().square();
  testing::expect_vec_near(res.policy, opt::waterfill_simplex(w, Vec::Zero(3)).weights(), 1e-12);
}

TEST(DesignMabWorstcase, PosteriorWeightsRequireMoments) {
  EXPECT_THROW(design_mab_worstcase(kPi0, kPi1, 0.5, WeightMode::Posterior), InvalidArgument);
  const auto res = design_mab_worstcase(kPi0, kPi1, 0.5, WeightMode::Posterior, Vec{{2.0, 2.0, 2.0}});
  testing::expect_vec_near(res.policy, design_mab_worstcase(kPi0, kPi1, 0.5).policy, 1e-12);
}

TEST(DesignMabWithRegion, UnitCubeMatchesWorstcase) {
  Rng rng(1);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t k = 2 + rng() % 3;
    const PolicyVector pi0(random_simplex(k, rng)), pi1(random_simplex(k, rng));
    const double eps = 0.05 + 0.5 * uniform01(rng);
    const auto a = design_mab_worstcase(pi0, pi1, eps);
    const auto b = design_mab_with_region(pi0, pi1, eps, BoxRegion::unit_cube(k));
    EXPECT_NEAR(a.objective, b.objective, 1e-6 * std::max(1.0, a.objective));
    EXPECT_GE(b.certificate, -1e-9);
  }
}

TEST(DesignMabWithRegion, DegenerateBoxNeverWorse) {
  Rng rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t k = 2 + rng() % 4;
    const PolicyVector pi0(random_simplex(k, rng)), pi1(random_simplex(k, rng));
    const Vec r = random_unit_interval(k, rng);
    const double eps = 0.1;
    const auto wc = design_mab_worstcase(pi0, pi1, eps);
    const auto res = design_mab_with_region(pi0, pi1, eps, BoxRegion(r, r));
    EXPECT_LE(res.objective, wc.objective + 1e-9);
    EXPECT_GE(r.dot(res.policy) - (1.0 - eps) * r.dot(pi0.weights()), -1e-9);
  }
}

TEST(DesignMabWithRegion, ZeroDeltaReturnsBaseline) {
  const auto res = design_mab_with_region(kPi0, kPi0, 0.2, BoxRegion::unit_cube(3));
  testing::expect_vec_near(res.policy, kPi0.weights(), 0.0);
  EXPECT_EQ(res.objective, 0.0);
}

TEST(DesignMabWithRegion, InteriorBoxRecertifiesWithFreshOracle) {
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t k = 2 + rng() % 9;
    const PolicyVector pi0(random_simplex(k, rng)), pi1(random_simplex(k, rng));
    const Vec a = random_unit_interval(k, rng), b = random_unit_interval(k, rng);
    const BoxRegion box(a.cwiseMin(b), a.cwiseMax(b));
    const double eps = 0.05;
    const auto res = design_mab_with_region(pi0, pi1, eps, box);
    testing::expect_simplex(res.policy);
    const Vec floor = (1.0 - eps) * pi0.weights();
    EXPECT_GE(min_linear_over_box(res.policy - floor, box).value, -1e-9);
    EXPECT_LE(res.diagnostics.cuts, 200u);
    EXPECT_LE(res.objective, design_mab_worstcase(pi0, pi1, eps).objective + 1e-9);
    for (Eigen::Index i = 0; i < res.policy.size(); ++i)
      if (pi1.weights()[i] != pi0.weights()[i]) EXPECT_GE(res.policy[i], 1e-12);
  }
}

TEST(DesignMabWithRegion, ClassicFrankWolfeAgrees) {
  Rng rng(4);
  const std::size_t k = 5;
  const PolicyVector pi0(random_simplex(k, rng)), pi1(random_simplex(k, rng));
  const BoxRegion box(Vec::Constant(5, 0.2), Vec::Constant(5, 0.6));
  DesignConfig cfg;
  cfg.seed_support_cut = false;
  const auto a = design_mab_with_region(pi0, pi1, 0.1, box);
  const auto b = design_mab_with_region(pi0, pi1, 0.1, box, WeightMode::Unit, std::nullopt, cfg);
  EXPECT_NEAR(a.objective, b.objective, 1e-6 * a.objective);
}

TEST(WorstCaseOptimality, CornerInstanceMinimaxProperty) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t k = 2 + rng() % 9;
    const PolicyVector pi0(random_simplex(k, rng)), pi1(random_simplex(k, rng));
    const double eps = 0.05 + 0.3 * uniform01(rng), sigma = 0.5 + uniform01(rng), t = 500.0;
    const auto delta = SignedPolicyDelta::between(pi1, pi0);
    const MabInstance corner = MabInstance::gaussian(Vec::Ones(static_cast<Eigen::Index>(k)), sigma);
    const auto res = design_mab_worstcase(pi0, pi1, eps);
    const double mine = ipw_diff_variance_exact(PolicyVector(res.policy), corner, delta, t);
    EXPECT_NEAR(mine, (sigma * sigma + 1.0) / t * res.objective, 1e-12);
    for (int s = 0; s < 300; ++s)
      EXPECT_LE(mine, ipw_diff_variance_exact(PolicyVector(random_feasible(pi0, eps, rng)), corner, delta, t) + 1e-12);
  }
}

TEST(WorstCaseOptimality, ConstantMomentAverageCase) {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t k = 2 + rng() % 6;
    const PolicyVector pi0(random_simplex(k, rng)), pi1(random_simplex(k, rng));
    const double m = 0.3 + uniform01(rng), eps = 0.2;
    const Vec moments = Vec::Constant(static_cast<Eigen::Index>(k), m);
    const auto res = design_mab_worstcase(pi0, pi1, eps, WeightMode::Posterior, moments);
    const Vec w = (pi1.weights() - pi0.weights()).array().square() * moments.array();
    const double mine = opt::ipw_surrogate(w, res.policy);
    for (int s = 0; s < 300; ++s) EXPECT_LE(mine, opt::ipw_surrogate(w, random_feasible(pi0, eps, rng)) + 1e-12);
  }
}

TEST(Dominance, SepecBeatsMixtureProperty) {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 2 + rng() % 9;
    const PolicyVector pi0(random_simplex(k, rng)), pi1(random_simplex(k, rng));
    for (double eps : {0.05, 0.1, 0.2}) {
      const auto res = design_mab_worstcase(pi0, pi1, eps);
      EXPECT_LE(res.objective, surrogate(pi0, pi1, baseline_mixture(pi0, pi1, eps).weights()) + 1e-12);
    }
  }
}

TEST(Monotonicity, ObjectiveNonIncreasingInEps) {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t k = 2 + rng() % 9;
    const PolicyVector pi0(random_simplex(k, rng)), pi1(random_simplex(k, rng));
    double prev = std::numeric_limits<double>::infinity();
    for (double eps : {0.01, 0.05, 0.1, 0.2, 0.5, 1.0}) {
      const double obj = design_mab_worstcase(pi0, pi1, eps).objective;
      EXPECT_LE(obj, prev + 1e-12);
      prev = obj;
    }
  }
}

ContextualPolicy random_contextual(std::size_t nx, std::size_t k, const Vec& probs, Rng& rng) {
  std::vector<PolicyVector> rows;
  for (std::size_t x = 0; x < nx; ++x) rows.emplace_back(random_simplex(k, rng));
  return ContextualPolicy(std::move(rows), probs);
}

TEST(DesignCmabWorstcase, SingleContextReduces) {
  const ContextualPolicy c0({kPi0}, Vec{{1.0}}), c1({kPi1}, Vec{{1.0}});
  const auto res = design_cmab_worstcase(c0, c1, 0.1);
  testing::expect_vec_near(res.policy, design_mab_worstcase(kPi0, kPi1, 0.1).policy, 1e-15);
  EXPECT_EQ(res.contexts, 1u);
}

TEST(DesignCmabWorstcase, ZeroDeltaContextKeepsFloor) {
  const Vec probs{{0.3, 0.7}};
  const ContextualPolicy c0({kPi0, kPi0}, probs), c1({kPi1, kPi0}, probs);
  const auto res = design_cmab_worstcase(c0, c1, 0.1);
  testing::expect_vec_near(res.policy.segment(0, 3), Vec{{0.36, 0.19, 0.45}}, 1e-12);
  const Vec second = res.policy.segment(3, 3);
  testing::expect_simplex(second);
  EXPECT_TRUE((second.array() >= 0.9 * kPi0.weights().array() - 1e-15).all());
  EXPECT_NEAR(res.objective, 0.3 * surrogate(kPi0, kPi1, Vec{{0.36, 0.19, 0.45}}), 1e-12);
}

TEST(DesignCmabWorstcase, TwoContextsAgainstGrid) {
  Rng rng(9);
  const Vec probs{{0.4, 0.6}};
  const auto c0 = random_contextual(2, 3, probs, rng), c1 = random_contextual(2, 3, probs, rng);
  const double eps = 0.3;
  const auto res = design_cmab_worstcase(c0, c1, eps);
  for (std::size_t x = 0; x < 2; ++x) {
    const Vec got = res.policy.segment(static_cast<Eigen::Index>(3 * x), 3);
    const double mine = surrogate(c0.at(x), c1.at(x), got);
    const Vec floor = (1.0 - eps) * c0.at(x).weights();
    for (int i = 0; i <= 100; ++i)
      for (int j = 0; i + j <= 100; ++j) {
        const Vec g{{i / 100.0, j / 100.0, (100 - i - j) / 100.0}};
        if ((g.array() >= floor.array()).all()) EXPECT_LE(mine, surrogate(c0.at(x), c1.at(x), g) + 1e-12);
      }
  }
}

TEST(DesignCmabWithRegion, FullCubeMatchesPerContext) {
  Rng rng(10);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t nx = 2 + rng() % 3, k = 2 + rng() % 3;
    const Vec probs = random_simplex(nx, rng);
    const auto c0 = random_contextual(nx, k, probs, rng), c1 = random_contextual(nx, k, probs, rng);
    const auto a = design_cmab_worstcase(c0, c1, 0.1);
    const auto b = design_cmab_with_region(c0, c1, 0.1, BoxRegion::unit_cube(nx * k));
    EXPECT_NEAR(a.objective, b.objective, 1e-6 * std::max(1.0, a.objective));
    EXPECT_GE(b.certificate, -1e-9);
  }
}

TEST(DesignCmabWithRegion, SingleContextEqualsMab) {
  const BoxRegion box(Vec{{0.2, 0.3, 0.1}}, Vec{{0.5, 0.7, 0.6}});
  const ContextualPolicy c0({kPi0}, Vec{{1.0}}), c1({kPi1}, Vec{{1.0}});
  const auto a = design_cmab_with_region(c0, c1, 0.1, box);
  const auto b = design_mab_with_region(kPi0, kPi1, 0.1, box);
  EXPECT_NEAR(a.objective, b.objective, 1e-6 * b.objective);
}

TEST(DesignCmabWithRegion, JointNeverWorseThanPerContext) {
  Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t nx = 3, k = 4;
    const Vec probs = random_simplex(nx, rng);
    const auto c0 = random_contextual(nx, k, probs, rng), c1 = random_contextual(nx, k, probs, rng);
    const Vec a = random_unit_interval(nx * k, rng), b = random_unit_interval(nx * k, rng);
    const BoxRegion box(a.cwiseMin(b), a.cwiseMax(b));
    const auto joint = design_cmab_with_region(c0, c1, 0.05, box);
    EXPECT_LE(joint.objective, design_cmab_worstcase(c0, c1, 0.05).objective + 1e-9);
    EXPECT_GE(joint.certificate, -1e-9);
    EXPECT_EQ(joint.contexts, nx);
  }
}

struct LbToy {
  Mat x;
  PolicyVector pi0, pi1;
  Mat g0;
  EllipsoidRegion region;
};

LbToy lb_toy(Rng& rng, std::size_t k, std::size_t d, double radius) {
  Mat x = testing::unit_rows(testing::random_matrix(k, d, rng).cwiseAbs());
  Vec center = Vec::Ones(static_cast<Eigen::Index>(d));
  return LbToy{x, PolicyVector(random_simplex(k, rng)), PolicyVector(random_simplex(k, rng)),
               0.5 * Mat::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)),
               EllipsoidRegion(center, Mat::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)), radius)};
}

TEST(DesignLb, ZeroFeatureDifferenceReturnsBaseline) {
  Rng rng(12);
  auto toy = lb_toy(rng, 4, 2, 0.1);
  const auto res = design_lb(toy.pi0, toy.pi0, 0.1, toy.x, toy.g0, 100.0, toy.region);
  testing::expect_vec_near(res.policy, toy.pi0.weights(), 0.0);
  EXPECT_EQ(res.objective, 0.0);
}

TEST(DesignLb, PointRegionMatchesOneCutSolve) {
  Rng rng(13);
  auto toy = lb_toy(rng, 5, 2, 1e-12);
  const double eps = 0.1;
  const auto res = design_lb(toy.pi0, toy.pi1, eps, toy.x, toy.g0, 100.0, toy.region);
  opt::Polytope one(5);
  const Vec a = toy.x * toy.region.center();
  one.add_cut(a, a.dot((1.0 - eps) * toy.pi0.weights()));
  const opt::LbObjective obj(toy.x.transpose() * (toy.pi1.weights() - toy.pi0.weights()), toy.x, toy.g0, 100.0);
  opt::FrankWolfeConfig cfg;
  cfg.max_iter = 20000;
  const auto ref = opt::frank_wolfe(obj, one, toy.pi0.weights(), cfg);
  EXPECT_NEAR(res.objective, ref.diagnostics.objective, 1e-6 * ref.diagnostics.objective);
}

double lb_grid_best(const LbToy& toy, double eps, double t, const std::function<double(const Vec&)>& j) {
  const Vec floor = (1.0 - eps) * toy.pi0.weights();
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 100; ++i)
    for (int k = 0; i + k <= 100; ++k) {
      const Vec g{{i / 100.0, k / 100.0, (100 - i - k) / 100.0}};
      const Vec v = toy.x.transpose() * (g - floor);
      if (-max_linear_over_ellipsoid(Vec(-v), toy.region).value < 0.0) continue;
      best = std::min(best, j(g));
    }
  (void)t;
  return best;
}

TEST(DesignLb, ToyAgainstGrid) {
  Rng rng(14);
  for (int trial = 0; trial < 5; ++trial) {
    auto toy = lb_toy(rng, 3, 2, 0.05);
    const double eps = 0.2, t = 50.0;
    const auto res = design_lb(toy.pi0, toy.pi1, eps, toy.x, toy.g0, t, toy.region);
    EXPECT_GE(res.certificate, -1e-9);
    const Vec phi = toy.x.transpose() * (toy.pi1.weights() - toy.pi0.weights());
    const double best =
        lb_grid_best(toy, eps, t, [&](const Vec& g) { return opt::lb_objective(g, phi, toy.x, toy.g0, t).value; });
    EXPECT_LE(res.objective, best * (1.0 + 1e-9) + 1e-12);
    EXPECT_LE(best - res.objective, 0.01 * res.objective);
  }
}

TEST(DesignLbPi, NoSafetyPicksArgminCost) {
  Rng rng(15);
  auto toy = lb_toy(rng, 5, 3, 0.1);
  const auto res = design_lb_pi(toy.pi1, 1.0, toy.x, toy.region, toy.pi0);
  const Vec c = pi_design_costs(toy.pi1, toy.x);
  Eigen::Index arg = 0;
  c.minCoeff(&arg);
  testing::expect_vec_near(res.policy, PolicyVector::point_mass(5, static_cast<std::size_t>(arg)).weights(), 1e-12);
}

TEST(DesignLbPi, ToyAgainstGrid) {
  Rng rng(16);
  for (int trial = 0; trial < 5; ++trial) {
    auto toy = lb_toy(rng, 3, 2, 0.05);
    const double eps = 0.2;
    const auto res = design_lb_pi(toy.pi1, eps, toy.x, toy.region, toy.pi0);
    const Vec c = pi_design_costs(toy.pi1, toy.x);
    EXPECT_GE(res.certificate, -1e-9);
    const double best = lb_grid_best(toy, eps, 0.0, [&](const Vec& g) { return c.dot(g); });
    EXPECT_LE(res.objective, best + 1e-9);
  }
}

TEST(DesignLbPi, EqualCostsDeterministic) {
  const Mat x = Mat::Identity(2, 2);
  const PolicyVector pi1 = PolicyVector::uniform(2);
  const EllipsoidRegion region(Vec::Ones(2), Mat::Identity(2, 2), 0.01);
  const auto a = design_lb_pi(pi1, 1.0, x, region, pi1);
  const auto b = design_lb_pi(pi1, 1.0, x, region, pi1);
  testing::expect_vec_near(a.policy, b.policy, 0.0);
  EXPECT_NEAR(a.objective, pi_design_costs(pi1, x)[0], 1e-12);
}

TEST(Baselines, Mixture) {
  const PolicyVector a(Vec{{1.0, 0.0}}), b(Vec{{0.0, 1.0}});
  testing::expect_vec_near(baseline_mixture(a, b, 0.0).weights(), a.weights(), 0.0);
  testing::expect_vec_near(baseline_mixture(a, b, 1.0).weights(), b.weights(), 0.0);
  testing::expect_vec_near(baseline_mixture(a, b, 0.5).weights(), Vec{{0.5, 0.5}}, 0.0);
}

TEST(Baselines, SafeOd) {
  testing::expect_vec_near(baseline_safe_od(kPi0, 1.0).weights(), Vec::Constant(3, 1.0 / 3.0), 1e-12);
  testing::expect_vec_near(baseline_safe_od(kPi0, 0.0).weights(), kPi0.weights(), 1e-12);
  testing::expect_vec_near(baseline_safe_od(PolicyVector(Vec{{0.6, 0.3, 0.1}}), 0.2).weights(), Vec{{0.48, 0.26, 0.26}},
                           1e-12);
}

TEST(Baselines, UniformAndAb) {
  testing::expect_vec_near(baseline_uniform(1).weights(), Vec{{1.0}}, 0.0);
  testing::expect_vec_near(baseline_uniform(4).weights(), Vec::Constant(4, 0.25), 0.0);
  testing::expect_vec_near(baseline_ab(kPi0, kPi0).weights(), kPi0.weights(), 1e-15);
  testing::expect_vec_near(baseline_ab(PolicyVector(Vec{{1.0, 0.0}}), PolicyVector(Vec{{0.0, 1.0}})).weights(),
                           Vec{{0.5, 0.5}}, 0.0);
  testing::expect_vec_near(baseline_ab(PolicyVector(Vec{{1.0}}), PolicyVector(Vec{{1.0}})).weights(), Vec{{1.0}}, 0.0);
}

TEST(Baselines, SafeOdLbIsSafe) {
  Rng rng(17);
  auto toy = lb_toy(rng, 6, 3, 0.1);
  const auto res = baseline_safe_od_lb(toy.pi0, 0.2, toy.x, toy.g0, 100.0, toy.region);
  testing::expect_simplex(res.policy);
  EXPECT_GE(res.certificate, -1e-9);
  EXPECT_EQ(res.note, "approximation");
  const opt::MaxUncertaintyObjective obj(toy.x, toy.g0, 100.0);
  EXPECT_LE(res.objective, obj.value(toy.pi0.weights()) + 1e-12);
}

TEST(Solve, DispatchesBySetup) {
  DesignProblem p;
  p.pi0 = {kPi0.weights()};
  p.pi1 = {kPi1.weights()};
  p.eps = 1.0;
  testing::expect_vec_near(solve(p).policy, Vec{{0.5, 0.5, 0.0}}, 1e-12);
  p.region = EllipsoidRegion(Vec::Zero(2), Mat::Identity(2, 2), 1.0);
  EXPECT_THROW(solve(p), InvalidArgument);
  p.setup = Setup::Cmab;
  p.region = std::monostate{};
  p.pi0 = {kPi0.weights(), kPi0.weights()};
  p.pi1 = {kPi1.weights(), kPi0.weights()};
  const auto res = solve(p);
  EXPECT_EQ(res.contexts, 2u);
  EXPECT_EQ(res.policy.size(), 6);
}

}  // namespace
}  // namespace sepec
