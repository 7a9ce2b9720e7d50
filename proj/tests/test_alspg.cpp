#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "geovo/alspg.hpp"
#include "geovo/planner.hpp"
#include "oracles.hpp"

using namespace geovo;

namespace {

NMPCProblem base_problem(int N) {
  NMPCProblem pr;
  pr.horizon_N = N;
  pr.x0 = {{0.0, 0.0}, {0.2, 0.05}};
  pr.goal = {1.5, 0.3};
  return pr;
}

ControlSeq random_controls(std::mt19937_64& rng, int N) {
  std::uniform_real_distribution<double> u(-1, 1);
  ControlSeq U(N);
  for (auto& uk : U) uk = {u(rng), u(rng)};
  return U;
}

// Plain cost gradient through the dense batch matrices.
Eigen::VectorXd dense_cost_gradient(const NMPCProblem& pr, const ControlSeq& U) {
  const int N = pr.horizon_N;
  const StateTraj t = rollout(pr.x0, U, pr.dt);
  Eigen::VectorXd jx = Eigen::VectorXd::Zero(4 * N);
  for (int k = 0; k < N; ++k) {
    jx[4 * k] = 2 * pr.weights.q_p * (t[k].p.x - pr.goal.x);
    jx[4 * k + 1] = 2 * pr.weights.q_p * (t[k].p.y - pr.goal.y);
    jx[4 * k + 2] = 2 * pr.weights.q_v * t[k].v.x;
    jx[4 * k + 3] = 2 * pr.weights.q_v * t[k].v.y;
  }
  return oracle::dense_B(N, pr.dt).transpose() * jx + 2 * pr.weights.r_u * flatten(U);
}

ConstraintBlocks one_box_block(const NMPCProblem&, const StateTraj&) {
  return {{Box2::symmetric(0.4), {3, Quantity::Velocity}, {}, 0.1, {-1, 3}}};
}

ConstraintBlocks no_blocks(const NMPCProblem&, const StateTraj&) { return {}; }

} // namespace

TEST(EvalLagrangian, NoBlocksIsPlainCost) {
  std::mt19937_64 rng(1);
  const NMPCProblem pr = base_problem(4);
  const ControlSeq U = random_controls(rng, 4);
  const LagrangianEval e = eval_lagrangian(U, {}, pr);
  EXPECT_NEAR(e.value, trajectory_cost(pr, U), 1e-12);
  EXPECT_LT((e.gradient - dense_cost_gradient(pr, U)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(EvalLagrangian, SatisfiedBlocksAddNothing) {
  std::mt19937_64 rng(2);
  const NMPCProblem pr = base_problem(3);
  const ControlSeq U(3);
  ConstraintBlocks blocks = state_box_blocks(pr);
  const LagrangianEval e = eval_lagrangian(U, blocks, pr);
  EXPECT_NEAR(e.value, trajectory_cost(pr, U), 1e-12);
  EXPECT_LT((e.gradient - dense_cost_gradient(pr, U)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(EvalLagrangian, GradientMatchesCentralDifferences) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const int N = 4;
    NMPCProblem pr = base_problem(N);
    pr.x0.v = {0.3, 0.1 * u(rng)};
    const ControlSeq U = random_controls(rng, N);
    const StateTraj ref = rollout(pr.x0, U, pr.dt);
    ConstraintBlocks blocks;
    const VOCone cone = build_vo_cone(ref[1].p, {0.8, 0.05 * u(rng)}, {-0.1, 0.0}, 0.23);
    blocks.push_back({cone, {2, Quantity::Velocity}, {0.1 * u(rng), 0.1 * u(rng)}, 5.0, {0, 2}});
    blocks.push_back({Box2::symmetric(0.3), {4, Quantity::Velocity}, {0.05 * u(rng), 0.0}, 2.0, {-1, 4}});
    const LagrangianEval e = eval_lagrangian(U, blocks, pr);
    auto f = [&](const Eigen::VectorXd& x) { return eval_lagrangian(unflatten(x), blocks, pr).value; };
    const Eigen::VectorXd fd = oracle::central_difference(f, flatten(U), 1e-6);
    EXPECT_LE((fd - e.gradient).norm() / std::max(1e-12, e.gradient.norm()), 1e-5) << "trial " << trial;
  }
}

TEST(DistanceFunction, FeasibleIsZero) {
  const NMPCProblem pr = base_problem(2);
  const ConstraintBlock b{Box2::symmetric(0.4), {1, Quantity::Velocity}, {}, 0.1, {-1, 1}};
  const Vec2 V = distance_function(ControlSeq(2), b, pr);
  EXPECT_EQ(V, (Vec2{0, 0}));
}

TEST(DistanceFunction, BoxViolationComponent) {
  NMPCProblem pr = base_problem(1);
  pr.x0.v = {0.45, 0.0};
  const ConstraintBlock b{Box2::symmetric(0.4), {1, Quantity::Velocity}, {}, 0.1, {-1, 1}};
  const Vec2 V = distance_function(ControlSeq(1), b, pr);
  EXPECT_NEAR(V.x, 0.05, 1e-12);
  EXPECT_EQ(V.y, 0.0);
}

TEST(DistanceFunction, VoViolationIsDistanceToNearestBoundary) {
  NMPCProblem pr = base_problem(1);
  pr.x0 = {{0, 0}, {0.3, 0.02}};
  const StateTraj t = rollout(pr.x0, ControlSeq(1), pr.dt);
  const Vec2 obs{1.0, 0.0};
  const VOCone cone = build_vo_cone(t[0].p, obs, {0, 0}, 0.3);
  ASSERT_TRUE(in_vo(t[0].v, cone));
  const ConstraintBlock b{cone, {1, Quantity::Velocity}, {}, 0.1, {0, 1}};
  const Vec2 V = distance_function(ControlSeq(1), b, pr);
  const auto [d1, d2] = oracle::tangent_directions({t[0].p.x, t[0].p.y}, {obs.x, obs.y}, 0.3);
  const double bf = oracle::sampled_boundary_distance({t[0].v.x, t[0].v.y}, {0, 0}, d1, d2, 1.0, 100001);
  EXPECT_NEAR(norm(V), bf, 2e-5);
}

TEST(MultiplierUpdate, Identity) {
  NMPCProblem pr = base_problem(2);
  pr.x0.v = {0.5, -0.6};
  const StateTraj t = rollout(pr.x0, ControlSeq(2), pr.dt);
  const ConstraintBlock b{Box2::symmetric(0.4), {2, Quantity::Velocity}, {0.3, -0.2}, 2.0, {-1, 2}};
  const Vec2 g = t[1].v;
  const Vec2 y = g + b.lambda / b.rho;
  const Vec2 expected = (y - project_box(y, Box2::symmetric(0.4))) * b.rho;
  const Vec2 got = multiplier_update(t, b);
  EXPECT_NEAR(got.x, expected.x, 1e-15);
  EXPECT_NEAR(got.y, expected.y, 1e-15);
}

TEST(AlspgSolve, NoBlocksOneOuterIteration) {
  const NMPCProblem pr = base_problem(3);
  const AlspgResult r = alspg_solve(pr, ControlSeq(3), {}, &no_blocks);
  EXPECT_EQ(r.stats.outer_iterations, 1);
  EXPECT_TRUE(r.stats.converged);
  // Same answer as SPG on the plain cost.
  AugmentedLagrangian plain(pr, {});
  const SpgResult s = spg_minimize(plain, [&](const Eigen::VectorXd& u) { return project_controls(u, pr.bounds.a_box); },
                                   flatten(ControlSeq(3)));
  EXPECT_LT((flatten(r.u) - s.x).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(AlspgSolve, BoxViolationConverges) {
  NMPCProblem pr = base_problem(3);
  pr.x0.v = {0.42, 0.0};
  pr.goal = {5.0, 0.0};
  AlspgConfig cfg;
  cfg.rho_init = 10.0;
  const AlspgResult r = alspg_solve(pr, ControlSeq(3), cfg, &one_box_block);
  EXPECT_LE(r.stats.final_norm_V, 1e-2);
  EXPECT_LE(r.stats.outer_iterations, 20);
  EXPECT_TRUE(r.stats.converged);
}

TEST(AlspgSolve, PenaltyGrowthPattern) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  AlspgConfig cfg;
  cfg.record_history = true;
  for (int trial = 0; trial < 10; ++trial) {
    NMPCProblem pr = base_problem(4);
    pr.x0.v = {0.3, 0.05 * u(rng)};
    pr.obstacles.push_back({Disk({0.6, 0.05 * u(rng)}, 0.1), {-0.1, 0}, true});
    const AlspgResult r = alspg_solve(pr, ControlSeq(4), cfg, &build_blocks);
    EXPECT_LE(r.stats.outer_iterations, cfg.N_max);
    ASSERT_EQ(r.stats.rho_history.size(), static_cast<std::size_t>(r.stats.outer_iterations));
    std::vector<double> prev(r.blocks.size(), cfg.rho_init);
    for (const auto& rhos : r.stats.rho_history) {
      for (std::size_t i = 0; i < rhos.size(); ++i) {
        EXPECT_GE(rhos[i], prev[i]);
        const double j = std::log(rhos[i] / cfg.rho_init) / std::log(cfg.beta);
        EXPECT_NEAR(j, std::round(j), 1e-9);
        prev[i] = rhos[i];
      }
    }
  }
}

TEST(AlspgSolve, StopsAtIterationLimit) {
  NMPCProblem pr = base_problem(2);
  pr.x0 = {{0, 0}, {0.4, 0}};
  pr.obstacles.push_back({Disk({0.3, 0}, 0.1), {-0.3, 0}, true});  // head-on, cannot be escaped in 2 steps
  AlspgConfig cfg;
  cfg.N_max = 3;
  const AlspgResult r = alspg_solve(pr, ControlSeq(2), cfg, &build_blocks);
  EXPECT_EQ(r.stats.outer_iterations, 3);
  EXPECT_FALSE(r.stats.converged);
  EXPECT_EQ(r.stats.iteration_ms.size(), 3u);
}

TEST(AlspgSolve, PenaltyCeilingFlagged) {
  NMPCProblem pr = base_problem(2);
  pr.x0 = {{0, 0}, {0.4, 0}};
  pr.obstacles.push_back({Disk({0.3, 0}, 0.1), {-0.3, 0}, true});
  AlspgConfig cfg;
  cfg.N_max = 20;
  cfg.rho_max = 50.0;
  const AlspgResult r = alspg_solve(pr, ControlSeq(2), cfg, &build_blocks);
  EXPECT_TRUE(r.stats.penalty_ceiling_hit);
  for (const auto& b : r.blocks) EXPECT_LE(b.rho, 50.0);
}

TEST(AlspgSolve, RejectsBadInput) {
  const NMPCProblem pr = base_problem(3);
  EXPECT_THROW(alspg_solve(pr, ControlSeq(2), {}, &no_blocks), InvalidParameter);
  AlspgConfig cfg;
  cfg.beta = 1.0;
  EXPECT_THROW(alspg_solve(pr, ControlSeq(3), cfg, &no_blocks), InvalidParameter);
}

TEST(AlspgSolve, BuilderMustKeepLayout) {
  NMPCProblem pr = base_problem(2);
  pr.x0.v = {0.5, 0};
  int calls = 0;
  BlockBuilder shifty = [&calls](const NMPCProblem& p, const StateTraj& t) {
    ConstraintBlocks b = state_box_blocks(p);
    if (calls++ > 0) b.pop_back();
    (void)t;
    return b;
  };
  AlspgConfig cfg;
  cfg.eps_tol = 1e-12;
  EXPECT_THROW(alspg_solve(pr, ControlSeq(2), cfg, shifty), InvalidParameter);
}
