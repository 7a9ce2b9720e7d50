#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "geovo/planner.hpp"
#include "geovo/scenario.hpp"
#include "geovo/simulation.hpp"
#include "oracles.hpp"

using namespace geovo;

namespace {

Scenario shipped(const std::string& name) { return load_scenario(std::string(GEOVO_SCENARIO_DIR) + "/" + name + ".json"); }

SimConfig at_horizon(int n) {
  SimConfig c;
  c.horizon = n;
  return c;
}

} // namespace

TEST(BuildCost, ZeroAtGoal) {
  NMPCProblem pr;
  pr.horizon_N = 3;
  pr.x0.p = pr.goal = {1, 1};
  const StateTraj t = rollout(pr.x0, ControlSeq(3), pr.dt);
  const CostEval c = build_cost(pr)(t, ControlSeq(3));
  EXPECT_EQ(c.value, 0.0);
  for (const auto& j : c.jac_x) EXPECT_EQ(j, Eigen::Vector4d::Zero());
  EXPECT_EQ(c.jac_u, Eigen::VectorXd::Zero(6));
}

TEST(BuildCost, SinglePositionTerm) {
  NMPCProblem pr;
  pr.horizon_N = 1;
  pr.goal = {0, 0};
  pr.x0.p = {1, 0};
  const StateTraj t = rollout(pr.x0, ControlSeq(1), pr.dt);
  EXPECT_NEAR(build_cost(pr)(t, ControlSeq(1)).value, 10.0, 1e-12);
}

TEST(BuildCost, JacobiansMatchFiniteDifferences) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    NMPCProblem pr;
    pr.horizon_N = 4;
    pr.goal = {u(rng), u(rng)};
    StateTraj x(4);
    for (auto& s : x) s = {{u(rng), u(rng)}, {u(rng), u(rng)}};
    ControlSeq U(4);
    for (auto& uk : U) uk = {u(rng), u(rng)};
    const QuadraticGoalCost cost = build_cost(pr);
    const CostEval c = cost(x, U);
    Eigen::VectorXd xflat(16);
    for (int k = 0; k < 4; ++k) xflat.segment<4>(4 * k) = x[k].to_vector();
    auto fx = [&](const Eigen::VectorXd& v) {
      StateTraj xs(4);
      for (int k = 0; k < 4; ++k) xs[k] = RobotState::from_vector(v.segment<4>(4 * k));
      return cost.value(xs, U);
    };
    auto fu = [&](const Eigen::VectorXd& v) { return cost.value(x, unflatten(v)); };
    const Eigen::VectorXd gx = oracle::central_difference(fx, xflat, 1e-6);
    const Eigen::VectorXd gu = oracle::central_difference(fu, flatten(U), 1e-6);
    Eigen::VectorXd jx(16);
    for (int k = 0; k < 4; ++k) jx.segment<4>(4 * k) = c.jac_x[k];
    EXPECT_LE((gx - jx).norm() / jx.norm(), 1e-6);
    EXPECT_LE((gu - c.jac_u).norm() / c.jac_u.norm(), 1e-6);
  }
}

TEST(BuildBlocks, NoObstaclesOnlyBoxes) {
  NMPCProblem pr;
  pr.horizon_N = 5;
  const ConstraintBlocks b = build_blocks(pr, rollout(pr.x0, ControlSeq(5), pr.dt));
  ASSERT_EQ(b.size(), 5u);
  for (int k = 0; k < 5; ++k) {
    EXPECT_EQ(kind_of(b[k].projector), ProjectorKind::StateBox);
    EXPECT_EQ(b[k].selector.step, k + 1);
    EXPECT_EQ(b[k].selector.quantity, Quantity::Velocity);
  }
}

TEST(BuildBlocks, StaticObstacleApexAtOrigin) {
  NMPCProblem pr;
  pr.horizon_N = 3;
  pr.obstacles.push_back({Disk({1, 0}, 0.1), {0, 0}, false});
  const ConstraintBlocks b = build_blocks(pr, rollout(pr.x0, ControlSeq(3), pr.dt));
  ASSERT_EQ(b.size(), 6u);
  for (int k = 0; k < 3; ++k) {
    const auto& c = std::get<VOCone>(b[k].projector);
    EXPECT_EQ(c.apex, (Vec2{0, 0}));
    EXPECT_EQ(pr.obstacles[0].predicted_center(k + 1, pr.dt), (Vec2{1, 0}));
  }
}

TEST(BuildBlocks, DynamicObstaclePrediction) {
  NMPCProblem pr;
  pr.horizon_N = 6;
  pr.x0.p = {0.3, 0.75};
  const Obstacle o{Disk({2.0, 0.75}, 0.1), {-0.2, 0}, true};
  pr.obstacles.push_back(o);
  const Vec2 c4 = o.predicted_center(4, 0.05);
  EXPECT_NEAR(c4.x - 2.0, -0.04, 1e-15);
  EXPECT_EQ(c4.y, 0.75);
  const StateTraj ref = rollout(pr.x0, ControlSeq(6), pr.dt);
  const ConstraintBlocks b = build_blocks(pr, ref);
  const VOCone expect = build_vo_cone(ref[3].p, c4, o.velocity, inflated_radius(pr, o));
  const auto& got = std::get<VOCone>(b[3].projector);
  EXPECT_EQ(got.normals[0], expect.normals[0]);
  EXPECT_EQ(got.offsets[1], expect.offsets[1]);
  EXPECT_EQ(b[3].id, (BlockId{0, 4}));
  for (int k = 1; k <= 6; ++k) {
    const Vec2 d = o.predicted_center(k, pr.dt) - o.disk.center;
    EXPECT_NEAR(d.x, k * pr.dt * o.velocity.x, 1e-15);
  }
}

TEST(BuildBlocks, DegenerateConeBecomesFleeHalfplane) {
  NMPCProblem pr;
  pr.horizon_N = 2;
  pr.obstacles.push_back({Disk({0.1, 0}, 0.1), {0, 0}, false});
  const ConstraintBlocks b = build_blocks(pr, rollout(pr.x0, ControlSeq(2), pr.dt));
  EXPECT_EQ(kind_of(b[0].projector), ProjectorKind::Halfplane);
  const auto& h = std::get<Hyperplane>(b[0].projector);
  EXPECT_NEAR(h.normal().x, -1.0, 1e-12);
}

TEST(BuildBlocks, WrongReferenceLengthThrows) {
  NMPCProblem pr;
  pr.horizon_N = 3;
  EXPECT_THROW(build_blocks(pr, StateTraj(2)), InvalidParameter);
}

TEST(PlanStep, AtGoalDoesNothing) {
  NMPCProblem pr;
  pr.horizon_N = 4;
  pr.x0.p = pr.goal = {1, 1};
  const PlanStepOutput out = plan_step(pr, ControlSeq(4), {});
  EXPECT_LE(norm_inf(out.result.applied_u), 1e-6);
  EXPECT_FALSE(out.result.solver_failed);
}

TEST(PlanStep, WarmStartShift) {
  NMPCProblem pr;
  pr.horizon_N = 4;
  pr.goal = {1, 0.5};
  const PlanStepOutput out = plan_step(pr, ControlSeq(4), {});
  const ControlSeq& U = out.result.u_opt;
  ASSERT_EQ(out.next_warm.size(), 4u);
  for (int k = 0; k < 3; ++k) EXPECT_EQ(out.next_warm[k], U[k + 1]);
  EXPECT_EQ(out.next_warm[3], U[3]);
}

TEST(PlanStep, StaticSceneKeepsPredictedClearance) {
  NMPCProblem pr;
  pr.horizon_N = 6;
  pr.x0 = {{0.3, 0.75}, {0.3, 0}};
  pr.goal = {2.0, 0.8};
  pr.obstacles.push_back({Disk({0.9, 0.8}, 0.1), {0, 0}, false});
  pr.obstacles.push_back({Disk({1.5, 0.65}, 0.1), {0, 0}, false});
  const PlanStepOutput out = plan_step(pr, ControlSeq(6), {});
  for (double c : out.result.clearances) EXPECT_GT(c, 0.0);
  EXPECT_LE(norm_inf(out.result.applied_u), 1.0 + 1e-9);
}

TEST(PlanStep, NumericalFailureBrakes) {
  NMPCProblem pr;
  pr.horizon_N = 2;
  pr.x0.v = {0.02, -0.3};
  pr.goal = {std::numeric_limits<double>::quiet_NaN(), 0.0};
  const PlanStepOutput out = plan_step(pr, ControlSeq(2), {});
  EXPECT_TRUE(out.result.solver_failed);
  EXPECT_FALSE(out.result.failure.empty());
  EXPECT_NEAR(out.result.applied_u.x, -0.4, 1e-12);
  EXPECT_NEAR(out.result.applied_u.y, 1.0, 1e-12);
}

TEST(PlanStep, RejectsWrongWarmLength) {
  NMPCProblem pr;
  pr.horizon_N = 3;
  EXPECT_THROW(plan_step(pr, ControlSeq(2), {}), InvalidParameter);
}

TEST(AdmissibleControl, KeepsNextVelocityInBox) {
  const StateControlBounds b;
  const Vec2 u = admissible_control({1.0, -1.0}, {0.39, -0.38}, 0.05, b);
  EXPECT_NEAR(0.39 + u.x * 0.05, 0.4, 1e-12);
  EXPECT_NEAR(-0.38 + u.y * 0.05, -0.4, 1e-12);
  const Vec2 w = admissible_control({3.0, 0.2}, {0.0, 0.0}, 0.05, b);
  EXPECT_EQ(w, (Vec2{1.0, 0.2}));
}

TEST(ClosedLoop, GoalAtStartTerminatesImmediately) {
  Scenario sc;
  sc.name = "trivial";
  sc.robot.start = sc.robot.goal = {1, 1};
  const SimTrace t = run_closed_loop(sc, Method::GeoProVo);
  EXPECT_LE(t.rows.size(), 1u);
  EXPECT_TRUE(t.summary.reached_goal);
}

TEST(ClosedLoop, NavigationSceneHorizon6) {
  const SimTrace t = run_closed_loop(shipped("nav"), Method::GeoProVo, at_horizon(6));
  EXPECT_TRUE(t.summary.reached_goal);
  EXPECT_FALSE(t.summary.collision);
}

TEST(ClosedLoop, NavigationSceneHorizon2) {
  const SimTrace t = run_closed_loop(shipped("nav"), Method::GeoProVo, at_horizon(2));
  EXPECT_TRUE(t.summary.reached_goal);
  EXPECT_FALSE(t.summary.collision);
}

TEST(ClosedLoop, D1Horizon2CollisionFree) {
  const SimTrace t = run_closed_loop(shipped("D1"), Method::GeoProVo, at_horizon(2));
  EXPECT_FALSE(t.summary.collision);
  EXPECT_GE(t.summary.min_clearance, 0.0);
}

TEST(ClosedLoop, BoundsAndTimeGrid) {
  const Scenario sc = shipped("D2");
  for (Method m : {Method::GeoProVo, Method::GeoProEd}) {
    const SimTrace t = run_closed_loop(sc, m, at_horizon(6));
    ASSERT_FALSE(t.rows.empty());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      const TraceRow& r = t.rows[i];
      EXPECT_LE(norm_inf(r.v), 0.4 + 1e-6);
      EXPECT_LE(norm_inf(r.u), 1.0 + 1e-9);
      EXPECT_NEAR(r.t, (i + 1) * sc.params.dt, 1e-12);
      if (i > 0) {
        EXPECT_GT(r.t, t.rows[i - 1].t);
      }
    }
  }
}

TEST(ClosedLoop, SummaryRecomputable) {
  const SimTrace t = run_closed_loop(shipped("S2"), Method::GeoProVo, at_horizon(2));
  double mc = std::numeric_limits<double>::infinity();
  for (const auto& r : t.rows)
    for (double c : r.clearances) mc = std::min(mc, c);
  EXPECT_EQ(t.summary.min_clearance, mc);
  EXPECT_EQ(t.summary.collision, mc < 0.0);
  EXPECT_EQ(t.summary.steps, static_cast<long>(t.rows.size()));
}
