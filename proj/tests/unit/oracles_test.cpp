// The reference implementations get their own hand checks so that a
// shared mistake cannot hide behind agreement.

#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"

namespace hqp::oracle {
namespace {

TEST(Oracles, BruteCollisionHandValues) {
  EXPECT_NEAR(brute_collision(OverlapMatrix{{0, 1}, {1, 0}}, 0.5), 0.5, 1e-15);
  EXPECT_NEAR(brute_collision(OverlapMatrix{{0, 1}, {0, 0}}, 0.3), 0.7, 1e-15);
  EXPECT_NEAR(brute_collision(OverlapMatrix{{5, 0}, {0, 2}}, 0.3), 1.0, 1e-15);
  // Binom(2,a) = Binom(1,a): a^2(1-a)*... summed over k in {0,1}.
  const double a = 0.4;
  const double expect = std::pow(1 - a, 3) + 2 * a * (1 - a) * a;
  EXPECT_NEAR(brute_collision(OverlapMatrix{{0, 2}, {1, 0}}, a), expect, 1e-15);
}

TEST(Oracles, NaiveCountHandValues) {
  const InstanceParams p{2, 2, ProportionVector::uniform(2), 0.5, 1, 0};
  EXPECT_EQ(naive_count(make_instance(p, Assignment({0, 1}, 2), {})), 4);
  EXPECT_EQ(naive_count(make_instance(p, Assignment({0, 1}, 2), {Pool{1, 1}})), 2);
  EXPECT_EQ(naive_count(make_instance(p, Assignment({0, 1}, 2), {Pool{1, 0}, Pool{0, 1}})), 1);
}

TEST(Oracles, PartitionBruteForce) {
  EXPECT_NEAR(brute_min_partition_entropy({0.5, 0.3, 0.2}, 2), -0.8 * std::log(0.8) - 0.2 * std::log(0.2), 1e-15);
  EXPECT_EQ(brute_min_partition_entropy({0.5, 0.3, 0.2}, 1), 0.0);
  EXPECT_NEAR(brute_min_partition_entropy({0.25, 0.25, 0.25, 0.25}, 4), std::log(4.0), 1e-15);
  EXPECT_EQ(brute_gamma_up({0.5, 0.3, 0.2}).k, 2);
}

TEST(Oracles, BoxFlowDeficit) {
  // Fixed 0 -> 1 carries alpha * 2 = 1; the box on 1 -> 0 holds 3: feasible.
  EXPECT_NEAR(box_flow_deficit(WeightMatrix{{0, 2}, {3, 0}}, {{0, 1}}, 0.5), 0.0, 1e-15);
  // Box holds only 0.5: half a unit unmet.
  EXPECT_NEAR(box_flow_deficit(WeightMatrix{{0, 2}, {0.5, 0}}, {{0, 1}}, 0.5), 0.5, 1e-15);
  // Return path through vertex 2.
  const WeightMatrix w{{0, 4, 0}, {0, 0, 1}, {1, 0, 0}};
  EXPECT_NEAR(box_flow_deficit(w, {{0, 1}}, 0.25), 0.0, 1e-15);
  EXPECT_NEAR(box_flow_deficit(w, {{0, 1}}, 0.5), 1.0, 1e-15);
}

TEST(Oracles, BruteExcessHandValue) {
  EXPECT_NEAR(brute_excess(Assignment({0, 1}, 2), 0.5, 1), 1.5, 1e-15);
}

}  // namespace
}  // namespace hqp::oracle
