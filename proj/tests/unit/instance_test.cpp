#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <set>

#include "hqp/instance.hpp"

namespace hqp {
namespace {

TEST(PlantedAssignment, TwoIndividualsSplitEvenly) {
  const auto pi = ProportionVector::uniform(2);
  int first_is_zero = 0;
  for (std::uint64_t s = 0; s < 2000; ++s) {
    Rng rng = make_stream(5, s);
    const auto tau = sample_planted_assignment(2, pi, rng);
    ASSERT_EQ(tau.type_counts(), (std::vector<std::int64_t>{1, 1}));
    first_is_zero += tau[0] == 0;
  }
  // Binomial(2000, 1/2): 5 sigma is about 112.
  EXPECT_NEAR(first_is_zero, 1000, 112);
}

TEST(PlantedAssignment, CountsForcedAndDeterministic) {
  const ProportionVector pi({0.5, 0.25, 0.25});
  Rng a = make_stream(9, 3), b = make_stream(9, 3);
  const auto ta = sample_planted_assignment(4, pi, a);
  EXPECT_EQ(ta.type_counts(), (std::vector<std::int64_t>{2, 1, 1}));
  EXPECT_EQ(ta, sample_planted_assignment(4, pi, b));
  Rng c = make_stream(9, 3);
  EXPECT_THROW(sample_planted_assignment(3, pi, c), std::invalid_argument);
}

TEST(Pool, DeterministicAndMeanSize) {
  Rng a = make_stream(1, 1), b = make_stream(1, 1);
  EXPECT_EQ(sample_pool(50, 0.3, a), sample_pool(50, 0.3, b));

  const int n = 40, pools = 10000;
  const double alpha = 0.35;
  Rng rng = make_stream(2, 0);
  double total = 0.0;
  for (int i = 0; i < pools; ++i) {
    const auto p = sample_pool(n, alpha, rng);
    for (auto bit : p) total += bit;
  }
  const double mean = total / pools;
  EXPECT_NEAR(mean, alpha * n, 3.0 * std::sqrt(alpha * (1 - alpha) * n / pools));

  Rng tiny = make_stream(3, 0);
  int empty = 0;
  for (int i = 0; i < 100; ++i) {
    const auto p = sample_pool(10, 1e-9, tiny);
    empty += std::count(p.begin(), p.end(), 1) == 0;
  }
  EXPECT_EQ(empty, 100);
  EXPECT_THROW(sample_pool(3, 1.0, rng), std::invalid_argument);
  EXPECT_THROW(sample_pool(3, 0.0, rng), std::invalid_argument);
}

TEST(Histogram, HandCases) {
  const Assignment tau({0, 1}, 2);
  EXPECT_EQ(histogram_of(tau, Pool{1, 0}), (Histogram{1, 0}));
  EXPECT_EQ(histogram_of(tau, Pool{0, 0}), (Histogram{0, 0}));
  const Assignment star({0, 1, 2, 0}, 3);
  EXPECT_EQ(histogram_of(star, Pool{1, 1, 1, 1}), (Histogram{2, 1, 1}));
  EXPECT_THROW(histogram_of(tau, Pool{1}), std::invalid_argument);
}

TEST(QueryCount, RoundingAndClamp) {
  EXPECT_EQ(query_count_for_gamma(16, std::log(2.0)), 4);
  EXPECT_EQ(query_count_for_gamma(8, 1.0), 4);
  EXPECT_EQ(query_count_for_gamma(100, 1e-9), 1);
  EXPECT_THROW(query_count_for_gamma(1, 1.0), std::invalid_argument);
  EXPECT_THROW(query_count_for_gamma(10, 0.0), std::invalid_argument);
  EXPECT_THROW(query_count_for_gamma(10, -1.0), std::invalid_argument);
}

TEST(Params, Validation) {
  InstanceParams p{6, 2, ProportionVector::uniform(2), 0.5, 3, 0};
  EXPECT_NO_THROW(p.validate());
  auto bad = p;
  bad.n = 5;  // n * pi not integral
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = p;
  bad.d = 3;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = p;
  bad.m = 0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = p;
  bad.alpha = 1.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(GenerateInstance, HistogramsMatchAndStreamsDiffer) {
  const InstanceParams p{12, 3, ProportionVector({0.5, 0.25, 0.25}), 0.4, 7, 42};
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto inst = generate_instance(p, s);
    ASSERT_EQ(inst.m(), 7);
    for (int a = 0; a < inst.m(); ++a) EXPECT_EQ(inst.histograms[a], histogram_of(inst.tau_star, inst.pools[a]));
    EXPECT_EQ(inst.tau_star.type_counts(), (std::vector<std::int64_t>{6, 3, 3}));
  }
  EXPECT_EQ(generate_instance(p, 4), generate_instance(p, 4));
  EXPECT_NE(generate_instance(p, 4).pools, generate_instance(p, 5).pools);

  const Assignment fixed({0, 0, 0, 0, 0, 0, 1, 1, 1, 2, 2, 2}, 3);
  const auto inst = generate_instance(p, fixed, 9);
  EXPECT_EQ(inst.tau_star, fixed);
}

TEST(InstanceJson, RoundTripAndRejection) {
  const InstanceParams p{6, 2, ProportionVector::uniform(2), 0.5, 3, 17};
  const auto inst = generate_instance(p, 1);
  EXPECT_EQ(instance_from_json(instance_to_json(inst)), inst);

  const auto path = std::filesystem::temp_directory_path() / "hqp_instance_test.json";
  write_instance(inst, path);
  EXPECT_EQ(read_instance(path), inst);
  std::filesystem::remove(path);
  EXPECT_THROW(read_instance(path), std::runtime_error);

  EXPECT_THROW(instance_from_json("{not json"), std::invalid_argument);
  EXPECT_THROW(instance_from_json("{}"), std::invalid_argument);
  std::string tampered = instance_to_json(inst);
  // Type labels are written 1-based; 3 is out of range for d = 2.
  tampered.replace(tampered.find("\"tau_star\": [\n    ") + 18, 1, "3");
  EXPECT_THROW(instance_from_json(tampered), std::invalid_argument);
}

TEST(InstanceJson, TamperedHistogramRejected) {
  const InstanceParams p{4, 2, ProportionVector::uniform(2), 0.5, 1, 3};
  auto inst = make_instance(p, Assignment({0, 1, 0, 1}, 2), {Pool{1, 1, 0, 0}});
  auto text = instance_to_json(inst);
  inst.histograms[0] = {2, 0};
  const auto wrong = instance_to_json(inst);
  EXPECT_NO_THROW(instance_from_json(text));
  EXPECT_THROW(instance_from_json(wrong), std::invalid_argument);
}

TEST(MakeInstance, AcceptsZeroPoolsAndChecksShape) {
  const InstanceParams p{2, 2, ProportionVector::uniform(2), 0.5, 1, 0};
  const auto inst = make_instance(p, Assignment({0, 1}, 2), {});
  EXPECT_EQ(inst.m(), 0);
  EXPECT_EQ(inst.params.m, 0);
  EXPECT_THROW(make_instance(p, Assignment({0, 1, 1}, 2), {}), std::invalid_argument);
  EXPECT_THROW(make_instance(p, Assignment({0, 1}, 3), {}), std::invalid_argument);
}

}  // namespace
}  // namespace hqp
