#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <string>

#include "disorder/config.hpp"
#include "disorder/errors.hpp"
#include "disorder/model.hpp"
#include "test_models.hpp"

namespace disorder {
namespace {

using testing::m1;
using testing::m3;
using testing::m4;

bool has_violation(const ValidationReport& report, const std::string& needle) {
  for (const auto& v : report.violations) {
    if (v.find(needle) != std::string::npos) return true;
  }
  return false;
}

ModelSpec single_pair(double pi, double p) {
  ModelSpec s = m1(0, p, pi);
  s.pre_kernels = {Kernel::from_rows({{0.5, 0.5}, {0.5, 0.5}})};
  s.post_kernels = s.pre_kernels;
  return s;
}

TEST(Validate, UniformKernelsAreValid) {
  EXPECT_TRUE(validate(single_pair(0.0, 0.8)).ok());
  for (std::size_t d : {0, 1, 2}) {
    for (const ModelSpec& s : testing::all_models(d)) EXPECT_TRUE(validate(s).ok());
  }
}

TEST(Validate, RowNotStochastic) {
  ModelSpec s = m1();
  s.pre_kernels[0](1, 0) = 0.7;  // row sums to 0.9
  const ValidationReport report = validate(s);
  EXPECT_TRUE(has_violation(report, "kernel row not stochastic"));
  EXPECT_THROW(require_valid(s), ModelError);
}

TEST(Validate, ContinuationProbabilityMustBeInteriorPoint) {
  for (double p : {0.0, 1.0, 1.5}) {
    ModelSpec s = m1();
    s.p(0, 0) = p;
    EXPECT_TRUE(has_violation(validate(s), "p outside open interval")) << p;
  }
}

TEST(Validate, PriorsAndShapes) {
  ModelSpec s = m3();
  s.b(0, 0) = 0.5;
  EXPECT_TRUE(has_violation(validate(s), "b: pair prior does not sum to 1"));

  s = m3();
  s.pi(1, 1) = -0.1;
  EXPECT_TRUE(has_violation(validate(s), "pi outside [0,1]"));

  s = m3();
  s.p = PairMatrix(1, 2, 0.5);
  EXPECT_TRUE(has_violation(validate(s), "p: dimensions"));

  s = m1();
  s.x0 = 2;
  EXPECT_TRUE(has_violation(validate(s), "x0 outside alphabet"));
}

TEST(Validate, SupportsMustCoincide) {
  ModelSpec s = m4();
  s.post_kernels[0] = Kernel::from_rows({{0.0, 0.4, 0.6}, {0.1, 0.2, 0.7}, {0.2, 0.2, 0.6}});
  EXPECT_TRUE(has_violation(validate(s), "kernel supports differ at row 0"));

  // A zero shared by every kernel is fine.
  ModelSpec t = m1();
  t.alphabet_size = 3;
  t.pre_kernels = {Kernel::from_rows({{0.5, 0.5, 0.0}, {0.2, 0.3, 0.5}, {0.3, 0.3, 0.4}})};
  t.post_kernels = {Kernel::from_rows({{0.1, 0.9, 0.0}, {0.6, 0.2, 0.2}, {0.1, 0.1, 0.8}})};
  EXPECT_TRUE(validate(t).ok());
}

TEST(ThetaPrior, Examples) {
  const ModelSpec s = single_pair(0.3, 0.5);
  EXPECT_DOUBLE_EQ(theta_prior_pmf(s, 1), 0.3);
  EXPECT_DOUBLE_EQ(theta_prior_pmf(s, 2), 0.35);
  EXPECT_THROW(theta_prior_pmf(s, 0), std::invalid_argument);
}

TEST(ThetaPrior, PartialSumsMatchTailBound) {
  for (const ModelSpec& s : {m1(), m3(), m4()}) {
    double total = 0.0;
    for (std::size_t K = 1; K <= 60; ++K) {
      total += theta_prior_pmf(s, K);
      EXPECT_LE(total, 1.0 + 1e-15);
      if (K >= 2) {
        double tail = 0.0;
        for (std::size_t i = 0; i < s.l0(); ++i)
          for (std::size_t j = 0; j < s.l1(); ++j)
            tail += s.b(i, j) * (1.0 - s.pi(i, j)) * std::pow(s.p(i, j), double(K - 1));
        EXPECT_NEAR(1.0 - total, tail, 1e-14) << K;
      }
    }
  }
}

TEST(Hazard, Examples) {
  const ModelSpec s = single_pair(0.3, 0.8);
  EXPECT_NEAR(conditional_hazard(s, 0, 0, 1, 2), 0.16, 1e-15);
  EXPECT_DOUBLE_EQ(conditional_hazard(s, 0, 0, 0, 1), 0.3);
  EXPECT_NEAR(conditional_survival(s, 0, 0, 2, 1), 0.8, 1e-15);
  EXPECT_NEAR(conditional_survival(s, 0, 0, 5, 3), 0.512, 1e-15);
  EXPECT_NEAR(conditional_survival(single_pair(0.3, 0.5), 0, 0, 0, 1), 0.7, 1e-15);
  EXPECT_THROW(conditional_hazard(s, 0, 0, 1, 0), std::invalid_argument);
  EXPECT_THROW(conditional_survival(s, 1, 0, 1, 1), std::out_of_range);
}

TEST(Hazard, HazardsAndSurvivalPartition) {
  const ModelSpec s = m3();
  for (std::size_t n : {0, 1, 4}) {
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t j = 0; j < 2; ++j) {
        for (std::size_t k = 1; k <= 8; ++k) {
          double total = conditional_survival(s, i, j, n, k);
          for (std::size_t m = 1; m <= k; ++m) total += conditional_hazard(s, i, j, n, m);
          EXPECT_NEAR(total, 1.0, 1e-14);
        }
      }
    }
  }
}

TEST(Config, RoundTripIsExact) {
  for (const ModelSpec& s : {m1(), m3(1), m4(2)}) {
    EXPECT_EQ(parse_model(dump_model(s)), s);
  }
}

TEST(Config, RejectsUnknownAndMissingKeys) {
  std::string text = dump_model(m1());
  EXPECT_THROW(parse_model(text.substr(0, text.rfind('}')) + R"(, "extra": 1})"), ConfigError);
  EXPECT_THROW(parse_model(R"({"alphabet_size": 2})"), ConfigError);
  EXPECT_THROW(parse_model("{not json"), ConfigError);
  EXPECT_THROW(parse_model("[1, 2]"), ConfigError);
}

TEST(Config, ShippedConfigsMatchTestModels) {
  const std::filesystem::path dir = DISORDER_CONFIG_DIR;
  EXPECT_EQ(load_model(dir / "m1.json"), m1());
  EXPECT_EQ(load_model(dir / "m2.json"), testing::m2());
  EXPECT_EQ(load_model(dir / "m2_d1.json"), testing::m2(1));
  EXPECT_EQ(load_model(dir / "m3.json"), m3(1));
  EXPECT_EQ(load_model(dir / "m4.json"), m4(1));
  EXPECT_THROW(load_model(dir / "missing.json"), ConfigError);
}

}  // namespace
}  // namespace disorder
