#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "fixtures.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#include "selinf/architectures.hpp"
#include "selinf/errors.hpp"

namespace {

using selinf::Composition;

std::vector<double> integer_grid(double last) {
  std::vector<double> g;
  for (double t = 0; t <= last; t += 1) g.push_back(t);
  return g;
}

TEST(Compose, CdfsMatchReference) {
  selinf::Rng rng(83);
  for (int i = 0; i < 50; ++i) {
    const auto m = gen::random_duration_model(rng);
    for (auto rule : {Composition::kPlus, Composition::kMin, Composition::kMax}) {
      const auto rt = selinf::compose_rt(m, rule, integer_grid(17));
      for (std::size_t a = 0; a < 2; ++a) {
        for (std::size_t b = 0; b < 2; ++b) {
          for (std::size_t g = 0; g < rt.grid.size(); ++g) {
            EXPECT_NEAR(rt.cdf[selinf::rt_index(a, b)][g], oracle::composed_cdf(m, rule, a, b, rt.grid[g]), 1e-14);
          }
        }
      }
    }
  }
}

TEST(Compose, RejectsBadModels) {
  selinf::DurationModel m;
  m.latent_pmf = {0.5, 0.5};
  m.duration[0][0] = {1, 2};
  m.duration[0][1] = {2, 1};  // shorter at r=1
  m.duration[1][0] = {1, 1};
  m.duration[1][1] = {1, 1};
  try {
    selinf::compose_rt(m, Composition::kMin, integer_grid(4));
    FAIL() << "expected a prolongation error";
  } catch (const selinf::UsageError& e) {
    EXPECT_NE(std::string(e.what()).find("r=1"), std::string::npos);
  }
  m.duration[0][1] = {2, 2};
  m.duration[1][0] = {-1, 1};
  EXPECT_THROW(selinf::compose_rt(m, Composition::kMin, integer_grid(4)), selinf::UsageError);
}

TEST(Compose, FromLatentModelPayloads) {
  selinf::Design d;
  d.inputs = {{"x", {"lo", "hi"}}, {"y", {"lo", "hi"}}};
  d.outputs = {{"T1", fixtures::numeric_values({1, 3, 5})}, {"T2", fixtures::numeric_values({2, 4})}};
  d.treatments = selinf::full_factorial(d.inputs);
  selinf::LatentModel lm;
  lm.latent_pmf = {0.3, 0.7};
  lm.response = {{{0, 1}, {1, 2}}, {{0, 0}, {1, 0}}};
  selinf::DurationModel dm;
  dm.latent_pmf = lm.latent_pmf;
  dm.duration[0] = {std::vector<double>{1, 3}, std::vector<double>{3, 5}};
  dm.duration[1] = {std::vector<double>{2, 2}, std::vector<double>{4, 2}};
  const auto a = selinf::compose_rt(d, lm, Composition::kPlus, integer_grid(10));
  const auto b = selinf::compose_rt(dm, Composition::kPlus, integer_grid(10));
  EXPECT_EQ(a.cdf, b.cdf);
}

TEST(Contrast, SignsUnderEachRule) {
  selinf::Rng rng(89);
  for (int i = 0; i < 100; ++i) {
    const auto m = gen::random_duration_model(rng);
    const auto grid = integer_grid(17);
    const auto pmin = selinf::interaction_contrast(selinf::compose_rt(m, Composition::kMin, grid));
    const auto pmax = selinf::interaction_contrast(selinf::compose_rt(m, Composition::kMax, grid));
    const auto pplus = selinf::interaction_contrast(selinf::compose_rt(m, Composition::kPlus, grid));
    for (double c : pmin.c) EXPECT_LE(c, 1e-12) << "model " << i;
    for (double c : pmax.c) EXPECT_GE(c, -1e-12) << "model " << i;
    for (double s : pplus.cumulative) EXPECT_GE(s, -1e-12) << "model " << i;
    EXPECT_LE(std::abs(pplus.total), 1e-12) << "model " << i;
  }
}

TEST(Contrast, TrapezoidOnStepFunction) {
  selinf::RtSystem rt;
  rt.grid = {0, 1, 2, 3};
  rt.cdf[0] = {0, 1, 1, 1};
  rt.cdf[1] = {0, 0, 1, 1};
  rt.cdf[2] = {0, 0, 1, 1};
  rt.cdf[3] = {0, 0, 1, 1};
  const auto p = selinf::interaction_contrast(rt);
  EXPECT_EQ(p.c, (std::vector<double>{0, 1, 0, 0}));
  EXPECT_EQ(p.cumulative, (std::vector<double>{0, 0.5, 1, 1}));
  EXPECT_EQ(p.total, 1.0);
}

TEST(Contrast, MinFixtureHasUnitDip) {
  // a1 <= b1 <= a2 <= b2 with a single latent value.
  selinf::DurationModel m;
  m.latent_pmf = {1.0};
  m.duration[0] = {std::vector<double>{2}, std::vector<double>{7}};
  m.duration[1] = {std::vector<double>{4}, std::vector<double>{9}};
  const auto rt = selinf::compose_rt(m, Composition::kMin, integer_grid(12));
  const auto p = selinf::interaction_contrast(rt);
  for (std::size_t g = 0; g < rt.grid.size(); ++g) {
    const double t = rt.grid[g];
    EXPECT_EQ(p.c[g], (t >= 4 && t < 7) ? -1.0 : 0.0) << "t=" << t;
  }
  const auto r = selinf::classify_architecture(rt);
  EXPECT_TRUE(r.parallel_or);
  EXPECT_FALSE(r.parallel_and);
  EXPECT_FALSE(r.serial);
}

TEST(Classify, LabelsAndIndeterminateTotal) {
  selinf::DurationModel m;
  m.latent_pmf = {0.5, 0.5};
  m.duration[0] = {std::vector<double>{1, 2}, std::vector<double>{3, 4}};
  m.duration[1] = {std::vector<double>{1, 1}, std::vector<double>{2, 5}};
  const auto full = selinf::classify_architecture(selinf::compose_rt(m, Composition::kPlus, integer_grid(12)));
  EXPECT_TRUE(full.serial);
  EXPECT_TRUE(full.total_determinate);
  // Cut the grid before every process has finished.
  const auto cut = selinf::classify_architecture(selinf::compose_rt(m, Composition::kPlus, integer_grid(6)));
  EXPECT_FALSE(cut.total_determinate);
  EXPECT_EQ(cut.serial, cut.min_cumulative >= -1e-9);

  selinf::RtSystem bad;
  bad.grid = {0, 1, 2};
  bad.cdf = {std::vector<double>{0, 1, 1}, std::vector<double>{1, 1, 1}, std::vector<double>{0, 0, 1},
             std::vector<double>{0, 1, 1}};
  // c = (-1, 1, 0): both signs, and a nonzero total with every cdf at 1.
  const auto r = selinf::classify_architecture(bad);
  EXPECT_TRUE(r.labels().empty());
  EXPECT_TRUE(selinf::to_test_report(r).ruled_out());
}

TEST(Classify, ValidationProblems) {
  selinf::RtSystem rt;
  EXPECT_FALSE(selinf::validate_rt(rt).empty());
  rt.grid = {0, 1, 1};
  for (auto& f : rt.cdf) f = {0, 0.5, 1};
  EXPECT_FALSE(selinf::validate_rt(rt).empty());
  rt.grid = {0, 1, 2};
  EXPECT_TRUE(selinf::validate_rt(rt).empty());
  rt.cdf[2] = {0, 0.6, 0.5};
  EXPECT_FALSE(selinf::validate_rt(rt).empty());
  rt.cdf[2] = {0, 0.5};
  EXPECT_THROW(selinf::interaction_contrast(rt), selinf::UsageError);
}

}  // namespace
