#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#include "selinf/marginal_selectivity.hpp"

namespace {

// Worst sup-norm discrepancy over all output subsets of size 1..n-1.
double oracle_discrepancy(const selinf::System& s) {
  const std::size_t n = s.design.size();
  double worst = 0.0;
  for (std::size_t mask = 1; mask + 1 < (std::size_t{1} << n); ++mask) {
    std::vector<std::size_t> subset;
    for (std::size_t k = 0; k < n; ++k) {
      if (mask >> k & 1) subset.push_back(k);
    }
    for (std::size_t a = 0; a < s.design.treatments.size(); ++a) {
      for (std::size_t b = 0; b < s.design.treatments.size(); ++b) {
        bool same = true;
        for (auto k : subset) same = same && s.design.treatments[a][k] == s.design.treatments[b][k];
        if (!same) continue;
        const auto x = oracle::marginal(s.pmf(a), subset);
        const auto y = oracle::marginal(s.pmf(b), subset);
        for (std::size_t c = 0; c < x.size(); ++c) worst = std::max(worst, std::abs(x[c] - y[c]));
      }
    }
  }
  return worst;
}

TEST(Marginal, WorkedViolationNamesOutputAndTreatments) {
  const auto s = fixtures::marginal_violation();
  const auto r = selinf::check_marginal_selectivity(s);
  EXPECT_FALSE(r.pass);
  EXPECT_NEAR(r.discrepancy, 0.1, 1e-12);
  EXPECT_EQ(r.worst_subset, std::vector<std::size_t>{1});
  ASSERT_TRUE(r.worst_pair);
  // lambda2 = 2 held fixed while lambda1 goes from 1 to 2.
  EXPECT_EQ(s.design.treatments[r.worst_pair->first], (selinf::Treatment{0, 1}));
  EXPECT_EQ(s.design.treatments[r.worst_pair->second], (selinf::Treatment{1, 1}));
  const auto report = selinf::to_test_report(r, s.design);
  EXPECT_TRUE(report.ruled_out());
  EXPECT_NE(report.summary.find("A2"), std::string::npos);
}

TEST(Marginal, PrBoxPassesExactly) {
  const auto r = selinf::check_marginal_selectivity(fixtures::pr_box());
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.discrepancy, 0.0);
  EXPECT_EQ(r.comparisons, 4u);
}

TEST(Marginal, AgreesWithBruteForce) {
  selinf::Rng rng(21);
  for (int i = 0; i < 150; ++i) {
    const auto c = gen::random_latent_case(rng);
    auto s = selinf::generate_system(c.design, c.model);
    // Perturb one treatment so failures are exercised too.
    if (i % 2 == 1 && s.design.size() >= 2) {
      auto& pmf = s.distributions[rng.below(s.distributions.size())];
      const auto first = pmf.support().begin()->first;
      selinf::Tuple other = first;
      other[0] = (other[0] + 1) % pmf.shape()[0];
      const double m = pmf.at(first) * 0.5;
      pmf.add(first, -m);
      pmf.add(other, m);
    }
    const auto r = selinf::check_marginal_selectivity(s, 0, 1e-12);
    const double want = oracle_discrepancy(s);
    EXPECT_NEAR(r.discrepancy, want, 1e-14) << "case " << i;
    EXPECT_EQ(r.pass, want <= 1e-12) << "case " << i;
  }
}

TEST(Marginal, SimpleTestSeesOnlySingleOutputs) {
  // Three outputs whose pairwise joints drift while every single output is fixed.
  selinf::Design d;
  d.inputs = {{"x", {"1", "2"}}, {"y", {"1"}}, {"z", {"1"}}};
  for (const char* name : {"A", "B", "C"}) d.outputs.push_back({name, fixtures::numeric_values({0, 1})});
  d.treatments = selinf::full_factorial(d.inputs);
  selinf::System s{d, {}};
  selinf::JointPmf same({2, 2, 2}), flip({2, 2, 2});
  same.add({0, 0, 0}, .5);
  same.add({1, 1, 1}, .5);
  flip.add({0, 0, 1}, .5);
  flip.add({1, 1, 0}, .5);
  s.distributions = {same, flip};
  EXPECT_TRUE(selinf::check_marginal_selectivity(s, 1).pass);
  const auto full = selinf::check_marginal_selectivity(s);
  EXPECT_FALSE(full.pass);
  EXPECT_EQ(full.worst_subset, (std::vector<std::size_t>{1, 2}));
}

TEST(Marginal, SingleOutputIsVacuous) {
  selinf::Design d;
  d.inputs = {{"x", {"1", "2"}}};
  d.outputs = {{"A", fixtures::numeric_values({0, 1})}};
  d.treatments = selinf::full_factorial(d.inputs);
  selinf::JointPmf a({2}), b({2});
  a.add({0}, 1);
  b.add({1}, 1);
  const auto r = selinf::check_marginal_selectivity({d, {a, b}});
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.comparisons, 0u);
}

}  // namespace
