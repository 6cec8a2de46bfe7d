#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "selinf/model.hpp"
#include "selinf/report.hpp"

namespace selinf {

inline constexpr double kDefaultTestEps = 1e-9;

// Worst departure from (complete) marginal selectivity: for every subset of
// outputs up to a given size, the joint distribution of that subset may
// depend only on the levels of the paired inputs.
struct MarginalReport {
  std::vector<std::size_t> worst_subset;
  std::optional<std::pair<std::size_t, std::size_t>> worst_pair;  // treatment indices
  double discrepancy = 0.0;      // sup-norm difference of the two marginals
  double total_variation = 0.0;  // informational, same pair
  std::size_t comparisons = 0;
  bool pass = true;
};

// `max_subset_size` of 0 means n-1 (the complete test); 1 gives the simple
// test. Values above n-1 are clamped.
MarginalReport check_marginal_selectivity(const System& system, std::size_t max_subset_size = 0,
                                          double eps_test = kDefaultTestEps);

TestReport to_test_report(const MarginalReport& report, const Design& design);

}  // namespace selinf
