#include "selinf/marginal_selectivity.hpp"

#include <sstream>

namespace selinf {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::kConsistent:
      return "consistent";
    case Verdict::kRuledOut:
      return "ruled-out";
    case Verdict::kInapplicable:
      return "inapplicable";
  }
  return "unknown";
}

namespace {

// Calls fn(subset) for every subset of {0..n-1} of size `size`, in
// lexicographic order.
template <typename Fn>
void for_each_subset(std::size_t n, std::size_t size, Fn&& fn) {
  if (size == 0 || size > n) return;
  std::vector<std::size_t> idx(size);
  for (std::size_t i = 0; i < size; ++i) idx[i] = i;
  while (true) {
    fn(idx);
    std::size_t i = size;
    while (i > 0 && idx[i - 1] == n - size + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < size; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

MarginalReport check_marginal_selectivity(const System& system, std::size_t max_subset_size,
                                          double eps_test) {
  MarginalReport report;
  const auto& design = system.design;
  const std::size_t n = design.size();
  if (n < 2) return report;
  if (max_subset_size == 0 || max_subset_size > n - 1) max_subset_size = n - 1;

  const auto& treatments = design.treatments;
  for (std::size_t size = 1; size <= max_subset_size; ++size) {
    for_each_subset(n, size, [&](const std::vector<std::size_t>& subset) {
      // Marginals are computed once per treatment, then compared among
      // treatments sharing the subset's levels.
      std::vector<JointPmf> marginals;
      marginals.reserve(treatments.size());
      for (std::size_t t = 0; t < treatments.size(); ++t) {
        marginals.push_back(marginalize(system.pmf(t), subset));
      }
      for (std::size_t a = 0; a < treatments.size(); ++a) {
        for (std::size_t b = a + 1; b < treatments.size(); ++b) {
          bool same_levels = true;
          for (std::size_t k : subset) {
            if (treatments[a][k] != treatments[b][k]) {
              same_levels = false;
              break;
            }
          }
          if (!same_levels) continue;
          ++report.comparisons;
          const double d = sup_norm_distance(marginals[a], marginals[b]);
          if (!report.worst_pair || d > report.discrepancy) {
            report.discrepancy = d;
            report.worst_subset = subset;
            report.worst_pair = std::make_pair(a, b);
            report.total_variation = total_variation(marginals[a], marginals[b]);
          }
        }
      }
    });
  }
  report.pass = report.discrepancy <= eps_test;
  return report;
}

TestReport to_test_report(const MarginalReport& report, const Design& design) {
  TestReport out;
  out.test = "marginal";
  out.verdict = report.pass ? Verdict::kConsistent : Verdict::kRuledOut;
  out.margin = report.discrepancy;
  std::ostringstream os;
  if (!report.worst_pair) {
    os << "no pair of treatments shares the levels of any output subset";
  } else {
    os << "max sup-norm discrepancy " << report.discrepancy << " on outputs {";
    for (std::size_t i = 0; i < report.worst_subset.size(); ++i) {
      if (i) os << ", ";
      os << design.outputs[report.worst_subset[i]].name;
    }
    os << "} between " << design.treatment_label(report.worst_pair->first) << " and "
       << design.treatment_label(report.worst_pair->second) << " (total variation "
       << report.total_variation << ", " << report.comparisons << " comparisons)";
  }
  out.summary = os.str();
  return out;
}

}  // namespace selinf
