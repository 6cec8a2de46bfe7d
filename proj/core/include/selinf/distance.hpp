#pragma once

// Distance tests. A p.q.-metric D on output values induces a distance
// between two jointly distributed outputs,
//   d(X, Y) = sum over x, y of D(x, y) Pr(X = x, Y = y),
// and under selective influences the coupling variables obey the chain
// inequality d(x1, xL) <= d(x1, x2) + ... + d(x{L-1}, xL). Each term is
// observable when its pair of levels lies in some allowable treatment.
//
// Two families of D are provided:
//   power:           D(x, y) = (y - x)^p for x < y, else 0, on numeric payloads
//   classification:  D(x, y) = 1 when class(x) < class(y), else 0, for
//                    declared ordered partitions of each value set
// The second equals the first with p = 0 applied to class indices.

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "selinf/feasibility.hpp"
#include "selinf/model.hpp"
#include "selinf/report.hpp"

namespace selinf {

struct PowerMetric {
  double p = 1.0;  // in [0, 1]
};

struct ClassificationMetric {
  // classes[k][v] is the class index of value v of output k. Classes of an
  // output are 0..l_k-1 with l_k >= 2, each nonempty.
  std::vector<std::vector<std::size_t>> classes;
};

using MetricSpec = std::variant<PowerMetric, ClassificationMetric>;

std::string describe(const MetricSpec& metric, const Design& design);

// Throws UsageError for p outside [0, 1] or a malformed partition, and
// Inapplicable when a power metric meets an output without payloads.
void check_metric(const MetricSpec& metric, const Design& design);

// (d(A^k, A^k'), d(A^k', A^k)) from the 2-marginal at one treatment.
// k == k' is allowed and measures an output against itself.
std::pair<double, double> pairwise_distance(const System& system, const MetricSpec& metric,
                                            std::size_t treatment, std::size_t k, std::size_t k2);

// Coupling coordinates x1..xL. The chain reads d(x1, xL) <= sum of the
// consecutive distances. `closing` lists the treatments realizing (x1, xL),
// `links[i]` those realizing (x_i, x_{i+1}).
struct TestSequence {
  std::vector<Coordinate> nodes;
  std::vector<std::size_t> closing;
  std::vector<std::vector<std::size_t>> links;
};

inline constexpr std::size_t kDefaultMaxChainLength = 6;

// Fully crossed designs: the quadruples (k=j1, k'=j2, k=j3, k'=j4) with
// k != k', j1 != j3, j2 != j4. Other designs: every sequence of distinct
// coordinates of length 3..max_length whose consecutive pairs and closing
// pair lie in allowable treatments, skipping sequences whose coordinates all
// lie in one treatment (those hold by the triangle inequality alone).
// Throws UsageError when max_length < 3.
std::vector<TestSequence> enumerate_test_sequences(const Design& design,
                                                   std::size_t max_length = kDefaultMaxChainLength);

struct ChainViolation {
  std::vector<Coordinate> sequence;
  double lhs = 0.0;
  double rhs = 0.0;
  std::size_t lhs_treatment = 0;
  std::vector<std::size_t> link_treatments;
};

struct DistanceResult {
  bool pass = true;
  std::size_t checked = 0;
  double margin = 0.0;  // max of lhs - rhs over checked chains
  // Worst chain found; present whenever at least one sequence was checked.
  std::optional<ChainViolation> worst;
  // Some link distance differed across its realizing treatments by more
  // than eps_test; the worst case over choices was used.
  bool treatment_dependent = false;
};

DistanceResult run_distance_test(const System& system, const MetricSpec& metric,
                                 std::size_t max_length = kDefaultMaxChainLength,
                                 double eps_test = 1e-9);

// Same, over pre-enumerated sequences.
DistanceResult run_distance_test(const System& system, const MetricSpec& metric,
                                 const std::vector<TestSequence>& sequences, double eps_test = 1e-9);

TestReport to_test_report(const DistanceResult& result, const MetricSpec& metric, const Design& design);

std::string sequence_label(const std::vector<Coordinate>& nodes, const Design& design);

}  // namespace selinf
