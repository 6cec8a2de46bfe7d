#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "selinf/io.hpp"
#include "selinf/report.hpp"

namespace selinf::cli {

inline constexpr const char* kReportSchema = "selinf-report/1";

// Test names in report order.
const std::vector<std::string>& known_tests();

struct RunConfig {
  std::string input_path;
  std::vector<std::string> tests{"marginal", "lp"};  // "all": every test the document supports
  std::vector<std::string> metrics;  // e.g. "power:p=1"; power:p=1 when empty
  std::string transforms_path;
  double eps_prob = 1e-9;
  std::optional<double> eps_test;  // unset: each test's own default
  double eps_lp = 1e-8;
  std::string format = "text";  // text | json
  std::uint64_t seed = 0;
  std::string dump_matrix_path;
  std::size_t max_subset = 0;  // 0: complete marginal test
  std::size_t max_length = 6;
  std::size_t battery_size = 10;  // generated transforms per kind
};

struct TestOutcome {
  TestReport report;
  std::string details_json;  // compact JSON object
};

struct RunOutcome {
  int exit_code = 0;  // 0 consistent, 1 ruled out, 2 usage or validation error
  std::string report;
  std::string diagnostics;
  std::vector<TestOutcome> results;
};

RunOutcome run(const RunConfig& config);

// Same, on a document already in memory. `config.input_path` is only echoed.
RunOutcome run_document(const Document& doc, const RunConfig& config);

}  // namespace selinf::cli
