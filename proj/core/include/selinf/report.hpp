#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace selinf {

enum class Verdict {
  kConsistent,    // the test does not rule out selective influences
  kRuledOut,      // the test refutes selective influences
  kInapplicable,  // preconditions of the test are not met
};

std::string_view to_string(Verdict v);

// Common outcome of every test. `margin` is the amount by which the worst
// checked inequality is violated (positive) or satisfied (negative) when
// that notion applies.
struct TestReport {
  std::string test;
  Verdict verdict = Verdict::kInapplicable;
  std::string summary;
  std::optional<double> margin;
  std::vector<std::string> notes;

  bool ruled_out() const { return verdict == Verdict::kRuledOut; }
};

}  // namespace selinf
