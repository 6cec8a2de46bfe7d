#pragma once

// Canonical-form data model: inputs paired one-to-one with random outputs,
// a set of allowable treatments, and one joint pmf per treatment.
//
// Everything here is finite and discrete. The value set of each output is
// its declared list of values; events are arbitrary subsets of tuples.
// Levels, values, and treatments are identified by their declaration index
// and are ordered by declaration everywhere (never by label).

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace selinf {

inline constexpr double kDefaultProbEps = 1e-9;

// An input (external factor) and its ordered list of levels. A single level
// is allowed (a dummy input).
struct InputSpec {
  std::string name;
  std::vector<std::string> levels;
};

struct OutputValue {
  std::string label;
  std::optional<double> numeric;
};

// A random output and its ordered value set.
struct OutputSpec {
  std::string name;
  std::vector<OutputValue> values;

  bool has_numeric_payloads() const;
  // Throws Inapplicable when any value lacks a payload.
  std::vector<double> numeric_payloads() const;
};

// One level index per input, in input order.
using Treatment = std::vector<std::size_t>;

// One value index per variable.
using Tuple = std::vector<std::size_t>;

struct Design {
  std::vector<InputSpec> inputs;
  std::vector<OutputSpec> outputs;  // outputs[k] is paired with inputs[k]
  std::vector<Treatment> treatments;

  std::size_t size() const { return inputs.size(); }
  std::vector<std::size_t> value_counts() const;
  std::vector<std::size_t> level_counts() const;
  bool is_fully_crossed() const;
  std::optional<std::size_t> find_treatment(const Treatment& t) const;
  std::string treatment_label(std::size_t index) const;
  std::string treatment_label(const Treatment& t) const;
  std::string tuple_label(const Tuple& tuple) const;
};

// Probability masses over value tuples of `arity` discrete variables whose
// value sets have sizes `shape`. Tuples not present carry zero mass.
class JointPmf {
 public:
  JointPmf() = default;
  explicit JointPmf(std::vector<std::size_t> shape);

  // Adds `mass` to `tuple`. Throws UsageError on arity or range mismatch.
  void add(const Tuple& tuple, double mass);

  double at(const Tuple& tuple) const;
  std::size_t arity() const { return shape_.size(); }
  const std::vector<std::size_t>& shape() const { return shape_; }
  const std::map<Tuple, double>& support() const { return masses_; }
  double total() const;

  // Masses in [-eps, 0) set to zero.
  JointPmf clipped(double eps) const;

  friend bool operator==(const JointPmf&, const JointPmf&) = default;

 private:
  std::vector<std::size_t> shape_;
  std::map<Tuple, double> masses_;
};

// Projects onto the listed variables, in the listed order.
JointPmf marginalize(const JointPmf& pmf, std::span<const std::size_t> indices);

// Largest absolute difference of masses over the union of supports.
double sup_norm_distance(const JointPmf& a, const JointPmf& b);
// Half the L1 distance.
double total_variation(const JointPmf& a, const JointPmf& b);

struct System {
  Design design;
  std::vector<JointPmf> distributions;  // aligned with design.treatments

  const JointPmf& pmf(std::size_t treatment) const { return distributions.at(treatment); }
};

struct Violation {
  std::optional<std::size_t> treatment;
  std::string message;
};

std::vector<Violation> validate_design(const Design& design);
std::vector<Violation> validate_system(const System& system, double eps_prob = kDefaultProbEps);

// Copy of `system` with negligible negative masses set to zero.
System clip_negligible(const System& system, double eps_prob = kDefaultProbEps);

// Explicit latent-source model: R takes values 0..|R|-1 with the given
// probabilities; A^k at level l is response[k][l][r] (a value index of
// output k) when R = r.
struct LatentModel {
  std::vector<double> latent_pmf;
  std::vector<std::vector<std::vector<std::size_t>>> response;
};

// Distribution of (f_1(l_1, R), ..., f_n(l_n, R)) at each treatment, by
// exact enumeration over latent values.
System generate_system(const Design& design, const LatentModel& model);

// Full product of all input levels, in lexicographic order with the first
// input slowest.
std::vector<Treatment> full_factorial(const std::vector<InputSpec>& inputs);

}  // namespace selinf
