#pragma once

// Input-value-specific transformations B^k = g_k(lambda^k, A^k). Selective
// influences survive any such transformation, so a necessary test that
// fails on a transformed system rules out the original one as well.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "selinf/model.hpp"
#include "selinf/report.hpp"
#include "selinf/rng.hpp"

namespace selinf {

struct OutputTransform {
  std::vector<OutputValue> target;  // new value set of the output
  // map[level][value] is the target index of `value` at that level.
  std::vector<std::vector<std::size_t>> map;
};

struct TransformSpec {
  std::string name;
  std::vector<OutputTransform> outputs;  // one per output
};

// Identity on every output.
TransformSpec identity_transform(const Design& design);

// The same value map at every level of output k.
OutputTransform level_independent(const Design& design, std::size_t k, std::vector<OutputValue> target,
                                  std::vector<std::size_t> map);

// Throws UsageError when the spec is not total over the design's levels and
// values or points outside its target set.
void check_transform(const TransformSpec& spec, const Design& design);

// Pushes every treatment pmf forward, merging masses of values sent to the
// same target.
System apply_transform(const System& system, const TransformSpec& spec);

using SystemTest = std::function<TestReport(const System&)>;

// Runs `test` on every transformed system. Ruled out if any member is;
// inapplicable if every member is; consistent otherwise. An empty battery is
// consistent with a warning note.
TestReport battery(const System& system, const std::vector<TransformSpec>& specs, const SystemTest& test);

// Seeded generators.

// Level-independent random grouping of each output's values into 2..v_k
// classes (outputs with one value are left alone). Targets are labeled by
// class with payloads 0, 1, ... in class order.
std::vector<TransformSpec> random_groupings(const Design& design, std::size_t count, Rng& rng);

// Strictly increasing random re-spacing of numeric payloads, labels kept.
// Requires payloads on every output.
std::vector<TransformSpec> random_monotone_relabelings(const Design& design, std::size_t count, Rng& rng);

// Independent random permutation of the values of every output at every
// level. Bijective, so LP feasibility is preserved both ways.
std::vector<TransformSpec> random_bijections(const Design& design, std::size_t count, Rng& rng);

}  // namespace selinf
