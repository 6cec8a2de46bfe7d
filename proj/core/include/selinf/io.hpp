#pragma once

// JSON document format.
//
//   {
//     "inputs":  [{"name": "lambda1", "levels": ["1", "2"]}, ...],
//     "outputs": [{"name": "A1", "values": [{"label": "1", "numeric": 1}, ...]}, ...],
//     "treatments": [
//       {"levels": {"lambda1": "1", "lambda2": "1"},
//        "pmf": [{"tuple": ["1", "1"], "p": ".140"}, ...]},
//       ...
//     ],
//     "rt": {"grid": [0, 1, ...], "cdfs": {"1,1": [...], "1,2": [...], "2,1": [...], "2,2": [...]}}
//   }
//
// Levels and value labels may be written as strings or numbers. A value may
// be a bare number (label and payload), a bare string (label only) or an
// object. Probabilities are numbers, decimal strings or "a/b" fractions.
// Tuples are matched to values by label; tuples left out carry zero mass.
// The "rt" keys index the levels of the two inputs, first digit for the
// first input. A document may hold only "rt", only the system, or both.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "selinf/architectures.hpp"
#include "selinf/distance.hpp"
#include "selinf/model.hpp"
#include "selinf/transforms.hpp"

namespace selinf {

struct Document {
  std::optional<System> system;
  std::optional<RtSystem> rt;
};

// Throws ParseError naming the offending field path.
Document parse_document(std::string_view text);
Document load_document(const std::string& path);

std::string serialize_document(const Document& doc);

// Transform file:
//   {"transforms": [
//     {"name": "flip",
//      "outputs": [
//        {"output": "A1",
//         "values": [{"label": "+1", "numeric": 1}, {"label": "-1", "numeric": -1}],
//         "maps": {"1": {"1": "+1", "2": "-1"}, "2": {"1": "-1", "2": "+1"}}},
//        {"output": "A2", "values": [...], "map": {"1": "7", "2": "3"}}]}]}
// "map" applies at every level, "maps" gives one map per level of the
// paired input. Outputs not listed are left unchanged.
std::vector<TransformSpec> parse_transforms(std::string_view text, const Design& design);
std::vector<TransformSpec> load_transforms(const std::string& path, const Design& design);

// "power:p=0.5" or "class:A1={0,2}|{4};A2={0,1}|{2}" (every output listed,
// classes in order). Throws ParseError.
MetricSpec parse_metric(std::string_view spec, const Design& design);

// Strict probability literal: decimal, scientific or "a/b".
double parse_probability(std::string_view text);

}  // namespace selinf
