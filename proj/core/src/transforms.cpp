#include "selinf/transforms.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "selinf/errors.hpp"

namespace selinf {

namespace {

std::vector<std::size_t> shuffled(std::size_t n, Rng& rng) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[rng.below(i)]);
  return p;
}

}  // namespace

TransformSpec identity_transform(const Design& design) {
  TransformSpec spec;
  spec.name = "identity";
  for (std::size_t k = 0; k < design.size(); ++k) {
    std::vector<std::size_t> map(design.outputs[k].values.size());
    std::iota(map.begin(), map.end(), 0);
    spec.outputs.push_back(level_independent(design, k, design.outputs[k].values, map));
  }
  return spec;
}

OutputTransform level_independent(const Design& design, std::size_t k, std::vector<OutputValue> target,
                                  std::vector<std::size_t> map) {
  if (k >= design.size()) throw UsageError("output index out of range");
  OutputTransform t;
  t.target = std::move(target);
  t.map.assign(design.inputs[k].levels.size(), map);
  return t;
}

void check_transform(const TransformSpec& spec, const Design& design) {
  if (spec.outputs.size() != design.size()) {
    throw UsageError("transform " + spec.name + " must give one map per output");
  }
  for (std::size_t k = 0; k < design.size(); ++k) {
    const auto& t = spec.outputs[k];
    const auto& out = design.outputs[k];
    if (t.target.empty()) throw UsageError("transform " + spec.name + ": empty target set for " + out.name);
    std::set<std::string> labels;
    for (const auto& v : t.target) {
      if (!labels.insert(v.label).second) {
        throw UsageError("transform " + spec.name + ": duplicate target value " + v.label + " for " + out.name);
      }
    }
    if (t.map.size() != design.inputs[k].levels.size()) {
      throw UsageError("transform " + spec.name + ": " + out.name + " needs one map per level of " +
                       design.inputs[k].name);
    }
    for (std::size_t l = 0; l < t.map.size(); ++l) {
      if (t.map[l].size() != out.values.size()) {
        throw UsageError("transform " + spec.name + ": map of " + out.name + " at " + design.inputs[k].name + "=" +
                         design.inputs[k].levels[l] + " leaves values unmapped");
      }
      for (auto target : t.map[l]) {
        if (target >= t.target.size()) {
          throw UsageError("transform " + spec.name + ": map of " + out.name + " points outside its target set");
        }
      }
    }
  }
}

System apply_transform(const System& system, const TransformSpec& spec) {
  const auto& d = system.design;
  check_transform(spec, d);
  System out;
  out.design = d;
  for (std::size_t k = 0; k < d.size(); ++k) out.design.outputs[k].values = spec.outputs[k].target;
  const auto shape = out.design.value_counts();
  for (std::size_t t = 0; t < d.treatments.size(); ++t) {
    const auto& levels = d.treatments[t];
    JointPmf pushed(shape);
    for (const auto& [tuple, mass] : system.pmf(t).support()) {
      Tuple image(tuple.size());
      for (std::size_t k = 0; k < tuple.size(); ++k) image[k] = spec.outputs[k].map[levels[k]][tuple[k]];
      pushed.add(image, mass);
    }
    out.distributions.push_back(std::move(pushed));
  }
  return out;
}

TestReport battery(const System& system, const std::vector<TransformSpec>& specs, const SystemTest& test) {
  TestReport out;
  out.test = "battery";
  if (specs.empty()) {
    out.verdict = Verdict::kConsistent;
    out.summary = "no transforms to run";
    out.notes.push_back("warning: empty battery, nothing was tested");
    return out;
  }
  std::size_t ruled_out = 0, inapplicable = 0;
  std::string first_failure;
  for (const auto& spec : specs) {
    TestReport r;
    try {
      r = test(apply_transform(system, spec));
    } catch (const Inapplicable& e) {
      r.verdict = Verdict::kInapplicable;
      r.summary = e.what();
    }
    if (r.verdict == Verdict::kInapplicable) {
      ++inapplicable;
    } else if (r.ruled_out()) {
      if (ruled_out++ == 0) {
        first_failure = spec.name + ": " + r.test + " " + r.summary;
        out.margin = r.margin;
      }
    }
  }
  std::ostringstream os;
  os << specs.size() << " transforms, " << ruled_out << " ruled out, " << inapplicable << " inapplicable";
  if (ruled_out) os << "; first failure " << first_failure;
  out.summary = os.str();
  if (ruled_out) {
    out.verdict = Verdict::kRuledOut;
  } else if (inapplicable == specs.size()) {
    out.verdict = Verdict::kInapplicable;
  } else {
    out.verdict = Verdict::kConsistent;
  }
  return out;
}

std::vector<TransformSpec> random_groupings(const Design& design, std::size_t count, Rng& rng) {
  std::vector<TransformSpec> specs;
  for (std::size_t c = 0; c < count; ++c) {
    TransformSpec spec;
    spec.name = "grouping#" + std::to_string(c);
    for (std::size_t k = 0; k < design.size(); ++k) {
      const std::size_t v = design.outputs[k].values.size();
      if (v < 2) {
        std::vector<std::size_t> id(v, 0);
        spec.outputs.push_back(level_independent(design, k, design.outputs[k].values, id));
        continue;
      }
      const std::size_t classes = 2 + rng.below(v - 1);
      const auto order = shuffled(v, rng);
      std::vector<std::size_t> map(v);
      for (std::size_t i = 0; i < v; ++i) map[order[i]] = i < classes ? i : rng.below(classes);
      std::vector<OutputValue> target;
      for (std::size_t i = 0; i < classes; ++i) target.push_back({"c" + std::to_string(i), static_cast<double>(i)});
      spec.outputs.push_back(level_independent(design, k, std::move(target), std::move(map)));
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

std::vector<TransformSpec> random_monotone_relabelings(const Design& design, std::size_t count, Rng& rng) {
  std::vector<TransformSpec> specs;
  for (std::size_t c = 0; c < count; ++c) {
    TransformSpec spec;
    spec.name = "monotone#" + std::to_string(c);
    for (std::size_t k = 0; k < design.size(); ++k) {
      const auto& out = design.outputs[k];
      const auto payloads = out.numeric_payloads();
      std::map<double, double> respaced;
      double at = rng.uniform(-1.0, 1.0);
      for (double x : std::set<double>(payloads.begin(), payloads.end())) {
        respaced[x] = at;
        at += rng.uniform(0.1, 2.0);
      }
      std::vector<OutputValue> target = out.values;
      for (auto& v : target) v.numeric = respaced[*v.numeric];
      std::vector<std::size_t> id(out.values.size());
      std::iota(id.begin(), id.end(), 0);
      spec.outputs.push_back(level_independent(design, k, std::move(target), std::move(id)));
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

std::vector<TransformSpec> random_bijections(const Design& design, std::size_t count, Rng& rng) {
  std::vector<TransformSpec> specs;
  for (std::size_t c = 0; c < count; ++c) {
    TransformSpec spec;
    spec.name = "bijection#" + std::to_string(c);
    for (std::size_t k = 0; k < design.size(); ++k) {
      OutputTransform t;
      t.target = design.outputs[k].values;
      for (std::size_t l = 0; l < design.inputs[k].levels.size(); ++l) {
        t.map.push_back(shuffled(t.target.size(), rng));
      }
      spec.outputs.push_back(std::move(t));
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

}  // namespace selinf
