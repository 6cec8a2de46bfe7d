#include "selinf/model.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "selinf/errors.hpp"

namespace selinf {

bool OutputSpec::has_numeric_payloads() const {
  for (const auto& v : values) {
    if (!v.numeric) return false;
  }
  return true;
}

std::vector<double> OutputSpec::numeric_payloads() const {
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& v : values) {
    if (!v.numeric) {
      throw Inapplicable("output '" + name + "' value '" + v.label + "' has no numeric payload");
    }
    out.push_back(*v.numeric);
  }
  return out;
}

std::vector<std::size_t> Design::value_counts() const {
  std::vector<std::size_t> out;
  for (const auto& o : outputs) out.push_back(o.values.size());
  return out;
}

std::vector<std::size_t> Design::level_counts() const {
  std::vector<std::size_t> out;
  for (const auto& i : inputs) out.push_back(i.levels.size());
  return out;
}

bool Design::is_fully_crossed() const {
  std::size_t product = 1;
  for (const auto& i : inputs) product *= i.levels.size();
  std::set<Treatment> distinct(treatments.begin(), treatments.end());
  return distinct.size() == product;
}

std::optional<std::size_t> Design::find_treatment(const Treatment& t) const {
  for (std::size_t i = 0; i < treatments.size(); ++i) {
    if (treatments[i] == t) return i;
  }
  return std::nullopt;
}

std::string Design::treatment_label(std::size_t index) const {
  return treatment_label(treatments.at(index));
}

std::string Design::treatment_label(const Treatment& t) const {
  std::ostringstream os;
  os << '(';
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (k) os << ", ";
    const std::string name = k < inputs.size() ? inputs[k].name : "?";
    os << name << '=';
    if (k < inputs.size() && t[k] < inputs[k].levels.size()) {
      os << inputs[k].levels[t[k]];
    } else {
      os << "<undeclared #" << t[k] << '>';
    }
  }
  os << ')';
  return os.str();
}

std::string Design::tuple_label(const Tuple& tuple) const {
  std::ostringstream os;
  os << '(';
  for (std::size_t k = 0; k < tuple.size(); ++k) {
    if (k) os << ", ";
    if (k < outputs.size() && tuple[k] < outputs[k].values.size()) {
      os << outputs[k].name << '=' << outputs[k].values[tuple[k]].label;
    } else {
      os << '#' << tuple[k];
    }
  }
  os << ')';
  return os.str();
}

JointPmf::JointPmf(std::vector<std::size_t> shape) : shape_(std::move(shape)) {}

void JointPmf::add(const Tuple& tuple, double mass) {
  if (tuple.size() != shape_.size()) {
    throw UsageError("tuple arity " + std::to_string(tuple.size()) + " does not match pmf arity " +
                     std::to_string(shape_.size()));
  }
  for (std::size_t i = 0; i < tuple.size(); ++i) {
    if (tuple[i] >= shape_[i]) {
      throw UsageError("tuple entry " + std::to_string(i) + " out of range");
    }
  }
  masses_[tuple] += mass;
}

double JointPmf::at(const Tuple& tuple) const {
  auto it = masses_.find(tuple);
  return it == masses_.end() ? 0.0 : it->second;
}

double JointPmf::total() const {
  double s = 0.0;
  for (const auto& [t, m] : masses_) s += m;
  return s;
}

JointPmf JointPmf::clipped(double eps) const {
  JointPmf out = *this;
  for (auto& [t, m] : out.masses_) {
    if (m < 0.0 && m >= -eps) m = 0.0;
  }
  return out;
}

JointPmf marginalize(const JointPmf& pmf, std::span<const std::size_t> indices) {
  std::vector<std::size_t> shape;
  std::set<std::size_t> seen;
  for (std::size_t idx : indices) {
    if (idx >= pmf.arity()) {
      throw UsageError("marginal index " + std::to_string(idx) + " out of range for arity " +
                       std::to_string(pmf.arity()));
    }
    if (!seen.insert(idx).second) {
      throw UsageError("marginal index " + std::to_string(idx) + " repeated");
    }
    shape.push_back(pmf.shape()[idx]);
  }
  JointPmf out(shape);
  Tuple projected(indices.size());
  for (const auto& [tuple, mass] : pmf.support()) {
    for (std::size_t i = 0; i < indices.size(); ++i) projected[i] = tuple[indices[i]];
    out.add(projected, mass);
  }
  return out;
}

namespace {

template <typename Fn>
void for_each_union(const JointPmf& a, const JointPmf& b, Fn&& fn) {
  auto ia = a.support().begin();
  auto ib = b.support().begin();
  while (ia != a.support().end() || ib != b.support().end()) {
    if (ib == b.support().end() || (ia != a.support().end() && ia->first < ib->first)) {
      fn(ia->second, 0.0);
      ++ia;
    } else if (ia == a.support().end() || ib->first < ia->first) {
      fn(0.0, ib->second);
      ++ib;
    } else {
      fn(ia->second, ib->second);
      ++ia;
      ++ib;
    }
  }
}

}  // namespace

double sup_norm_distance(const JointPmf& a, const JointPmf& b) {
  double worst = 0.0;
  for_each_union(a, b, [&](double x, double y) { worst = std::max(worst, std::abs(x - y)); });
  return worst;
}

double total_variation(const JointPmf& a, const JointPmf& b) {
  double sum = 0.0;
  for_each_union(a, b, [&](double x, double y) { sum += std::abs(x - y); });
  return 0.5 * sum;
}

std::vector<Violation> validate_design(const Design& design) {
  std::vector<Violation> out;
  auto add = [&](std::string msg, std::optional<std::size_t> t = std::nullopt) {
    out.push_back({t, std::move(msg)});
  };
  if (design.inputs.size() != design.outputs.size()) {
    add("design has " + std::to_string(design.inputs.size()) + " inputs but " +
        std::to_string(design.outputs.size()) + " outputs");
  }
  if (design.inputs.empty()) add("design has no inputs");
  for (const auto& in : design.inputs) {
    if (in.levels.empty()) add("input '" + in.name + "' has no levels");
    std::set<std::string> labels(in.levels.begin(), in.levels.end());
    if (labels.size() != in.levels.size()) add("input '" + in.name + "' has duplicate level labels");
  }
  for (const auto& o : design.outputs) {
    if (o.values.empty()) add("output '" + o.name + "' has no values");
    std::set<std::string> labels;
    for (const auto& v : o.values) {
      if (!labels.insert(v.label).second) {
        add("output '" + o.name + "' has duplicate value '" + v.label + "'");
      }
      if (v.numeric && !std::isfinite(*v.numeric)) {
        add("output '" + o.name + "' value '" + v.label + "' has a non-finite payload");
      }
    }
  }
  if (design.treatments.empty()) add("design has no allowable treatments");
  std::set<Treatment> seen;
  for (std::size_t t = 0; t < design.treatments.size(); ++t) {
    const auto& tr = design.treatments[t];
    if (tr.size() != design.inputs.size()) {
      add("treatment #" + std::to_string(t) + " assigns " + std::to_string(tr.size()) +
              " levels for " + std::to_string(design.inputs.size()) + " inputs",
          t);
      continue;
    }
    for (std::size_t k = 0; k < tr.size(); ++k) {
      if (tr[k] >= design.inputs[k].levels.size()) {
        add("treatment " + design.treatment_label(t) + " assigns an undeclared level to input '" +
                design.inputs[k].name + "'",
            t);
      }
    }
    if (!seen.insert(tr).second) add("treatment " + design.treatment_label(t) + " is repeated", t);
  }
  return out;
}

std::vector<Violation> validate_system(const System& system, double eps_prob) {
  std::vector<Violation> out = validate_design(system.design);
  const auto& design = system.design;
  if (system.distributions.size() != design.treatments.size()) {
    out.push_back({std::nullopt, "system has " + std::to_string(system.distributions.size()) +
                                     " distributions for " +
                                     std::to_string(design.treatments.size()) + " treatments"});
    return out;
  }
  const auto shape = design.value_counts();
  for (std::size_t t = 0; t < system.distributions.size(); ++t) {
    const auto& pmf = system.distributions[t];
    const std::string where = "treatment " + design.treatment_label(t);
    if (pmf.shape() != shape) {
      out.push_back({t, where + ": pmf shape does not match the declared outputs"});
      continue;
    }
    bool finite = true;
    for (const auto& [tuple, mass] : pmf.support()) {
      if (!std::isfinite(mass)) {
        out.push_back({t, where + ": non-finite mass at " + design.tuple_label(tuple)});
        finite = false;
      } else if (mass < -eps_prob) {
        std::ostringstream os;
        os << where << ": negative mass " << mass << " at " << design.tuple_label(tuple);
        out.push_back({t, os.str()});
      }
    }
    const double total = pmf.total();
    if (finite && std::abs(total - 1.0) > eps_prob) {
      std::ostringstream os;
      os << where << ": mass sum " << total << " != 1";
      out.push_back({t, os.str()});
    }
  }
  return out;
}

System clip_negligible(const System& system, double eps_prob) {
  System out = system;
  for (auto& pmf : out.distributions) pmf = pmf.clipped(eps_prob);
  return out;
}

System generate_system(const Design& design, const LatentModel& model) {
  const std::size_t n = design.size();
  if (model.response.size() != n) {
    throw UsageError("latent model has response functions for " +
                     std::to_string(model.response.size()) + " outputs, design has " +
                     std::to_string(n));
  }
  const std::size_t latent_size = model.latent_pmf.size();
  for (std::size_t k = 0; k < n; ++k) {
    const auto& fk = model.response[k];
    if (fk.size() != design.inputs[k].levels.size()) {
      throw UsageError("response function " + std::to_string(k) +
                       " is not defined on every level of input '" + design.inputs[k].name + "'");
    }
    for (const auto& row : fk) {
      if (row.size() != latent_size) {
        throw UsageError("response function " + std::to_string(k) +
                         " is not defined on every latent value");
      }
      for (std::size_t v : row) {
        if (v >= design.outputs[k].values.size()) {
          throw UsageError("response function " + std::to_string(k) +
                           " maps outside the values of output '" + design.outputs[k].name + "'");
        }
      }
    }
  }
  System system{design, {}};
  const auto shape = design.value_counts();
  Tuple tuple(n);
  for (const auto& tr : design.treatments) {
    JointPmf pmf(shape);
    for (std::size_t r = 0; r < latent_size; ++r) {
      const double w = model.latent_pmf[r];
      if (w == 0.0) continue;
      for (std::size_t k = 0; k < n; ++k) tuple[k] = model.response[k][tr[k]][r];
      pmf.add(tuple, w);
    }
    system.distributions.push_back(std::move(pmf));
  }
  return system;
}

std::vector<Treatment> full_factorial(const std::vector<InputSpec>& inputs) {
  std::vector<Treatment> out;
  if (inputs.empty()) return out;
  for (const auto& in : inputs) {
    if (in.levels.empty()) return out;
  }
  Treatment t(inputs.size(), 0);
  while (true) {
    out.push_back(t);
    std::size_t k = inputs.size();
    while (k > 0) {
      --k;
      if (++t[k] < inputs[k].levels.size()) break;
      t[k] = 0;
      if (k == 0) return out;
    }
  }
}

}  // namespace selinf
