#include "selinf/distance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "selinf/errors.hpp"

namespace selinf {

namespace {

// Distance kernel between a value of output k and a value of output k2.
class Kernel {
 public:
  Kernel(const MetricSpec& metric, const Design& design) : metric_(metric) {
    if (const auto* pm = std::get_if<PowerMetric>(&metric)) {
      p_ = pm->p;
      for (const auto& out : design.outputs) payloads_.push_back(out.numeric_payloads());
    }
  }

  double operator()(std::size_t k, std::size_t a, std::size_t k2, std::size_t b) const {
    if (const auto* cm = std::get_if<ClassificationMetric>(&metric_)) {
      return cm->classes[k][a] < cm->classes[k2][b] ? 1.0 : 0.0;
    }
    const double x = payloads_[k][a];
    const double y = payloads_[k2][b];
    if (!(x < y)) return 0.0;
    return p_ == 0.0 ? 1.0 : std::pow(y - x, p_);
  }

 private:
  const MetricSpec& metric_;
  double p_ = 1.0;
  std::vector<std::vector<double>> payloads_;
};

// d(A^k, A^k2) and d(A^k2, A^k) from the joint pmf of one treatment.
std::pair<double, double> directed_distances(const JointPmf& pmf, const Kernel& kernel, std::size_t k,
                                             std::size_t k2) {
  if (k == k2) return {0.0, 0.0};
  const std::size_t idx[] = {k, k2};
  const JointPmf pair = marginalize(pmf, idx);
  double forward = 0.0, backward = 0.0;
  for (const auto& [tuple, mass] : pair.support()) {
    forward += kernel(k, tuple[0], k2, tuple[1]) * mass;
    backward += kernel(k2, tuple[1], k, tuple[0]) * mass;
  }
  return {forward, backward};
}

std::vector<std::size_t> realizing(const Design& d, const Coordinate& a, const Coordinate& b) {
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < d.treatments.size(); ++t) {
    if (d.treatments[t][a.first] == a.second && d.treatments[t][b.first] == b.second) out.push_back(t);
  }
  return out;
}

}  // namespace

std::string describe(const MetricSpec& metric, const Design& design) {
  std::ostringstream os;
  if (const auto* pm = std::get_if<PowerMetric>(&metric)) {
    os << "power:p=" << pm->p;
    return os.str();
  }
  const auto& cm = std::get<ClassificationMetric>(metric);
  os << "class:";
  for (std::size_t k = 0; k < cm.classes.size() && k < design.size(); ++k) {
    if (k) os << ';';
    os << design.outputs[k].name << '=';
    const std::size_t count = cm.classes[k].empty() ? 0 : *std::max_element(cm.classes[k].begin(), cm.classes[k].end()) + 1;
    for (std::size_t c = 0; c < count; ++c) {
      if (c) os << '|';
      os << '{';
      bool first = true;
      for (std::size_t v = 0; v < cm.classes[k].size(); ++v) {
        if (cm.classes[k][v] != c) continue;
        if (!first) os << ',';
        os << design.outputs[k].values[v].label;
        first = false;
      }
      os << '}';
    }
  }
  return os.str();
}

void check_metric(const MetricSpec& metric, const Design& design) {
  if (const auto* pm = std::get_if<PowerMetric>(&metric)) {
    if (!(pm->p >= 0.0 && pm->p <= 1.0)) throw UsageError("power metric exponent must lie in [0, 1]");
    for (const auto& out : design.outputs) {
      if (!out.has_numeric_payloads()) {
        throw Inapplicable("output " + out.name + " has values without numeric payloads");
      }
    }
    return;
  }
  const auto& cm = std::get<ClassificationMetric>(metric);
  if (cm.classes.size() != design.size()) {
    throw UsageError("classification metric needs one partition per output");
  }
  for (std::size_t k = 0; k < design.size(); ++k) {
    const auto& cls = cm.classes[k];
    const auto& out = design.outputs[k];
    if (cls.size() != out.values.size()) {
      throw UsageError("partition of output " + out.name + " does not cover its values");
    }
    std::set<std::size_t> used(cls.begin(), cls.end());
    if (used.size() < 2) throw UsageError("partition of output " + out.name + " needs at least two classes");
    if (*used.rbegin() + 1 != used.size()) {
      throw UsageError("partition of output " + out.name + " has an empty class");
    }
  }
}

std::pair<double, double> pairwise_distance(const System& system, const MetricSpec& metric,
                                            std::size_t treatment, std::size_t k, std::size_t k2) {
  const auto& d = system.design;
  if (d.size() == 0) throw UsageError("distance needs at least one output");
  if (treatment >= d.treatments.size()) throw UsageError("treatment index out of range");
  if (k >= d.size() || k2 >= d.size()) throw UsageError("output index out of range");
  check_metric(metric, d);
  const Kernel kernel(metric, d);
  return directed_distances(system.pmf(treatment), kernel, k, k2);
}

std::vector<TestSequence> enumerate_test_sequences(const Design& design, std::size_t max_length) {
  if (max_length < 3) throw UsageError("chain sequences need a maximum length of at least 3");
  std::vector<TestSequence> out;
  const std::size_t n = design.size();
  const auto m = design.level_counts();

  if (design.is_fully_crossed()) {
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t k2 = 0; k2 < n; ++k2) {
        if (k2 == k) continue;
        for (std::size_t j1 = 0; j1 < m[k]; ++j1) {
          for (std::size_t j2 = 0; j2 < m[k2]; ++j2) {
            for (std::size_t j3 = 0; j3 < m[k]; ++j3) {
              if (j3 == j1) continue;
              for (std::size_t j4 = 0; j4 < m[k2]; ++j4) {
                if (j4 == j2) continue;
                TestSequence s;
                s.nodes = {{k, j1}, {k2, j2}, {k, j3}, {k2, j4}};
                s.closing = realizing(design, s.nodes.front(), s.nodes.back());
                for (std::size_t i = 0; i + 1 < s.nodes.size(); ++i) {
                  s.links.push_back(realizing(design, s.nodes[i], s.nodes[i + 1]));
                }
                out.push_back(std::move(s));
              }
            }
          }
        }
      }
    }
    return out;
  }

  std::vector<Coordinate> nodes;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = 0; l < m[k]; ++l) nodes.emplace_back(k, l);
  }
  const std::size_t nn = nodes.size();
  std::vector<std::vector<std::vector<std::size_t>>> pair(nn, std::vector<std::vector<std::size_t>>(nn));
  for (std::size_t a = 0; a < nn; ++a) {
    for (std::size_t b = 0; b < nn; ++b) {
      if (nodes[a].first != nodes[b].first) pair[a][b] = realizing(design, nodes[a], nodes[b]);
    }
  }
  auto in_one_treatment = [&](const std::vector<std::size_t>& path) {
    for (const auto& t : design.treatments) {
      bool all = true;
      for (auto i : path) {
        if (t[nodes[i].first] != nodes[i].second) {
          all = false;
          break;
        }
      }
      if (all) return true;
    }
    return false;
  };

  std::vector<std::size_t> path;
  std::vector<bool> used(nn, false);
  auto dfs = [&](auto&& self) -> void {
    const std::size_t last = path.back();
    if (path.size() >= 3 && !pair[path.front()][last].empty() && !in_one_treatment(path)) {
      TestSequence s;
      for (auto i : path) s.nodes.push_back(nodes[i]);
      s.closing = pair[path.front()][last];
      for (std::size_t i = 0; i + 1 < path.size(); ++i) s.links.push_back(pair[path[i]][path[i + 1]]);
      out.push_back(std::move(s));
    }
    if (path.size() == max_length) return;
    for (std::size_t b = 0; b < nn; ++b) {
      if (used[b] || pair[last][b].empty()) continue;
      used[b] = true;
      path.push_back(b);
      self(self);
      path.pop_back();
      used[b] = false;
    }
  };
  for (std::size_t a = 0; a < nn; ++a) {
    used[a] = true;
    path.assign(1, a);
    dfs(dfs);
    used[a] = false;
  }
  return out;
}

DistanceResult run_distance_test(const System& system, const MetricSpec& metric, std::size_t max_length,
                                 double eps_test) {
  return run_distance_test(system, metric, enumerate_test_sequences(system.design, max_length), eps_test);
}

DistanceResult run_distance_test(const System& system, const MetricSpec& metric,
                                 const std::vector<TestSequence>& sequences, double eps_test) {
  const auto& d = system.design;
  check_metric(metric, d);
  const Kernel kernel(metric, d);
  const std::size_t n = d.size();

  // dist[t][k][k2] = d(A^k, A^k2) at treatment t.
  std::vector<std::vector<std::vector<double>>> dist(
      d.treatments.size(), std::vector<std::vector<double>>(n, std::vector<double>(n, 0.0)));
  for (std::size_t t = 0; t < d.treatments.size(); ++t) {
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t k2 = k + 1; k2 < n; ++k2) {
        const auto [f, b] = directed_distances(system.pmf(t), kernel, k, k2);
        dist[t][k][k2] = f;
        dist[t][k2][k] = b;
      }
    }
  }

  DistanceResult result;
  for (const auto& s : sequences) {
    const auto& first = s.nodes.front();
    const auto& last = s.nodes.back();
    ChainViolation chain;
    chain.sequence = s.nodes;
    chain.lhs = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    for (auto t : s.closing) {
      const double v = dist[t][first.first][last.first];
      lo = std::min(lo, v);
      if (v > chain.lhs) {
        chain.lhs = v;
        chain.lhs_treatment = t;
      }
    }
    if (chain.lhs - lo > eps_test) result.treatment_dependent = true;
    for (std::size_t i = 0; i < s.links.size(); ++i) {
      const auto& a = s.nodes[i];
      const auto& b = s.nodes[i + 1];
      double best = std::numeric_limits<double>::infinity();
      double hi = -best;
      std::size_t which = 0;
      for (auto t : s.links[i]) {
        const double v = dist[t][a.first][b.first];
        hi = std::max(hi, v);
        if (v < best) {
          best = v;
          which = t;
        }
      }
      if (hi - best > eps_test) result.treatment_dependent = true;
      chain.rhs += best;
      chain.link_treatments.push_back(which);
    }
    const double gap = chain.lhs - chain.rhs;
    if (!result.worst || gap > result.margin) {
      result.margin = gap;
      result.worst = std::move(chain);
    }
    ++result.checked;
  }
  result.pass = !result.worst || result.margin <= eps_test;
  return result;
}

std::string sequence_label(const std::vector<Coordinate>& nodes, const Design& design) {
  std::string s;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (i) s += " -> ";
    s += design.inputs[nodes[i].first].name + "=" + design.inputs[nodes[i].first].levels[nodes[i].second];
  }
  return s;
}

TestReport to_test_report(const DistanceResult& result, const MetricSpec& metric, const Design& design) {
  TestReport out;
  out.test = "distance";
  out.verdict = result.pass ? Verdict::kConsistent : Verdict::kRuledOut;
  std::ostringstream os;
  os << describe(metric, design) << ": " << result.checked << " chain inequalities";
  if (result.worst) {
    out.margin = result.margin;
    const auto& w = *result.worst;
    const auto& first = w.sequence.front();
    const auto& last = w.sequence.back();
    os << (result.pass ? ", tightest " : ", violated ") << sequence_label(w.sequence, design) << ": d("
       << design.outputs[first.first].name << ", " << design.outputs[last.first].name << ") = " << w.lhs
       << (result.pass ? " <= " : " > ") << w.rhs;
  } else {
    os << ", nothing to check";
  }
  out.summary = os.str();
  if (result.treatment_dependent) {
    out.notes.push_back("link distances depend on the realizing treatment; worst case over choices used");
  }
  return out;
}

}  // namespace selinf
