#include "run.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <future>
#include <iomanip>
#include <map>
#include <memory>
#include <sstream>
#include <variant>

#include <nlohmann/json.hpp>

#include "selinf/architectures.hpp"
#include "selinf/cosphericity.hpp"
#include "selinf/distance.hpp"
#include "selinf/errors.hpp"
#include "selinf/feasibility.hpp"
#include "selinf/marginal_selectivity.hpp"
#include "selinf/rng.hpp"
#include "selinf/transforms.hpp"

namespace selinf::cli {

using Json = nlohmann::ordered_json;

const std::vector<std::string>& known_tests() {
  static const std::vector<std::string> tests{"marginal", "lp", "fine", "distance", "cosphericity", "battery", "contrast"};
  return tests;
}

namespace {

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Tolerances {
  double prob, test, cos, lp;
};

Json report_json(const TestReport& r) {
  Json j;
  j["test"] = r.test;
  j["verdict"] = std::string(to_string(r.verdict));
  j["summary"] = r.summary;
  j["margin"] = r.margin ? Json(*r.margin) : Json(nullptr);
  j["notes"] = r.notes;
  return j;
}

std::vector<std::string> names_of(const std::vector<std::size_t>& idx, const Design& d) {
  std::vector<std::string> out;
  for (auto k : idx) out.push_back(d.outputs[k].name);
  return out;
}

TestOutcome inapplicable(const std::string& test, const std::string& why) {
  TestOutcome o;
  o.report.test = test;
  o.report.verdict = Verdict::kInapplicable;
  o.report.summary = why;
  o.details_json = "{}";
  return o;
}

TestOutcome marginal_test(const System& sys, std::size_t max_subset, const Tolerances& tol) {
  const auto r = check_marginal_selectivity(sys, max_subset, tol.test);
  TestOutcome o;
  o.report = to_test_report(r, sys.design);
  Json d;
  d["worst_subset"] = names_of(r.worst_subset, sys.design);
  if (r.worst_pair) {
    d["worst_pair"] = {sys.design.treatment_label(r.worst_pair->first), sys.design.treatment_label(r.worst_pair->second)};
  } else {
    d["worst_pair"] = nullptr;
  }
  d["discrepancy"] = r.discrepancy;
  d["total_variation"] = r.total_variation;
  d["comparisons"] = r.comparisons;
  o.details_json = d.dump();
  return o;
}

TestOutcome lp_test(const System& sys, const Tolerances& tol) {
  const auto fs = build_feasibility_system(sys);
  const auto v = solve_feasibility(fs, tol.lp);
  TestOutcome o;
  o.report = to_test_report(v, fs);
  Json d;
  d["rows"] = fs.rows();
  d["columns"] = fs.cols();
  d["active_rows"] = v.active_rows;
  d["active_columns"] = v.active_columns;
  d["iterations"] = v.iterations;
  d["infeasibility"] = v.infeasibility;
  d["rank_bound"] = fs.rank_bound();
  if (v.witness) {
    Json w;
    w["residual"] = v.witness->residual;
    w["mass_error"] = v.witness->mass_error;
    Json support = Json::array();
    const auto& design = fs.design();
    for (std::size_t j = 0; j < v.witness->q.size(); ++j) {
      if (v.witness->q[j] <= 0.0) continue;
      Json assignment = Json::object();
      const auto label = fs.column_label(j);
      for (std::size_t k = 0; k < design.size(); ++k) {
        for (std::size_t l = 0; l < label[k].size(); ++l) {
          assignment["H[" + design.inputs[k].name + "=" + design.inputs[k].levels[l] + "]"] =
              design.outputs[k].values[label[k][l]].label;
        }
      }
      support.push_back({{"column", j}, {"assignment", assignment}, {"q", v.witness->q[j]}});
    }
    w["support"] = support;
    d["witness"] = w;
  } else {
    d["witness"] = nullptr;
  }
  o.details_json = d.dump();
  return o;
}

TestOutcome fine_test(const System& sys, const Tolerances& tol) {
  TestOutcome o;
  o.report = fine_inequality_check(sys, tol.test);
  o.details_json = "{}";
  return o;
}

Json distance_details(const DistanceResult& r, const MetricSpec& m, const Design& d) {
  Json j;
  j["metric"] = describe(m, d);
  j["checked"] = r.checked;
  j["treatment_dependent"] = r.treatment_dependent;
  if (r.worst) {
    Json w;
    w["sequence"] = sequence_label(r.worst->sequence, d);
    w["lhs"] = r.worst->lhs;
    w["rhs"] = r.worst->rhs;
    w["lhs_treatment"] = d.treatment_label(r.worst->lhs_treatment);
    Json links = Json::array();
    for (auto t : r.worst->link_treatments) links.push_back(d.treatment_label(t));
    w["link_treatments"] = links;
    j["worst"] = w;
  } else {
    j["worst"] = nullptr;
  }
  return j;
}

TestOutcome distance_test(const System& sys, const MetricSpec& metric, const std::vector<TestSequence>& seqs,
                          const Tolerances& tol) {
  TestOutcome o;
  try {
    const auto r = run_distance_test(sys, metric, seqs, tol.test);
    o.report = to_test_report(r, metric, sys.design);
    o.details_json = distance_details(r, metric, sys.design).dump();
  } catch (const Inapplicable& e) {
    o = inapplicable("distance", describe(metric, sys.design) + ": " + e.what());
  }
  return o;
}

TestOutcome cosphericity_test(const System& sys, const Tolerances& tol) {
  TestOutcome o;
  try {
    const auto r = run_cosphericity(sys, tol.cos);
    o.report = to_test_report(r, sys.design);
    Json list = Json::array();
    const auto& d = sys.design;
    for (const auto& c : r.results) {
      const auto& s = c.subdesign;
      list.push_back({{"inputs", {d.inputs[s.k].name, d.inputs[s.k2].name}},
                      {"levels", {{d.inputs[s.k].levels[s.i], d.inputs[s.k].levels[s.i2]},
                                  {d.inputs[s.k2].levels[s.j], d.inputs[s.k2].levels[s.j2]}}},
                      {"rho", c.rho},
                      {"lhs", c.lhs},
                      {"rhs", c.rhs},
                      {"pass", c.pass},
                      {"boundary", c.boundary}});
    }
    o.details_json = Json{{"subdesigns", list}, {"skipped", r.skipped.size()}}.dump();
  } catch (const Inapplicable& e) {
    o = inapplicable("cosphericity", e.what());
  }
  return o;
}

TestOutcome battery_test(const System& sys, const std::vector<MetricSpec>& metrics, std::vector<TransformSpec> specs,
                         const RunConfig& cfg, const Tolerances& tol) {
  const auto& d = sys.design;
  Rng rng(cfg.seed);
  auto groupings = random_groupings(d, cfg.battery_size, rng);
  specs.insert(specs.end(), groupings.begin(), groupings.end());
  bool numeric = true;
  for (const auto& out : d.outputs) numeric = numeric && out.has_numeric_payloads();
  if (numeric) {
    auto mono = random_monotone_relabelings(d, cfg.battery_size, rng);
    specs.insert(specs.end(), mono.begin(), mono.end());
  }
  const auto seqs = enumerate_test_sequences(d, cfg.max_length);

  Json members = Json::array();
  auto member = [&](const System& s) {
    TestReport combined;
    combined.test = "distance+cosphericity";
    std::size_t applicable = 0;
    std::string fail;
    std::vector<MetricSpec> ms = metrics;
    // Generated groupings carry their own class payloads; class metrics
    // written for the original values no longer apply after a transform.
    ms.erase(std::remove_if(ms.begin(), ms.end(),
                            [](const MetricSpec& m) { return std::holds_alternative<ClassificationMetric>(m); }),
             ms.end());
    if (ms.empty()) ms.push_back(PowerMetric{1.0});
    for (const auto& m : ms) {
      try {
        const auto r = run_distance_test(s, m, seqs, tol.test);
        ++applicable;
        if (!r.pass && fail.empty()) fail = to_test_report(r, m, s.design).summary;
      } catch (const Inapplicable&) {
      }
    }
    try {
      const auto r = run_cosphericity(s, tol.cos);
      ++applicable;
      if (!r.pass && fail.empty()) fail = to_test_report(r, s.design).summary;
    } catch (const Inapplicable&) {
    }
    combined.verdict = !fail.empty() ? Verdict::kRuledOut : applicable ? Verdict::kConsistent : Verdict::kInapplicable;
    combined.summary = fail;
    members.push_back({{"transform", specs[members.size()].name}, {"verdict", std::string(to_string(combined.verdict))}});
    return combined;
  };
  TestOutcome o;
  o.report = battery(sys, specs, member);
  o.details_json = Json{{"members", members}}.dump();
  return o;
}

TestOutcome contrast_test(const RtSystem& rt, const Tolerances& tol) {
  const auto r = classify_architecture(rt, tol.test);
  TestOutcome o;
  o.report = to_test_report(r);
  Json d;
  d["labels"] = r.labels();
  d["max_c"] = r.max_c;
  d["min_c"] = r.min_c;
  d["min_cumulative"] = r.min_cumulative;
  d["total"] = r.profile.total;
  d["total_determinate"] = r.total_determinate;
  d["c"] = r.profile.c;
  d["cumulative"] = r.profile.cumulative;
  o.details_json = d.dump();
  return o;
}

std::string format_number(double x) {
  std::ostringstream os;
  os << std::setprecision(6) << x;
  return os.str();
}

std::string render_text(const RunConfig& cfg, const Tolerances& tol, const std::vector<TestOutcome>& results, int exit_code) {
  std::ostringstream os;
  os << "selinf report (" << kReportSchema << ")\n";
  os << "input: " << cfg.input_path << "\n";
  os << "tolerances: eps_prob=" << format_number(tol.prob) << " eps_test=" << format_number(tol.test)
     << " eps_cosphericity=" << format_number(tol.cos) << " eps_lp=" << format_number(tol.lp) << "\n";
  os << "seed: " << cfg.seed << "\n\n";
  for (const auto& r : results) {
    os << std::left << std::setw(14) << r.report.test << std::setw(14) << to_string(r.report.verdict) << r.report.summary
       << "\n";
    for (const auto& n : r.report.notes) os << "    note: " << n << "\n";
  }
  os << "\noverall: " << (exit_code == 1 ? "ruled-out" : "consistent") << " (exit " << exit_code << ")\n";
  return os.str();
}

std::string render_json(const RunConfig& cfg, const Tolerances& tol, const std::vector<TestOutcome>& results, int exit_code) {
  Json j;
  j["schema"] = kReportSchema;
  j["input"] = cfg.input_path;
  Json c;
  c["tests"] = cfg.tests;
  c["metrics"] = cfg.metrics;
  c["transforms"] = cfg.transforms_path;
  c["tolerances"] = {{"eps_prob", tol.prob}, {"eps_test", tol.test}, {"eps_cosphericity", tol.cos}, {"eps_lp", tol.lp}};
  c["seed"] = cfg.seed;
  c["max_subset"] = cfg.max_subset;
  c["max_length"] = cfg.max_length;
  c["battery_size"] = cfg.battery_size;
  j["config"] = c;
  Json list = Json::array();
  for (const auto& r : results) {
    Json e = report_json(r.report);
    e["details"] = Json::parse(r.details_json);
    list.push_back(e);
  }
  j["results"] = list;
  j["overall"] = exit_code == 1 ? "ruled-out" : "consistent";
  j["exit_code"] = exit_code;
  return j.dump(2) + "\n";
}

RunOutcome usage_failure(const RunConfig& cfg, const std::string& message) {
  RunOutcome out;
  out.exit_code = 2;
  out.diagnostics = message;
  if (cfg.format == "json") {
    Json j;
    j["schema"] = kReportSchema;
    j["input"] = cfg.input_path;
    j["error"] = message;
    j["exit_code"] = 2;
    out.report = j.dump(2) + "\n";
  } else {
    out.report = "error: " + message + "\n";
  }
  return out;
}

void check_config(const RunConfig& cfg) {
  if (cfg.tests.empty()) throw Usage("select at least one test");
  for (const auto& t : cfg.tests) {
    if (std::find(known_tests().begin(), known_tests().end(), t) == known_tests().end()) {
      throw Usage("unknown test '" + t + "'");
    }
  }
  if (!(cfg.eps_prob > 0.0) || !(cfg.eps_lp > 0.0) || (cfg.eps_test && !(*cfg.eps_test > 0.0))) {
    throw Usage("tolerances must be positive");
  }
  if (cfg.format != "text" && cfg.format != "json") throw Usage("format must be text or json");
  if (cfg.max_length < 3) throw Usage("max-length must be at least 3");
}

bool wants(const RunConfig& cfg, const std::string& test) {
  return std::find(cfg.tests.begin(), cfg.tests.end(), test) != cfg.tests.end();
}

}  // namespace

RunOutcome run_document(const Document& input, const RunConfig& config) {
  RunConfig cfg = config;
  if (wants(cfg, "all")) {
    cfg.tests.clear();
    for (const auto& t : known_tests()) {
      if (t == "contrast" ? input.rt.has_value() : input.system.has_value()) cfg.tests.push_back(t);
    }
  }
  try {
    check_config(cfg);
    const Tolerances tol{cfg.eps_prob, cfg.eps_test.value_or(kDefaultTestEps),
                         cfg.eps_test.value_or(kDefaultCosphericityEps), cfg.eps_lp};

    std::optional<System> sys;
    if (input.system) {
      auto problems = validate_system(*input.system, tol.prob);
      if (!problems.empty()) {
        std::string msg = "invalid system:";
        for (const auto& p : problems) msg += "\n  " + p.message;
        throw Usage(msg);
      }
      sys = clip_negligible(*input.system, tol.prob);
    }
    if (input.rt) {
      if (auto problems = validate_rt(*input.rt, tol.prob); !problems.empty()) {
        throw Usage("invalid rt section: " + problems.front());
      }
    }
    for (const auto& t : cfg.tests) {
      if (t == "contrast" && !input.rt) throw Usage("test 'contrast' needs an rt section");
      if (t != "contrast" && !sys) throw Usage("test '" + t + "' needs inputs, outputs and treatments");
    }

    std::vector<MetricSpec> metrics;
    std::vector<TransformSpec> transforms;
    if (sys) {
      for (const auto& m : cfg.metrics) metrics.push_back(parse_metric(m, sys->design));
      if (!cfg.transforms_path.empty()) transforms = load_transforms(cfg.transforms_path, sys->design);
    }
    if (metrics.empty()) metrics.push_back(PowerMetric{1.0});

    if (!cfg.dump_matrix_path.empty()) {
      if (!sys) throw Usage("--dump-matrix needs a system");
      std::ofstream out(cfg.dump_matrix_path);
      if (!out) throw Usage("cannot write " + cfg.dump_matrix_path);
      out << format_matrix(build_feasibility_system(*sys));
    }

    // One job per result line, launched concurrently, collected in the
    // fixed test order.
    std::vector<std::function<TestOutcome()>> jobs;
    for (const auto& name : known_tests()) {
      if (!wants(cfg, name)) continue;
      if (name == "marginal") {
        jobs.push_back([&] { return marginal_test(*sys, cfg.max_subset, tol); });
      } else if (name == "lp") {
        jobs.push_back([&] { return lp_test(*sys, tol); });
      } else if (name == "fine") {
        jobs.push_back([&] { return fine_test(*sys, tol); });
      } else if (name == "distance") {
        auto seqs = std::make_shared<std::vector<TestSequence>>(enumerate_test_sequences(sys->design, cfg.max_length));
        for (const auto& m : metrics) {
          jobs.push_back([&, seqs, m] { return distance_test(*sys, m, *seqs, tol); });
        }
      } else if (name == "cosphericity") {
        jobs.push_back([&] { return cosphericity_test(*sys, tol); });
      } else if (name == "battery") {
        jobs.push_back([&] { return battery_test(*sys, metrics, transforms, cfg, tol); });
      } else if (name == "contrast") {
        jobs.push_back([&] { return contrast_test(*input.rt, tol); });
      }
    }
    std::vector<std::future<TestOutcome>> futures;
    for (auto& job : jobs) futures.push_back(std::async(std::launch::async, job));
    RunOutcome out;
    for (auto& f : futures) out.results.push_back(f.get());

    out.exit_code = 0;
    for (const auto& r : out.results) {
      if (r.report.ruled_out()) out.exit_code = 1;
    }
    out.report = cfg.format == "json" ? render_json(cfg, tol, out.results, out.exit_code)
                                      : render_text(cfg, tol, out.results, out.exit_code);
    return out;
  } catch (const Usage& e) {
    return usage_failure(cfg, e.what());
  } catch (const ParseError& e) {
    return usage_failure(cfg, e.what());
  } catch (const UsageError& e) {
    return usage_failure(cfg, e.what());
  } catch (const CapacityError& e) {
    return usage_failure(cfg, e.what());
  } catch (const SolverError& e) {
    return usage_failure(cfg, std::string("solver failure: ") + e.what());
  } catch (const std::exception& e) {
    return usage_failure(cfg, e.what());
  }
}

RunOutcome run(const RunConfig& cfg) {
  Document doc;
  try {
    doc = load_document(cfg.input_path);
  } catch (const ParseError& e) {
    return usage_failure(cfg, cfg.input_path + ": " + e.what());
  }
  return run_document(doc, cfg);
}

}  // namespace selinf::cli
