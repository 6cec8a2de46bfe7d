// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#include "run.hpp"
#include "selinf/cosphericity.hpp"
#include "selinf/distance.hpp"
#include "selinf/errors.hpp"
#include "selinf/feasibility.hpp"
#include "selinf/io.hpp"
#include "selinf/marginal_selectivity.hpp"
#include "selinf/transforms.hpp"

namespace {

using namespace selinf;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  // Records a failed check; the first one is kept as the detail.
  void require(bool ok, const std::string& what) {
    if (ok || !pass) return;
    pass = false;
    detail.str("");
    detail << what;
  }
};

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

std::string data(const std::string& name) { return std::string(SELINF_TEST_DATA_DIR) + "/" + name; }

double oracle_residual(const System& s, const std::vector<double>& q) {
  const auto m = oracle::matrix(s.design);
  const auto p = oracle::p_vector(s);
  double worst = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) sum += m[i][j] * q[j];
    worst = std::max(worst, std::abs(sum - p[i]));
  }
  return worst;
}

std::pair<double, double> table_entry(const System& s, const MetricSpec& m, std::size_t t) {
  return pairwise_distance(s, m, t, 0, 1);
}

bool table_matches(const System& s, const MetricSpec& m, const double (&fwd)[4], const double (&bwd)[4]) {
  for (std::size_t t = 0; t < 4; ++t) {
    const auto [f, b] = table_entry(s, m, t);
    if (!near(f, fwd[t], 1e-12) || !near(b, bwd[t], 1e-12)) return false;
  }
  return true;
}

TransformSpec worked_grouping(const Design& d) {
  TransformSpec spec{"grouping", {}};
  const auto target = fixtures::numeric_values({1, 2});
  spec.outputs.push_back(level_independent(d, 0, target, {1, 0, 0}));  // 0->2, 2->1, 4->1
  spec.outputs.push_back(level_independent(d, 1, target, {1, 0, 0}));  // 0->2, 1->1, 2->1
  return spec;
}

void golden_matrix(Outcome& o) {
  const auto fs = build_feasibility_system(fixtures::ivs_original());
  std::string golden;
  for (const auto& line : oracle::read_lines(data("pmq_matrix.txt"))) golden += line + "\n";
  o.require(format_matrix(fs) == golden, "formatted matrix differs from the golden text");
  const auto dense = fs.dense_matrix();
  const auto ref = oracle::matrix(fs.design());
  bool same = ref.size() == 16;
  for (std::size_t r = 0; same && r < 16; ++r) {
    for (std::size_t c = 0; c < 16; ++c) same = same && dense[r * 16 + c] == ref[r][c];
  }
  o.require(same, "dense matrix differs from the reference construction");
  if (o.pass) o.detail << "16x16 text and bits identical";
}

void lp_feasible(Outcome& o) {
  const auto s = fixtures::jdc();
  const auto fs = build_feasibility_system(s);
  const auto v = solve_feasibility(fs);
  o.require(v.feasible && v.witness.has_value(), "not feasible");
  if (!o.pass) return;
  const auto& q = v.witness->q;
  double sum = 0.0, lo = 0.0;
  for (double x : q) {
    sum += x;
    lo = std::min(lo, x);
  }
  const double res = oracle_residual(s, q);
  o.require(lo >= -1e-8, "negative witness entry");
  o.require(std::abs(sum - 1.0) <= 1e-8, "witness mass off");
  o.require(res <= 1e-8, "witness residual too large");
  const auto given = check_witness(fs, fixtures::reference_jdc_q());
  o.require(given.valid, "reference coupling fails the validator");
  if (o.pass) {
    o.detail << "witness residual " << res << ", mass error " << std::abs(sum - 1.0) << "; reference Q residual "
             << given.residual;
  }
}

void lp_infeasible(Outcome& o) {
  const auto s = fixtures::pr_box();
  const auto v = solve_feasibility(build_feasibility_system(s));
  const auto m = check_marginal_selectivity(s);
  o.require(!v.feasible, "PR box reported feasible");
  o.require(m.pass && m.discrepancy == 0.0, "marginal discrepancy not zero");
  if (o.pass) o.detail << "phase-I optimum " << v.infeasibility << ", marginal discrepancy " << m.discrepancy;
}

void marginal_failure(Outcome& o) {
  const auto s = fixtures::marginal_violation();
  const auto r = check_marginal_selectivity(s);
  o.require(!r.pass, "marginal selectivity passed");
  o.require(near(r.discrepancy, 0.1, 1e-12), "discrepancy not 0.1");
  o.require(r.worst_subset == std::vector<std::size_t>{1}, "worst subset is not A2");
  // Comparable A2 marginals share lambda2; the departure sits at lambda2 = 2.
  o.require(r.worst_pair && s.design.treatments[r.worst_pair->first] == Treatment{0, 1} &&
                s.design.treatments[r.worst_pair->second] == Treatment{1, 1},
            "unexpected treatment pair");
  if (o.pass) {
    o.detail << "discrepancy " << r.discrepancy << " on A2 between " << s.design.treatment_label(r.worst_pair->first)
             << " and " << s.design.treatment_label(r.worst_pair->second);
  }
}

void distance_pass(Outcome& o) {
  const auto s = fixtures::d1();
  o.require(table_matches(s, PowerMetric{1.0}, {.07, .07, .07, .55}, {1.07, 1.07, 1.07, 1.55}),
            "d1 table differs");
  const auto r = run_distance_test(s, PowerMetric{1.0});
  o.require(r.pass && r.checked == 8, "chain inequalities do not all hold");
  if (o.pass) o.detail << r.checked << " quadruple chains hold, tightest margin " << r.margin;
}

void distance_fail(Outcome& o) {
  const auto s = fixtures::d1();
  const auto grouped = apply_transform(s, worked_grouping(s.design));
  const double table[4] = {.07, .07, .07, .31};
  o.require(table_matches(grouped, PowerMetric{1.0}, table, table), "grouped d1 table differs");
  const auto r = run_distance_test(grouped, PowerMetric{1.0});
  o.require(!r.pass && r.worst && near(r.worst->lhs, .31, 1e-12) && near(r.worst->rhs, .21, 1e-12),
            "grouped test does not fail with .31 > .21");
  const ClassificationMetric cm{{{0, 0, 1}, {0, 0, 1}}};
  o.require(table_matches(s, cm, table, table), "classification table differs");
  const auto c = run_distance_test(s, cm);
  o.require(!c.pass && c.worst && near(c.worst->lhs, .31, 1e-12) && near(c.worst->rhs, .21, 1e-12),
            "classification test does not fail identically");
  if (o.pass) o.detail << "power: " << r.worst->lhs << " > " << r.worst->rhs << "; class: " << c.worst->lhs << " > " << c.worst->rhs;
}

void cosphericity(Outcome& o) {
  const auto a = run_cosphericity(fixtures::cosphericity_original());
  o.require(a.results.size() == 1, "expected one sub-design");
  if (!o.pass) return;
  const auto& x = a.results[0];
  o.require(near(x.rho[0], .7299, 5e-5) && near(x.rho[1], .7299, 5e-5) && near(x.rho[2], .7299, 5e-5) &&
                near(x.rho[3], -.6322, 5e-5),
            "original correlations differ");
  // The reference sides are the inequality evaluated at the four-decimal
  // correlations; the exact ones are .99411 and .99696.
  const auto [lhs4, rhs4] = cosphericity_sides({.7299, .7299, .7299, -.6322});
  o.require(near(lhs4, .9942, 5e-5) && near(rhs4, .9969, 5e-5), "reference sides not reproduced");
  o.require(a.pass && x.lhs <= x.rhs && near(x.lhs, lhs4, 2e-4) && near(x.rhs, rhs4, 2e-4),
            "original inequality differs");

  // 5 -> 2 on both outputs.
  const auto s = fixtures::cosphericity_original();
  TransformSpec g{"5to2", {}};
  const auto target = fixtures::numeric_values({0, 1, 2});
  g.outputs.push_back(level_independent(s.design, 0, target, {0, 1, 2}));
  g.outputs.push_back(level_independent(s.design, 1, target, {0, 1, 2}));
  const auto b = run_cosphericity(apply_transform(s, g));
  const auto& y = b.results.at(0);
  o.require(near(y.rho[0], .7742, 5e-5) && near(y.rho[1], .7742, 5e-5) && near(y.rho[2], .7742, 5e-5) &&
                near(y.rho[3], -.7742, 5e-5),
            "transformed correlations differ");
  o.require(!b.pass && near(y.lhs, 1.1988, 5e-4) && near(y.rhs, .8012, 5e-4), "transformed inequality differs");
  if (o.pass) {
    o.detail.setf(std::ios::fixed);
    o.detail.precision(4);
    o.detail << "pass " << x.lhs << " <= " << x.rhs << " (from rounded rho " << lhs4 << " <= " << rhs4 << "); fail "
             << y.lhs << " > " << y.rhs;
  }
}

void transform_fidelity(Outcome& o) {
  TransformSpec spec{"ivs", {}};
  spec.outputs.push_back(OutputTransform{fixtures::numeric_values({1, -1}), {{0, 1}, {1, 0}}});
  spec.outputs.push_back(OutputTransform{fixtures::numeric_values({7, 3}), {{0, 1}, {1, 0}}});
  const auto got = apply_transform(fixtures::ivs_original(), spec);
  const auto want = fixtures::ivs_transformed();
  for (std::size_t k = 0; k < 2; ++k) {
    const auto& a = got.design.outputs[k].values;
    const auto& b = want.design.outputs[k].values;
    bool same = a.size() == b.size();
    for (std::size_t v = 0; same && v < a.size(); ++v) same = a[v].label == b[v].label && a[v].numeric == b[v].numeric;
    o.require(same, "target values differ");
  }
  for (std::size_t t = 0; t < 4; ++t) o.require(got.pmf(t) == want.pmf(t), "B table differs");
  if (o.pass) o.detail << "four B tables identical";
}

void oracle_equivalence(Outcome& o) {
  Rng rng(20240901);
  std::size_t infeasible = 0, agree = 0;
  for (int i = 0; i < 500; ++i) {
    const auto s = gen::random_marginally_selective_binary(rng);
    const auto fine = fine_inequality_check(s);
    const bool lp = solve_feasibility(build_feasibility_system(s)).feasible;
    o.require(fine.verdict != Verdict::kInapplicable, "closed form inapplicable on instance " + std::to_string(i));
    const bool ok = (fine.verdict == Verdict::kConsistent) == lp;
    o.require(ok, "disagreement on instance " + std::to_string(i));
    agree += ok;
    infeasible += !lp;
  }
  if (o.pass) o.detail << agree << "/500 agree (" << infeasible << " infeasible)";
}

void generator_soundness(Outcome& o) {
  Rng rng(7);
  std::size_t distance_runs = 0, cos_runs = 0;
  for (int i = 0; i < 200; ++i) {
    const auto c = gen::random_latent_case(rng);
    const auto s = generate_system(c.design, c.model);
    const std::string tag = " (model " + std::to_string(i) + ")";

    o.require(check_marginal_selectivity(s, 0, 1e-12).pass, "marginal selectivity failed" + tag);
    o.require(solve_feasibility(build_feasibility_system(s)).feasible, "LP infeasible" + tag);

    std::vector<MetricSpec> metrics{PowerMetric{0.0}, PowerMetric{0.25}, PowerMetric{0.5}, PowerMetric{1.0}};
    bool partitionable = true;
    for (const auto& out : s.design.outputs) partitionable = partitionable && out.values.size() >= 2;
    if (partitionable) {
      for (const auto& g : random_groupings(s.design, 3, rng)) {
        ClassificationMetric cm;
        for (const auto& out : g.outputs) cm.classes.push_back(out.map[0]);
        metrics.push_back(cm);
      }
    }
    std::vector<TransformSpec> battery_specs{identity_transform(s.design)};
    for (auto& g : random_groupings(s.design, 2, rng)) battery_specs.push_back(std::move(g));
    for (auto& g : random_monotone_relabelings(s.design, 2, rng)) battery_specs.push_back(std::move(g));
    for (const auto& spec : battery_specs) {
      const auto t = apply_transform(s, spec);
      const auto seqs = enumerate_test_sequences(t.design);
      for (const auto& m : metrics) {
        if (std::holds_alternative<ClassificationMetric>(m) && spec.name != "identity") continue;
        const auto r = run_distance_test(t, m, seqs);
        ++distance_runs;
        o.require(r.pass, "distance test failed under " + spec.name + tag);
      }
      try {
        const auto cr = run_cosphericity(t);
        ++cos_runs;
        o.require(cr.pass, "cosphericity failed under " + spec.name + tag);
      } catch (const Inapplicable&) {
      }
    }
  }
  if (o.pass) o.detail << "200 models, " << distance_runs << " distance runs, " << cos_runs << " cosphericity runs, 0 refutations";
}

std::vector<double> grid_to(double last) {
  std::vector<double> g;
  for (double t = 0; t <= last; t += 1) g.push_back(t);
  return g;
}

void architecture_signs(Outcome& o) {
  Rng rng(11);
  double worst_min = -1, worst_max = 1, worst_cum = 1, worst_total = 0;
  for (int i = 0; i < 200; ++i) {
    const auto m = gen::random_duration_model(rng, 6, 8);
    // Durations are integers in 1..8, so sums stay below 17.
    const auto grid = grid_to(17);
    const auto pmin = interaction_contrast(compose_rt(m, Composition::kMin, grid));
    const auto pmax = interaction_contrast(compose_rt(m, Composition::kMax, grid));
    const auto pplus = interaction_contrast(compose_rt(m, Composition::kPlus, grid));
    for (double c : pmin.c) worst_min = std::max(worst_min, c);
    for (double c : pmax.c) worst_max = std::min(worst_max, c);
    for (double c : pplus.cumulative) worst_cum = std::min(worst_cum, c);
    worst_total = std::max(worst_total, std::abs(pplus.total));
  }
  o.require(worst_min <= 1e-12, "min contrast positive");
  o.require(worst_max >= -1e-12, "max contrast negative");
  o.require(worst_cum >= -1e-12 && worst_total <= 1e-12, "serial integral condition violated");

  DurationModel dm;
  dm.latent_pmf = {1.0};
  dm.duration[0] = {std::vector<double>{2}, std::vector<double>{7}};  // g1_1, g1_2
  dm.duration[1] = {std::vector<double>{4}, std::vector<double>{9}};  // g2_1, g2_2
  const auto rt = compose_rt(dm, Composition::kMin, grid_to(12));
  const auto p = interaction_contrast(rt);
  bool exact = true;
  for (std::size_t g = 0; g < rt.grid.size(); ++g) {
    exact = exact && p.c[g] == ((rt.grid[g] >= 4 && rt.grid[g] < 7) ? -1.0 : 0.0);
  }
  o.require(exact, "case (ii) fixture does not give c = -1 exactly on [4, 7)");
  if (o.pass) {
    o.detail << "max c under min " << worst_min << ", min c under max " << worst_max << ", min cumulative "
             << worst_cum << ", max |total| " << worst_total << "; fixture exact";
  }
}

std::vector<Verdict> verdicts(const cli::RunOutcome& r) {
  std::vector<Verdict> v;
  for (const auto& x : r.results) v.push_back(x.report.verdict);
  return v;
}

void cli_contract(Outcome& o) {
  cli::RunConfig lp;
  lp.input_path = data("jdc.json");
  lp.tests = {"lp"};
  const auto a = cli::run(lp);
  o.require(a.exit_code == 0 && a.results.size() == 1 && a.results[0].details_json.find("\"witness\":{") != std::string::npos,
            "worked system: expected exit 0 with a witness");

  cli::RunConfig box;
  box.input_path = data("prbox.json");
  box.tests = {"marginal", "lp"};
  const auto b = cli::run(box);
  o.require(b.exit_code == 1 && b.results.size() == 2 && b.results[0].report.verdict == Verdict::kConsistent &&
                b.results[1].report.ruled_out(),
            "PR box: expected exit 1 with marginal consistent and lp ruled out");

  cli::RunConfig empty;
  empty.input_path = data("empty_treatments.json");
  o.require(cli::run(empty).exit_code == 2, "empty treatments: expected exit 2");

  // Round trip on worked and generated systems.
  std::vector<Document> docs;
  for (const auto& s : {fixtures::jdc(), fixtures::pr_box(), fixtures::marginal_violation(), fixtures::d1(),
                        fixtures::d1_grouped(), fixtures::cosphericity_original(), fixtures::cosphericity_transformed(),
                        fixtures::ivs_original(), fixtures::ivs_transformed()}) {
    docs.push_back({s, std::nullopt});
  }
  Rng rng(13);
  for (int i = 0; i < 20; ++i) {
    const auto c = gen::random_latent_case(rng);
    docs.push_back({generate_system(c.design, c.model), std::nullopt});
  }
  DurationModel dm;
  dm.latent_pmf = {0.4, 0.6};
  dm.duration[0] = {std::vector<double>{1, 2}, std::vector<double>{3, 2}};
  dm.duration[1] = {std::vector<double>{2, 1}, std::vector<double>{2, 4}};
  docs.push_back({fixtures::jdc(), compose_rt(dm, Composition::kMin, grid_to(8))});

  cli::RunConfig all;
  all.tests = {"all"};
  all.seed = 3;
  std::size_t lines = 0;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const auto before = cli::run_document(docs[i], all);
    const auto after = cli::run_document(parse_document(serialize_document(docs[i])), all);
    o.require(before.exit_code != 2, "round trip: document " + std::to_string(i) + " rejected");
    o.require(verdicts(before) == verdicts(after) && before.exit_code == after.exit_code,
              "round trip changed verdicts of document " + std::to_string(i));
    lines += before.results.size();
  }
  if (o.pass) o.detail << "exit codes 0/1/2 as expected; " << docs.size() << " documents, " << lines << " verdicts preserved";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"golden matrix", golden_matrix},
      {"LP feasible case", lp_feasible},
      {"LP infeasible case", lp_infeasible},
      {"marginal selectivity failure", marginal_failure},
      {"distance test pass", distance_pass},
      {"distance test fail via transform", distance_fail},
      {"cosphericity", cosphericity},
      {"transform fidelity", transform_fidelity},
      {"oracle equivalence", oracle_equivalence},
      {"generator soundness", generator_soundness},
      {"architecture signs", architecture_signs},
      {"CLI contract", cli_contract},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.str().c_str());
    failed += !o.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
