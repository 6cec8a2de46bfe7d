#include "selinf/cosphericity.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <tuple>

#include "selinf/errors.hpp"

namespace selinf {

double correlation(const JointPmf& pmf, const std::vector<double>& x, const std::vector<double>& y) {
  if (pmf.arity() != 2) throw UsageError("correlation needs a two-variable pmf");
  if (pmf.shape()[0] != x.size() || pmf.shape()[1] != y.size()) {
    throw UsageError("payload count does not match the pmf shape");
  }
  double mass = 0.0, mx = 0.0, my = 0.0;
  for (const auto& [t, p] : pmf.support()) {
    mass += p;
    mx += p * x[t[0]];
    my += p * y[t[1]];
  }
  mx /= mass;
  my /= mass;
  double vx = 0.0, vy = 0.0, cxy = 0.0, sx = 0.0, sy = 0.0;
  for (const auto& [t, p] : pmf.support()) {
    const double dx = x[t[0]] - mx;
    const double dy = y[t[1]] - my;
    vx += p * dx * dx;
    vy += p * dy * dy;
    cxy += p * dx * dy;
    sx += p * x[t[0]] * x[t[0]];
    sy += p * y[t[1]] * y[t[1]];
  }
  if (vx <= 1e-12 * std::max(1.0, sx) || vy <= 1e-12 * std::max(1.0, sy)) {
    throw Inapplicable("correlation undefined: zero variance");
  }
  return std::clamp(cxy / std::sqrt(vx * vy), -1.0, 1.0);
}

std::pair<double, double> cosphericity_sides(const std::array<double, 4>& rho) {
  auto sine = [](double r) { return std::sqrt(std::max(0.0, 1.0 - r * r)); };
  return {std::abs(rho[0] * rho[1] - rho[2] * rho[3]), sine(rho[0]) * sine(rho[1]) + sine(rho[2]) * sine(rho[3])};
}

std::vector<SubDesign> eligible_subdesigns(const Design& design) {
  std::vector<SubDesign> out;
  const std::size_t n = design.size();
  const auto m = design.level_counts();
  auto find = [&](std::size_t k, std::size_t a, std::size_t k2, std::size_t b) -> std::optional<std::size_t> {
    for (std::size_t t = 0; t < design.treatments.size(); ++t) {
      if (design.treatments[t][k] == a && design.treatments[t][k2] == b) return t;
    }
    return std::nullopt;
  };
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t k2 = k + 1; k2 < n; ++k2) {
      for (std::size_t i = 0; i < m[k]; ++i) {
        for (std::size_t i2 = i + 1; i2 < m[k]; ++i2) {
          for (std::size_t j = 0; j < m[k2]; ++j) {
            for (std::size_t j2 = j + 1; j2 < m[k2]; ++j2) {
              const auto a = find(k, i, k2, j), b = find(k, i, k2, j2);
              const auto c = find(k, i2, k2, j), d = find(k, i2, k2, j2);
              if (!a || !b || !c || !d) continue;
              out.push_back({k, k2, i, i2, j, j2, {*a, *b, *c, *d}});
            }
          }
        }
      }
    }
  }
  return out;
}

CosphericityReport run_cosphericity(const System& system, double eps_test) {
  const auto& d = system.design;
  const auto subs = eligible_subdesigns(d);
  if (subs.empty()) throw Inapplicable("no completely crossed 2x2 sub-design among the allowable treatments");
  std::vector<std::vector<double>> payloads;
  for (const auto& out : d.outputs) payloads.push_back(out.numeric_payloads());

  CosphericityReport report;
  for (const auto& s : subs) {
    CosphericityResult r;
    r.subdesign = s;
    try {
      const std::size_t idx[] = {s.k, s.k2};
      for (std::size_t c = 0; c < 4; ++c) {
        r.rho[c] = correlation(marginalize(system.pmf(s.treatments[c]), idx), payloads[s.k], payloads[s.k2]);
      }
    } catch (const Inapplicable&) {
      report.skipped.push_back(s);
      continue;
    }
    std::tie(r.lhs, r.rhs) = cosphericity_sides(r.rho);
    r.pass = r.lhs <= r.rhs + eps_test;
    r.boundary = std::abs(r.lhs - r.rhs) <= eps_test;
    report.pass = report.pass && r.pass;
    report.results.push_back(r);
  }
  if (report.results.empty()) throw Inapplicable("every eligible sub-design has a zero-variance output");
  return report;
}

TestReport to_test_report(const CosphericityReport& report, const Design& design) {
  TestReport out;
  out.test = "cosphericity";
  out.verdict = report.pass ? Verdict::kConsistent : Verdict::kRuledOut;
  const CosphericityResult* worst = nullptr;
  for (const auto& r : report.results) {
    if (!worst || r.lhs - r.rhs > worst->lhs - worst->rhs) worst = &r;
  }
  const auto& s = worst->subdesign;
  const auto& in1 = design.inputs[s.k];
  const auto& in2 = design.inputs[s.k2];
  std::ostringstream os;
  os << report.results.size() << " sub-designs; " << (report.pass ? "tightest " : "violated at ") << in1.name
     << " in {" << in1.levels[s.i] << "," << in1.levels[s.i2] << "} x " << in2.name << " in {" << in2.levels[s.j]
     << "," << in2.levels[s.j2] << "}: " << worst->lhs << (worst->pass ? " <= " : " > ") << worst->rhs;
  out.summary = os.str();
  out.margin = worst->lhs - worst->rhs;
  for (const auto& r : report.results) {
    if (r.boundary) {
      out.notes.push_back("boundary case within tolerance at the " + design.inputs[r.subdesign.k].name + "/" +
                          design.inputs[r.subdesign.k2].name + " sub-design");
      break;
    }
  }
  if (!report.skipped.empty()) {
    out.notes.push_back(std::to_string(report.skipped.size()) + " sub-designs skipped for zero variance");
  }
  return out;
}

}  // namespace selinf
