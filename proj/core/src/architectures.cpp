#include "selinf/architectures.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "selinf/errors.hpp"

namespace selinf {

std::vector<std::string> validate_rt(const RtSystem& rt, double eps) {
  std::vector<std::string> problems;
  if (rt.grid.empty()) problems.push_back("time grid is empty");
  for (std::size_t i = 0; i < rt.grid.size(); ++i) {
    if (!std::isfinite(rt.grid[i])) problems.push_back("grid point " + std::to_string(i) + " is not finite");
    if (i && !(rt.grid[i] > rt.grid[i - 1])) problems.push_back("grid is not strictly increasing at point " + std::to_string(i));
  }
  static const char* names[] = {"1,1", "1,2", "2,1", "2,2"};
  for (std::size_t c = 0; c < 4; ++c) {
    const auto& f = rt.cdf[c];
    const std::string who = std::string("cdf ") + names[c];
    if (f.size() != rt.grid.size()) {
      problems.push_back(who + " has " + std::to_string(f.size()) + " points, grid has " + std::to_string(rt.grid.size()));
      continue;
    }
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (!std::isfinite(f[i]) || f[i] < -eps || f[i] > 1.0 + eps) {
        problems.push_back(who + " leaves [0, 1] at point " + std::to_string(i));
        break;
      }
      if (i && f[i] < f[i - 1] - eps) {
        problems.push_back(who + " decreases at point " + std::to_string(i));
        break;
      }
    }
  }
  return problems;
}

ContrastProfile interaction_contrast(const RtSystem& rt) {
  if (auto problems = validate_rt(rt); !problems.empty()) throw UsageError("invalid RT system: " + problems.front());
  ContrastProfile p;
  const std::size_t n = rt.grid.size();
  p.c.resize(n);
  p.cumulative.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    p.c[i] = rt.cdf[0][i] + rt.cdf[3][i] - rt.cdf[1][i] - rt.cdf[2][i];
  }
  for (std::size_t i = 1; i < n; ++i) {
    p.cumulative[i] = p.cumulative[i - 1] + 0.5 * (p.c[i - 1] + p.c[i]) * (rt.grid[i] - rt.grid[i - 1]);
  }
  p.total = p.cumulative.back();
  return p;
}

std::vector<std::string> ArchitectureReport::labels() const {
  std::vector<std::string> out;
  if (parallel_or) out.emplace_back("parallel-OR");
  if (parallel_and) out.emplace_back("parallel-AND");
  if (serial) out.emplace_back("serial");
  return out;
}

ArchitectureReport classify_architecture(const RtSystem& rt, double eps_test) {
  ArchitectureReport r;
  r.profile = interaction_contrast(rt);
  const auto& c = r.profile.c;
  r.max_c = *std::max_element(c.begin(), c.end());
  r.min_c = *std::min_element(c.begin(), c.end());
  r.min_cumulative = *std::min_element(r.profile.cumulative.begin(), r.profile.cumulative.end());
  for (const auto& f : rt.cdf) {
    if (f.back() < 1.0 - eps_test) r.total_determinate = false;
  }
  r.parallel_or = r.max_c <= eps_test;
  r.parallel_and = r.min_c >= -eps_test;
  r.serial = r.min_cumulative >= -eps_test && (!r.total_determinate || std::abs(r.profile.total) <= eps_test);
  return r;
}

TestReport to_test_report(const ArchitectureReport& report) {
  TestReport out;
  out.test = "contrast";
  const auto labels = report.labels();
  out.verdict = labels.empty() ? Verdict::kRuledOut : Verdict::kConsistent;
  std::ostringstream os;
  os << "consistent with {";
  for (std::size_t i = 0; i < labels.size(); ++i) os << (i ? ", " : "") << labels[i];
  os << "}; c in [" << report.min_c << ", " << report.max_c << "], min cumulative " << report.min_cumulative
     << ", total " << report.profile.total;
  out.summary = os.str();
  if (!report.total_determinate) {
    out.notes.push_back("total integral indeterminate: some cdf is below 1 at the last grid point");
  }
  if (labels.empty()) {
    out.notes.push_back("no composition rule fits under selective influences with prolongation constraints");
  }
  return out;
}

std::string_view to_string(Composition rule) {
  switch (rule) {
    case Composition::kPlus:
      return "plus";
    case Composition::kMin:
      return "min";
    case Composition::kMax:
      return "max";
  }
  return "unknown";
}

RtSystem compose_rt(const DurationModel& model, Composition rule, std::vector<double> grid) {
  const std::size_t nr = model.latent_pmf.size();
  if (nr == 0) throw UsageError("latent pmf is empty");
  for (const auto& input : model.duration) {
    for (const auto& level : input) {
      if (level.size() != nr) throw UsageError("duration table does not cover every latent value");
    }
  }
  for (std::size_t r = 0; r < nr; ++r) {
    for (std::size_t k = 0; k < 2; ++k) {
      const double lo = model.duration[k][0][r], hi = model.duration[k][1][r];
      if (!(lo >= 0.0) || !(hi >= 0.0)) {
        throw UsageError("negative or undefined duration for input " + std::to_string(k + 1) + " at r=" + std::to_string(r));
      }
      if (lo > hi) {
        throw UsageError("prolongation violated for input " + std::to_string(k + 1) + " at r=" + std::to_string(r));
      }
    }
  }
  RtSystem rt;
  rt.grid = std::move(grid);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      auto& f = rt.cdf[rt_index(i, j)];
      f.assign(rt.grid.size(), 0.0);
      for (std::size_t r = 0; r < nr; ++r) {
        const double a = model.duration[0][i][r], b = model.duration[1][j][r];
        const double t = rule == Composition::kPlus ? a + b : rule == Composition::kMin ? std::min(a, b) : std::max(a, b);
        const auto first = std::lower_bound(rt.grid.begin(), rt.grid.end(), t);
        for (auto it = first; it != rt.grid.end(); ++it) f[static_cast<std::size_t>(it - rt.grid.begin())] += model.latent_pmf[r];
      }
    }
  }
  return rt;
}

RtSystem compose_rt(const Design& design, const LatentModel& model, Composition rule, std::vector<double> grid) {
  if (design.size() != 2 || design.level_counts() != std::vector<std::size_t>{2, 2}) {
    throw UsageError("composition needs two inputs with two levels each");
  }
  DurationModel dm;
  dm.latent_pmf = model.latent_pmf;
  if (model.response.size() != 2) throw UsageError("latent model must cover both outputs");
  for (std::size_t k = 0; k < 2; ++k) {
    const auto payload = design.outputs[k].numeric_payloads();
    if (model.response[k].size() != 2) throw UsageError("latent model must cover both levels");
    for (std::size_t l = 0; l < 2; ++l) {
      if (model.response[k][l].size() != dm.latent_pmf.size()) throw UsageError("response table does not cover every latent value");
      for (auto v : model.response[k][l]) {
        if (v >= payload.size()) throw UsageError("response outside the declared values");
        dm.duration[k][l].push_back(payload[v]);
      }
    }
  }
  return compose_rt(dm, rule, std::move(grid));
}

}  // namespace selinf
