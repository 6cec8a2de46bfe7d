#include "selinf/feasibility.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "selinf/errors.hpp"
#include "selinf/marginal_selectivity.hpp"
#include "selinf/phase_one.hpp"

namespace selinf {

std::size_t FeasibilitySystem::coordinate_index(const Coordinate& c) const {
  const auto& inputs = design_.inputs;
  if (c.first >= inputs.size()) {
    throw UsageError("coupling coordinate names input " + std::to_string(c.first) +
                     " but the design has " + std::to_string(inputs.size()));
  }
  if (c.second >= inputs[c.first].levels.size()) {
    throw UsageError("coupling coordinate names level " + std::to_string(c.second) + " of input " +
                     inputs[c.first].name + ", which has " +
                     std::to_string(inputs[c.first].levels.size()) + " levels");
  }
  return first_coord_[c.first] + c.second;
}

CouplingAssignment FeasibilitySystem::column_label(std::size_t col) const {
  CouplingAssignment out(design_.size());
  for (std::size_t k = 0; k < design_.size(); ++k) {
    const std::size_t m = design_.inputs[k].levels.size();
    out[k].resize(m);
    for (std::size_t l = 0; l < m; ++l) out[k][l] = digit(col, first_coord_[k] + l);
  }
  return out;
}

std::size_t FeasibilitySystem::row_of(std::size_t col, std::size_t treatment) const {
  const auto& levels = design_.treatments[treatment];
  std::size_t row = treatment * block_;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    row += digit(col, first_coord_[k] + levels[k]) * row_stride_[k];
  }
  return row;
}

bool FeasibilitySystem::entry(std::size_t row, std::size_t col) const {
  return row_of(col, row / block_) == row;
}

std::vector<std::uint8_t> FeasibilitySystem::dense_matrix() const {
  std::vector<std::uint8_t> out(rows() * cols(), 0);
  for (std::size_t j = 0; j < cols_; ++j) {
    for (std::size_t t = 0; t < design_.treatments.size(); ++t) out[row_of(j, t) * cols_ + j] = 1;
  }
  return out;
}

std::size_t FeasibilitySystem::rank_bound() const {
  std::size_t bound = 1;
  const auto m = design_.level_counts();
  const auto v = design_.value_counts();
  for (std::size_t k = 0; k < m.size(); ++k) bound *= m[k] * (v[k] - 1) + 1;
  return bound;
}

FeasibilitySystem build_feasibility_system(const System& system, std::size_t column_cap) {
  const auto& design = system.design;
  if (auto problems = validate_system(system); !problems.empty()) {
    throw UsageError("invalid system: " + problems.front().message);
  }

  FeasibilitySystem fs;
  fs.design_ = design;
  const std::size_t n = design.size();
  const auto v = design.value_counts();
  const auto m = design.level_counts();

  fs.row_stride_.assign(n, 1);
  for (std::size_t k = n; k-- > 1;) fs.row_stride_[k - 1] = fs.row_stride_[k] * v[k];
  fs.block_ = fs.row_stride_.empty() ? 1 : fs.row_stride_[0] * v[0];

  // Column count, checked against the cap before anything is allocated.
  double approx = 1.0;
  for (std::size_t k = 0; k < n; ++k) approx *= std::pow(static_cast<double>(v[k]), static_cast<double>(m[k]));
  if (approx > static_cast<double>(column_cap)) {
    std::ostringstream os;
    os << "coupling space has " << approx << " columns, above the cap of " << column_cap
       << "; decompose the design (fewer inputs, levels or values per test)";
    throw CapacityError(os.str());
  }

  for (std::size_t k = 0; k < n; ++k) {
    fs.first_coord_.push_back(fs.radix_.size());
    for (std::size_t l = 0; l < m[k]; ++l) fs.radix_.push_back(v[k]);
  }
  fs.stride_.assign(fs.radix_.size(), 1);
  for (std::size_t i = fs.radix_.size(); i-- > 1;) fs.stride_[i - 1] = fs.stride_[i] * fs.radix_[i];
  fs.cols_ = fs.radix_.empty() ? 1 : fs.stride_[0] * fs.radix_[0];

  const System clean = clip_negligible(system);
  fs.row_labels_.reserve(design.treatments.size() * fs.block_);
  fs.p_.reserve(design.treatments.size() * fs.block_);
  for (std::size_t t = 0; t < design.treatments.size(); ++t) {
    Tuple tuple(n, 0);
    for (std::size_t r = 0; r < fs.block_; ++r) {
      std::size_t rest = r;
      for (std::size_t k = 0; k < n; ++k) {
        tuple[k] = rest / fs.row_stride_[k];
        rest %= fs.row_stride_[k];
      }
      fs.row_labels_.push_back({t, tuple});
      fs.p_.push_back(clean.pmf(t).at(tuple));
    }
  }
  return fs;
}

WitnessCheck check_witness(const FeasibilitySystem& fs, std::span<const double> q, double eps_lp) {
  if (q.size() != fs.cols()) throw UsageError("witness length does not match column count");
  WitnessCheck check;
  std::vector<double> mq(fs.rows(), 0.0);
  double sum = 0.0;
  check.min_entry = q.empty() ? 0.0 : *std::min_element(q.begin(), q.end());
  for (std::size_t j = 0; j < q.size(); ++j) {
    if (q[j] == 0.0) continue;
    sum += q[j];
    for (std::size_t t = 0; t < fs.design().treatments.size(); ++t) mq[fs.row_of(j, t)] += q[j];
  }
  for (std::size_t i = 0; i < mq.size(); ++i) {
    check.residual = std::max(check.residual, std::abs(mq[i] - fs.p()[i]));
  }
  check.mass_error = std::abs(sum - 1.0);
  check.valid = check.min_entry >= -eps_lp && check.mass_error <= eps_lp && check.residual <= eps_lp;
  return check;
}

LpVerdict solve_feasibility(const FeasibilitySystem& fs, double eps_lp) {
  if (!(eps_lp > 0.0)) throw UsageError("eps_lp must be positive");
  const auto& p = fs.p();
  const std::size_t nt = fs.design().treatments.size();

  // Rows with zero probability force every column touching them to zero;
  // drop both and renumber the remaining rows.
  std::vector<std::int64_t> row_map(fs.rows(), -1);
  std::vector<double> b;
  for (std::size_t i = 0; i < fs.rows(); ++i) {
    if (p[i] > 0.0) {
      row_map[i] = static_cast<std::int64_t>(b.size());
      b.push_back(p[i]);
    }
  }
  if (b.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw CapacityError("too many rows for the simplex solver");
  }

  BinaryColumns a(b.size());
  std::vector<std::size_t> kept;
  std::vector<std::uint32_t> ones(nt);
  for (std::size_t j = 0; j < fs.cols(); ++j) {
    bool alive = true;
    for (std::size_t t = 0; t < nt; ++t) {
      const auto r = row_map[fs.row_of(j, t)];
      if (r < 0) {
        alive = false;
        break;
      }
      ones[t] = static_cast<std::uint32_t>(r);
    }
    if (!alive) continue;
    a.add_column(ones);
    kept.push_back(j);
  }

  const PhaseOneResult lp = solve_phase_one(a, b);

  LpVerdict verdict;
  verdict.iterations = lp.iterations;
  verdict.infeasibility = lp.infeasibility;
  verdict.active_rows = b.size();
  verdict.active_columns = kept.size();
  verdict.feasible = lp.infeasibility <= eps_lp;
  if (!verdict.feasible) return verdict;

  CouplingWitness w;
  w.q.assign(fs.cols(), 0.0);
  for (std::size_t c = 0; c < kept.size(); ++c) w.q[kept[c]] = lp.x[c];
  const WitnessCheck check = check_witness(fs, w.q, eps_lp);
  w.residual = check.residual;
  w.mass_error = check.mass_error;
  if (!check.valid) {
    std::ostringstream os;
    os << "phase-I optimum " << lp.infeasibility << " is within tolerance but the witness is not"
       << " (residual " << check.residual << ", mass error " << check.mass_error << ")";
    throw SolverError(os.str());
  }
  verdict.witness = std::move(w);
  return verdict;
}

JointPmf extract_coupling_marginals(const CouplingWitness& witness, const FeasibilitySystem& fs,
                                    std::span<const Coordinate> which) {
  if (witness.q.size() != fs.cols()) throw UsageError("witness length does not match column count");
  std::vector<std::size_t> positions;
  std::vector<std::size_t> shape;
  std::set<std::size_t> seen;
  for (const auto& c : which) {
    const std::size_t pos = fs.coordinate_index(c);
    if (!seen.insert(pos).second) {
      throw UsageError("coupling coordinate (" + std::to_string(c.first) + ", " +
                       std::to_string(c.second) + ") listed twice");
    }
    positions.push_back(pos);
    shape.push_back(fs.design().outputs[c.first].values.size());
  }
  JointPmf out(shape);
  Tuple tuple(positions.size());
  for (std::size_t j = 0; j < witness.q.size(); ++j) {
    if (witness.q[j] == 0.0) continue;
    for (std::size_t i = 0; i < positions.size(); ++i) tuple[i] = fs.digit(j, positions[i]);
    out.add(tuple, witness.q[j]);
  }
  return out;
}

TestReport to_test_report(const LpVerdict& verdict, const FeasibilitySystem& fs) {
  TestReport out;
  out.test = "lp";
  std::ostringstream os;
  os << fs.rows() << "x" << fs.cols() << " system (" << verdict.active_rows << " rows, "
     << verdict.active_columns << " columns after dropping zero-probability rows), "
     << verdict.iterations << " pivots: ";
  if (verdict.feasible) {
    out.verdict = Verdict::kConsistent;
    std::size_t support = 0;
    for (double x : verdict.witness->q) support += x > 0.0;
    os << "feasible, coupling witness on " << support << " assignments, residual "
       << verdict.witness->residual;
  } else {
    out.verdict = Verdict::kRuledOut;
    os << "infeasible, phase-I optimum " << verdict.infeasibility;
  }
  out.margin = verdict.infeasibility;
  out.summary = os.str();
  return out;
}

TestReport fine_inequality_check(const System& system, double eps_test) {
  TestReport out;
  out.test = "fine";
  const auto& d = system.design;
  auto inapplicable = [&](const std::string& why) {
    out.verdict = Verdict::kInapplicable;
    out.summary = why;
    return out;
  };
  if (d.size() != 2) return inapplicable("requires exactly two inputs");
  if (d.level_counts() != std::vector<std::size_t>{2, 2}) return inapplicable("requires two binary inputs");
  if (d.value_counts() != std::vector<std::size_t>{2, 2}) return inapplicable("requires two binary outputs");
  std::array<std::array<std::size_t, 2>, 2> at{};
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      auto t = d.find_treatment({i, j});
      if (!t) return inapplicable("treatment " + d.treatment_label(Treatment{i, j}) + " is not allowable");
      at[i][j] = *t;
    }
  }
  const auto ms = check_marginal_selectivity(system, 0, eps_test);
  if (!ms.pass) return inapplicable("marginal selectivity fails (discrepancy " + std::to_string(ms.discrepancy) + ")");

  double pij[2][2], pi[2], pj[2];
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) pij[i][j] = system.pmf(at[i][j]).at({0, 0});
  }
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& f = system.pmf(at[i][0]);
    pi[i] = f.at({0, 0}) + f.at({0, 1});
  }
  for (std::size_t j = 0; j < 2; ++j) {
    const auto& f = system.pmf(at[0][j]);
    pj[j] = f.at({0, 0}) + f.at({1, 0});
  }

  const auto& l1 = d.inputs[0].levels;
  const auto& l2 = d.inputs[1].levels;
  double worst = -std::numeric_limits<double>::infinity();
  std::string worst_label;
  double worst_value = 0.0;
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      const std::size_t i2 = 1 - i, j2 = 1 - j;
      const double s = pi[i] + pj[j] + pij[i2][j2] - pij[i][j] - pij[i][j2] - pij[i2][j];
      const double viol = std::max(-s, s - 1.0);
      if (viol > worst) {
        worst = viol;
        worst_value = s;
        std::ostringstream os;
        os << "0 <= p(" << l1[i] << ",.) + p(.," << l2[j] << ") + p(" << l1[i2] << "," << l2[j2]
           << ") - p(" << l1[i] << "," << l2[j] << ") - p(" << l1[i] << "," << l2[j2] << ") - p("
           << l1[i2] << "," << l2[j] << ") <= 1";
        worst_label = os.str();
      }
    }
  }
  out.margin = worst;
  out.verdict = worst <= eps_test ? Verdict::kConsistent : Verdict::kRuledOut;
  std::ostringstream os;
  os << (out.ruled_out() ? "violated: " : "all eight hold; tightest: ") << worst_label
     << " evaluates to " << worst_value;
  out.summary = os.str();
  out.notes.push_back("p(i,j) = Pr(" + d.outputs[0].name + "=" + d.outputs[0].values[0].label + ", " +
                      d.outputs[1].name + "=" + d.outputs[1].values[0].label + ") at (" +
                      d.inputs[0].name + "=i, " + d.inputs[1].name + "=j)");
  return out;
}

std::string format_matrix(const FeasibilitySystem& fs) {
  const auto& d = fs.design();
  std::size_t cell = 1;
  for (const auto& o : d.outputs) {
    for (const auto& v : o.values) cell = std::max(cell, v.label.size());
  }

  std::vector<std::string> head_labels;
  std::vector<std::vector<std::string>> head_cells;
  for (std::size_t k = 0; k < d.size(); ++k) {
    for (std::size_t l = 0; l < d.inputs[k].levels.size(); ++l) {
      head_labels.push_back("H[" + d.inputs[k].name + "=" + d.inputs[k].levels[l] + "]");
      const std::size_t pos = fs.coordinate_index({k, l});
      std::vector<std::string> cells;
      for (std::size_t j = 0; j < fs.cols(); ++j) cells.push_back(d.outputs[k].values[fs.digit(j, pos)].label);
      head_cells.push_back(std::move(cells));
    }
  }
  std::vector<std::string> row_text;
  for (const auto& r : fs.row_labels()) {
    std::string s;
    const auto& t = d.treatments[r.treatment];
    for (std::size_t k = 0; k < d.size(); ++k) s += (k ? "," : "") + d.inputs[k].name + "=" + d.inputs[k].levels[t[k]];
    s += " : ";
    for (std::size_t k = 0; k < d.size(); ++k) s += (k ? "," : "") + d.outputs[k].name + "=" + d.outputs[k].values[r.outcome[k]].label;
    row_text.push_back(std::move(s));
  }
  std::size_t width = 0;
  for (const auto& s : head_labels) width = std::max(width, s.size());
  for (const auto& s : row_text) width = std::max(width, s.size());

  auto pad = [](const std::string& s, std::size_t w) { return s + std::string(w - s.size(), ' '); };
  auto padl = [](const std::string& s, std::size_t w) { return std::string(w - s.size(), ' ') + s; };

  std::ostringstream os;
  for (std::size_t h = 0; h < head_labels.size(); ++h) {
    os << pad(head_labels[h], width) << " |";
    for (const auto& c : head_cells[h]) os << ' ' << padl(c, cell);
    os << '\n';
  }
  os << std::string(width, '-') << "-+" << std::string(fs.cols() * (cell + 1), '-') << '\n';
  for (std::size_t i = 0; i < fs.rows(); ++i) {
    os << pad(row_text[i], width) << " |";
    for (std::size_t j = 0; j < fs.cols(); ++j) os << ' ' << padl(fs.entry(i, j) ? "1" : ".", cell);
    os << '\n';
  }
  return os.str();
}

}  // namespace selinf
