#pragma once

// The criterion test for finite systems: selective influences hold iff the
// observed probabilities P are a convex mixture of the columns of the
// Boolean matrix M, i.e. MQ = P has a solution Q >= 0.
//
// Rows of M are (treatment, outcome tuple) pairs: treatments in declared
// order, outcome tuples lexicographic in declared value order with the first
// output slowest. Columns are assignments of a value to every coupling
// coordinate H^k_l (one coordinate per input level), ordered
// lexicographically with H^1_1 slowest and H^n_{m_n} fastest. Cell (I, J)
// is 1 iff, at the levels named by row I, the coordinates chosen from J
// equal the outcome tuple of I.
//
// M is never materialized for solving: every column holds exactly one 1 per
// treatment block, and the row of that 1 is computed from the column index.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "selinf/model.hpp"
#include "selinf/report.hpp"

namespace selinf {

inline constexpr double kDefaultLpEps = 1e-8;
inline constexpr std::size_t kDefaultColumnCap = 10'000'000;

struct RowLabel {
  std::size_t treatment;
  Tuple outcome;
};

// assignment[k][l] is the value index taken by H^k_l.
using CouplingAssignment = std::vector<std::vector<std::size_t>>;

// (input index, level index) naming one coupling coordinate H^k_l.
using Coordinate = std::pair<std::size_t, std::size_t>;

class FeasibilitySystem {
 public:
  const Design& design() const { return design_; }
  std::size_t rows() const { return row_labels_.size(); }
  std::size_t cols() const { return cols_; }
  const std::vector<RowLabel>& row_labels() const { return row_labels_; }
  const std::vector<double>& p() const { return p_; }

  std::size_t coordinate_count() const { return radix_.size(); }
  // Position of H^k_l in the column label.
  std::size_t coordinate_index(const Coordinate& c) const;
  // Value index taken by the given coordinate position in column `col`.
  std::size_t digit(std::size_t col, std::size_t position) const {
    return (col / stride_[position]) % radix_[position];
  }
  CouplingAssignment column_label(std::size_t col) const;

  // The row holding the single 1 of column `col` within a treatment block.
  std::size_t row_of(std::size_t col, std::size_t treatment) const;
  bool entry(std::size_t row, std::size_t col) const;
  // Row-major 0/1 matrix. Only sensible for small systems.
  std::vector<std::uint8_t> dense_matrix() const;

  // Upper bound on rank(M); informational only.
  std::size_t rank_bound() const;

 private:
  friend FeasibilitySystem build_feasibility_system(const System&, std::size_t);

  Design design_;
  std::vector<RowLabel> row_labels_;
  std::vector<double> p_;
  std::size_t cols_ = 0;
  std::size_t block_ = 0;                  // rows per treatment
  std::vector<std::size_t> row_stride_;    // per output, within a block
  std::vector<std::size_t> first_coord_;   // per input, position of H^k_1
  std::vector<std::size_t> radix_;         // per coordinate position
  std::vector<std::size_t> stride_;        // per coordinate position
};

// Throws CapacityError when the column count exceeds `column_cap`.
FeasibilitySystem build_feasibility_system(const System& system,
                                           std::size_t column_cap = kDefaultColumnCap);

struct CouplingWitness {
  std::vector<double> q;   // aligned with columns
  double residual = 0.0;   // max |MQ - P|
  double mass_error = 0.0; // |sum q - 1|
};

struct LpVerdict {
  bool feasible = false;
  std::optional<CouplingWitness> witness;
  std::size_t iterations = 0;
  double infeasibility = 0.0;  // phase-I optimum
  std::size_t active_rows = 0;     // after dropping zero-probability rows
  std::size_t active_columns = 0;  // columns not forced to zero
};

// Phase-I simplex on MQ = P. Columns that put mass on a zero-probability
// row are fixed at zero beforehand. Throws SolverError on non-convergence.
LpVerdict solve_feasibility(const FeasibilitySystem& fs, double eps_lp = kDefaultLpEps);

struct WitnessCheck {
  bool valid = false;
  double residual = 0.0;
  double mass_error = 0.0;
  double min_entry = 0.0;
};

// Checks q >= -eps, |sum q - 1| <= eps, |MQ - P| <= eps.
WitnessCheck check_witness(const FeasibilitySystem& fs, std::span<const double> q,
                           double eps_lp = kDefaultLpEps);

// Joint pmf of the selected coupling coordinates under the witness, in the
// order given. Throws UsageError for coordinates outside the design or
// repeated coordinates.
JointPmf extract_coupling_marginals(const CouplingWitness& witness, const FeasibilitySystem& fs,
                                    std::span<const Coordinate> which);

TestReport to_test_report(const LpVerdict& verdict, const FeasibilitySystem& fs);

// Closed-form test for two binary inputs with two binary outputs under
// marginal selectivity: the eight inequalities
//   0 <= p_i. + p_.j + p_i'j' - p_ij - p_ij' - p_i'j <= 1,  i != i', j != j'
// where p_ij = Pr(A1 = first value, A2 = first value) at (i, j) and p_i.,
// p_.j are the corresponding single-output probabilities. Inapplicable
// outside that design or when marginal selectivity fails.
TestReport fine_inequality_check(const System& system, double eps_test = 1e-9);

// Plain-text grid of M with row and column labels, '.' for 0.
std::string format_matrix(const FeasibilitySystem& fs);

}  // namespace selinf
