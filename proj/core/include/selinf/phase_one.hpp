#pragma once

// Phase-I simplex for  A x = b, x >= 0  where A has 0/1 entries.
//
// The solver adds one artificial variable per row, starts from the
// artificial basis, and minimizes the sum of artificials with Bland's
// smallest-index rule (entering and leaving), which rules out cycling.
// The basis inverse is kept explicitly and refactored periodically.
// Redundant rows are absorbed by artificials that stay basic at zero.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace selinf {

// Column-major 0/1 matrix: each column lists the rows holding a one.
class BinaryColumns {
 public:
  explicit BinaryColumns(std::size_t rows = 0) : rows_(rows), offsets_{0} {}

  void add_column(std::span<const std::uint32_t> ones);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return offsets_.size() - 1; }
  std::span<const std::uint32_t> column(std::size_t j) const {
    return {ones_.data() + offsets_[j], offsets_[j + 1] - offsets_[j]};
  }

 private:
  std::size_t rows_;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> ones_;
};

struct PhaseOneOptions {
  double pivot_tol = 1e-10;       // smallest usable pivot element
  double optimality_tol = 1e-12;  // reduced costs above -tol count as non-negative
  std::size_t max_iterations = 0;  // 0 picks a bound from the problem size
  std::size_t refactor_every = 64;
  double stop_below = 1e-13;  // artificial sum treated as reaching zero
};

struct PhaseOneResult {
  double infeasibility = 0.0;  // optimal sum of artificial variables
  std::vector<double> x;       // structural variables, clipped at zero
  std::size_t iterations = 0;
};

// Requires b >= 0 and b.size() == a.rows(). Throws SolverError when the
// iteration cap is reached.
PhaseOneResult solve_phase_one(const BinaryColumns& a, std::span<const double> b,
                               const PhaseOneOptions& options = {});

}  // namespace selinf
