#pragma once

// Worked systems used across the suites. In each table rows are values of
// the first output and columns values of the second; treatments come in the
// order (1,1), (1,2), (2,1), (2,2).

#include <array>
#include <vector>

#include "selinf/model.hpp"

namespace fixtures {

using Table = std::vector<std::vector<double>>;
using Tables = std::array<Table, 4>;

// Two inputs named lambda1, lambda2 with levels "1", "2"; outputs A1, A2
// with the given values; all four treatments allowed.
selinf::System two_by_two(std::vector<selinf::OutputValue> a1, std::vector<selinf::OutputValue> a2,
                          const Tables& tables);

std::vector<selinf::OutputValue> numeric_values(const std::vector<double>& xs);

// Binary outputs with values 1, 2.
selinf::System binary(const Tables& tables);

selinf::System jdc();
selinf::System pr_box();
selinf::System marginal_violation();

// Input-value-specific transformation pair.
selinf::System ivs_original();
selinf::System ivs_transformed();  // reference tables

// Distance example, its grouped form reference tables, and the correlation example.
selinf::System d1();
selinf::System d1_grouped();
selinf::System cosphericity_original();
selinf::System cosphericity_transformed();  // reference tables

// The observed vector P of the matrix example, in row order.
std::vector<double> reference_p_vector();
// The known coupling distribution for the worked feasibility example, in
// column order.
std::vector<double> reference_jdc_q();

}  // namespace fixtures
