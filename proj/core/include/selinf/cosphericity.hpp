#pragma once

// Cosphericity test on 2x2 sub-designs. For inputs k, k' with levels
// i, i' and j, j', let rho_ab be the correlation of A^k and A^k' at the
// treatment (k = a, k' = b). Selective influences require
//   |rho_ij rho_ij' - rho_i'j rho_i'j'|
//     <= sqrt(1 - rho_ij^2) sqrt(1 - rho_ij'^2) + sqrt(1 - rho_i'j^2) sqrt(1 - rho_i'j'^2),
// which holds iff four points on a unit sphere have these cosines.

#include <array>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "selinf/model.hpp"
#include "selinf/report.hpp"

namespace selinf {

inline constexpr double kDefaultCosphericityEps = 1e-6;

// Pearson correlation of a two-variable pmf with the given payloads.
// Throws Inapplicable when either variance vanishes.
double correlation(const JointPmf& pmf, const std::vector<double>& x, const std::vector<double>& y);

struct SubDesign {
  std::size_t k = 0, k2 = 0;  // k < k2
  std::size_t i = 0, i2 = 0;  // levels of input k, i < i2
  std::size_t j = 0, j2 = 0;  // levels of input k2, j < j2
  // Treatments realizing (i,j), (i,j'), (i',j), (i',j').
  std::array<std::size_t, 4> treatments{};
};

struct CosphericityResult {
  SubDesign subdesign;
  std::array<double, 4> rho{};  // rho_ij, rho_ij', rho_i'j, rho_i'j'
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = true;
  bool boundary = false;  // |lhs - rhs| <= eps
};

// (lhs, rhs) of the inequality for correlations in the order rho_ij,
// rho_ij', rho_i'j, rho_i'j'.
std::pair<double, double> cosphericity_sides(const std::array<double, 4>& rho);

// Every (k, k', i, i', j, j') whose four treatments are allowable.
std::vector<SubDesign> eligible_subdesigns(const Design& design);

struct CosphericityReport {
  std::vector<CosphericityResult> results;
  std::vector<SubDesign> skipped;  // zero variance in some cell
  bool pass = true;
};

// Throws Inapplicable when no eligible sub-design exists, when outputs lack
// payloads, or when every sub-design has a zero-variance cell.
CosphericityReport run_cosphericity(const System& system, double eps_test = kDefaultCosphericityEps);

TestReport to_test_report(const CosphericityReport& report, const Design& design);

}  // namespace selinf
