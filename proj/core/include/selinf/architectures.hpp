#pragma once

// Interaction contrast of composed response times. With two factors at two
// levels each and T_ij the time at treatment (i, j),
//   c(t) = F_11(t) + F_22(t) - F_12(t) - F_21(t),   F_ij(t) = Pr(T_ij <= t).
// Under selective influences with prolongation constraints
//   min (parallel-OR):   c(t) <= 0 for all t
//   max (parallel-AND):  c(t) >= 0 for all t
//   plus (serial):       integral of c from 0 to t >= 0, and to infinity = 0.
// These are necessary conditions; a profile can fit several rules.

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "selinf/model.hpp"
#include "selinf/report.hpp"

namespace selinf {

struct RtSystem {
  std::vector<double> grid;                // strictly increasing
  std::array<std::vector<double>, 4> cdf;  // treatments (1,1), (1,2), (2,1), (2,2)
};

inline std::size_t rt_index(std::size_t i, std::size_t j) { return 2 * i + j; }

// Problems with the grid or cdfs; empty when valid.
std::vector<std::string> validate_rt(const RtSystem& rt, double eps = 1e-9);

struct ContrastProfile {
  std::vector<double> c;
  std::vector<double> cumulative;  // trapezoid rule from the first grid point
  double total = 0.0;
};

// Throws UsageError when `rt` is invalid.
ContrastProfile interaction_contrast(const RtSystem& rt);

struct ArchitectureReport {
  ContrastProfile profile;
  double max_c = 0.0;
  double min_c = 0.0;
  double min_cumulative = 0.0;
  bool parallel_or = false;
  bool parallel_and = false;
  bool serial = false;
  // False when some cdf has not reached 1 at the last grid point, so the
  // total integral cannot be judged. Serial is then decided by the running
  // integral alone.
  bool total_determinate = true;

  std::vector<std::string> labels() const;
};

ArchitectureReport classify_architecture(const RtSystem& rt, double eps_test = 1e-9);

TestReport to_test_report(const ArchitectureReport& report);

enum class Composition { kPlus, kMin, kMax };

std::string_view to_string(Composition rule);

// Latent durations of the two processes: duration[k][level][r].
struct DurationModel {
  std::vector<double> latent_pmf;
  std::array<std::array<std::vector<double>, 2>, 2> duration;
};

// Exact cdfs Pr(comp(g^1_i(R), g^2_j(R)) <= t) on the grid. Throws
// UsageError on a negative duration or a prolongation violation
// (g^k_1(r) > g^k_2(r)), naming r.
RtSystem compose_rt(const DurationModel& model, Composition rule, std::vector<double> grid);

// Same, reading durations from the numeric payloads of a two-input,
// two-level design and a latent model over it.
RtSystem compose_rt(const Design& design, const LatentModel& model, Composition rule, std::vector<double> grid);

}  // namespace selinf
