#include "fixtures.hpp"

#include <cmath>
#include <sstream>

namespace fixtures {

using selinf::OutputValue;
using selinf::System;

std::vector<OutputValue> numeric_values(const std::vector<double>& xs) {
  std::vector<OutputValue> out;
  for (double x : xs) {
    std::ostringstream os;
    os << x;
    out.push_back({os.str(), x});
  }
  return out;
}

System two_by_two(std::vector<OutputValue> a1, std::vector<OutputValue> a2, const Tables& tables) {
  selinf::Design d;
  d.inputs = {{"lambda1", {"1", "2"}}, {"lambda2", {"1", "2"}}};
  d.outputs = {{"A1", std::move(a1)}, {"A2", std::move(a2)}};
  d.treatments = selinf::full_factorial(d.inputs);
  System s{d, {}};
  for (const auto& table : tables) {
    selinf::JointPmf pmf(d.value_counts());
    for (std::size_t x = 0; x < table.size(); ++x) {
      for (std::size_t y = 0; y < table[x].size(); ++y) {
        if (table[x][y] != 0.0) pmf.add({x, y}, table[x][y]);
      }
    }
    s.distributions.push_back(pmf);
  }
  return s;
}

System binary(const Tables& tables) { return two_by_two(numeric_values({1, 2}), numeric_values({1, 2}), tables); }

System jdc() {
  return binary({Table{{.140, .360}, {.360, .140}}, Table{{.198, .302}, {.302, .198}},
                 Table{{.189, .311}, {.311, .189}}, Table{{.460, .040}, {.040, .460}}});
}

System pr_box() {
  return binary({Table{{.5, 0}, {0, .5}}, Table{{.5, 0}, {0, .5}}, Table{{.5, 0}, {0, .5}},
                 Table{{0, .5}, {.5, 0}}});
}

System marginal_violation() {
  return binary({Table{{.2, .2}, {.3, .3}}, Table{{.3, .1}, {.2, .4}}, Table{{.4, .3}, {.1, .2}},
                 Table{{.3, .4}, {.1, .2}}});
}

System ivs_original() {
  return binary({Table{{.3, .4}, {.1, .2}}, Table{{.35, .35}, {.15, .15}}, Table{{.32, .48}, {.08, .12}},
                 Table{{.45, .35}, {.05, .15}}});
}

System ivs_transformed() {
  return two_by_two(numeric_values({1, -1}), numeric_values({7, 3}),
                    {Table{{.3, .4}, {.1, .2}}, Table{{.35, .35}, {.15, .15}}, Table{{.08, .12}, {.32, .48}},
                     Table{{.15, .05}, {.35, .45}}});
}

namespace {
const Table kBand{{.24, .07, 0}, {.07, .24, .07}, {0, .07, .24}};
const Table kAnti{{0, .07, .24}, {.07, .24, .07}, {.24, .07, 0}};
}  // namespace

System d1() { return two_by_two(numeric_values({0, 2, 4}), numeric_values({0, 1, 2}), {kBand, kBand, kBand, kAnti}); }

System d1_grouped() {
  const Table same{{.62, .07}, {.07, .24}};
  return binary({same, same, same, Table{{.38, .31}, {.31, 0}}});
}

System cosphericity_original() {
  return two_by_two(numeric_values({0, 1, 5}), numeric_values({0, 1, 5}), {kBand, kBand, kBand, kAnti});
}

System cosphericity_transformed() {
  return two_by_two(numeric_values({0, 1, 2}), numeric_values({0, 1, 2}), {kBand, kBand, kBand, kAnti});
}

std::vector<double> reference_p_vector() {
  return {.3, .4, .1, .2, .35, .35, .15, .15, .08, .12, .32, .48, .15, .05, .35, .45};
}

std::vector<double> reference_jdc_q() {
  return {.067, 0, .131, .04, 0, .073, 0, .189, .122, 0, .14, 0, .04, .198, 0, 0};
}

}  // namespace fixtures
