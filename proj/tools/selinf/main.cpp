#include <CLI11.hpp>
#include <iostream>
#include <sstream>

#include "run.hpp"

int main(int argc, char** argv) {
  selinf::cli::RunConfig cfg;
  std::string tests = "marginal,lp";
  double eps_test = 0.0;

  CLI::App app{"Check output distributions for selective influences of their paired inputs."};
  app.add_option("input", cfg.input_path, "JSON document with the system and/or rt section")->required();
  app.add_option("--tests", tests,
                 "Comma-separated tests: marginal, lp, fine, distance, cosphericity, battery, contrast, or all")
      ->capture_default_str();
  app.add_option("--metric", cfg.metrics, "Distance metric, repeatable: power:p=<0..1> or class:<out>={a,b}|{c};...");
  app.add_option("--transforms", cfg.transforms_path, "JSON file of transforms for the battery");
  app.add_option("--eps-prob", cfg.eps_prob, "Tolerance on pmf masses")->capture_default_str();
  auto* eps_opt = app.add_option("--eps-test", eps_test, "Tolerance for inequality tests (default 1e-9, cosphericity 1e-6)");
  app.add_option("--eps-lp", cfg.eps_lp, "Tolerance on LP residuals")->capture_default_str();
  app.add_option("--format", cfg.format, "Report format")->check(CLI::IsMember({"text", "json"}))->capture_default_str();
  app.add_option("--seed", cfg.seed, "Seed for generated battery transforms")->capture_default_str();
  app.add_option("--dump-matrix", cfg.dump_matrix_path, "Write the feasibility matrix as a text grid");
  app.add_option("--max-subset", cfg.max_subset, "Largest output subset for marginal selectivity (0: all)")
      ->capture_default_str();
  app.add_option("--max-length", cfg.max_length, "Longest chain in distance tests on incomplete designs")
      ->capture_default_str();
  app.add_option("--battery-size", cfg.battery_size, "Generated transforms of each kind")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*eps_opt) cfg.eps_test = eps_test;
  cfg.tests.clear();
  std::stringstream ss(tests);
  for (std::string t; std::getline(ss, t, ',');) {
    if (!t.empty()) cfg.tests.push_back(t);
  }

  const auto outcome = selinf::cli::run(cfg);
  std::cout << outcome.report;
  if (!outcome.diagnostics.empty()) std::cerr << "selinf: " << outcome.diagnostics << "\n";
  return outcome.exit_code;
}
