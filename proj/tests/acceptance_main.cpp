// Acceptance runner: one PASS/FAIL line per criterion, exit 1 on any failure.

#include <CLI11.hpp>
#include <iostream>

#include "lamina/acceptance.hpp"

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  lamina::SuiteOptions opt;
  std::string filter;
  app.add_option("--seed", opt.seed, "reference seed");
  app.add_option("--threads", opt.threads, "worker threads (0: default)");
  app.add_option("--filter", filter, "comma-separated criterion ids or names");
  app.add_option("--tolerance-scale", opt.tolerance_scale, "multiplies statistical tolerances");
  CLI11_PARSE(app, argc, argv);
  if (app.count("--filter")) opt.filter = filter;
  opt.on_row = [](const lamina::CriterionRow& r) { lamina::print_row(std::cout, r), std::cout.flush(); };

  bool ok = true;
  for (const auto& r : lamina::verify_suite(opt)) ok = ok && r.pass;
  return ok ? 0 : 1;
}
