// Runs the twelve acceptance criteria and prints one line each. The exit
// status reports whether the suite ran to completion; the verdicts are in
// the printed lines and in acceptance.json.

#include <fstream>
#include <iostream>

#include <diracres/config.hpp>
#include <diracres/selftest.hpp>

using namespace diracres;

int main(int argc, char** argv) {
  try {
    std::vector<std::string> overrides(argv + 1, argv + argc);
    const auto cfg = config::defaults(overrides);
    const auto cs = selftest::run_all(cfg, [](const selftest::Criterion& c) { std::cout << selftest::line(c) << std::endl; });
    int pass = 0, fail = 0, skip = 0;
    for (const auto& c : cs) {
      switch (c.effective()) {
        case selftest::Status::Pass: ++pass; break;
        case selftest::Status::Fail: ++fail; break;
        case selftest::Status::Skipped: ++skip; break;
      }
    }
    std::ofstream("acceptance.json") << selftest::report_json(cfg, cs).dump(2) << "\n";
    std::cout << "acceptance: " << pass << " passed, " << fail << " failed, " << skip << " skipped" << std::endl;
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "acceptance harness error: " << e.what() << std::endl;
    return 1;
  }
}
