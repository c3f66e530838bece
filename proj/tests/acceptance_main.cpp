// Runs every acceptance criterion and prints one PASS/FAIL line each.
// Optional argument: artifact directory.

#include <cstdio>

#include "lagflow/harness/acceptance.hpp"

int main(int argc, char** argv) {
    lagflow::harness::AcceptanceOptions opt;
    if (argc > 1) opt.output_dir = argv[1];
    const auto report = lagflow::harness::run_acceptance(opt);
    for (const auto& r : report.results) std::printf("%s\n", lagflow::harness::format_result(r).c_str());
    return report.all_passed() ? 0 : 1;
}
