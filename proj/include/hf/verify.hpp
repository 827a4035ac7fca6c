// Invariant suites behind the `verify` subcommand and the first acceptance
// criteria: discrete operator identities (summation by parts, divergence
// theorem, Green's identities), the convolution oracle, the proper-splitting
// inequality with convexity probes, and variational-derivative checks
// against central differences.
#pragma once

#include <string>
#include <vector>

namespace hf {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;  // observed worst value vs threshold
};

std::vector<CheckResult> verify_operator_identities(int pairs = 200, unsigned seed = 123);
std::vector<CheckResult> verify_convolution(int fields = 50, unsigned seed = 321);
std::vector<CheckResult> verify_splitting(int pairs_per_model = 1000, unsigned seed = 777);
std::vector<CheckResult> verify_gradients(unsigned seed = 999);

std::vector<CheckResult> verify_all();
bool all_passed(const std::vector<CheckResult>& results);

}  // namespace hf
