#pragma once

#include <string>
#include <vector>

namespace czdg {

// One measured quantity held against a bound. `upper` checks pass when
// measured <= bound, the rest when measured >= bound.
struct CheckResult {
    std::string name;
    double measured = 0.0;
    double bound = 0.0;
    bool upper = true;
    std::string note;

    bool passed() const { return upper ? measured <= bound : measured >= bound; }
};

struct VerifyReport {
    std::vector<CheckResult> checks;
    bool all_passed() const;
};

// Built-in verification problems with known answers.
//
//   patch         uniaxial bar with one compliant interface column; the
//                 piecewise-affine solution must be reproduced exactly
//   convergence   manufactured smooth solution on rigid interfaces; P1
//                 rates in the L2 and energy norms
//   limits        blended interface stiffness against its closed forms
//                 for vanishing face size and for a rigid interface
//   cohesive-grad interface tractions against finite differences of the
//                 mixed-mode energy surface
VerifyReport verify_patch();
VerifyReport verify_convergence();
VerifyReport verify_limits();
VerifyReport verify_cohesive_grad();

// Suite names accepted by run_verify_suite, in display order.
const std::vector<std::string>& verify_suites();

// Runs one suite by name; throws Error for an unknown name.
VerifyReport run_verify_suite(const std::string& suite);

// One line per check: "PASS <name> measured=<v> bound<=<b>" plus a trailing
// note when the check carries one.
std::string format_report(const VerifyReport& report);

}  // namespace czdg
