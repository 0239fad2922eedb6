#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace chblend {

enum class VerifyLevel { Quick, Full };

/// Deliberate defects used to check that the suite can fail.
enum class InjectedFault { None, FlipStiffnessSign };

VerifyLevel parse_verify_level(std::string_view name);
InjectedFault parse_injected_fault(std::string_view name);

struct VerifyOptions {
  VerifyLevel level = VerifyLevel::Quick;
  InjectedFault fault = InjectedFault::None;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Runs the invariant checks of every module. Quick works on a 4x4 mesh;
/// full adds the 20x20 mesh and the 200-step OD2 energy-decay check.
/// `on_result` is called as each check finishes.
std::vector<CheckResult> run_verification(
    const VerifyOptions& options,
    const std::function<void(const CheckResult&)>& on_result = {});

}  // namespace chblend
