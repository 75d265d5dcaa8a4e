#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lyaplab {

struct VerifyResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Invariant suite over every module at small budgets (a few seconds).
/// A check that throws is reported as failed with the message as detail.
std::vector<VerifyResult> run_verify(std::uint64_t seed, unsigned workers = 1);

}  // namespace lyaplab
