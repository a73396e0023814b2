#pragma once

#include <string>
#include <vector>

namespace paprlab::harness {

struct SelfCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Quick property checks of the installed build: transform identities,
/// closed-form anchors, kernel equivalence and a chain gradient check.
std::vector<SelfCheck> run_selftest();

}  // namespace paprlab::harness
