#ifndef GIBBS_CHECKS_HPP
#define GIBBS_CHECKS_HPP

#include <string>
#include <vector>

namespace gibbs {

struct CheckItem {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct CheckReport {
  std::string suite;
  std::vector<CheckItem> items;
  bool all_passed() const {
    for (const CheckItem& item : items)
      if (!item.passed) return false;
    return true;
  }
};

// Exhaustive small-instance identity suites. Suite names: "couplings",
// "domination", "rc-identities", "concavity"; "all" runs every suite.
CheckReport run_check_suite(const std::string& name);
std::vector<CheckReport> run_check_suites(const std::string& which);

}  // namespace gibbs

#endif
