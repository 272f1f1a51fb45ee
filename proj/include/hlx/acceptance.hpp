#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hlx {

struct AcceptanceLine {
  int id = 0;
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  double budget = 0.0;  // runtime limit in seconds; exceeding it fails the line
  std::string detail;   // key=value measurements
  std::string error;    // set when a module raised

  // "criterion 3 PASS 12.31s/30s flow_laws: ..."
  std::string line() const;
};

struct AcceptanceOptions {
  std::vector<int> only;     // empty: all of 1..9
  std::string artifact_dir;  // empty: no files written
  std::uint64_t seed = 1;
};

std::vector<AcceptanceLine> run_acceptance(const AcceptanceOptions& opt = {});

}  // namespace hlx
