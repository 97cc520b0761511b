#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "corrlab/numerics.hpp"

namespace corrlab {

// Size caps for randomly drawn instances.
struct InstanceCaps {
  int max_blocks = 2;
  int max_block_size = 2;
  int max_multiplicity = 2;
  int max_quiver_entry = 2;
};

struct SuiteConfig {
  std::uint64_t seed = 1;
  int depth = 4;  // truncation level for the graded constructions
  Tolerance tolerance;
  std::vector<std::string> suites;  // empty means every suite
  int instances_per_suite = 5;
  InstanceCaps caps;
};

// One verified statement: the law it checks, the measured defect, and the
// level window the measurement covered (empty when not graded).
struct CheckResult {
  std::string name;
  std::string anchor;  // the mathematical law the check pins down
  double defect = 0;
  std::string levels;
  bool passed = false;
};

struct InstanceResult {
  std::string descriptor;
  std::vector<CheckResult> checks;
};

struct SuiteResult {
  std::string suite;
  std::vector<InstanceResult> instances;
};

struct Report {
  SuiteConfig config;
  std::vector<SuiteResult> suites;
  int checks_passed = 0;
  int checks_failed = 0;
  double wall_seconds = 0;
  bool all_pass() const { return checks_failed == 0; }
};

// The recognized suite names, in canonical order.
const std::vector<std::string>& suite_names();

// Runs the configured suites on seeded instances. Deterministic for a fixed
// config: every random draw flows through one generator seeded once, and
// instances are assembled in index order. Throws UnknownSuite for a name
// outside suite_names() and BadConfig for invalid sizes (the graded suites
// require depth >= 2).
Report run_suites(const SuiteConfig& cfg);

// JSON rendering of the report. All content is deterministic except the
// "run_stamp" field, which carries the timestamp and wall time.
std::string report_json(const Report& r);

// Compact human-readable rendering, one line per check.
std::string report_markdown(const Report& r);

// Human-readable walkthrough of one instance descriptor given as JSON, e.g.
//   {"kind": "quiver", "counts": [[2]]}
//   {"kind": "scalar", "t": [[0.0]]}
// Prints the constructed objects' dimensions, multiplicity matrices, and
// defect tables. Throws ParseError when the descriptor does not parse.
std::string explain_instance(const std::string& json_text);

}  // namespace corrlab
