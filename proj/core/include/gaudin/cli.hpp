#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace gaudin {

/// Command-line overrides applied on top of the problem file's solver block.
struct CliOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<int> starts;
  double perturb = 0.0;  // verify: inject solutions shifted by this amount
};

struct CliOutcome {
  /// 0 all checks pass, 1 mathematical check failed, 2 invalid input,
  /// 3 resource cap exceeded.
  int exit_code = 0;
  std::string report;  // one JSON document per run
  std::string table;   // human-readable summary (printed with --pretty)
};

/// Parses the problem text, runs one of solve | verify | spectrum | miura
/// and returns the machine report plus exit code.  Does not throw: failures
/// are encoded in the exit code and an error document.
CliOutcome run_problem(const std::string& command, const std::string& problem_text,
                       const CliOverrides& overrides = {});

/// GAUDIN_THREADS environment cap (default 1, clamped to [1, 64]).
int thread_cap_from_env();

}  // namespace gaudin
