#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>

#include "dob/models.hpp"
#include "dob/sim.hpp"

namespace dob::cli {

/// Process exit codes.
enum Exit : int { Ok = 0, Fail = 1, ConfigError = 2, AnalysisError = 3, Diverged = 4 };

struct FreqOptions {
  std::size_t points = 1024;
};

struct ConstraintOptions {
  double gamma_s = 0.5;
  double gamma_t = 0.5;
};

struct RootLocusOptions {
  double alpha_from = 0.5;
  double alpha_to = 8.0;
  std::size_t steps = 16;  // geometric spacing
  PositionIntegrator integrator = PositionIntegrator::BackwardEuler;
};

// Each command writes its CSV (if any) to `data` and a human-readable report
// to `report`, and returns the exit code. Library errors propagate as
// dob::Error; run_guarded maps them to exit codes.
int freq(const SimConfig& cfg, const FreqOptions& opt, std::ostream& data);
int constraints(const SimConfig& cfg, const ConstraintOptions& opt, std::ostream& report);
int bode(const SimConfig& cfg, std::ostream& report);
int rootlocus(const SimConfig& cfg, const RootLocusOptions& opt, std::ostream& data);
int sim(const SimConfig& cfg, std::ostream& data, std::ostream& report);

/// Runs `body`, printing any error to `err` and mapping it to an exit code.
template <class F>
int run_guarded(F&& body, std::ostream& err);

int exit_code_for(const std::exception& e);

}  // namespace dob::cli

#include <exception>
#include <ostream>

template <class F>
int dob::cli::run_guarded(F&& body, std::ostream& err) {
  try {
    return body();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}
