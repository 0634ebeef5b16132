#pragma once

#include <iosfwd>
#include <string>

#include "dob/sim.hpp"

namespace dob {

/// INI scenario with sections [plant] [observer] [controller] [environment]
/// [noise] [run]. Unknown sections or keys and malformed values throw
/// Error(Config) naming the key. The environment is present iff any
/// environment key other than the disturbance keys is given.
///
/// A signal `x` is written as `x = step|ramp|sine|none` plus optional
/// `x_amplitude`, `x_start`, `x_frequency`, `x_held`.
SimConfig parse_scenario(std::istream& in);
SimConfig load_scenario(const std::string& path);

/// Writes every field, numbers with 17 significant digits, so that
/// parse_scenario(write_scenario(c)) reproduces c exactly.
void write_scenario(std::ostream& out, const SimConfig& cfg);

bool same_config(const SimConfig& a, const SimConfig& b);

}  // namespace dob
