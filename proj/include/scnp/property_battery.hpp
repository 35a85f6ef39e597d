#pragma once

// Randomized invariant checks across all modules, used by the
// `check-properties` subcommand and the acceptance suite.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "scnp/banach_space.hpp"
#include "scnp/solver.hpp"

namespace scnp {

struct PropertyCheck {
  std::string name;
  bool passed = true;
  long cases = 0;
  /// Largest violation observed (0 when every case is strictly inside its
  /// tolerance band).
  double worst = 0.0;
  double tolerance = 0.0;
};

struct BatteryOptions {
  std::uint64_t seed = 1;
  /// Random cases per check and exponent.
  int cases = 1000;
  /// Duality map under test. Defaults to scnp::duality_map; tests swap in a
  /// faulty one to exercise the failure path.
  std::function<Vector(const Vector&, const SpaceGeometry&)> duality;
};

std::vector<PropertyCheck> run_property_battery(const BatteryOptions& opts = {});

/// Fixed-width table, one line per check plus a summary line.
std::string format_report(const std::vector<PropertyCheck>& checks);

bool all_passed(const std::vector<PropertyCheck>& checks);

/// Hilbert split feasibility instance with box C = [-1,1]^cols, box
/// Q = [-0.2,0.2]^rows and a seeded rows x cols matrix A. The origin solves it;
/// x1 is a seeded point in the upper corner of C, S and every T_i are the
/// identity, gamma = 1/|A|^2.
ProblemInstance random_box_sfp(std::uint64_t seed, int rows, int cols);

}  // namespace scnp
