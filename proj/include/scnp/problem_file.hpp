#pragma once

// JSON problem files. Layout (all keys lower-case; unknown keys are rejected):
//
//   {
//     "E": {"dim": 1, "p": 2},            "F": {"dim": 1, "p": 2},
//     "A": {"rows": 1, "cols": 1, "data": [-2]}      row-major, or
//          {"random": {"rows": 5, "cols": 3, "seed": 7, "scale": 1}},
//     "M1": operator, "M2": operator, "C": set,
//     "S": map,                                         default identity
//     "family": {"maps": [map...], "lambda": 0.5 | "lambdas": [...],
//                "bound": 0.5, "depth": 50},           maps cycle to depth
//     "schedules": {"alpha": rule, "sigma": rule, "lambda": rule, "mu": rule,
//                   "error": rule, "error_direction": [...], "floor": 0.01},
//     "gamma": 0.1, "c_const": 1, "x1": [1],
//     "stop": {"tol": 1e-8, "max_iters": 100000, "divergence_guard": 1e8}
//   }
//
//   operator: {"type": "scaling", "a": 2}
//           | {"type": "linear_psd", "rows": n, "cols": n, "data": [...]}
//           | {"type": "indicator", "set": set}
//   set:      {"type": "full", "dim": n} | {"type": "box", "lo": [...], "hi": [...]}
//           | {"type": "ball", "center": [...], "radius": r, "exponent": 2}
//           | {"type": "halfspaces", "dim": n, "cuts": [{"a": [...], "b": b}...]}
//           | {"type": "intersection", "base": set, "cuts": [...]}
//   map:      {"type": "identity"} | {"type": "set_projection", "set": set}
//           | {"type": "affine", "q": {"rows", "cols", "data"}, "b": [...]}
//   rule:     {"rule": "constant", "value": c} | {"rule": "reciprocal", "scale": s, "offset": o}
//           | {"rule": "ratio", "offset": o} | {"rule": "explicit", "values": [...]}

#include <filesystem>
#include <string>

#include "json.hpp"
#include "scnp/solver.hpp"

namespace scnp {

struct ProblemFile {
  ProblemInstance instance;
  StoppingRule stop;
};

/// Parses and validates a problem document. Throws kSchema with a JSON
/// pointer-style path on any structural problem; solver-level validation
/// errors keep their own codes.
ProblemFile parse_problem(const nlohmann::json& doc);

/// Reads a UTF-8 JSON file; kIo if it cannot be opened, kSchema if it does not
/// parse.
ProblemFile load_problem(const std::filesystem::path& path);

/// Canonical document for an instance. Random matrices are written out
/// explicitly, families as full-depth map lists.
nlohmann::json to_json(const ProblemFile& problem);

/// Deterministic matrix with entries uniform in [-scale, scale], drawn from
/// mt19937_64 with a fixed bit-to-double conversion (portable across
/// standard libraries).
Matrix seeded_matrix(int rows, int cols, std::uint64_t seed, double scale);

}  // namespace scnp
