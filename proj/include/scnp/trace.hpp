#pragma once

// CSV iteration traces: one row per iteration, vector cells joined by ';',
// numbers printed with 17 significant digits so reruns are byte-identical.

#include <ostream>
#include <span>
#include <string>

#include "scnp/solver.hpp"

namespace scnp {

inline constexpr const char* kTraceHeader =
    "n,x,u,z,w,y,step_norm,split_residual,fix_residual,phi_x1,cond2_ratio";

std::string format_number(double v);
std::string format_vector(const Vector& v);

void write_trace_header(std::ostream& out);
void write_trace_row(std::ostream& out, const IterateState& st);
void write_trace(std::ostream& out, std::span<const IterateState> states);

}  // namespace scnp
