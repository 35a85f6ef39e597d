#include "scnp/trace.hpp"

#include <fmt/format.h>

namespace scnp {

std::string format_number(double v) { return fmt::format("{:.17g}", v); }

std::string format_vector(const Vector& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) out += ';';
    out += format_number(v[i]);
  }
  return out;
}

void write_trace_header(std::ostream& out) { out << kTraceHeader << '\n'; }

void write_trace_row(std::ostream& out, const IterateState& st) {
  out << st.n << ',' << format_vector(st.x) << ',' << format_vector(st.u) << ',' << format_vector(st.z) << ','
      << format_vector(st.w) << ',' << format_vector(st.y) << ',' << format_number(st.diag.step_norm) << ','
      << format_number(st.diag.split_residual) << ',' << format_number(st.diag.fix_residual) << ','
      << format_number(st.diag.phi_x1) << ',' << format_number(st.diag.cond2_ratio) << '\n';
}

void write_trace(std::ostream& out, std::span<const IterateState> states) {
  write_trace_header(out);
  for (const auto& st : states) write_trace_row(out, st);
}

}  // namespace scnp
