// Command line front end: run problem files, replay the scalar example
// against its closed forms, and run the property battery.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "scnp/error.hpp"
#include "scnp/example_oracle.hpp"
#include "scnp/problem_file.hpp"
#include "scnp/property_battery.hpp"
#include "scnp/trace.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitConverged = 0;
constexpr int kExitError = 1;
constexpr int kExitBudget = 2;

struct RunFlags {
  std::string problem;
  std::string trace;
  std::optional<long> max_iters;
  std::optional<double> tol;
};

struct Outcome {
  int code = kExitError;
  std::string message;
};

Outcome run_one(const fs::path& problem, const std::optional<fs::path>& trace, const RunFlags& flags) {
  try {
    scnp::ProblemFile pf = scnp::load_problem(problem);
    if (flags.max_iters) pf.stop.max_iters = *flags.max_iters;
    if (flags.tol) pf.stop.tol = *flags.tol;

    std::ofstream file;
    std::ostringstream buffer;
    std::ostream* out = &buffer;
    if (trace) {
      file.open(*trace, std::ios::binary | std::ios::trunc);
      if (!file) throw scnp::Error(scnp::ErrorCode::kIo, "cannot open trace file " + trace->string());
      out = &file;
    }
    scnp::write_trace_header(*out);
    const scnp::RunResult res =
        scnp::run(pf.instance, pf.stop, [&](const scnp::IterateState& st) { scnp::write_trace_row(*out, st); });
    if (!trace) std::cout << buffer.str();
    if (out->fail()) throw scnp::Error(scnp::ErrorCode::kIo, "failed writing trace");

    const auto iters = res.states.size();
    if (res.status == scnp::RunStatus::kConverged) {
      return {kExitConverged, fmt::format("{}: converged after {} iterations", problem.string(), iters)};
    }
    return {kExitBudget, fmt::format("{}: iteration budget exhausted after {} iterations", problem.string(), iters)};
  } catch (const scnp::Error& e) {
    return {kExitError, fmt::format("{}: {}", problem.string(), e.what())};
  } catch (const std::exception& e) {
    return {kExitError, fmt::format("{}: unexpected failure: {}", problem.string(), e.what())};
  }
}

int cmd_run(const RunFlags& flags) {
  const fs::path problem(flags.problem);
  std::error_code ec;
  if (!fs::is_directory(problem, ec)) {
    std::optional<fs::path> trace;
    if (!flags.trace.empty()) trace = flags.trace;
    const Outcome o = run_one(problem, trace, flags);
    (o.code == kExitError ? std::cerr : std::clog) << o.message << '\n';
    return o.code;
  }

  // Directory: one worker per *.json, traces named after each file stem.
  if (flags.trace.empty()) {
    std::cerr << "error: --trace must name an output directory when --problem is a directory\n";
    return kExitError;
  }
  const fs::path out_dir(flags.trace);
  fs::create_directories(out_dir, ec);
  if (ec) {
    std::cerr << "error: cannot create trace directory " << out_dir.string() << ": " << ec.message() << '\n';
    return kExitError;
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(problem)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    std::cerr << "error: no .json problem files in " << problem.string() << '\n';
    return kExitError;
  }
  std::vector<std::future<Outcome>> jobs;
  for (const auto& f : files) {
    jobs.push_back(std::async(std::launch::async, [f, &out_dir, &flags] {
      return run_one(f, out_dir / (f.stem().string() + ".csv"), flags);
    }));
  }
  int worst = kExitConverged;
  for (auto& j : jobs) {
    const Outcome o = j.get();
    std::clog << o.message << '\n';
    if (o.code == kExitError || (o.code == kExitBudget && worst == kExitConverged)) worst = o.code;
  }
  return worst;
}

int cmd_oracle(double x1, int steps) {
  try {
    const scnp::ExampleComparison cmp = scnp::compare_scalar_example(x1, steps);
    std::cout << fmt::format("steps {}\n", cmp.steps);
    for (const auto& [name, v] : {std::pair{"u", cmp.u}, {"z", cmp.z}, {"w", cmp.w}, {"y", cmp.y},
                                  {"c_bound", cmp.c_bound}, {"d_bound", cmp.d_bound}, {"x_next", cmp.x_next}}) {
      std::cout << fmt::format("{:<8} {:.3e}\n", name, v);
    }
    const double dev = cmp.max_deviation();
    const bool ok = dev <= 1e-9;
    std::cout << fmt::format("max deviation {:.3e} ({})\n", dev, ok ? "ok" : "exceeds 1e-9");
    return ok ? kExitConverged : kExitError;
  } catch (const scnp::Error& e) {
    std::cerr << "oracle-example: " << e.what() << '\n';
    return kExitError;
  }
}

int cmd_properties(std::uint64_t seed, bool faulty) {
  scnp::BatteryOptions opts;
  opts.seed = seed;
  if (faulty) {
    opts.duality = [](const scnp::Vector& x, const scnp::SpaceGeometry& g) {
      return scnp::Vector(1.001 * scnp::duality_map(x, g));
    };
  }
  const auto checks = scnp::run_property_battery(opts);
  std::cout << scnp::format_report(checks);
  return scnp::all_passed(checks) ? kExitConverged : kExitError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid projection solver for split common null point problems in l_p spaces"};
  app.require_subcommand(1);

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "Solve a problem file (or every *.json in a directory) and write a CSV trace");
  run->add_option("--problem", run_flags.problem, "Problem file or directory")->required();
  run->add_option("--trace", run_flags.trace, "Trace CSV (directory when --problem is a directory); stdout if omitted");
  run->add_option("--max-iters", run_flags.max_iters, "Override the iteration budget")->check(CLI::PositiveNumber);
  run->add_option("--tol", run_flags.tol, "Override the step-norm tolerance")->check(CLI::NonNegativeNumber);

  double x1 = 1.0;
  int steps = 1000;
  auto* oracle = app.add_subcommand("oracle-example", "Compare the solver with the closed-form scalar example");
  oracle->add_option("--x1", x1, "Starting point in [0, 1]")->check(CLI::Range(0.0, 1.0));
  oracle->add_option("--steps", steps, "Iterations to compare")->check(CLI::PositiveNumber);

  std::uint64_t seed = 1;
  bool faulty = false;
  auto* props = app.add_subcommand("check-properties", "Run the randomized invariant battery");
  props->add_option("--seed", seed, "Sampling seed");
  props->add_flag("--inject-faulty-duality", faulty)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitError;
  }

  if (*run) return cmd_run(run_flags);
  if (*oracle) return cmd_oracle(x1, steps);
  return cmd_properties(seed, faulty);
}
