#include <omp.h>

#include <chrono>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "locsim/config.hpp"
#include "locsim/errors.hpp"
#include "locsim/experiments.hpp"

namespace {

enum ExitCode { kOk = 0, kInternal = 1, kConfig = 2, kNumerical = 3 };

struct Options {
  std::string config;
  std::string out;
  int threads = 0;
  bool verbose = false;
};

void report(const Options& o, const std::vector<std::string>& paths) {
  if (!o.verbose) return;
  for (const auto& p : paths) std::fprintf(stderr, "wrote %s\n", p.c_str());
}

int run(const std::string& command, const Options& o) {
  using namespace locsim;
  const auto t_begin = std::chrono::steady_clock::now();
  ExperimentConfig config = load_config(o.config);
  const std::string dir = o.out.empty() ? config.output.directory : o.out;
  if (o.threads > 0) omp_set_num_threads(o.threads);
  if (o.verbose) {
    std::fprintf(stderr, "%s: config %s, output %s, %d thread(s)\n", command.c_str(),
                 o.config.c_str(), dir.c_str(), omp_get_max_threads());
  }

  if (command == "band" || command == "gaps") {
    const auto r = compute_band(config);
    report(o, command == "band" ? write_band(r, config, dir) : write_gaps(r, dir));
    for (const auto& g : r.band_gaps) std::printf("frequency gap  [%.10e, %.10e]\n", g.lo, g.hi);
    for (const auto& g : r.momentum_gaps) std::printf("momentum gap   [%.10e, %.10e]\n", g.lo, g.hi);
    if (r.band_gaps.empty() && r.momentum_gaps.empty()) std::printf("no gaps detected\n");
  } else if (command == "modes") {
    const auto r = compute_modes(config);
    report(o, write_modes(r, config, dir));
    std::printf("%zu modes (%s)\n", r.d.size(), r.is_static ? "static" : "Floquet");
  } else if (command == "evolve") {
    const auto r = compute_evolve(config);
    report(o, write_evolve(r, config, dir));
    std::printf("peak d_* = %.6f at t = %.6f\n", r.report.d_star[r.peak], r.report.times[r.peak]);
  } else if (command == "roots") {
    const auto rows = compute_roots(config);
    report(o, write_roots(rows, dir));
    for (const auto& row : rows) {
      std::printf("%-9s omega = %.12e %+.3ei  residual %.2e\n", row.status.c_str(), row.root.real(),
                  row.root.imag(), row.residual);
    }
  }
  if (o.verbose) {
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
    std::fprintf(stderr, "%s: done in %.2f s\n", command.c_str(), secs);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Subwavelength localisation in time-modulated resonator chains"};
  app.require_subcommand(1);

  Options opts;
  const std::vector<std::pair<const char*, const char*>> commands = {
      {"band", "Floquet band structure, gaps and plots"},
      {"modes", "defect-mode spectrum of a supercell with degree of localisation"},
      {"evolve", "time evolution of the time-dependent degree of localisation"},
      {"roots", "defect frequencies from the Toeplitz determinant (N = 1)"},
      {"gaps", "band and momentum gaps only"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opts.config, "experiment config file")->required()->check(
        CLI::ExistingFile);
    sub->add_option("--out", opts.out, "output directory (overrides [output] directory)");
    sub->add_option("--threads", opts.threads, "OpenMP threads, 0 keeps the runtime default")
        ->check(CLI::NonNegativeNumber);
    sub->add_flag("--verbose", opts.verbose, "progress on stderr");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, opts);
  } catch (const locsim::ValidationError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const locsim::NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInternal;
  }
}
