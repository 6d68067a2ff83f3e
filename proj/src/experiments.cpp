#include "locsim/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "locsim/errors.hpp"
#include "locsim/output.hpp"

namespace locsim {

namespace {

bool wants(const ExperimentConfig& c, const char* format) {
  return std::find(c.output.formats.begin(), c.output.formats.end(), format) !=
         c.output.formats.end();
}

std::string join_path(const std::string& dir, const char* name) {
  return (std::filesystem::path(dir) / name).string();
}

SupercellSystem make_supercell(const ExperimentConfig& config) {
  const auto geom = make_geometry(config);
  const auto contrast = make_contrast(config);
  return build_supercell(geom, contrast, make_profile(config), config.solver.cells,
                         make_space_defect(config, contrast), make_time_defect(config),
                         config.solver.alpha);
}

}  // namespace

BandResult compute_band(const ExperimentConfig& config) {
  MonodromyOptions opts;
  opts.steps = config.solver.steps;
  BandResult r;
  r.bands = band_sweep(make_geometry(config), make_contrast(config), make_profile(config),
                       config.solver.alpha_count, opts);
  GapOptions gaps{config.solver.gap_tol, config.solver.im_tol};
  r.band_gaps = detect_band_gaps(r.bands, gaps);
  r.momentum_gaps = detect_momentum_gaps(r.bands, gaps);
  return r;
}

ModesResult compute_modes(const ExperimentConfig& config) {
  const auto sys = make_supercell(config);
  ModesResult r;
  if (sys.profile().is_static() && !sys.time_defect()) {
    const auto modes = static_defect_modes(sys);
    for (Eigen::Index j = 0; j < modes.omega.size(); ++j) {
      r.omega.emplace_back(modes.omega(j), 0.0);
      r.lambda.push_back(1.0);
    }
    r.d = modes.d;
    return r;
  }
  MonodromyOptions opts;
  opts.steps = config.solver.steps;
  const auto rep = floquet_defect_spectrum(sys, opts);
  r.is_static = false;
  r.omega = rep.omega;
  r.lambda = rep.lambda;
  r.d = rep.d;
  return r;
}

EvolveResult compute_evolve(const ExperimentConfig& config) {
  const auto sys = make_supercell(config);
  MonodromyOptions mono;
  mono.steps = config.solver.steps;
  const auto spectrum = floquet_defect_spectrum(sys, mono);
  const CVector initial = default_initial_state(sys, spectrum);

  EvolveResult r;
  r.period = sys.profile().period();
  EvolveOptions opts;
  opts.t_start = config.solver.t_start;
  opts.t_end = config.solver.t_end.value_or(opts.t_start + 2.0 * r.period);
  opts.sample_count = config.solver.sample_count;
  opts.steps_per_period = config.solver.steps_per_period;

  // First pass for d_*(t), second pass for snapshots (requested times plus the peak).
  const auto trace = evolve(sys, initial, opts);
  r.peak = static_cast<std::size_t>(std::max_element(trace.d_star.begin(), trace.d_star.end()) -
                                    trace.d_star.begin());
  opts.snapshot_times = config.solver.snapshots;
  if (opts.snapshot_times.empty()) {
    for (int k = 0; k <= 5; ++k) {
      opts.snapshot_times.push_back(opts.t_start + (opts.t_end - opts.t_start) * k / 5.0);
    }
  }
  opts.snapshot_times.push_back(trace.times[r.peak]);
  std::sort(opts.snapshot_times.begin(), opts.snapshot_times.end());
  opts.snapshot_times.erase(std::unique(opts.snapshot_times.begin(), opts.snapshot_times.end()),
                            opts.snapshot_times.end());
  for (double t : opts.snapshot_times) {
    if (t < opts.t_start || t > opts.t_end) {
      throw ValidationError("evolve: snapshot time " + std::to_string(t) +
                            " lies outside the integration window");
    }
  }
  r.report = evolve(sys, initial, opts);
  r.report.d = spectrum.d;
  r.report.lambda = spectrum.lambda;
  r.report.omega = spectrum.omega;
  for (Eigen::Index k = 0; k < sys.dimension(); ++k) r.site_cells.push_back(sys.cell_of(k));
  return r;
}

std::vector<double> toeplitz_etas(const ExperimentConfig& config) {
  if (config.geometry.lengths.size() != 1) {
    throw UnsupportedConfiguration("roots: the Toeplitz solver needs N = 1");
  }
  const auto contrast = make_contrast(config);
  const auto defect = make_space_defect(config, contrast);
  int last = -1;
  for (const auto& [site, eta] : defect.eta()) {
    if (site.first < 0) {
      throw ValidationError("roots: defect cells must be 0..M, got cell " +
                            std::to_string(site.first));
    }
    last = std::max(last, site.first);
  }
  std::vector<double> etas(static_cast<std::size_t>(last + 1), 0.0);
  for (const auto& [site, eta] : defect.eta()) etas[static_cast<std::size_t>(site.first)] = eta;
  if (std::all_of(etas.begin(), etas.end(), [](double e) { return e == 0.0; })) {
    throw ValidationError("roots: all eta are zero, there is no defect to solve for");
  }
  return etas;
}

std::vector<RootRow> compute_roots(const ExperimentConfig& config) {
  const auto etas = toeplitz_etas(config);
  const auto geom = make_geometry(config);
  const auto contrast = make_contrast(config);
  const ToeplitzModel model(geom, contrast, make_profile(config), config.solver.K,
                            config.solver.quad_points);
  std::vector<cplx> guesses = config.solver.guesses;
  if (guesses.empty()) {
    // Just above the top of the static band.
    guesses.push_back(1.05 * std::sqrt(model.capacitance(geom.zone_edge())));
  }
  RootOptions opts;
  opts.tol = config.solver.root_tol;
  std::vector<RootRow> rows;
  for (cplx g : guesses) {
    RootRow row{g, {}, 0.0, 0, "converged"};
    try {
      const auto res = find_root(g, etas, model, opts);
      row.root = res.omega;
      row.residual = res.residual;
      row.iterations = res.iterations;
    } catch (const RootFailure& e) {
      row.status = "failed";
      row.residual = e.residual();
      row.iterations = opts.max_iterations;
    } catch (const NearSingularityError&) {
      row.status = "failed";
    }
    if (row.status == "converged") {
      const bool duplicate = std::any_of(rows.begin(), rows.end(), [&](const RootRow& o) {
        return o.status == "converged" &&
               std::abs(o.root - row.root) <= 1e-6 * std::max(std::abs(o.root), std::abs(row.root));
      });
      if (duplicate) continue;
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<std::string> write_band(const BandResult& r, const ExperimentConfig& config,
                                    const std::string& dir) {
  std::vector<std::string> paths;
  const auto& bs = r.bands;
  if (wants(config, "csv")) {
    CsvTable t({"alpha", "band_index", "re_omega", "im_omega"});
    for (std::size_t a = 0; a < bs.alpha_grid.size(); ++a) {
      for (std::size_t j = 0; j < bs.band_count(); ++j) {
        t.row({csv_number(bs.alpha_grid[a]), std::to_string(j + 1),
               csv_number(bs.bands[a][j].real()), csv_number(bs.bands[a][j].imag())});
      }
    }
    paths.push_back(join_path(dir, "band.csv"));
    write_atomic(paths.back(), t.str());
  }
  if (wants(config, "svg")) {
    SvgPlot plot{"Band structure", "alpha", "omega", {}, {}};
    static const char* colours[] = {"#1f4e9c", "#2f8f46", "#8c3fa8", "#c77c1a", "#3a9fb5"};
    for (std::size_t j = 0; j < bs.band_count(); ++j) {
      SvgSeries re{{}, {}, colours[j % 5], true, j == 0 ? "Re omega" : ""};
      SvgSeries im{{}, {}, "#c0392b", false, j == 0 ? "Im omega" : ""};
      for (std::size_t a = 0; a < bs.alpha_grid.size(); ++a) {
        re.x.push_back(bs.alpha_grid[a]);
        re.y.push_back(bs.bands[a][j].real());
        im.x.push_back(bs.alpha_grid[a]);
        im.y.push_back(bs.bands[a][j].imag());
      }
      plot.series.push_back(std::move(re));
      plot.series.push_back(std::move(im));
    }
    for (const auto& g : r.momentum_gaps) plot.bands.push_back({g.lo, g.hi, true, "#4a7bd0"});
    for (const auto& g : r.band_gaps) plot.bands.push_back({g.lo, g.hi, false, "#d04a4a"});
    paths.push_back(join_path(dir, "band.svg"));
    write_atomic(paths.back(), plot.render());
  }
  for (auto& p : write_gaps(r, dir)) paths.push_back(std::move(p));
  return paths;
}

std::vector<std::string> write_gaps(const BandResult& r, const std::string& dir) {
  CsvTable t({"type", "lo", "hi"});
  for (const auto& g : r.band_gaps) t.row({"frequency", csv_number(g.lo), csv_number(g.hi)});
  for (const auto& g : r.momentum_gaps) t.row({"momentum", csv_number(g.lo), csv_number(g.hi)});
  const auto path = join_path(dir, "gaps.csv");
  write_atomic(path, t.str());
  return {path};
}

std::vector<std::string> write_modes(const ModesResult& r, const ExperimentConfig& config,
                                     const std::string& dir) {
  std::vector<std::string> paths;
  if (wants(config, "csv")) {
    CsvTable t({"mode_index", "re_omega", "im_omega", "lambda", "d"});
    for (std::size_t j = 0; j < r.d.size(); ++j) {
      t.row({std::to_string(j + 1), csv_number(r.omega[j].real()), csv_number(r.omega[j].imag()),
             csv_number(r.lambda[j]), csv_number(r.d[j])});
    }
    paths.push_back(join_path(dir, "modes.csv"));
    write_atomic(paths.back(), t.str());
  }
  if (wants(config, "svg")) {
    SvgSeries pts{{}, {}, "#1f4e9c", false, "modes"};
    for (std::size_t j = 0; j < r.d.size(); ++j) {
      pts.x.push_back(r.omega[j].real());
      pts.y.push_back(r.d[j]);
    }
    SvgPlot plot{"Degree of localisation", "Re omega", "d", {pts}, {}};
    paths.push_back(join_path(dir, "dol.svg"));
    write_atomic(paths.back(), plot.render());
  }
  return paths;
}

std::vector<std::string> write_evolve(const EvolveResult& r, const ExperimentConfig& config,
                                      const std::string& dir) {
  std::vector<std::string> paths;
  const auto& rep = r.report;
  if (wants(config, "csv")) {
    CsvTable d({"t", "d_star"});
    for (std::size_t k = 0; k < rep.times.size(); ++k) {
      d.row({csv_number(rep.times[k]), csv_number(rep.d_star[k])});
    }
    paths.push_back(join_path(dir, "dstar.csv"));
    write_atomic(paths.back(), d.str());

    CsvTable s({"t", "site_index", "abs_u"});
    for (const auto& [t, u] : rep.snapshots) {
      for (Eigen::Index k = 0; k < u.size(); ++k) {
        s.row({csv_number(t), std::to_string(k + 1), csv_number(u(k))});
      }
    }
    paths.push_back(join_path(dir, "snapshots.csv"));
    write_atomic(paths.back(), s.str());
  }
  if (wants(config, "svg")) {
    SvgPlot dplot{"Time-dependent degree of localisation", "t", "d_*",
                  {{rep.times, rep.d_star, "#1f4e9c", true, ""}}, {}};
    paths.push_back(join_path(dir, "dstar.svg"));
    write_atomic(paths.back(), dplot.render());

    SvgPlot splot{"Snapshots of |u|", "site", "|u|", {}, {}};
    static const char* colours[] = {"#1f4e9c", "#2f8f46", "#8c3fa8", "#c77c1a", "#3a9fb5",
                                    "#c0392b", "#555555"};
    for (std::size_t k = 0; k < rep.snapshots.size(); ++k) {
      const auto& [t, u] = rep.snapshots[k];
      SvgSeries ser{{}, {}, colours[k % 7], true, "t = " + std::to_string(t)};
      for (Eigen::Index i = 0; i < u.size(); ++i) {
        ser.x.push_back(static_cast<double>(i + 1));
        ser.y.push_back(u(i));
      }
      splot.series.push_back(std::move(ser));
    }
    paths.push_back(join_path(dir, "snapshots.svg"));
    write_atomic(paths.back(), splot.render());
  }
  return paths;
}

std::vector<std::string> write_roots(const std::vector<RootRow>& rows, const std::string& dir) {
  CsvTable t({"guess", "guess_im", "root_re", "root_im", "residual", "iterations", "status"});
  for (const auto& r : rows) {
    t.row({csv_number(r.guess.real()), csv_number(r.guess.imag()), csv_number(r.root.real()),
           csv_number(r.root.imag()), csv_number(r.residual), std::to_string(r.iterations),
           r.status});
  }
  const auto path = join_path(dir, "roots.csv");
  write_atomic(path, t.str());
  return {path};
}

}  // namespace locsim
