#include "hmfloquet/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <json.hpp>
#include <ostream>

#include "hmfloquet/drive.hpp"
#include "hmfloquet/dynamics.hpp"
#include "hmfloquet/effective.hpp"
#include "hmfloquet/floquet.hpp"

namespace hmf {

namespace {

SystemParams system_at(const RunConfig& c, double a_over_w, double phi, double chi) {
  SystemParams p;
  p.tunneling = c.v;
  p.nonlinearity = chi;
  p.drive = DriveParams(a_over_w * c.omega, c.f, c.omega, phi);
  return p;
}

SolverOptions solver_options(const RunConfig& c) {
  SolverOptions o;
  o.tol = c.tol;
  o.max_iter = c.max_iter;
  o.damping = c.damping;
  o.cutoff = c.cutoff;
  return o;
}

std::array<cplx, 2> initial_state(const RunConfig& c) {
  if (c.initial == "2") return {0.0, 1.0};
  if (c.initial == "ground") return {std::sqrt(0.5), std::sqrt(0.5)};
  return {1.0, 0.0};
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string cell_text(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) return std::isnan(*d) ? "nan" : format_real(*d);
  if (const long* l = std::get_if<long>(&c)) return std::to_string(*l);
  return csv_escape(std::get<std::string>(c));
}

void add_trajectory(Table& t, const std::vector<Cell>& prefix, const Trajectory& tr) {
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    std::vector<Cell> row = prefix;
    row.insert(row.end(), {tr.times[i], tr.c1[i].real(), tr.c1[i].imag(), tr.c2[i].real(), tr.c2[i].imag(),
                           std::norm(tr.c1[i]), std::norm(tr.c2[i])});
    t.rows.push_back(std::move(row));
  }
}

const std::vector<std::string> kTrajectoryColumns{"t", "re_c1", "im_c1", "re_c2", "im_c2", "pop1", "pop2"};

}  // namespace

CommandOutput cmd_spectrum(const RunConfig& cfg) {
  const std::vector<double> grid = cfg.a_over_omega.values();
  CommandOutput out;
  Table& t = out.main;
  t.columns = {"branch_id", "A_over_omega", "branch_label", "quasienergy", "imbalance", "avg_pop1",
               "residual", "N", "phi", "chi"};
  long id = 0;
  for (double phi : cfg.phi.values()) {
    for (double chi : cfg.chi.values()) {
      const SystemParams p = system_at(cfg, grid.front(), phi, chi);
      const auto branches = sweep_spectrum(p, grid, solver_options(cfg));
      const bool seeded = std::any_of(branches.begin(), branches.end(), [&](const SpectrumBranch& b) {
        return b.points.front().a_over_omega == grid.front();
      });
      if (!seeded) throw SolverFailure("no Floquet state converged at the first grid point");
      for (const auto& b : branches) {
        std::string note = "branch " + std::to_string(id) + " " + to_string(b.label) + " phi=" + format_real(phi) +
                           " chi=" + format_real(chi);
        if (b.birth) note += " birth=" + format_real(*b.birth);
        t.notes.push_back(note);
        for (const auto& pt : b.points) {
          const FloquetState& s = pt.state;
          t.rows.push_back({id, pt.a_over_omega, to_string(b.label), s.quasienergy, population_imbalance(s),
                            cycle_averaged_population(s, 1), s.residual_norm, static_cast<long>(s.cutoff), phi,
                            chi});
        }
        ++id;
      }
    }
  }
  return out;
}

CommandOutput cmd_perturb(const RunConfig& cfg) {
  CommandOutput out;
  Table& t = out.main;
  t.columns = {"A_over_omega", "phi", "re_fbar", "im_fbar", "delta", "delta_eff", "splitting"};
  if (cfg.validate) t.columns.insert(t.columns.end(), {"re_fbar_quad", "im_fbar_quad", "delta_quad"});
  const double chi = cfg.chi.values().front();
  for (double a : cfg.a_over_omega.values()) {
    for (double phi : cfg.phi.values()) {
      const SystemParams p = system_at(cfg, a, phi, chi);
      const EffectiveParams e = effective_params(p);
      std::vector<Cell> row{a,
                            p.drive.phase,
                            e.coupling_factor.real(),
                            e.coupling_factor.imag(),
                            e.bias_series,
                            e.delta_eff,
                            effective_splitting(e)};
      if (cfg.validate) {
        const QuadratureAverages q = effective_quadrature(p.drive);
        row.insert(row.end(), {q.f_bar.real(), q.f_bar.imag(), q.delta});
      }
      t.rows.push_back(std::move(row));
    }
  }
  return out;
}

CommandOutput cmd_dynamics(const RunConfig& cfg) {
  CommandOutput out;
  Table& t = out.main;
  t.columns = {"A_over_omega", "phi",           "chi",          "avg_pop1",       "avg_pop2",
               "first_half_pop1", "second_half_pop1", "window_consistent", "final_pop1", "max_norm_drift"};
  if (cfg.validate) t.columns.push_back("step_doubling_error");
  Table traj;
  traj.columns = {"A_over_omega", "phi", "chi"};
  traj.columns.insert(traj.columns.end(), kTrajectoryColumns.begin(), kTrajectoryColumns.end());

  IntegrateOptions opts;
  opts.dt = cfg.dt;
  opts.step_doubling_check = cfg.validate;
  for (double a : cfg.a_over_omega.values()) {
    for (double phi : cfg.phi.values()) {
      for (double chi : cfg.chi.values()) {
        const SystemParams p = system_at(cfg, a, phi, chi);
        const Trajectory tr = integrate(initial_state(cfg), p, std::nullopt, cfg.t_end, opts);
        const double period = p.drive.period();
        const double lo = cfg.t_end > 0 ? period : cfg.t_end;
        const double hi = cfg.t_end > 0 ? cfg.t_end : -period;
        const WindowAverage w1 = windowed_population(tr, 1, lo, hi);
        const double avg2 = time_averaged_population(tr, 2, lo, hi);
        std::vector<Cell> row{a,     p.drive.phase, chi, w1.value, avg2, w1.first_half, w1.second_half,
                              static_cast<long>(w1.consistent()), std::norm(tr.c1.back()), tr.max_norm_drift};
        if (cfg.validate) row.push_back(*tr.step_doubling_error);
        t.rows.push_back(std::move(row));
        if (cfg.trajectories) add_trajectory(traj, {a, p.drive.phase, chi}, tr);
      }
    }
  }
  t.notes.push_back("averaging window [T, t_end] (or [t_end, -T] backwards); initial=" + cfg.initial);
  if (cfg.trajectories) out.extra.emplace_back("traj", std::move(traj));
  return out;
}

CommandOutput cmd_ramp(const RunConfig& cfg) {
  CommandOutput out;
  Table& t = out.main;
  t.columns = {"phi", "pop1_final", "pop2_final", "chi", "error"};
  Table traj;
  traj.columns = {"phi", "chi"};
  traj.columns.insert(traj.columns.end(), kTrajectoryColumns.begin(), kTrajectoryColumns.end());

  IntegrateOptions opts;
  opts.dt = cfg.dt;
  if (cfg.trajectories) opts.max_samples = 20001;
  std::vector<double> phis;
  for (double phi : cfg.phi.values()) phis.push_back(canonical_phase(phi));
  for (double chi : cfg.chi.values()) {
    const SystemParams base = system_at(cfg, 0.0, 0.0, chi);
    const auto rows = ramp_localization(phis, base, cfg.alpha, cfg.t_f, cfg.dt_avg, opts, cfg.trajectories,
                                        cfg.threads);
    for (const auto& r : rows) {
      if (!r.error.empty()) out.failed_checks = true;
      t.rows.push_back({r.phi, r.pop1, r.pop2, chi, r.error});
      if (r.trajectory) add_trajectory(traj, {r.phi, chi}, *r.trajectory);
    }
  }
  t.notes.push_back("start (1,1)/sqrt2; A = alpha*min(t, tf); averages over [tf, tf + dt-avg]; target A/omega=" +
                    format_real(cfg.alpha * cfg.t_f / cfg.omega));
  if (cfg.trajectories) out.extra.emplace_back("traj", std::move(traj));
  return out;
}

CommandOutput cmd_symmetry(const RunConfig& cfg) {
  CommandOutput out;
  Table& t = out.main;
  t.columns = {"A_over_omega", "phi", "shift_symmetric", "antisymmetric", "time_reversal_symmetric",
               "t0_antisymmetric", "t0_time_reversal", "shift_residual", "antisymmetry_residual",
               "time_reversal_residual"};
  constexpr double kTol = 1e-9;
  for (double a : cfg.a_over_omega.values()) {
    for (double phi : cfg.phi.values()) {
      const DriveParams d(a * cfg.omega, cfg.f, cfg.omega, phi);
      const SymmetryReport r = classify_symmetries(d, kTol);
      const double nan = std::nan("");
      t.rows.push_back({a, d.phase, static_cast<long>(r.shift_symmetric), static_cast<long>(r.antisymmetric),
                        static_cast<long>(r.time_reversal_symmetric), r.antisymmetry_point.value_or(nan),
                        r.time_reversal_point.value_or(nan), r.shift_residual, r.antisymmetry_residual,
                        r.time_reversal_residual});
    }
  }
  t.notes.push_back("symmetry tolerance " + format_real(kTol) + " relative to |A|(1+|f|)");
  return out;
}

CommandOutput cmd_validate(const RunConfig& cfg) {
  CommandOutput out;
  Table& t = out.main;
  t.columns = {"check", "A_over_omega", "phi", "chi", "value", "tolerance", "pass"};
  const auto add = [&](const std::string& name, double a, double phi, double chi, double value, double tol) {
    const bool ok = value <= tol;
    if (!ok) out.failed_checks = true;
    t.rows.push_back({name, a, phi, chi, value, tol, static_cast<long>(ok)});
  };
  const SolverOptions opts = solver_options(cfg);
  for (double a : cfg.a_over_omega.values()) {
    for (double phi : cfg.phi.values()) {
      const SystemParams lin = system_at(cfg, a, phi, 0.0);
      const double ph = lin.drive.phase;

      const QuadratureAverages q = effective_quadrature(lin.drive);
      add("fbar_series_vs_quadrature", a, ph, 0.0, std::abs(f_bar(lin.drive) - q.f_bar), 1e-8);
      add("delta_series_vs_quadrature", a, ph, 0.0, std::abs(delta_bias(lin.drive) - q.delta), 1e-8);

      const auto mono = monodromy_quasienergies(lin);
      const auto states = find_floquet_states(lin, opts);
      double worst = states.size() == 2 ? 0.0 : std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < states.size() && k < 2; ++k) {
        const double d = std::abs(states[k].quasienergy - mono[k]);
        worst = std::max(worst, std::min(d, std::abs(d - cfg.omega)));
      }
      add("solver_vs_monodromy", a, ph, 0.0, worst, 1e-8);

      for (double chi : cfg.chi.values()) {
        const SystemParams p = system_at(cfg, a, phi, chi);
        const auto found = find_floquet_states(p, opts);
        if (found.empty()) throw SolverFailure("no Floquet state converged");
        SolverOptions wide = opts;
        wide.adaptive_cutoff = false;
        wide.cutoff = 2 * found.front().cutoff;
        const FloquetState doubled = solve_floquet_state(p, found.front().with_cutoff(wide.cutoff), wide);
        add("cutoff_doubling", a, ph, chi, std::abs(doubled.quasienergy - found.front().quasienergy), 10 * cfg.tol);

        IntegrateOptions io;
        io.dt = cfg.dt;
        const Trajectory tr = integrate(initial_state(cfg), p, std::nullopt, cfg.t_end, io);
        add("norm_drift", a, ph, chi, tr.max_norm_drift, 1e-9);
      }
    }
  }
  return out;
}

CommandOutput dispatch(const RunConfig& cfg) {
  switch (cfg.command) {
    case Command::spectrum: return cmd_spectrum(cfg);
    case Command::perturb: return cmd_perturb(cfg);
    case Command::dynamics: return cmd_dynamics(cfg);
    case Command::ramp: return cmd_ramp(cfg);
    case Command::symmetry: return cmd_symmetry(cfg);
    case Command::validate: return cmd_validate(cfg);
  }
  throw ConfigError("unknown command");
}

void write_csv(std::ostream& os, const RunConfig& cfg, const Table& t) {
  os << "# hmfloquet " << to_string(cfg.command) << "\n";
  for (const auto& [k, v] : config_to_key_values(cfg)) os << "# " << k << "=" << v << "\n";
  for (const auto& n : t.notes) os << "# " << n << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell_text(row[i]);
    os << "\n";
  }
}

void write_json(std::ostream& os, const RunConfig& cfg, const Table& t) {
  nlohmann::ordered_json j;
  j["command"] = to_string(cfg.command);
  j["config"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : config_to_key_values(cfg)) j["config"][k] = v;
  j["notes"] = t.notes;
  j["columns"] = t.columns;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json r = nlohmann::ordered_json::array();
    for (const auto& c : row) {
      if (const double* d = std::get_if<double>(&c)) {
        if (std::isfinite(*d)) r.push_back(*d);
        else r.push_back(nullptr);
      } else if (const long* l = std::get_if<long>(&c)) {
        r.push_back(*l);
      } else {
        r.push_back(std::get<std::string>(c));
      }
    }
    j["rows"].push_back(std::move(r));
  }
  os << j.dump(1) << "\n";
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    cfg.check();
    if (cfg.trajectories && cfg.out.empty()) throw ConfigError("trajectory output needs --out");
    if (cfg.trajectories && cfg.command != Command::dynamics && cfg.command != Command::ramp)
      throw ConfigError("trajectories are available for dynamics and ramp only");

    std::ofstream file;
    if (!cfg.out.empty()) {
      file.open(cfg.out, std::ios::binary);
      if (!file) throw IoError("cannot write '" + cfg.out + "'");
    }
    const CommandOutput result = dispatch(cfg);

    if (cfg.out.empty()) {
      if (cfg.json) write_json(out, cfg, result.main);
      else write_csv(out, cfg, result.main);
    } else {
      write_csv(file, cfg, result.main);
      file.close();
      if (!file) throw IoError("failed writing '" + cfg.out + "'");
      std::vector<std::pair<std::string, const Table*>> files{{cfg.out + ".json", &result.main}};
      for (const auto& [suffix, table] : result.extra) files.emplace_back(cfg.out + "." + suffix + ".csv", &table);
      for (const auto& [path, table] : files) {
        const bool as_json = path == cfg.out + ".json";
        if (as_json && !cfg.json) continue;
        std::ofstream f(path, std::ios::binary);
        if (!f) throw IoError("cannot write '" + path + "'");
        if (as_json) write_json(f, cfg, *table);
        else write_csv(f, cfg, *table);
        if (!f) throw IoError("failed writing '" + path + "'");
      }
    }
    if (result.failed_checks) {
      err << "hmfloquet: some rows or checks failed; see output\n";
      return 3;
    }
    return 0;
  } catch (const PreconditionError& e) {
    err << "hmfloquet: configuration error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    err << "hmfloquet: I/O error: " << e.what() << "\n";
    return 2;
  } catch (const ConvergenceFailure& e) {
    err << "hmfloquet: solver failure: " << e.what() << " (best residual " << format_real(e.residual()) << ")\n";
    return 3;
  } catch (const IntegrationFailure& e) {
    err << "hmfloquet: integration failure at t=" << format_real(e.time()) << ": " << e.what() << "\n";
    return 3;
  } catch (const std::runtime_error& e) {
    err << "hmfloquet: solver failure: " << e.what() << "\n";
    return 3;
  } catch (const std::logic_error& e) {
    err << "hmfloquet: internal error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace hmf
