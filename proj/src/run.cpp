#include "gkdv/run.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <limits>
#include <optional>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "gkdv/fits.hpp"
#include "gkdv/warnings.hpp"

namespace gkdv {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

json to_json(const FitResult& r) {
  json j;
  json params = json::object();
  for (const auto& [k, v] : r.params) params[k] = v;
  j["params"] = params;
  j["residual_l2"] = r.residual_l2;
  j["residual_linf"] = r.residual_linf;
  if (r.correlation) j["correlation"] = *r.correlation;
  if (r.stddev) j["stddev"] = *r.stddev;
  j["window"] = {r.window.begin, r.window.end};
  j["iterations"] = r.iterations;
  j["flags"] = r.flags;
  return j;
}

template <class F>
json attempt(F&& f) {
  try {
    return to_json(f());
  } catch (const std::exception& e) {
    return json{{"error", e.what()}};
  }
}

std::string snapshot_name(std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snapshot_%04zu.txt", k);
  return buf;
}

struct Output {
  fs::path dir;
  std::vector<std::string> files;

  std::string path(const std::string& name) {
    files.push_back(name);
    return (dir / name).string();
  }
};

Output prepare_output(const RunConfig& cfg) {
  Output out{fs::path(cfg.output.directory), {}};
  std::error_code ec;
  fs::create_directories(out.dir, ec);
  if (ec || !fs::is_directory(out.dir)) {
    throw IoError("cannot create output directory " + out.dir.string());
  }
  return out;
}

SnapshotHeader header_for(const RunConfig& cfg, double t) {
  SnapshotHeader h;
  h.N = cfg.N;
  h.D = cfg.D;
  h.n = cfg.model.n;
  h.eps = cfg.model.eps;
  h.t = t;
  return h;
}

// folds x into [-pi D, pi D)
double fold(double x, const Grid& g) {
  const double len = g.length();
  const double lo = -0.5 * len;
  return x - len * std::floor((x - lo) / len);
}

std::optional<SnapshotFile> initial_file(const RunConfig& cfg) {
  if (cfg.initial.kind != InitialKind::file) return std::nullopt;
  return read_snapshot(cfg.initial.path);
}

Field on_config_grid(const Field& f, const RunConfig& cfg) {
  const Grid g = cfg.grid();
  if (f.grid == g) return f;
  return resample(f, g);
}

DirectOptions direct_options(const RunConfig& cfg) {
  DirectOptions o;
  o.snapshot_times = cfg.output.snapshots;
  o.record_stride = cfg.output.stride;
  o.refine_max = cfg.output.refine_max;
  return o;
}

ExitStatus status_of(StopReason r) {
  return r == StopReason::completed ? ExitStatus::clean : ExitStatus::truncated;
}

ExitStatus status_of(RescaledStop r) {
  switch (r) {
    case RescaledStop::completed: return ExitStatus::clean;
    case RescaledStop::non_finite: return ExitStatus::hard_failure;
    default: return ExitStatus::truncated;
  }
}

void write_direct_outputs(const RunConfig& cfg, const DirectTrajectory& traj, Output& out) {
  write_series(out.path("series.csv"), traj);
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    const auto& s = traj.snapshots[k];
    write_snapshot(out.path(snapshot_name(k)), s.field, header_for(cfg, s.t));
  }
  write_snapshot(out.path("final.txt"), traj.final_state, header_for(cfg, traj.final_time));
}

json direct_summary(const RunConfig& cfg, const DirectTrajectory& traj) {
  json j;
  j["mode"] = to_string(cfg.mode);
  j["stop"] = to_string(traj.stop);
  j["message"] = traj.message;
  j["steps"] = traj.steps;
  j["final_time"] = traj.final_time;
  j["records"] = traj.records.size();
  const auto& last = traj.records.back();
  j["final_delta"] = last.delta;
  j["final_linf"] = last.inv.linf;
  j["final_tail"] = last.tail;
  return j;
}

RunOutcome run_direct_mode(const RunConfig& cfg) {
  Output out = prepare_output(cfg);
  DirectOptions opts = direct_options(cfg);
  const auto file = initial_file(cfg);
  if (file) opts.t_start = file->header.t;
  const Field u0 = initial_field(cfg);
  const DirectTrajectory traj = run_direct(u0, cfg.irk4(), cfg.model, *cfg.stepping.T, opts);
  write_direct_outputs(cfg, traj, out);
  write_text(out.path("summary.json"), direct_summary(cfg, traj).dump(2) + "\n");
  std::ostringstream os;
  os << "direct: " << to_string(traj.stop) << " at t = " << traj.final_time << " after " << traj.steps
     << " steps";
  if (!traj.message.empty()) os << " (" << traj.message << ")";
  return {status_of(traj.stop), os.str(), out.files};
}

RunOutcome run_soliton_test(const RunConfig& cfg) {
  Output out = prepare_output(cfg);
  const Field u0 = initial_field(cfg);
  const double T = *cfg.stepping.T;
  const DirectTrajectory traj = run_direct(u0, cfg.irk4(), cfg.model, T, direct_options(cfg));
  write_direct_outputs(cfg, traj, out);

  const Grid& g = u0.grid;
  const double centre = fold(cfg.initial.x0 + cfg.initial.c * traj.final_time, g);
  const Field exact = soliton(cfg.initial.c, centre, cfg.model, g);
  double err = 0;
  for (int j = 0; j < g.size(); ++j) {
    err = std::max(err, std::abs(traj.final_state.values[j] - exact.values[j]));
  }
  double delta_max = 0;
  for (const auto& r : traj.records) delta_max = std::max(delta_max, r.delta);

  json j = direct_summary(cfg, traj);
  j["max_error"] = err;
  j["delta"] = traj.records.back().delta;
  j["delta_max"] = delta_max;
  write_text(out.path("report.json"), j.dump(2) + "\n");
  std::ostringstream os;
  os << "soliton-test: max error " << err << ", delta " << traj.records.back().delta << " at t = "
     << traj.final_time;
  return {status_of(traj.stop), os.str(), out.files};
}

RunOutcome run_rescaled_mode(const RunConfig& cfg) {
  Output out = prepare_output(cfg);
  const RescaledConfig rc = cfg.rescaled();
  const auto file = initial_file(cfg);
  RescaleState start;
  if (file && file->header.tau) {
    // resume a rescaled snapshot in its own frame
    start.U = on_config_grid(file->field, cfg);
    start.tau = *file->header.tau;
    start.scales.t = file->header.t;
    start.scales.ln_l = std::log(file->header.L.value_or(1.0));
    start.scales.x_m = file->header.x_m.value_or(0.0);
    start.xi0 = start.U.grid.node(start.U.grid.nearest_node(file->header.xi0.value_or(rc.xi0)));
  } else {
    start = prepare_rescaled(initial_field(cfg), rc.xi0);
  }
  RescaledOptions opts;
  opts.snapshot_taus = cfg.output.snapshots;
  opts.record_stride = cfg.output.stride;
  const RescaledTrajectory traj = run_rescaled(start, rc, cfg.model, *cfg.stepping.tau_end, opts);

  write_series(out.path("series.csv"), traj);
  auto header = [&](double t, double tau, double L, double x_m) {
    SnapshotHeader h = header_for(cfg, t);
    h.tau = tau;
    h.L = L;
    h.x_m = x_m;
    h.xi0 = start.xi0;
    return h;
  };
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    const auto& s = traj.snapshots[k];
    write_snapshot(out.path(snapshot_name(k)), s.field, header(s.t, s.tau, s.L, s.x_m));
  }
  const auto& fin = traj.final_state;
  write_snapshot(out.path("final.txt"), fin.U,
                 header(fin.scales.t, fin.tau, fin.L(), fin.scales.x_m));

  json j;
  j["mode"] = to_string(cfg.mode);
  j["stop"] = to_string(traj.stop);
  j["message"] = traj.message;
  j["steps"] = traj.steps;
  j["final_tau"] = fin.tau;
  j["final_t"] = fin.scales.t;
  j["final_L"] = fin.L();
  j["final_a"] = traj.records.back().a;
  j["final_v"] = traj.records.back().v;
  j["final_x_m"] = fin.scales.x_m;
  j["final_x_max"] = traj.records.back().x_max;
  j["final_delta"] = traj.records.back().delta;
  j["final_mass_drift"] = traj.records.back().mass_drift;
  write_text(out.path("summary.json"), j.dump(2) + "\n");

  std::ostringstream os;
  os << "rescaled: " << to_string(traj.stop) << " at tau = " << fin.tau << " (t = " << fin.scales.t
     << ", L = " << fin.L() << ")";
  if (!traj.message.empty()) os << " (" << traj.message << ")";
  return {status_of(traj.stop), os.str(), out.files};
}

RunOutcome run_postprocess(const RunConfig& cfg) {
  Output out = prepare_output(cfg);
  const SeriesTable series = read_series(cfg.fit.series);
  const BlowupReport rep = blowup_report(series, cfg);
  write_text(out.path("fits.json"), rep.json);
  std::ostringstream os;
  if (rep.ok) {
    os << "postprocess: t* = " << rep.t_star_linf << " (||u||_inf), " << rep.t_star_l2ux
       << " (||u_x||_2^2)";
  } else {
    os << "postprocess: blow-up time fits failed, see fits.json";
  }
  return {rep.ok ? ExitStatus::clean : ExitStatus::hard_failure, os.str(), out.files};
}

struct SweepRun {
  double eps = 0;
  std::optional<DirectTrajectory> traj;
  BlowupReport report;
  std::string error;
};

RunOutcome run_sweep(const RunConfig& cfg) {
  Output out = prepare_output(cfg);
  const std::size_t count = cfg.sweep.eps.size();
  std::vector<SweepRun> runs(count);
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    for (std::size_t i = next++; i < count; i = next++) {
      SweepRun& r = runs[i];
      r.eps = cfg.sweep.eps[i];
      try {
        RunConfig one = cfg;
        one.model.eps = r.eps;
        one.mode = RunMode::direct;
        r.traj = run_direct(initial_field(one), one.irk4(), one.model, *one.stepping.T,
                            direct_options(one));
        r.report = blowup_report(series_table(*r.traj), one);
      } catch (const std::exception& e) {
        r.error = e.what();
      }
    }
  };
  const int workers = std::clamp<int>(sweep_workers(cfg), 1, static_cast<int>(count));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  SeriesTable table{{"eps", "t_star_linf", "t_star_l2ux", "t_final", "steps", "truncated"}, {}};
  std::vector<double> eps_ok, tstar_ok;
  for (std::size_t i = 0; i < count; ++i) {
    const SweepRun& r = runs[i];
    char dir[32];
    std::snprintf(dir, sizeof dir, "eps_%02zu", i);
    fs::create_directories(out.dir / dir);
    if (!r.error.empty()) {
      warn("sweep: eps = " + format_double(r.eps) + " failed: " + r.error);
      continue;
    }
    write_series(out.path(std::string(dir) + "/series.csv"), *r.traj);
    write_text(out.path(std::string(dir) + "/fits.json"), r.report.json);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    table.rows.push_back({r.eps, r.report.ok ? r.report.t_star_linf : nan,
                          r.report.ok ? r.report.t_star_l2ux : nan, r.traj->final_time,
                          static_cast<double>(r.traj->steps),
                          r.traj->stop == StopReason::completed ? 0.0 : 1.0});
    if (r.report.ok) {
      eps_ok.push_back(r.eps);
      tstar_ok.push_back(r.report.t_star_linf);
    }
  }
  if (!table.rows.empty()) write_series(out.path("sweep.csv"), table);

  const double t_c = hopf_critical_time(cfg.initial.beta, cfg.model);
  json j;
  j["n"] = cfg.model.n;
  j["t_c"] = t_c;
  j["points"] = eps_ok.size();
  bool ok = false;
  try {
    const EpsilonLawResult law = fit_epsilon_law(eps_ok, tstar_ok, t_c);
    j["exponential"] = to_json(law.exponential);
    j["algebraic"] = to_json(law.algebraic);
    ok = true;
  } catch (const std::exception& e) {
    j["error"] = e.what();
  }
  write_text(out.path("epsilon_law.json"), j.dump(2) + "\n");

  std::ostringstream os;
  os << "sweep: " << eps_ok.size() << " of " << count << " runs fitted";
  if (ok) {
    os << ", gamma = " << j["exponential"]["params"]["gamma"].get<double>()
       << ", t*_0 = " << j["exponential"]["params"]["t_star0"].get<double>();
  }
  return {ok ? ExitStatus::clean : ExitStatus::hard_failure, os.str(), out.files};
}

}  // namespace

Field initial_field(const RunConfig& cfg) {
  const Grid g = cfg.grid();
  switch (cfg.initial.kind) {
    case InitialKind::soliton_perturbation: {
      Field f = soliton(cfg.initial.c, cfg.initial.x0, cfg.model, g);
      for (double& v : f.values) v *= cfg.initial.sigma;
      return f;
    }
    case InitialKind::sech2: {
      const double beta = cfg.initial.beta;
      return Field::sample(g, [beta](double x) {
        const double s = 1.0 / std::cosh(x);
        return beta * s * s;
      });
    }
    case InitialKind::file:
      return on_config_grid(read_snapshot(cfg.initial.path).field, cfg);
  }
  throw std::logic_error("initial_field: unknown kind");
}

BlowupReport blowup_report(const SeriesTable& series, const RunConfig& cfg) {
  const ModelParams& p = cfg.model;
  const std::vector<double> t = series.column("t");
  const std::vector<double> linf = series.column("linf");
  const std::vector<double> l2sq = series.column("l2ux_sq");
  const BlowupExponents ex = blowup_exponents(p);
  const FitWindow w = window_last(t.size(), static_cast<std::size_t>(cfg.fit.window));

  BlowupReport rep;
  json j;
  j["n"] = p.n;
  j["eps"] = p.eps;
  j["samples"] = t.size();
  j["exponents"] = {{"L", ex.L}, {"linf", ex.linf}, {"l2ux_sq", ex.l2ux_sq}};

  std::optional<FitResult> f_inf, f_l2;
  try {
    f_inf = fit_blowup_time(t, linf, ex.linf, w);
    j["linf"] = to_json(*f_inf);
  } catch (const std::exception& e) {
    j["linf"] = json{{"error", e.what()}};
  }
  try {
    f_l2 = fit_blowup_time(t, l2sq, ex.l2ux_sq, w);
    j["l2ux_sq"] = to_json(*f_l2);
  } catch (const std::exception& e) {
    j["l2ux_sq"] = json{{"error", e.what()}};
  }
  const FitWindow wfree = cfg.fit.t_min ? window_after(t, *cfg.fit.t_min) : w;
  j["linf_free_alpha"] = attempt([&] { return fit_blowup_time(t, linf, std::nullopt, wfree); });

  rep.ok = f_inf && f_l2;
  if (rep.ok) {
    rep.t_star_linf = f_inf->get("t_star");
    rep.t_star_l2ux = f_l2->get("t_star");
    j["t_star"] = rep.t_star_linf;
    j["t_star_spread"] = std::abs(rep.t_star_linf - rep.t_star_l2ux) / rep.t_star_linf;
  }
  if (series.has("tau")) j["t_final"] = t.back();

  // scaling factor: stored for rescaled runs, reconstructed from norms otherwise
  std::vector<std::pair<std::string, ScalingSeries>> scalings;
  if (series.has("L")) {
    scalings.push_back({"L", {t, series.column("L")}});
  } else {
    try {
      std::vector<double> l2(l2sq.size());
      std::transform(l2sq.begin(), l2sq.end(), l2.begin(), [](double v) { return std::sqrt(v); });
      scalings.push_back({"L_l2ux", scaling_from_norms(t, l2, NormKind::l2ux, p)});
      scalings.push_back({"L_linf", scaling_from_norms(t, linf, NormKind::linf, p)});
    } catch (const std::exception& e) {
      j["L"] = json{{"error", e.what()}};
    }
  }
  const std::vector<double> x_m = series.column("x_m");
  for (const auto& [name, s] : scalings) {
    json fits;
    if (p.n == 4) {
      fits["linear"] = attempt([&] { return fit_L_linear(s.t, s.L, window_after(s.t, cfg.fit.L_t_min)); });
    } else if (rep.ok) {
      fits["powerlaw"] = attempt([&] {
        return fit_L_powerlaw(s.t, s.L, rep.t_star_linf, w, cfg.fit.saturation_floor);
      });
    }
    if (p.n > 4) {
      const FitWindow wx = cfg.fit.xm_L_max ? window_between(s.L, 0.0, *cfg.fit.xm_L_max) : w;
      fits["x_m_linear_in_L"] = attempt([&] { return fit_xm(x_m, s.L, XmMode::linear_in_L, wx); });
    }
    j[name] = fits;
  }
  if (p.n == 4 && rep.ok) {
    j["x_m_powerlaw"] =
        attempt([&] { return fit_xm(x_m, t, XmMode::powerlaw, w, rep.t_star_linf); });
  }
  rep.json = j.dump(2) + "\n";
  return rep;
}

int sweep_workers(const RunConfig& cfg) {
  if (cfg.sweep.workers > 0) return cfg.sweep.workers;
  if (const char* env = std::getenv("GKDV_WORKERS")) {
    try {
      const int v = static_cast<int>(parse_number(env));
      if (v > 0) return v;
    } catch (const std::exception&) {
    }
    warn(std::string("ignoring GKDV_WORKERS = '") + env + "'");
  }
  return 1;
}

RunOutcome run(const RunConfig& cfg) {
  cfg.validate();
  switch (cfg.mode) {
    case RunMode::direct: return run_direct_mode(cfg);
    case RunMode::soliton_test: return run_soliton_test(cfg);
    case RunMode::rescaled: return run_rescaled_mode(cfg);
    case RunMode::postprocess: return run_postprocess(cfg);
    case RunMode::sweep: return run_sweep(cfg);
  }
  throw std::logic_error("run: unknown mode");
}

}  // namespace gkdv
