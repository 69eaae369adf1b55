#pragma once

// Experiment orchestration: one directory of artifacts per run.

#include <chrono>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <string>
#include <vector>

#include "gclm/collapse.hpp"
#include "gclm/exact_solutions.hpp"
#include "gclm/harness/config.hpp"
#include "gclm/harness/io.hpp"

namespace gclm::harness {

inline constexpr const char* kVersion = "1.0.0";

struct RunArtifacts {
  fs::path dir;
  std::vector<fs::path> files;
  std::string status;
};

// GCLM_OUTPUT_ROOT replaces the parent of output_dir; the last path component is kept.
inline fs::path effective_output_dir(const RunConfig& c) {
  const fs::path od(c.output_dir);
  if (const char* root = std::getenv("GCLM_OUTPUT_ROOT"); root && *root) {
    const fs::path leaf = od.has_filename() ? od.filename() : od.parent_path().filename();
    return fs::path(root) / leaf;
  }
  return od;
}

inline SpectralField initial_field(const RunConfig& c) {
  const std::size_t n = c.controls.n0;
  return std::visit(
      [&](const auto& d) -> SpectralField {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, TwoModeData>) return two_mode_data(d.amplitude, n);
        else if constexpr (std::is_same_v<T, PoleFamilyData>) return sample_field(d.state, n);
        else {
          auto snap = read_snapshot(d.path);
          if (snap.field.domain() != c.domain)
            throw Error(ErrorCode::Validation, "data.path: snapshot domain does not match run.domain");
          return snap.field;
        }
      },
      c.data);
}

namespace detail {

inline std::string snap_name(const char* stem, std::size_t i) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%04zu.txt", stem, i);
  return buf;
}

inline json classification_json(const Classification& c) {
  const char* kind = c.kind == SolutionKind::Global ? "global" : c.kind == SolutionKind::Steady ? "steady" : "collapse";
  return {{"kind", kind}, {"t_c", c.t_c}, {"x_c", c.x_c}, {"alpha", c.alpha}, {"beta", c.beta}};
}

inline json fit_json(const CollapseFit& f) {
  return {{"t_c", f.t_c},
          {"alpha", f.alpha},
          {"beta", f.beta},
          {"c_amp", f.c_amp},
          {"alpha_residual", f.alpha_residual},
          {"beta_residual", f.beta_residual},
          {"window_fraction", f.window_fraction},
          {"n_used", f.n_used}};
}

inline double sup_rel_error(const SpectralField& num, const PoleFamilyState& exact) {
  const auto ref = sample_field(exact, num.n()).values();
  const auto v = num.values();
  double e = 0.0, m = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    e = std::max(e, std::abs(v[j] - ref[j]));
    m = std::max(m, std::abs(ref[j]));
  }
  return m > 0.0 ? e / m : e;
}

struct Writer {
  fs::path dir;
  std::vector<fs::path> files;
  fs::path add(const std::string& name) {
    files.push_back(dir / name);
    return files.back();
  }
};

inline void write_manifest(Writer& w, const RunConfig& c, double wall, const std::string& status) {
  auto o = open_out(w.add("manifest.ini"));
  o << to_ini(c) << "\n[manifest]\nversion = " << kVersion << "\nfftw = " << fftw_version
    << "\neigen = " << EIGEN_WORLD_VERSION << "." << EIGEN_MAJOR_VERSION << "." << EIGEN_MINOR_VERSION
    << "\nwall_time_s = " << fmt(wall) << "\nstatus = " << status << "\n";
}

inline std::string run_simulation(const RunConfig& c, Writer& w) {
  const bool oracle = c.mode == RunMode::OracleCompare;
  const PoleFamilyState* exact = oracle ? &std::get<PoleFamilyData>(c.data).state : nullptr;
  std::size_t idx = 0, snaps = 0;
  std::deque<Snapshot> tail;
  std::vector<double> oracle_err;
  json pole_records = json::array();

  auto observer = [&](const SimState& s, const Sample&) {
    if (idx == 0 || (c.snapshot_every > 0 && idx % static_cast<std::size_t>(c.snapshot_every) == 0)) {
      write_snapshot(w.add(snap_name("snapshot", snaps++)), s.field, s.time);
      pole_records.push_back(pole_record(s.time, s.field));
    }
    tail.push_back({s.field, s.time});
    if (tail.size() > 4) tail.pop_front();
    if (oracle) oracle_err.push_back(sup_rel_error(s.field, advance(*exact, s.time)));
    ++idx;
  };
  const auto ts = simulate(initial_field(c), c.params, c.controls, observer);

  for (std::size_t i = 0; i < tail.size(); ++i)
    write_snapshot(w.add(snap_name("snapshot_tail", i)), tail[i].field, tail[i].t);
  write_snapshot(w.add("snapshot_final.txt"), ts.final_field, ts.t_final);
  pole_records.push_back(pole_record(ts.t_final, ts.final_field));
  write_spectrum(w.add("spectrum_final.csv"), ts.final_field);
  write_timeseries_csv(w.add("timeseries.csv"), ts.samples, oracle ? "oracle_rel_error" : "", oracle_err);
  write_json(w.add("poles.json"), pole_records);

  json fit{{"status", to_string(ts.terminal_status)},
           {"t_final", ts.t_final},
           {"steps", ts.step_count},
           {"refinements", ts.refine_count},
           {"n_final", ts.final_field.n()},
           {"final_decay", decay_json(ts.final_field, c.controls.fit_window)}};
  try {
    fit["collapse"] = fit_json(fit_collapse(ts));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoCollapseSignal) throw;
    fit["collapse"] = nullptr;
    fit["collapse_error"] = e.what();
  }
  if (oracle) {
    double emax = 0.0, t_at = 0.0;
    for (std::size_t i = 0; i < oracle_err.size(); ++i)
      if (oracle_err[i] > emax) {
        emax = oracle_err[i];
        t_at = ts.samples[i].t;
      }
    fit["oracle"] = {{"family", to_string(family_of(*exact))},
                     {"max_rel_error", emax},
                     {"t_at_max", t_at},
                     {"final_rel_error", oracle_err.empty() ? 0.0 : oracle_err.back()},
                     {"classification", classification_json(classify(*exact))}};
  }
  write_json(w.add("fit.json"), fit);
  return to_string(ts.terminal_status);
}

inline std::string run_exact(const RunConfig& c, Writer& w) {
  const auto& s0 = std::get<PoleFamilyData>(c.data).state;
  const auto cls = classify(s0);
  const double T = std::min(c.controls.t_end, cls.t_c);
  const std::size_t n = c.controls.n0, m = c.exact_samples;
  std::vector<Sample> samples;
  json pole_records = json::array();
  for (std::size_t i = 0; i < m; ++i) {
    // include t_end unless it is the collapse time itself
    const double t = T * static_cast<double>(i) / static_cast<double>(T < cls.t_c ? m - 1 : m);
    const auto st = advance(s0, t);
    const auto f = sample_field(st, n);
    SimState ss{f, t, c.params, c.controls.cfl, 0, 0};
    Sample smp = gclm::detail::make_sample(ss, c.controls.fit_window, 0.0);
    const auto en = exact_norms(st);
    smp.max_abs_omega = smp.norms.linf = en.linf;
    smp.norms.l2 = en.l2;
    smp.norms.b0 = en.b0;
    smp.delta_x = closest_pole_distance(st);
    samples.push_back(smp);
    if (i == 0 || i + 1 == m) {
      write_snapshot(w.add(i == 0 ? "snapshot_0000.txt" : "snapshot_final.txt"), f, t);
      json rec{{"t", t}, {"poles", complex_list(poles(st))}, {"source", "exact"}};
      pole_records.push_back(rec);
      if (i + 1 == m) write_spectrum(w.add("spectrum_final.csv"), f);
    }
  }
  write_timeseries_csv(w.add("timeseries.csv"), samples);
  write_json(w.add("poles.json"), pole_records);
  json fit{{"status", "Exact"},
           {"family", to_string(family_of(s0))},
           {"classification", classification_json(cls)},
           {"t_final", samples.back().t},
           {"final_decay", decay_json(sample_field(advance(s0, samples.back().t), n), c.controls.fit_window)}};
  if (cls.kind == SolutionKind::Collapse)
    fit["collapse"] = {{"t_c", cls.t_c}, {"alpha", cls.alpha}, {"beta", cls.beta}, {"source", "closed_form"}};
  else
    fit["collapse"] = nullptr;
  write_json(w.add("fit.json"), fit);
  return cls.kind == SolutionKind::Collapse ? "ExactCollapse" : "ExactNoCollapse";
}

}  // namespace detail

inline json critical_json(const CriticalAmplitude& r) {
  json probes = json::array();
  for (const auto& [A, o] : r.probes) probes.push_back({{"A", A}, {"outcome", to_string(o)}});
  return {{"a", r.a_param},           {"sigma", r.sigma},         {"nu", r.nu},
          {"A_no_blowup", r.A_no_blowup}, {"A_blowup", r.A_blowup}, {"probes", probes}};
}

inline CriticalAmplitude run_critical(const GclmParams& p, const RunControls& rc, double A_lo, double A_hi,
                                      double tol) {
  const std::size_t n = rc.n0;
  return critical_amplitude([n](double A) { return two_mode_data(A, n); }, p, rc, A_lo, A_hi, tol);
}

inline RunArtifacts run(const RunConfig& cfg) {
  validate(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  detail::Writer w{effective_output_dir(cfg), {}};
  std::error_code ec;
  fs::create_directories(w.dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + w.dir.string() + ": " + ec.message());

  std::string status;
  switch (cfg.mode) {
    case RunMode::Simulate:
    case RunMode::OracleCompare: status = detail::run_simulation(cfg, w); break;
    case RunMode::ExactOnly: status = detail::run_exact(cfg, w); break;
    case RunMode::CriticalSweep: {
      const auto r = run_critical(cfg.params, cfg.controls, cfg.sweep.A_lo, cfg.sweep.A_hi, cfg.sweep.tol);
      write_json(w.add("critical.json"), critical_json(r));
      status = "Bracketed";
      break;
    }
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  detail::write_manifest(w, cfg, wall, status);
  return {w.dir, w.files, status};
}

// ---------------------------------------------------------------- critical-amplitude tables

struct Table1Row {
  double a = 0.0, sigma = 0.0, A_lo = 0.0, A_hi = 0.0;
};

// "a:sigma:A_lo:A_hi[,...]" or the named set "desk"
inline std::vector<Table1Row> parse_table1_rows(const std::string& spec) {
  if (spec == "desk") return {{0.5, 1.0, 3.0, 4.0}, {0.0, 0.0, 1.0, 2.0}};
  std::vector<Table1Row> rows;
  std::istringstream in(spec);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::vector<double> f;
    std::istringstream is(item);
    std::string tok;
    while (std::getline(is, tok, ':')) f.push_back(detail::parse_real("rows", tok));
    if (f.size() != 4) throw Error(ErrorCode::Validation, "rows: '" + item + "' is not a:sigma:A_lo:A_hi");
    rows.push_back({f[0], f[1], f[2], f[3]});
  }
  if (rows.empty()) throw Error(ErrorCode::Validation, "rows: empty specification");
  return rows;
}

inline RunControls table1_controls() {
  RunControls rc;
  rc.t_end = 50.0;
  rc.n0 = 128;
  rc.n_max = 4096;
  rc.sample_every = 50;
  return rc;
}

}  // namespace gclm::harness
