#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "gclm/harness/plots.hpp"
#include "gclm/harness/run.hpp"

using namespace gclm;
using namespace gclm::harness;

namespace {

int cmd_run(const std::string& config) {
  const auto r = run(load_config(config));
  std::cout << "status: " << r.status << "\noutput: " << r.dir.string() << "\n";
  for (const auto& f : r.files) std::cout << "  " << f.filename().string() << "\n";
  return 0;
}

int cmd_plots(const std::string& dir) {
  for (const auto& p : emit_plots(dir)) std::cout << p.string() << "\n";
  return 0;
}

struct Table1Options {
  std::string rows, out = "table1";
  double tol = 0.1, t_end = 50.0, nu = 1.0;
  std::size_t n0 = 128, n_max = 4096;
};

int cmd_table1(const Table1Options& o) {
  RunControls rc = table1_controls();
  rc.t_end = o.t_end;
  rc.n0 = o.n0;
  rc.n_max = o.n_max;
  RunConfig probe_cfg;
  probe_cfg.controls = rc;
  probe_cfg.output_dir = o.out;
  json rows = json::array();
  std::printf("%6s %6s %14s %14s %7s\n", "a", "sigma", "no blow up", "blow up", "probes");
  for (const auto& row : parse_table1_rows(o.rows)) {
    probe_cfg.params = {row.a, row.sigma, o.nu, 0.0};
    probe_cfg.mode = RunMode::CriticalSweep;
    probe_cfg.sweep = {row.A_lo, row.A_hi, o.tol};
    validate(probe_cfg);
    const auto r = run_critical(probe_cfg.params, rc, row.A_lo, row.A_hi, o.tol);
    std::printf("%6g %6g %14s %14s %7zu\n", row.a, row.sigma, ("A <= " + fmt(r.A_no_blowup).substr(0, 6)).c_str(),
                (fmt(r.A_blowup).substr(0, 6) + " <= A").c_str(), r.probes.size());
    std::fflush(stdout);
    rows.push_back(critical_json(r));
  }
  const fs::path dir = effective_output_dir(probe_cfg);
  fs::create_directories(dir);
  write_json(dir / "table1.json", rows);
  std::cout << "output: " << (dir / "table1.json").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gCLM pseudo-spectral solver, exact pole solutions and collapse analysis"};
  app.require_subcommand(1);

  std::string config, dir;
  auto* run_cmd = app.add_subcommand("run", "run one experiment from an INI config");
  run_cmd->add_option("config", config, "config file")->required()->check(CLI::ExistingFile);

  auto* plots_cmd = app.add_subcommand("plots", "write gnuplot scripts for an artifact directory");
  plots_cmd->add_option("dir", dir, "artifact directory")->required();

  Table1Options t1;
  auto* t1_cmd = app.add_subcommand("table1", "critical two-mode amplitudes by bisection");
  t1_cmd->add_option("--rows", t1.rows, "a:sigma:A_lo:A_hi[,...] or 'desk'")->required();
  t1_cmd->add_option("--tol", t1.tol, "bracket tolerance")->capture_default_str();
  t1_cmd->add_option("--t-end", t1.t_end, "probe run length")->capture_default_str();
  t1_cmd->add_option("--nu", t1.nu, "viscosity")->capture_default_str();
  t1_cmd->add_option("--n0", t1.n0, "initial N")->capture_default_str();
  t1_cmd->add_option("--n-max", t1.n_max, "resolution cap")->capture_default_str();
  t1_cmd->add_option("--out", t1.out, "output directory")->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run_cmd) return cmd_run(config);
    if (*plots_cmd) return cmd_plots(dir);
    if (*t1_cmd) return cmd_table1(t1);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::Validation ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
