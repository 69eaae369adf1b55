#pragma once

// Gnuplot scripts over an artifact directory; nothing is plotted in-process.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "gclm/harness/io.hpp"

namespace gclm::harness {

namespace detail {

inline std::vector<fs::path> profile_snapshots(const fs::path& dir) {
  std::vector<fs::path> v;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (name.rfind("snapshot_tail_", 0) == 0) v.push_back(e.path());
  }
  std::sort(v.begin(), v.end());
  if (v.empty() && fs::exists(dir / "snapshot_final.txt")) v.push_back(dir / "snapshot_final.txt");
  return v;
}

inline std::string script_head(const std::string& out_png, const std::string& title) {
  return "set terminal pngcairo size 900,650\nset output '" + out_png + "'\nset title '" + title +
         "'\nset datafile separator ','\nset key autotitle columnhead\nset grid\n";
}

}  // namespace detail

inline std::vector<fs::path> emit_plots(const fs::path& dir) {
  const std::vector<std::string> expected{"timeseries.csv", "fit.json"};
  std::vector<std::string> missing;
  for (const auto& f : expected)
    if (!fs::exists(dir / f)) missing.push_back(f);
  if (!missing.empty()) {
    std::string m;
    for (const auto& f : missing) m += (m.empty() ? "" : ", ") + f;
    throw Error(ErrorCode::Io, "plots: " + dir.string() + " lacks " + m +
                                   " (expected timeseries.csv, fit.json, snapshot_*.txt, spectrum_final.csv)");
  }
  const auto cols = read_csv_header(dir / "timeseries.csv");
  std::vector<std::string> need{"t", "max_abs_omega", "delta_x"}, absent;
  for (const auto& c : need)
    if (std::find(cols.begin(), cols.end(), c) == cols.end()) absent.push_back(c);
  if (!absent.empty()) {
    std::string m, have;
    for (const auto& c : absent) m += (m.empty() ? "" : ", ") + c;
    for (const auto& c : cols) have += (have.empty() ? "" : ", ") + c;
    throw Error(ErrorCode::Validation, "plots: timeseries.csv lacks columns " + m + " (has " + have + ")");
  }

  const json fit = read_json(dir / "fit.json");
  const bool collapse = fit.contains("collapse") && fit["collapse"].is_object();
  std::vector<fs::path> out;
  auto write = [&](const std::string& name, const std::string& body) {
    const fs::path p = dir / name;
    open_out(p) << body;
    out.push_back(p);
  };

  if (!collapse) {
    write("amplitude.gp", detail::script_head("amplitude.png", "max |omega| vs t") +
                              "set logscale y\nset xlabel 't'\nplot 'timeseries.csv' using 't':'max_abs_omega' with lines\n");
    write("delta.gp", detail::script_head("delta.png", "delta_x vs t") +
                          "set logscale y\nset xlabel 't'\nplot 'timeseries.csv' using 't':'delta_x' with lines\n");
    return out;
  }

  const auto& cf = fit["collapse"];
  const std::string tc = fmt(cf.value("t_c", std::nan(""))), alpha = fmt(cf.value("alpha", std::nan(""))),
                    beta = fmt(cf.value("beta", std::nan("")));
  const std::string vars = "tc = " + tc + "\nalpha = " + alpha + "\nbeta = " + beta + "\n";

  std::string prof = detail::script_head("profile.png", "rescaled profiles (tc - t)^beta omega vs x/(tc - t)^alpha") +
                     "set datafile separator whitespace\n" + vars + "set xlabel 'xi'\nplot ";
  const auto snaps = detail::profile_snapshots(dir);
  for (std::size_t i = 0; i < snaps.size(); ++i) {
    const auto snap = read_snapshot(snaps[i]);
    const bool line = snap.field.domain() == Domain::CompactifiedLine;
    const std::string tau = "(tc - " + fmt(snap.t) + ")";
    prof += std::string(i ? ", \\\n     " : "") + "'" + snaps[i].filename().string() + "' using ($" +
            (line ? "2" : "1") + "/" + tau + "**alpha):(" + tau + "**beta*$" + (line ? "3" : "2") +
            ") with lines title 't = " + fmt(snap.t) + "'";
  }
  write("profile.gp", prof + "\n");

  std::string spec = detail::script_head("spectrum.png", "|omega_k| at the final time") + "set logscale y\nset xlabel 'k'\n";
  if (fit.contains("final_decay") && fit["final_decay"].contains("delta")) {
    const auto& d = fit["final_decay"];
    spec += "C = " + fmt(d["c_amp"].get<double>()) + "\ndelta = " + fmt(d["delta"].get<double>()) +
            "\np = " + fmt(d["p"].get<double>()) + "\nfitc(k) = C*exp(-delta*k)*k**(-p)\n";
    spec += "plot 'spectrum_final.csv' using 'k':'abs_coeff' with points pt 7 ps 0.4, fitc(x) with lines title 'fit'\n";
  } else {
    spec += "plot 'spectrum_final.csv' using 'k':'abs_coeff' with points pt 7 ps 0.4\n";
  }
  write("spectrum.gp", spec);
  write("delta.gp", detail::script_head("delta.png", "delta_x vs tc - t") + vars +
                        "set logscale xy\nset xlabel 'tc - t'\n"
                        "plot 'timeseries.csv' using (tc - column('t')):'delta_x' with linespoints pt 7 ps 0.4\n");
  write("amplitude.gp", detail::script_head("amplitude.png", "max |omega| vs tc - t") + vars +
                            "set logscale xy\nset xlabel 'tc - t'\n"
                            "plot 'timeseries.csv' using (tc - column('t')):'max_abs_omega' with linespoints pt 7 ps 0.4\n");
  return out;
}

}  // namespace gclm::harness
