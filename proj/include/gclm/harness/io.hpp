#pragma once

// Artifact files: time-series CSV, field snapshots, spectra, AAA pole records.

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gclm/aaa.hpp"
#include "gclm/dynamics.hpp"
#include "gclm/harness/config.hpp"

namespace gclm::harness {

namespace fs = std::filesystem;
using json = nlohmann::json;

inline const std::vector<std::string>& timeseries_columns() {
  static const std::vector<std::string> cols{"t",  "max_abs_omega", "delta", "delta_x", "p_fit", "fit_residual",
                                             "l2", "linf",          "b0",    "energy",  "n_modes", "dt"};
  return cols;
}

inline std::ofstream open_out(const fs::path& p) {
  std::ofstream o(p, std::ios::binary);
  if (!o) throw Error(ErrorCode::Io, "cannot write " + p.string());
  return o;
}

// extra: optional additional column, one value per sample
inline void write_timeseries_csv(const fs::path& p, const std::vector<Sample>& samples,
                                 const std::string& extra_name = {}, const std::vector<double>& extra = {}) {
  auto o = open_out(p);
  for (std::size_t i = 0; i < timeseries_columns().size(); ++i) o << (i ? "," : "") << timeseries_columns()[i];
  if (!extra_name.empty()) o << "," << extra_name;
  o << "\n";
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    o << fmt(s.t) << "," << fmt(s.max_abs_omega) << "," << fmt(s.delta) << "," << fmt(s.delta_x) << ","
      << fmt(s.p_fit) << "," << fmt(s.fit_residual) << "," << fmt(s.norms.l2) << "," << fmt(s.norms.linf) << ","
      << fmt(s.norms.b0) << "," << fmt(s.norms.kinetic_energy) << "," << s.n_modes << "," << fmt(s.dt);
    if (!extra_name.empty()) o << "," << fmt(i < extra.size() ? extra[i] : std::nan(""));
    o << "\n";
  }
}

inline std::vector<std::string> read_csv_header(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + p.string());
  std::string line, cell;
  std::getline(in, line);
  std::vector<std::string> cols;
  std::istringstream ls(line);
  while (std::getline(ls, cell, ',')) cols.push_back(cell);
  return cols;
}

// Snapshot: header line, then one grid point per line ("x omega" on the circle,
// "q x omega" on the line; the q = -pi point has x = -inf).
inline void write_snapshot(const fs::path& p, const SpectralField& f, double t) {
  auto o = open_out(p);
  const bool line = f.domain() == Domain::CompactifiedLine;
  o << "# gclm-field v1 domain=" << to_string(f.domain()) << " t=" << fmt(t) << "\n";
  o << (line ? "# q x omega\n" : "# x omega\n");
  const auto v = f.values();
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double g = f.grid_point(j);
    if (line) o << fmt(g) << " " << fmt(j == 0 ? -std::numeric_limits<double>::infinity() : std::tan(0.5 * g)) << " ";
    else o << fmt(g) << " ";
    o << fmt(v[j]) << "\n";
  }
}

struct Snapshot {
  SpectralField field;
  double t = 0.0;
};

inline Snapshot read_snapshot(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw Error(ErrorCode::Io, "cannot open snapshot " + p.string());
  std::string header;
  std::getline(in, header);
  const std::string magic = "# gclm-field v1 domain=";
  if (header.rfind(magic, 0) != 0) throw Error(ErrorCode::Io, p.string() + ": not a gclm-field v1 file");
  std::istringstream hs(header.substr(magic.size()));
  std::string dom, tkey;
  hs >> dom >> tkey;
  Domain d;
  if (dom == "circle") d = Domain::Circle;
  else if (dom == "line") d = Domain::CompactifiedLine;
  else throw Error(ErrorCode::Io, p.string() + ": unknown domain '" + dom + "'");
  if (tkey.rfind("t=", 0) != 0) throw Error(ErrorCode::Io, p.string() + ": missing t= in header");
  const double t = detail::parse_real("t", tkey.substr(2));
  std::vector<double> vals;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string last, tok;
    while (ls >> tok) last = tok;
    vals.push_back(detail::parse_real(p.string(), last));
  }
  try {
    return {SpectralField::from_values(vals, d), t};
  } catch (const Error& e) {
    throw Error(ErrorCode::Io, p.string() + ": " + e.what());
  }
}

inline void write_spectrum(const fs::path& p, const SpectralField& f) {
  auto o = open_out(p);
  o << "k,abs_coeff\n";
  const auto mag = positive_magnitudes(f);
  for (std::size_t k = 0; k < mag.size(); ++k) o << k << "," << fmt(mag[k]) << "\n";
}

inline json complex_list(const std::vector<cplx>& zs) {
  json a = json::array();
  for (const auto& z : zs) a.push_back({z.real(), z.imag()});
  return a;
}

inline json pole_record(double t, const SpectralField& f) {
  json r{{"t", t}};
  try {
    const auto ra = aaa_of_field(f);
    r["poles"] = complex_list(ra.poles);
    r["residues"] = complex_list(ra.residues);
    r["max_error"] = ra.max_error;
    r["converged"] = ra.converged;
  } catch (const Error& e) {
    r["poles"] = json::array();
    r["residues"] = json::array();
    r["error"] = e.what();
  }
  return r;
}

inline json decay_json(const SpectralField& f, const FitWindow& w) {
  try {
    const auto d = fit_fourier_decay(f, w);
    return {{"c_amp", d.c_amp}, {"delta", d.delta}, {"p", d.p},
            {"k_lo", d.k_lo},   {"k_hi", d.k_hi},   {"rms_residual", d.rms_residual}};
  } catch (const Error& e) {
    return {{"error", e.what()}};
  }
}

inline void write_json(const fs::path& p, const json& j) { open_out(p) << j.dump(2) << "\n"; }

inline json read_json(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + p.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Io, p.string() + ": " + e.what());
  }
}

}  // namespace gclm::harness
