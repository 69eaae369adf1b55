#pragma once

// Run configuration: flat INI sections, complex values as "re,im", lossless 17-digit echo.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>

#include "gclm/dynamics.hpp"
#include "gclm/error.hpp"
#include "gclm/exact_solutions.hpp"

namespace gclm::harness {

enum class RunMode { Simulate, OracleCompare, CriticalSweep, ExactOnly };

struct TwoModeData {
  double amplitude = 1.0;
};
struct PoleFamilyData {
  PoleFamilyState state;
};
struct FileData {
  std::string path;
};
using InitialData = std::variant<TwoModeData, PoleFamilyData, FileData>;

struct SweepSpec {
  double A_lo = 0.0, A_hi = 0.0, tol = 0.1;
};

struct RunConfig {
  RunMode mode = RunMode::Simulate;
  Domain domain = Domain::Circle;
  GclmParams params;
  InitialData data = TwoModeData{};
  RunControls controls;
  SweepSpec sweep;
  std::string output_dir = "out";
  int snapshot_every = 0;       // in recorded samples; 0 = first and last only
  std::size_t exact_samples = 200;
};

inline const char* to_string(RunMode m) {
  switch (m) {
    case RunMode::Simulate: return "simulate";
    case RunMode::OracleCompare: return "oracle_compare";
    case RunMode::CriticalSweep: return "critical_sweep";
    case RunMode::ExactOnly: return "exact_only";
  }
  return "?";
}

inline const char* to_string(WindowPolicy w) {
  switch (w) {
    case WindowPolicy::Default: return "default";
    case WindowPolicy::Early: return "early";
    case WindowPolicy::Explicit: return "explicit";
  }
  return "?";
}

// ------------------------------------------------------------------ text encoding

inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt(cplx z) { return fmt(z.real()) + "," + fmt(z.imag()); }

namespace detail {

inline double parse_real(const std::string& key, const std::string& s) {
  const std::string t = [&] {
    auto b = s.find_first_not_of(" \t"), e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  }();
  if (t == "inf") return std::numeric_limits<double>::infinity();
  if (t == "-inf") return -std::numeric_limits<double>::infinity();
  if (t == "nan") return std::numeric_limits<double>::quiet_NaN();
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size())
    throw Error(ErrorCode::Validation, key + ": cannot parse '" + s + "' as a number");
  return v;
}

inline cplx parse_complex(const std::string& key, const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) return {parse_real(key, s), 0.0};
  return {parse_real(key, s.substr(0, comma)), parse_real(key, s.substr(comma + 1))};
}

class Reader {
 public:
  explicit Reader(const boost::property_tree::ptree& pt) : pt_(pt) {}

  std::optional<std::string> raw(const std::string& key) const {
    if (auto v = pt_.get_optional<std::string>(boost::property_tree::ptree::path_type(key, '.')))
      return *v;
    return std::nullopt;
  }
  std::string str(const std::string& key, const std::string& def) const { return raw(key).value_or(def); }
  std::string required(const std::string& key) const {
    auto v = raw(key);
    if (!v) throw Error(ErrorCode::Validation, key + ": required");
    return *v;
  }
  double real(const std::string& key, double def) const {
    auto v = raw(key);
    return v ? parse_real(key, *v) : def;
  }
  double real(const std::string& key) const { return parse_real(key, required(key)); }
  cplx complex(const std::string& key) const { return parse_complex(key, required(key)); }
  cplx complex(const std::string& key, cplx def) const {
    auto v = raw(key);
    return v ? parse_complex(key, *v) : def;
  }
  long integer(const std::string& key, long def) const {
    const double v = real(key, static_cast<double>(def));
    if (v != std::floor(v)) throw Error(ErrorCode::Validation, key + ": must be an integer");
    return static_cast<long>(v);
  }
  bool boolean(const std::string& key, bool def) const {
    auto v = raw(key);
    if (!v) return def;
    if (*v == "true" || *v == "1") return true;
    if (*v == "false" || *v == "0") return false;
    throw Error(ErrorCode::Validation, key + ": expected true or false");
  }

 private:
  const boost::property_tree::ptree& pt_;
};

inline Family parse_family(const std::string& s) {
  for (Family f : {Family::Schochet_a0s2, Family::DoublePole_aHalf_s1, Family::OnePair_a0s1,
                   Family::TwoPair_a0s1, Family::OnePair_a0s0, Family::PeriodicPole_a0s0})
    if (s == to_string(f)) return f;
  throw Error(ErrorCode::Validation,
              "data.family: unknown '" + s +
                  "' (schochet|doublepole|onepair_s1|twopair_s1|onepair_s0|periodic_s0)");
}

template <class E>
E parse_enum(const std::string& key, const std::string& s, std::initializer_list<E> all) {
  std::string options;
  for (E e : all) {
    if (s == to_string(e)) return e;
    options += (options.empty() ? "" : "|") + std::string(to_string(e));
  }
  throw Error(ErrorCode::Validation, key + ": unknown '" + s + "' (" + options + ")");
}

inline PoleFamilyState read_family(const Reader& r, double nu) {
  const Family f = parse_family(r.required("data.family"));
  try {
    switch (f) {
      case Family::Schochet_a0s2:
        return make_schochet(r.complex("data.x1", {0.0, -1.0}), r.complex("data.x2", {0.0, -2.0}), nu,
                             static_cast<int>(r.integer("data.k_sign", 1)),
                             r.boolean("data.published_constant", false));
      case Family::DoublePole_aHalf_s1:
        return make_doublepole(r.real("data.v0"), r.real("data.w0"), r.real("data.x0", 0.0), nu);
      case Family::OnePair_a0s1:
      case Family::OnePair_a0s0:
        return make_onepair(f, r.complex("data.w0"), r.complex("data.v0"), nu);
      case Family::TwoPair_a0s1:
        if (r.boolean("data.double_pole_limit", false))
          return make_twopair_double_pole_limit(r.real("data.amplitude"), r.real("data.v_lim"), nu);
        return make_twopair(r.complex("data.w1"), r.complex("data.w2"), r.complex("data.v1"),
                            r.complex("data.v2"), nu);
      case Family::PeriodicPole_a0s0:
        return make_periodic(r.complex("data.w0"), r.complex("data.v0"), nu);
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Validation) throw;
    throw Error(ErrorCode::Validation, std::string("data: ") + e.what());
  }
  throw Error(ErrorCode::Validation, "data.family: unsupported");
}

inline void write_family(std::ostream& o, const PoleFamilyState& st) {
  o << "family = " << to_string(family_of(st)) << "\n";
  std::visit(
      [&o](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, SchochetState>) {
          o << "x1 = " << fmt(s.x1_0) << "\nx2 = " << fmt(s.x2_0) << "\nk_sign = " << s.k_sign
            << "\npublished_constant = " << (s.published_constant ? "true" : "false") << "\n";
        } else if constexpr (std::is_same_v<T, DoublePoleState>) {
          o << "v0 = " << fmt(s.v0) << "\nw0 = " << fmt(s.w0) << "\nx0 = " << fmt(s.x0) << "\n";
        } else if constexpr (std::is_same_v<T, TwoPairState>) {
          if (s.double_pole_limit)
            o << "double_pole_limit = true\namplitude = " << fmt(s.amp) << "\nv_lim = " << fmt(s.v_lim) << "\n";
          else
            o << "w1 = " << fmt(s.w1_0) << "\nw2 = " << fmt(s.w2_0) << "\nv1 = " << fmt(s.v1_0)
              << "\nv2 = " << fmt(s.v2_0) << "\n";
        } else {
          o << "w0 = " << fmt(s.w0) << "\nv0 = " << fmt(s.v0) << "\n";
        }
      },
      st);
}

inline bool is_pow2(long n) { return n >= 8 && (n & (n - 1)) == 0; }

}  // namespace detail

// -------------------------------------------------------------------- validation

inline void validate(const RunConfig& c) {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::Validation, m); };
  const auto& rc = c.controls;
  if (!detail::is_pow2(static_cast<long>(rc.n0))) fail("controls.n0: must be a power of two >= 8");
  if (!detail::is_pow2(static_cast<long>(rc.n_max)) || rc.n_max < rc.n0)
    fail("controls.n_max: must be a power of two >= controls.n0");
  if (!(rc.t_end > 0.0)) fail("controls.t_end: must be > 0");
  if (!(rc.cfl > 0.0)) fail("controls.cfl: must be > 0");
  if (!(rc.dt_max > 0.0)) fail("controls.dt_max: must be > 0");
  if (rc.sample_every < 1) fail("controls.sample_every: must be >= 1");
  if (!(rc.tail_tol > 0.0)) fail("controls.tail_tol: must be > 0");
  if (rc.fit_window.policy == WindowPolicy::Explicit && !(rc.fit_window.k_lo < rc.fit_window.k_hi))
    fail("controls.fit_k_lo: must be < controls.fit_k_hi");
  if (c.snapshot_every < 0) fail("output.snapshot_every: must be >= 0");
  if (c.exact_samples < 2) fail("output.exact_samples: must be >= 2");
  c.params.validate(c.domain);

  if (std::holds_alternative<TwoModeData>(c.data) && c.domain != Domain::Circle)
    fail("run.domain: two_mode data lives on the circle");
  if (const auto* pf = std::get_if<PoleFamilyData>(&c.data)) {
    const auto m = model_of(family_of(pf->state));
    const std::string fam = to_string(family_of(pf->state));
    if (c.params.a != m.a) fail("params.a: family " + fam + " requires a = " + fmt(m.a));
    if (c.params.sigma != m.sigma) fail("params.sigma: family " + fam + " requires sigma = " + fmt(m.sigma));
    if (c.domain != domain_of(pf->state))
      fail(std::string("run.domain: family ") + fam + " lives on the " + to_string(domain_of(pf->state)));
    if (c.params.omega_av != 0.0) fail("params.omega_av: must be 0 for pole-family data");
  }
  const bool needs_family = c.mode == RunMode::OracleCompare || c.mode == RunMode::ExactOnly;
  if (needs_family && !std::holds_alternative<PoleFamilyData>(c.data))
    fail(std::string("data.kind: mode ") + to_string(c.mode) + " needs pole_family data");
  if (c.mode == RunMode::OracleCompare) {
    const double tc = std::visit([](const auto& s) { return s.t_c; }, std::get<PoleFamilyData>(c.data).state);
    if (!(rc.t_end < tc)) fail("controls.t_end: must be before the exact collapse time " + fmt(tc));
  }
  if (c.mode == RunMode::CriticalSweep) {
    if (!std::holds_alternative<TwoModeData>(c.data)) fail("data.kind: critical_sweep needs two_mode data");
    if (!(c.sweep.A_lo < c.sweep.A_hi)) fail("sweep.A_lo: must be < sweep.A_hi");
    if (!(c.sweep.tol > 0.0)) fail("sweep.tol: must be > 0");
  }
}

// ----------------------------------------------------------------------- parsing

inline RunConfig parse_config(std::istream& in) {
  boost::property_tree::ptree pt;
  try {
    boost::property_tree::ini_parser::read_ini(in, pt);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error(ErrorCode::Validation, std::string("config: ") + e.what());
  }
  const detail::Reader r(pt);
  RunConfig c;
  c.mode = detail::parse_enum("run.mode", r.str("run.mode", "simulate"),
                              {RunMode::Simulate, RunMode::OracleCompare, RunMode::CriticalSweep,
                               RunMode::ExactOnly});
  c.output_dir = r.str("run.output_dir", c.output_dir);

  const std::string kind = r.str("data.kind", "two_mode");
  std::optional<Domain> family_domain;
  std::optional<FamilyModel> family_model;
  c.params.nu = r.real("params.nu", c.params.nu);
  if (kind == "two_mode") {
    c.data = TwoModeData{r.real("data.amplitude", 1.0)};
  } else if (kind == "pole_family") {
    auto st = detail::read_family(r, c.params.nu);
    family_domain = domain_of(st);
    family_model = model_of(family_of(st));
    c.data = PoleFamilyData{std::move(st)};
  } else if (kind == "file") {
    c.data = FileData{r.required("data.path")};
  } else {
    throw Error(ErrorCode::Validation, "data.kind: unknown '" + kind + "' (two_mode|pole_family|file)");
  }

  const std::string dom = r.str("run.domain", family_domain ? to_string(*family_domain) : "circle");
  if (dom == "circle")
    c.domain = Domain::Circle;
  else if (dom == "line")
    c.domain = Domain::CompactifiedLine;
  else
    throw Error(ErrorCode::Validation, "run.domain: unknown '" + dom + "' (circle|line)");

  c.params.a = r.real("params.a", family_model ? family_model->a : c.params.a);
  c.params.sigma = r.real("params.sigma", family_model ? family_model->sigma : c.params.sigma);
  c.params.omega_av = r.real("params.omega_av", 0.0);

  auto& rc = c.controls;
  rc.t_end = r.real("controls.t_end", rc.t_end);
  rc.sample_every = static_cast<int>(r.integer("controls.sample_every", rc.sample_every));
  rc.cfl = r.real("controls.cfl", rc.cfl);
  rc.n0 = static_cast<std::size_t>(r.integer("controls.n0", static_cast<long>(rc.n0)));
  rc.n_max = static_cast<std::size_t>(r.integer("controls.n_max", static_cast<long>(rc.n_max)));
  rc.tail_tol = r.real("controls.tail_tol", rc.tail_tol);
  rc.collapse_delta_factor = r.real("controls.collapse_delta_factor", rc.collapse_delta_factor);
  rc.dt_max = r.real("controls.dt_max", rc.dt_max);
  rc.cap_tail_tol = r.real("controls.cap_tail_tol", rc.cap_tail_tol);
  rc.coarsen_tol = r.real("controls.coarsen_tol", rc.coarsen_tol);
  rc.fit_window.policy = detail::parse_enum("controls.fit_window", r.str("controls.fit_window", "default"),
                                            {WindowPolicy::Default, WindowPolicy::Early, WindowPolicy::Explicit});
  rc.fit_window.k_lo = static_cast<std::size_t>(r.integer("controls.fit_k_lo", 0));
  rc.fit_window.k_hi = static_cast<std::size_t>(r.integer("controls.fit_k_hi", 0));

  c.sweep.A_lo = r.real("sweep.A_lo", 0.0);
  c.sweep.A_hi = r.real("sweep.A_hi", 0.0);
  c.sweep.tol = r.real("sweep.tol", 0.1);
  c.snapshot_every = static_cast<int>(r.integer("output.snapshot_every", 0));
  c.exact_samples = static_cast<std::size_t>(r.integer("output.exact_samples", 200));
  validate(c);
  return c;
}

inline RunConfig parse_config_string(const std::string& s) {
  std::istringstream in(s);
  return parse_config(in);
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config " + path);
  return parse_config(in);
}

inline std::string to_ini(const RunConfig& c) {
  std::ostringstream o;
  const auto& rc = c.controls;
  o << "[run]\nmode = " << to_string(c.mode) << "\ndomain = " << to_string(c.domain)
    << "\noutput_dir = " << c.output_dir << "\n\n";
  o << "[params]\na = " << fmt(c.params.a) << "\nsigma = " << fmt(c.params.sigma) << "\nnu = " << fmt(c.params.nu)
    << "\nomega_av = " << fmt(c.params.omega_av) << "\n\n[data]\n";
  std::visit(
      [&o](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, TwoModeData>)
          o << "kind = two_mode\namplitude = " << fmt(d.amplitude) << "\n";
        else if constexpr (std::is_same_v<T, PoleFamilyData>) {
          o << "kind = pole_family\n";
          detail::write_family(o, d.state);
        } else
          o << "kind = file\npath = " << d.path << "\n";
      },
      c.data);
  o << "\n[controls]\nt_end = " << fmt(rc.t_end) << "\nsample_every = " << rc.sample_every
    << "\ncfl = " << fmt(rc.cfl) << "\nn0 = " << rc.n0 << "\nn_max = " << rc.n_max
    << "\ntail_tol = " << fmt(rc.tail_tol) << "\ncollapse_delta_factor = " << fmt(rc.collapse_delta_factor)
    << "\ndt_max = " << fmt(rc.dt_max) << "\ncap_tail_tol = " << fmt(rc.cap_tail_tol)
    << "\ncoarsen_tol = " << fmt(rc.coarsen_tol) << "\nfit_window = " << to_string(rc.fit_window.policy)
    << "\nfit_k_lo = " << rc.fit_window.k_lo << "\nfit_k_hi = " << rc.fit_window.k_hi << "\n";
  o << "\n[sweep]\nA_lo = " << fmt(c.sweep.A_lo) << "\nA_hi = " << fmt(c.sweep.A_hi) << "\ntol = " << fmt(c.sweep.tol)
    << "\n\n[output]\nsnapshot_every = " << c.snapshot_every << "\nexact_samples = " << c.exact_samples << "\n";
  return o.str();
}

}  // namespace gclm::harness
