#include <gtest/gtest.h>

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "gclm/harness/config.hpp"
#include "gclm/harness/plots.hpp"
#include "gclm/harness/run.hpp"

using namespace gclm;
using namespace gclm::harness;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("gclm_harness_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ErrorCode code_of(const std::string& ini) {
  try {
    parse_config_string(ini);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

std::string message_of(const std::string& ini) {
  try {
    parse_config_string(ini);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

const char* kSchochetExact = R"(
[run]
mode = exact_only
[data]
kind = pole_family
family = schochet
[controls]
t_end = 1
n0 = 128
[output]
exact_samples = 40
)";

}  // namespace

TEST(Config, DefaultsAndComplexValues) {
  const auto c = parse_config_string(R"(
[data]
kind = pole_family
family = onepair_s1
w0 = -2,0.5
v0 = 1
)");
  EXPECT_EQ(c.mode, RunMode::Simulate);
  EXPECT_EQ(c.domain, Domain::CompactifiedLine);
  EXPECT_EQ(c.params.a, 0.0);
  EXPECT_EQ(c.params.sigma, 1.0);
  const auto& st = std::get<OnePairState>(std::get<PoleFamilyData>(c.data).state);
  EXPECT_EQ(st.w0, cplx(-2.0, 0.5));
  EXPECT_EQ(st.v0, cplx(1.0, 0.0));
}

TEST(Config, FieldLevelValidation) {
  EXPECT_NE(message_of("[controls]\nn0 = 100\n").find("controls.n0"), std::string::npos);
  EXPECT_NE(message_of("[run]\ndomain = line\n").find("run.domain"), std::string::npos);
  EXPECT_NE(message_of("[data]\nkind = pole_family\nfamily = schochet\n[params]\nsigma = 1\n").find("params.sigma"),
            std::string::npos);
  EXPECT_NE(message_of("[run]\nmode = oracle_compare\n[data]\nkind = pole_family\nfamily = onepair_s0\nw0 = -2\nv0 = "
                       "1\n[controls]\nt_end = 1\n")
                .find("controls.t_end"),
            std::string::npos);
  EXPECT_NE(message_of("[run]\nmode = critical_sweep\n[sweep]\nA_lo = 2\nA_hi = 1\n").find("sweep.A_lo"),
            std::string::npos);
  EXPECT_NE(message_of("[params]\nnu = abc\n").find("params.nu"), std::string::npos);
  EXPECT_NE(message_of("[data]\nkind = pole_family\nfamily = nope\n").find("data.family"), std::string::npos);
  EXPECT_NE(message_of("[data]\nkind = pole_family\nfamily = doublepole\n").find(": required"), std::string::npos);
  EXPECT_EQ(code_of("[data]\nkind = pole_family\nfamily = schochet\nx1 = 0,1\n"), ErrorCode::Validation);
  EXPECT_EQ(code_of("[params]\nsigma = -0.5\n"), ErrorCode::Validation);
}

TEST(Config, EchoIsBitExact) {
  RunConfig c;
  c.params = {1.0 / 3.0, 1.0, 0.1, 0.0};
  c.data = TwoModeData{std::numbers::pi};
  c.controls.t_end = 1.0 / 7.0;
  c.controls.cfl = 0.0625;
  c.controls.tail_tol = 3e-13;
  c.sweep = {1.1, 2.2, 0.01};
  const auto back = parse_config_string(to_ini(c));
  EXPECT_EQ(to_ini(back), to_ini(c));
  EXPECT_EQ(std::memcmp(&back.params.a, &c.params.a, sizeof(double)), 0);
  EXPECT_EQ(back.params.nu, 0.1);
  EXPECT_EQ(std::get<TwoModeData>(back.data).amplitude, std::numbers::pi);
  EXPECT_EQ(back.controls.t_end, 1.0 / 7.0);
  EXPECT_EQ(back.controls.tail_tol, 3e-13);
  EXPECT_EQ(back.sweep.tol, 0.01);
}

TEST(Config, PoleFamilyEchoRoundTrip) {
  for (const char* data : {"family = schochet\nx1 = 0.1,-1.3\nx2 = 0,-2\nk_sign = -1\n",
                           "family = doublepole\nv0 = 0.3\nw0 = 0.7\nx0 = 0.1\n",
                           "family = twopair_s1\nw1 = -2\nw2 = 2\nv1 = 0.1\nv2 = 0.9\n",
                           "family = twopair_s1\ndouble_pole_limit = true\namplitude = 4\nv_lim = 1\n",
                           "family = periodic_s0\nw0 = -0.5,0.25\nv0 = 0.5,0.1\n"}) {
    const auto c = parse_config_string(std::string("[data]\nkind = pole_family\n") + data);
    EXPECT_EQ(to_ini(parse_config_string(to_ini(c))), to_ini(c)) << data;
  }
}

TEST(Run, ExactOnlySchochetManifestAndClosedFormTc) {
  auto c = parse_config_string(kSchochetExact);
  c.output_dir = scratch("exact").string();
  const auto r = run(c);
  const auto fit = read_json(r.dir / "fit.json");
  EXPECT_NEAR(fit["classification"]["t_c"].get<double>(), (3.0 - std::sqrt(6.0)) / 15.0, 1e-15);
  EXPECT_EQ(fit["classification"]["kind"], "collapse");
  const auto back = load_config((r.dir / "manifest.ini").string());
  EXPECT_EQ(to_ini(back), to_ini(c));
  const auto s0 = std::get<SchochetState>(std::get<PoleFamilyData>(c.data).state);
  const auto s1 = std::get<SchochetState>(std::get<PoleFamilyData>(back.data).state);
  EXPECT_EQ(s0.x1_0, s1.x1_0);
  EXPECT_EQ(s0.x2_0, s1.x2_0);
  EXPECT_TRUE(fs::exists(r.dir / "timeseries.csv"));
  EXPECT_TRUE(fs::exists(r.dir / "poles.json"));
}

TEST(Run, OracleCompareGlobalOnePairS0) {
  auto c = parse_config_string(R"(
[run]
mode = oracle_compare
[data]
kind = pole_family
family = onepair_s0
w0 = -0.5
v0 = 1
[controls]
t_end = 1
n0 = 128
dt_max = 1e-3
sample_every = 50
)");
  c.output_dir = scratch("oracle").string();
  const auto r = run(c);
  const auto fit = read_json(r.dir / "fit.json");
  EXPECT_EQ(fit["status"], "ReachedTEnd");
  EXPECT_LE(fit["oracle"]["max_rel_error"].get<double>(), 1e-6);
  const auto cols = read_csv_header(r.dir / "timeseries.csv");
  EXPECT_EQ(cols.back(), "oracle_rel_error");
  EXPECT_EQ(emit_plots(r.dir).size(), 2u);
}

TEST(Run, DeterministicReplay) {
  auto c = parse_config_string("[params]\na = 0.5\n[data]\namplitude = 2\n[controls]\nt_end = 0.5\nn0 = 64\n");
  c.output_dir = scratch("replay1").string();
  const auto r1 = run(c);
  c.output_dir = scratch("replay2").string();
  const auto r2 = run(c);
  EXPECT_EQ(slurp(r1.dir / "timeseries.csv"), slurp(r2.dir / "timeseries.csv"));
  EXPECT_EQ(slurp(r1.dir / "snapshot_final.txt"), slurp(r2.dir / "snapshot_final.txt"));
}

TEST(Run, PeriodicTwoModeCollapse) {
  auto c = parse_config_string(R"(
[params]
a = 0.5
sigma = 1
nu = 1
[data]
amplitude = 4
[controls]
t_end = 1.2
n0 = 256
n_max = 4096
sample_every = 20
)");
  c.output_dir = scratch("collapse").string();
  const auto r = run(c);
  EXPECT_EQ(r.status, "CollapseDetected");
  const auto fit = read_json(r.dir / "fit.json");
  EXPECT_NEAR(fit["collapse"]["t_c"].get<double>(), 1.15367, 2e-3);
  const auto scripts = emit_plots(r.dir);
  ASSERT_EQ(scripts.size(), 4u);
  for (const char* name : {"profile.gp", "spectrum.gp", "delta.gp", "amplitude.gp"})
    EXPECT_TRUE(fs::exists(r.dir / name)) << name;
}

TEST(Run, FileInitialData) {
  const auto dir = scratch("file");
  fs::create_directories(dir);
  const auto f = two_mode_data(1.0, 64);
  write_snapshot(dir / "init.txt", f, 0.0);
  const auto snap = read_snapshot(dir / "init.txt");
  const auto a = snap.field.values(), b = f.values();
  for (std::size_t j = 0; j < a.size(); ++j) EXPECT_NEAR(a[j], b[j], 1e-15);
  auto c = parse_config_string("[data]\nkind = file\npath = " + (dir / "init.txt").string() +
                               "\n[controls]\nt_end = 0.1\nn0 = 64\n");
  c.output_dir = (dir / "out").string();
  EXPECT_EQ(run(c).status, "ReachedTEnd");

  auto bad = c;
  bad.domain = Domain::CompactifiedLine;
  bad.params.sigma = 1.0;
  EXPECT_THROW(run(bad), Error);
}

TEST(Run, LineSnapshotRoundTrip) {
  const auto dir = scratch("linesnap");
  fs::create_directories(dir);
  const auto f = sample_field(make_doublepole(0.5, 3.0), 64);
  write_snapshot(dir / "s.txt", f, 0.25);
  const auto s = read_snapshot(dir / "s.txt");
  EXPECT_EQ(s.t, 0.25);
  EXPECT_EQ(s.field.domain(), Domain::CompactifiedLine);
  const auto a = s.field.values(), b = f.values();
  for (std::size_t j = 0; j < a.size(); ++j) EXPECT_NEAR(a[j], b[j], 1e-14);
}

TEST(Run, OutputRootOverride) {
  RunConfig c;
  c.output_dir = "runs/alpha";
  ::setenv("GCLM_OUTPUT_ROOT", "/tmp/elsewhere", 1);
  EXPECT_EQ(effective_output_dir(c), fs::path("/tmp/elsewhere/alpha"));
  ::unsetenv("GCLM_OUTPUT_ROOT");
  EXPECT_EQ(effective_output_dir(c), fs::path("runs/alpha"));
}

TEST(Plots, EmptyDirectoryListsExpectedFiles) {
  const auto dir = scratch("empty");
  fs::create_directories(dir);
  try {
    emit_plots(dir);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("timeseries.csv"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("fit.json"), std::string::npos);
  }
}

TEST(Plots, MissingColumnsAreListed) {
  const auto dir = scratch("cols");
  fs::create_directories(dir);
  std::ofstream(dir / "timeseries.csv") << "t,l2\n0,1\n";
  std::ofstream(dir / "fit.json") << "{}\n";
  try {
    emit_plots(dir);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("max_abs_omega, delta_x"), std::string::npos);
  }
}

TEST(Plots, ExactCollapseRunGivesFourScripts) {
  auto c = parse_config_string(kSchochetExact);
  c.output_dir = scratch("exactplots").string();
  EXPECT_EQ(emit_plots(run(c).dir).size(), 4u);
}

TEST(Table1, RowSpec) {
  const auto rows = parse_table1_rows("0.5:1:3:4,0:0:1:2");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].a, 0.5);
  EXPECT_EQ(rows[1].A_hi, 2.0);
  EXPECT_EQ(parse_table1_rows("desk").size(), 2u);
  EXPECT_THROW(parse_table1_rows("0.5:1:3"), Error);
}

TEST(Table1, CriticalSweepJson) {
  auto c = parse_config_string(R"(
[run]
mode = critical_sweep
[params]
a = 0
sigma = 0
[controls]
t_end = 50
n0 = 128
n_max = 4096
sample_every = 50
[sweep]
A_lo = 1
A_hi = 2
tol = 0.1
)");
  c.output_dir = scratch("sweep").string();
  const auto r = run(c);
  const auto j = read_json(r.dir / "critical.json");
  EXPECT_LE(j["A_blowup"].get<double>() - j["A_no_blowup"].get<double>(), 0.1);
  EXPECT_GE(j["A_no_blowup"].get<double>(), 1.3);
  EXPECT_LE(j["A_blowup"].get<double>(), 1.4);
  EXPECT_LE(j["probes"].size(), 6u);
}
