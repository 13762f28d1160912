#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("ksnd_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  Outcome run(const std::string& args) {
    const fs::path out = dir_ / "stdout.txt";
    const fs::path err = dir_ / "stderr.txt";
    const std::string cmd = std::string(KSND_EXECUTABLE) + " " + args + " >" + out.string() + " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    Outcome r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  Outcome run(const fs::path& config, const std::string& sub, const std::string& out_name = "out") {
    return run("--config " + config.string() + " --output " + (dir_ / out_name).string() + " " + sub);
  }

  nlohmann::json json_at(const std::string& rel) { return nlohmann::json::parse(slurp(dir_ / rel)); }

  fs::path dir_;
};

const std::string kSmall = R"(grid.n = 8
grid.box_length = 8
electrons.count = 1
time.dt = 0.01
time.total = 0.1
seed = 5
probe.samples = 20

[orbital]
center = 4, 4, 4
width = 1
)";

const std::string kConstants = R"(admissibility.A = 1.1
admissibility.C = 3
admissibility.C1 = 1e-3
admissibility.C2 = 1e-2
admissibility.lipschitz_scale = 1
)";

const std::string kProtons = R"(
[nucleus]
mass = 1836.15267343
charge = 1
position = 7, 8, 8

[nucleus]
mass = 1836.15267343
charge = 1
position = 9, 8, 8
)";

std::string reference(const std::string& dt, const std::string& tau, const std::string& total,
                      const std::string& extra = "") {
  return "grid.n = 16\ngrid.box_length = 16\nelectrons.count = 1\nexchange.lambda = 1e-3\nexchange.q = 3.5\n"
         "time.dt = " + dt + "\ntime.window_tau = " + tau + "\ntime.total = " + total + "\n" + extra +
         "\n[orbital]\ncenter = 8, 8, 8\nwidth = 1\n" + kProtons;
}

std::string reference(const std::string& tau, const std::string& extra = "") { return reference(tau, tau, tau, extra); }

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_F(CliTest, UnknownProbeListsValidNames) {
  const Outcome r = run(write("a.conf", kSmall), "probe bogus");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("unknown probe 'bogus'"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("exchange-threshold"), std::string::npos);
}

TEST_F(CliTest, UnknownOracleCase) {
  EXPECT_EQ(run(write("a.conf", kSmall), "oracle-compare nope").code, 2);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run("simulate").code, 2);
  EXPECT_EQ(run("--config x.conf").code, 2);
  EXPECT_EQ(run(write("a.conf", kSmall), "--threads 0 simulate").code, 2);
}

TEST_F(CliTest, MissingConfigIsIoError) {
  const Outcome r = run("--config " + (dir_ / "missing.conf").string() + " simulate");
  EXPECT_EQ(r.code, 5);
  EXPECT_NE(r.err.find("cannot read config"), std::string::npos);
}

TEST_F(CliTest, InvalidConfigReportsKeyAndLine) {
  const Outcome r = run(write("a.conf", kSmall + "exchange.q = 0.5\n"), "simulate");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 12: exchange.q must satisfy q > 1"), std::string::npos) << r.err;
}

TEST_F(CliTest, MveHalfReportsSharpConstantOne) {
  const Outcome r = run(write("a.conf", kSmall + "probe.alpha = 0.5\n"), "probe mve");
  ASSERT_EQ(r.code, 0) << r.out << r.err;
  const auto j = json_at("out/probe_mve.json");
  EXPECT_NEAR(j.at("sharp_constant").get<double>(), 1.0, 1e-12);
  EXPECT_TRUE(j.at("pass").get<bool>());
}

TEST_F(CliTest, ExchangeThresholdFlagsTrend) {
  Outcome r = run(write("low.conf", "grid.n = 16\n" + kSmall.substr(kSmall.find('\n') + 1) + "exchange.q = 1.3333333333333333\n"),
              "probe exchange-threshold", "low");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json_at("low/probe_exchange-threshold.json").at("trend"), "unbounded");
  EXPECT_TRUE(json_at("low/probe_exchange-threshold.json").at("below_threshold").get<bool>());
  EXPECT_NE(r.out.find("trend unbounded"), std::string::npos);

  r = run(write("high.conf", "grid.n = 16\n" + kSmall.substr(kSmall.find('\n') + 1) + "exchange.q = 3.5\n"),
          "probe exchange-threshold", "high");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json_at("high/probe_exchange-threshold.json").at("trend"), "bounded");
}

TEST_F(CliTest, AdmissibilitySmallWindow) {
  const Outcome r = run(write("a.conf", reference("1e-6", kConstants)), "check-admissibility");
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("check-admissibility: admissible"), std::string::npos);
  const auto j = json_at("out/admissibility.json");
  EXPECT_TRUE(j.at("admissible").get<bool>());
  EXPECT_GT(j.at("tau_star").get<double>(), 1e-6);
}

TEST_F(CliTest, AdmissibilityAboveThresholdFailsWithBothSides) {
  Outcome r = run(write("a.conf", reference("1e-6", kConstants)), "check-admissibility", "first");
  ASSERT_EQ(r.code, 0);
  const double star = json_at("first/admissibility.json").at("tau_star").get<double>();
  std::ostringstream tau;
  tau.precision(17);
  tau << 1.5 * star;
  r = run(write("b.conf", reference(tau.str(), kConstants)), "check-admissibility");
  EXPECT_EQ(r.code, 4);
  EXPECT_NE(r.out.find("FAILS"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find(" < "), std::string::npos);
  EXPECT_NE(r.out.find("NOT admissible"), std::string::npos);
}

TEST_F(CliTest, AdmissibilityProbesMissingConstants) {
  const Outcome r = run(write("a.conf", reference("1e-6", "probe.samples = 20\nprobe.fields = 1\n")),
                    "check-admissibility");
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("probing missing constants"), std::string::npos);
  const auto j = json_at("out/admissibility.json");
  EXPECT_NE(j.at("provenance").at("A").get<std::string>().find("probed"), std::string::npos);
}

TEST_F(CliTest, NearCoincidentNucleiFailA1) {
  // C2 is left to the internuclear bound so it reflects the geometry.
  std::string text = reference("1e-6", "admissibility.A = 1.1\nadmissibility.C = 3\nadmissibility.C1 = 1e-3\n"
                                       "admissibility.lipschitz_scale = 1\n");
  text.replace(text.find("position = 9, 8, 8"), 18, "position = 7.000001, 8, 8");
  const Outcome r = run(write("a.conf", text), "check-admissibility");
  EXPECT_EQ(r.code, 4) << r.out << r.err;
  const auto j = json_at("out/admissibility.json");
  bool a1_failed = false;
  for (const auto& c : j.at("conditions")) {
    if (c.at("name") == "A1") a1_failed = !c.at("holds").get<bool>();
  }
  EXPECT_TRUE(a1_failed);
}

TEST_F(CliTest, SimulateDecoupledHasConstantEnergy) {
  const fs::path cfg = write("a.conf", kSmall + "hartree.enabled = false\n");
  const Outcome r = run(cfg, "simulate");
  ASSERT_EQ(r.code, 0) << r.out << r.err;
  const std::string csv = slurp(dir_ / "out/timeseries.csv");
  EXPECT_EQ(csv.rfind("# ksnd-timeseries v1\n", 0), 0u);
  const auto rows = csv_rows(csv);
  ASSERT_EQ(rows.size(), 12u);  // header plus t = 0, 0.01, ..., 0.1
  EXPECT_EQ(rows[0][0], "time");
  EXPECT_EQ(rows[0][1], "E");
  const double e0 = std::stod(rows[1][1]);
  for (std::size_t i = 2; i < rows.size(); ++i) EXPECT_LE(std::abs(std::stod(rows[i][1]) - e0), 1e-12 * std::abs(e0));
  const auto j = json_at("out/summary.json");
  EXPECT_LE(j.at("energy_drift").get<double>(), 1e-12);
  EXPECT_EQ(j.at("status"), "ok");
  EXPECT_TRUE(fs::exists(dir_ / "out/final.ksnd"));
}

TEST_F(CliTest, StrideOfWholeRunGivesEndpoints) {
  const Outcome r = run(write("a.conf", kSmall + "output.stride = 10\n"), "simulate");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(slurp(dir_ / "out/timeseries.csv"));
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(std::stod(rows[1][0]), 0.0);
  EXPECT_NEAR(std::stod(rows[2][0]), 0.1, 1e-15);
}

TEST_F(CliTest, RerunIsByteIdentical) {
  const fs::path cfg = write("a.conf", reference("0.01", "0.05", "0.1"));
  ASSERT_EQ(run(cfg, "simulate", "one").code, 0);
  ASSERT_EQ(run(cfg, "simulate", "two").code, 0);
  const std::string a = slurp(dir_ / "one/timeseries.csv");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(dir_ / "two/timeseries.csv"));
  EXPECT_EQ(slurp(dir_ / "one/final.ksnd"), slurp(dir_ / "two/final.ksnd"));
}

TEST_F(CliTest, CheckpointsPerWindowAndRestart) {
  const std::string base = kSmall + "time.window_tau = 0.05\noutput.checkpoints = true\n";
  ASSERT_EQ(run(write("a.conf", base), "simulate").code, 0);
  for (const char* f : {"checkpoint_0.ksnd", "checkpoint_1.ksnd", "checkpoint_2.ksnd"}) {
    EXPECT_TRUE(fs::exists(dir_ / "out" / f)) << f;
  }
  const std::string restart = kSmall.substr(0, kSmall.find("\n[orbital]")) + "\nelectrons.initial = file\nelectrons.file = " +
                              (dir_ / "out/checkpoint_2.ksnd").string() + "\n";
  const Outcome r = run(write("b.conf", restart), "simulate", "again");
  EXPECT_EQ(r.code, 0) << r.err;

  std::string bytes = slurp(dir_ / "out/final.ksnd");
  bytes[bytes.size() / 2] ^= 0x01;
  std::ofstream(dir_ / "corrupt.ksnd", std::ios::binary) << bytes;
  const std::string bad = kSmall.substr(0, kSmall.find("\n[orbital]")) + "\nelectrons.initial = file\nelectrons.file = " +
                          (dir_ / "corrupt.ksnd").string() + "\n";
  const Outcome c = run(write("c.conf", bad), "simulate", "bad");
  EXPECT_EQ(c.code, 5);
  EXPECT_NE(c.err.find("checksum"), std::string::npos) << c.err;
}

TEST_F(CliTest, NonConvergenceExitCode) {
  const Outcome r = run(write("a.conf", reference("0.01", "0.05", "0.05", "picard.max_iters = 1\npicard.tol = 1e-15\n")), "simulate");
  EXPECT_EQ(r.code, 3) << r.out << r.err;
  EXPECT_EQ(json_at("out/summary.json").at("status"), "failed");
}

TEST_F(CliTest, OracleTwoProton) {
  const Outcome r = run(write("a.conf", kSmall), "oracle-compare two-proton");
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("PASS"), std::string::npos);
}

TEST_F(CliTest, ShippedConfigParses) {
  const Outcome r = run("--config " KSND_CONFIG_DIR "/h2plus.conf --output " + (dir_ / "x").string() +
                    " oracle-compare force-energy");
  EXPECT_EQ(r.code, 0) << r.out << r.err;
}
