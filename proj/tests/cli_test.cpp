#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cli.hpp"
#include "support/instances.hpp"
#include "vibnet/io.hpp"

using namespace vibnet;
namespace fs = std::filesystem;
namespace vt = vibnet::testing;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const char* base = std::getenv("VIBNET_TMP");
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::path(base ? base : fs::temp_directory_path().string()) /
           (std::string("cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string save(const std::string& name, const NetworkSystem& sys) const {
    io::save_network(sys, path(name));
    return path(name);
  }

  int run(const std::vector<std::string>& args) {
    out_.str("");
    err_.str("");
    return cli::run(args, out_, err_);
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

}  // namespace

TEST_F(CliTest, CheckExitCodes) {
  EXPECT_EQ(run({"check", save("pairs.json", vt::two_pair_network())}), cli::kOk);
  EXPECT_NE(out_.str().find("stabilizable"), std::string::npos);

  EXPECT_EQ(run({"check", save("cycle.json", vt::residual_cycle_network())}),
            cli::kConditionNotMet);
  EXPECT_NE(out_.str().find("cycle: 1 -> 3 -> 4 -> 1"), std::string::npos) << out_.str();

  io::write_file(path("bad.json"), R"({"nodes":[{"id":1,"d":-1}],"edges":[],"x":1})");
  EXPECT_EQ(run({"check", path("bad.json")}), cli::kInputError);
  EXPECT_NE(err_.str().find("$"), std::string::npos);

  EXPECT_EQ(run({"check", path("missing.json")}), cli::kInputError);
  EXPECT_EQ(run({"frobnicate"}), cli::kInputError);
}

TEST_F(CliTest, PlaceRefusesCyclicResidual) {
  EXPECT_EQ(run({"place", save("cycle.json", vt::residual_cycle_network())}),
            cli::kConditionNotMet);
}

TEST_F(CliTest, DesignReproducesReferenceAmplitudes) {
  const auto net = save("pairs.json", vt::two_pair_network());
  ASSERT_EQ(run({"design", net, "--omega-base", "50", "-o", path("s.json")}), cli::kOk);
  const auto sched = io::load_schedule(path("s.json"));
  ASSERT_EQ(sched.entries().size(), 2u);
  // Entry (4,3) first, then (5,1), in 1-based matrix coordinates.
  EXPECT_EQ(sched.entries()[0].row, 3);
  EXPECT_EQ(sched.entries()[0].col, 2);
  EXPECT_NEAR(sched.entries()[0].mu, 50 * std::sqrt(1.8 / 1.1), 1e-12);
  EXPECT_EQ(sched.entries()[1].row, 4);
  EXPECT_EQ(sched.entries()[1].col, 0);
  EXPECT_NEAR(sched.entries()[1].mu, 100 * std::sqrt(6.5), 1e-12);
  EXPECT_DOUBLE_EQ(sched.epsilon(), 0.01);
}

TEST_F(CliTest, AverageBothReportsAgreement) {
  // The two-pair coupling with distinct intrinsic rates: with equal rates the
  // functional matrix has a defective eigenvalue and spectral distance
  // amplifies tiny entry errors.
  const auto pairs = vt::two_pair_network();
  const auto net = save("pairs.json", NetworkSystem({-1, -1.5, -2, -2.5, -3}, pairs.edges()));
  ASSERT_EQ(run({"design", net, "--phase", "-1.5707963267948966", "-o", path("s.json")}),
            cli::kOk);
  ASSERT_EQ(run({"average", net, path("s.json"), "--method", "both",
                 "-o", path("avg.json")}),
            cli::kOk)
      << err_.str();
  const auto doc = io::parse_text(io::read_file(path("avg.json")));
  ASSERT_TRUE(doc.contains("agreement"));
  EXPECT_LT(doc["agreement"]["spectral"].get<double>(), 1e-2);
  EXPECT_LT(doc["agreement"]["entrywise"].get<double>(), 1e-3);
  EXPECT_FALSE(doc["agreement"]["chained_controls"].get<bool>());
  EXPECT_TRUE(doc.contains("closed_form"));
  EXPECT_TRUE(doc.contains("numeric"));
}

TEST_F(CliTest, SimulateUncontrolledUnstableGrows) {
  // Pair with eigenvalue +1: no schedule, so the CSV should grow.
  const NetworkSystem sys({-1, -1}, {{0, 1, 2.0}, {1, 0, 2.0}});
  const auto net = save("pair.json", sys);
  ASSERT_EQ(run({"simulate", net, "--tfinal", "5", "--dt", "0.01", "-o", path("t.csv")}),
            cli::kOk);
  EXPECT_NE(out_.str().find("growing"), std::string::npos);
  std::ifstream csv(path("t.csv"));
  std::string header, line, last;
  std::getline(csv, header);
  EXPECT_EQ(header, "t,x1,x2");
  while (std::getline(csv, line)) last = line;
  EXPECT_EQ(last.substr(0, 2), "5,");
  EXPECT_GT(std::stod(last.substr(last.find(',') + 1)), 100.0);
}

TEST_F(CliTest, SimulateRejectsUnderResolvedStep) {
  const auto net = save("pairs.json", vt::two_pair_network());
  ASSERT_EQ(run({"design", net, "--epsilon", "0.01", "-o", path("s.json")}), cli::kOk);
  EXPECT_EQ(run({"simulate", net, "--schedule", path("s.json"), "--dt", "0.1"}),
            cli::kInputError);
}

TEST_F(CliTest, RobustnessWritesCsv) {
  const NetworkSystem sys({-1, -1}, {{0, 1, 0.9}, {1, 0, 0.9}});
  const auto net = save("pair.json", sys);
  ASSERT_EQ(run({"design", net, "-o", path("s.json")}), cli::kOk);
  ASSERT_EQ(run({"robustness", net, "--schedule", path("s.json"), "--stress", "20",
                 "--csv", path("r.csv"), "-o", path("r.json")}),
            cli::kOk)
      << err_.str();
  const std::string csv = io::read_file(path("r.csv"));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "system,hinf,bound");
  const auto doc = io::parse_text(io::read_file(path("r.json")));
  EXPECT_GT(doc["functional"]["bound"].get<double>(), doc["original"]["bound"].get<double>());
  EXPECT_EQ(doc["original"]["stress"]["stable"], 20);
}

TEST_F(CliTest, AnalyzeIsDeterministic) {
  const auto net = save("pairs.json", vt::two_pair_network());
  ASSERT_EQ(run({"analyze", net, "--omega-base", "50", "--out-dir", path("a")}), cli::kOk)
      << err_.str();
  ASSERT_EQ(run({"analyze", net, "--omega-base", "50", "--out-dir", path("b")}), cli::kOk);
  for (const char* name : {"placement.json", "schedule.json", "functional.json",
                           "robustness.csv"}) {
    EXPECT_EQ(io::read_file(path("a") + "/" + name), io::read_file(path("b") + "/" + name))
        << name;
  }
  const auto report = io::parse_text(io::read_file(path("a") + "/report.json"));
  EXPECT_TRUE(report["stabilizable"].get<bool>());
  EXPECT_LT(report["functional"]["spectrum"]["abscissa"].get<double>(), 0.0);
}

TEST_F(CliTest, AnalyzeStopsOnCyclicResidual) {
  const auto net = save("cycle.json", vt::residual_cycle_network());
  EXPECT_EQ(run({"analyze", net, "--out-dir", path("a")}), cli::kConditionNotMet);
  const auto report = io::parse_text(io::read_file(path("a") + "/report.json"));
  EXPECT_FALSE(report["stabilizable"].get<bool>());
}

TEST_F(CliTest, ThresholdScan) {
  const NetworkSystem sys({-1, -1}, {{0, 1, 2.0}, {1, 0, 2.0}});
  const auto net = save("pair.json", sys);
  ASSERT_EQ(run({"design", net, "-o", path("s.json")}), cli::kOk);
  ASSERT_EQ(run({"threshold", net, path("s.json"), "--eps-min", "1e-2", "--eps-max", "10",
                 "--per-decade", "1", "-o", path("t.json")}),
            cli::kOk)
      << err_.str();
  const auto doc = io::parse_text(io::read_file(path("t.json")));
  EXPECT_GT(doc["epsilon_hat"].get<double>(), 0.0);
  EXPECT_EQ(doc["table"].size(), 4u);
}
