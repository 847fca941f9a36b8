#include "scorecraft/cli.hpp"

#include "scorecraft/csv.hpp"
#include "scorecraft/io.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

using namespace scorecraft;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "scorecraft");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

const char* kSpec =
    "char,att,label,kind,lo,hi,categories,constraint\n"
    "a,1,low,interval,,10,,> 2\n"
    "a,2,mid,interval,10,20,,< 3\n"
    "a,3,high,interval,20,,,= 0\n"
    "a,4,NO INFORMATION,noinfo,,,,= 0\n"
    "b,5,red,category,,,red,\n"
    "b,6,blue,category,,,blue,\n"
    "b,7,NO INFORMATION,noinfo,,,,= 0\n";

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    csv::write_file_atomic(dir.path("spec.csv"), kSpec);
    ASSERT_EQ(run({"gen", "--spec", dir.path("spec.csv"), "--n-good", "400", "--n-bad", "300", "--seed", "5", "--out",
                   dir.path("dev.csv")})
                  .code,
              0);
  }
  testkit::TempDir dir;
};

}  // namespace

TEST_F(CliTest, CompilePrintsRowCounts) {
  const auto r = run({"compile", "--spec", dir.path("spec.csv")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("m_e = 3"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("m_i = 2"), std::string::npos) << r.out;
  const auto w = run({"compile", "--spec", dir.path("spec.csv"), "--centering", "weighted", "--data", dir.path("dev.csv")});
  EXPECT_EQ(w.code, 0) << w.err;
  EXPECT_NE(w.out.find("m_e = 5"), std::string::npos) << w.out;
}

TEST_F(CliTest, CompileFixture) {
  const auto r = run({"compile", "--spec", testkit::fixture_path("scorecard.csv")});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("m_i = 106"), std::string::npos);
  EXPECT_NE(r.out.find("m_e = 29"), std::string::npos);
}

TEST_F(CliTest, FitWritesModelAndReport) {
  const auto r = run({"fit", "--spec", dir.path("spec.csv"), "--data", dir.path("dev.csv"), "--lambda", "0", "--tol",
                      "1e-6", "--out", dir.path("m.json"), "--report", dir.path("r.txt")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("status converged"), std::string::npos);
  EXPECT_TRUE(std::filesystem::exists(dir.path("m.json")));
  EXPECT_TRUE(std::filesystem::exists(dir.path("r.txt")));
  EXPECT_TRUE(std::filesystem::exists(dir.path("r.csv")));
  const ModelFile m = parse_model(testkit::slurp(dir.path("m.json")));
  EXPECT_EQ(m.fit.beta[3], 0.0 + m.fit.beta[3]);
  EXPECT_LE(std::abs(m.fit.beta[3]), 1e-8);
  EXPECT_EQ(m.spec_hash, spec_hash(parse_spec(kSpec)));

  const auto e = run({"eval", "--model", dir.path("m.json"), "--data", dir.path("dev.csv"), "--cdf-dump",
                      dir.path("cdf.txt")});
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_NE(e.out.find("roc_area"), std::string::npos);
  EXPECT_TRUE(std::filesystem::exists(dir.path("cdf.txt")));
}

TEST_F(CliTest, EndToEndIsByteIdentical) {
  std::string first_model;
  std::string first_report;
  for (int pass = 0; pass < 2; ++pass) {
    const std::string tag = std::to_string(pass);
    ASSERT_EQ(run({"gen", "--spec", dir.path("spec.csv"), "--seed", "77", "--out", dir.path("d" + tag + ".csv")}).code, 0);
    ASSERT_EQ(run({"fit", "--spec", dir.path("spec.csv"), "--data", dir.path("d" + tag + ".csv"), "--out",
                   dir.path("m" + tag + ".json"), "--report", dir.path("r" + tag + ".txt"), "--threads",
                   pass ? "4" : "1"})
                  .code,
              0);
    const auto model = testkit::slurp(dir.path("m" + tag + ".json"));
    const auto report = testkit::slurp(dir.path("r" + tag + ".txt"));
    if (pass == 0) {
      first_model = model;
      first_report = report;
    } else {
      EXPECT_EQ(model, first_model);
      EXPECT_EQ(report, first_report);
    }
  }
}

TEST_F(CliTest, InfeasibleFitExitsTwo) {
  // Pinning att 2 to 1 contradicts "2 < 3" with att 3 fixed at 0.
  const auto r = run({"fit", "--spec", dir.path("spec.csv"), "--data", dir.path("dev.csv"), "--inweight", "3=1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("infeasible"), std::string::npos) << r.err;
}

TEST_F(CliTest, CompareTable) {
  ASSERT_EQ(run({"fit", "--spec", dir.path("spec.csv"), "--data", dir.path("dev.csv"), "--out", dir.path("m.json")}).code,
            0);
  csv::write_file_atomic(dir.path("zero.csv"), [&] {
    std::string s = "score\n";
    const Sample sample = load_sample(dir.path("dev.csv"));
    for (Eigen::Index i = 0; i < sample.n(); ++i) s += std::to_string(i % 3) + "\n";
    return s;
  }());
  const auto r = run({"compare", "--model", "fit=" + dir.path("m.json"), "--score", "junk=" + dir.path("zero.csv"),
                      "--data", dir.path("dev.csv"), "--report", dir.path("cmp.txt")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("lowest -log likelihood: fit"), std::string::npos) << r.out;
  EXPECT_TRUE(std::filesystem::exists(dir.path("cmp.csv")));
  const auto only = run({"compare", "--score", "junk=" + dir.path("zero.csv"), "--data", dir.path("dev.csv")});
  EXPECT_EQ(only.code, 0) << only.err;
}

TEST_F(CliTest, QpSolveDump) {
  ASSERT_EQ(run({"fit", "--spec", dir.path("spec.csv"), "--data", dir.path("dev.csv"), "--dump-qp", dir.path("qp.json")})
                .code,
            0);
  const auto r = run({"qp-solve", dir.path("qp.json")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("status optimal"), std::string::npos);
  EXPECT_NE(r.out.find("kkt stationarity"), std::string::npos);
}

TEST_F(CliTest, UsageErrorsExitOne) {
  EXPECT_EQ(run({"fit", "--bogus"}).code, 1);
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  const auto r = run({"compile", "--spec", dir.path("missing.csv")});
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(r.err.empty());
  EXPECT_EQ(run({"fit", "--data", dir.path("dev.csv")}).code, 1);
  EXPECT_EQ(run({"fit", "--spec", dir.path("spec.csv"), "--data", dir.path("dev.csv"), "--inweight", "x"}).code, 1);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(CliTest, NonConvergenceExitsTwo) {
  const auto r = run({"fit", "--spec", dir.path("spec.csv"), "--data", dir.path("dev.csv"), "--max-iter", "1",
                      "--out", dir.path("m.json")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("did not converge"), std::string::npos);
}

TEST_F(CliTest, RawDesign) {
  csv::write_file_atomic(dir.path("raw.csv"), "y,w,x1,x2\n1,1,0.5,1\n0,1,-0.3,2\n1,1,1.2,0.5\n0,1,0.1,0.2\n1,1,-1,1\n0,1,0.4,0.9\n");
  const auto r = run({"fit", "--raw", "--data", dir.path("raw.csv"), "--lambda", "1", "--out", dir.path("raw.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const ModelFile m = parse_model(testkit::slurp(dir.path("raw.json")));
  EXPECT_TRUE(m.raw_design());
  EXPECT_EQ(m.q(), 3);
  EXPECT_EQ(run({"eval", "--model", dir.path("raw.json"), "--data", dir.path("raw.csv")}).code, 0);
}
