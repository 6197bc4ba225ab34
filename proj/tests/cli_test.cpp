#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace {

struct Run {
  int status;
  std::string out;
};

Run run(const std::string& args, bool with_stderr = false) {
  const std::string cmd =
      std::string(BAYESMIX_CLI) + " " + args + (with_stderr ? " 2>&1" : " 2>/dev/null");
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return {-1, ""};
  std::string out;
  std::array<char, 4096> buf{};
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  const int raw = pclose(pipe);
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

nlohmann::json run_json(const std::string& args) {
  const auto r = run("--json " + args);
  EXPECT_EQ(r.status, 0) << args;
  return nlohmann::json::parse(r.out);
}

const std::string kPriors = BAYESMIX_PRIORS_DIR;

}  // namespace

TEST(Cli, LinkageSummaryLine) {
  const auto r = run("linkage 160 400");
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("P(M0|D)=0.028"), std::string::npos);
  EXPECT_NE(r.out.find("P(M1|D)=0.972"), std::string::npos);
  EXPECT_NE(r.out.find("4.56e-4"), std::string::npos);
}

TEST(Cli, LinkageNoDataEchoesPrior) {
  const auto j = run_json("linkage 0 0");
  EXPECT_NEAR(j["result"]["posterior_prob_0"].get<double>(), 11.0 / 12.0, 1e-15);
  EXPECT_EQ(j["input"]["prior"][0]["law"]["kind"], "point");
  EXPECT_EQ(j["result"]["normal_approximation"], nullptr);
  const auto text = run("linkage 0 0").out;
  EXPECT_NE(text.find("0.916667"), std::string::npos);
  EXPECT_NE(text.find("uniform(0, 0.5)"), std::string::npos);
}

TEST(Cli, LinkageJsonRecord) {
  const auto j = run_json("linkage 160 400");
  EXPECT_EQ(j["schema_version"], 1);
  EXPECT_EQ(j["command"], "linkage");
  EXPECT_TRUE(j["result"].contains("log_ml_0"));
  EXPECT_TRUE(j["result"].contains("log_ml_1"));
  EXPECT_NEAR(j["result"]["expectation"].get<double>(), 0.4028, 0.0005);
  EXPECT_NEAR(j["result"]["normal_approximation"]["sd"].get<double>(), 0.0245, 0.0005);
  EXPECT_EQ(j["result"]["notes"].size(), 2u);
}

TEST(Cli, LinkageWithPriorFile) {
  const auto a = run_json("linkage 160 400 --prior " + kPriors + "/haldane_linkage.prior");
  const auto b = run_json("linkage 160 400");
  EXPECT_EQ(a["result"]["posterior_prob_0"], b["result"]["posterior_prob_0"]);
  EXPECT_EQ(a["result"]["notes"].size(), 0u);
}

TEST(Cli, Law) {
  const auto j = run_json("law 100 0.5");
  EXPECT_NEAR(j["result"]["posterior_prob_zero"].get<double>(), 101.0 * 0.5 / 51.0, 1e-10);
  EXPECT_NEAR(j["result"]["closed_form"].get<double>(), 101.0 * 0.5 / 51.0, 1e-15);
  const auto beta = run_json("law 10 0.5 --slab \"beta 1 3\"");
  EXPECT_FALSE(beta["result"].contains("closed_form"));
}

TEST(Cli, TwoProp) {
  const auto j = run_json("twoprop 5 5 5 5");
  EXPECT_NEAR(j["result"]["posterior_odds_01"].get<double>(), 8316.0 / 4199.0, 1e-12);
  EXPECT_EQ(j["result"]["supports"], "M0");
  const auto odds = run_json("twoprop 5 5 5 5 --prior-odds 2");
  EXPECT_NEAR(odds["result"]["posterior_odds_01"].get<double>(), 2.0 * 8316.0 / 4199.0, 1e-12);
}

TEST(Cli, Succession) {
  const auto j = run_json("succession 0 9");
  EXPECT_EQ(j["result"]["numerator"], 1);
  EXPECT_EQ(j["result"]["denominator"], 10);
}

TEST(Cli, LindleyCsv) {
  const auto r = run("lindley --n-list 100,1000 --csv");
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out.rfind("n,critical_a,critical_z,log_bf_at_critical\n", 0), 0u);
  EXPECT_NE(r.out.find("\n100,39,2.2,"), std::string::npos);
  const auto none = run("lindley --n-list 1 --prior-odds 100 --csv");
  EXPECT_NE(none.out.find("1,NA,NA,NA"), std::string::npos);
}

TEST(Cli, CompareThreeSpikes) {
  const auto j = run_json("compare 2 10 " + kPriors + "/three_spike.prior");
  EXPECT_EQ(j["result"]["posterior"][0]["weight"], 0.0);
}

TEST(Cli, Verify) {
  const auto r = run("verify");
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
  EXPECT_EQ(run("--verify").status, 0);
}

TEST(Cli, InputErrorsExitTwoAndNameTheField) {
  auto expect_error = [](const std::string& args, const std::string& field) {
    const auto r = run(args, true);
    EXPECT_EQ(r.status, 2) << args;
    EXPECT_NE(r.out.find(field), std::string::npos) << args << ": " << r.out;
  };
  expect_error("linkage 5 3", "successes");
  expect_error("linkage -1 3", "successes");
  expect_error("twoprop 1 2 3", "y1");
  expect_error("law 10 1.5", "k must");
  expect_error("law 10 .5 --slab \"beta 0 1\"", "alpha");
  expect_error("lindley --n-list 0", "n must");
  expect_error("lindley --n-list 10 --theta0 1", "theta0");
  expect_error("succession 5 4", "sample size m");
  expect_error("compare 1 2 /nonexistent.prior", "cannot open");
  expect_error("frobnicate", "frobnicate");
}

TEST(Cli, NonConvergenceExitsThree) {
  // The incomplete-beta continued fraction needs far more than its 500
  // iterations at the centre of a beta(5e8, 5e8).
  const auto r = run("linkage 500000000 1000000000", true);
  EXPECT_EQ(r.status, 3);
  EXPECT_NE(r.out.find("did not converge"), std::string::npos);
}

TEST(Cli, JsonIsDeterministicApartFromTimestamp) {
  const std::vector<std::string> commands{
      "linkage 160 400",          "law 1000 0.01 --slab log-singular",
      "twoprop 3 4 5 6",          "succession 9 99",
      "lindley --n-list 100,1000", "verify",
      "compare 12 40 " + kPriors + "/skewed_slab.prior"};
  for (const auto& args : commands) {
    auto a = run_json(args);
    auto b = run_json(args);
    a.erase("timestamp");
    b.erase("timestamp");
    EXPECT_EQ(a.dump(), b.dump()) << args;
  }
}

// Every record carries the fields schema/run_record.json marks required for
// its command.
TEST(Cli, RecordsCarrySchemaRequiredFields) {
  std::ifstream in(BAYESMIX_SCHEMA);
  ASSERT_TRUE(in) << BAYESMIX_SCHEMA;
  const auto schema = nlohmann::json::parse(in);
  const std::vector<std::string> commands{
      "linkage 160 400", "law 100 0.5",    "twoprop 5 5 5 5", "succession 0 9",
      "lindley --n-list 100,1", "verify", "compare 2 10 " + kPriors + "/three_spike.prior"};
  for (const auto& args : commands) {
    const auto j = run_json(args);
    EXPECT_EQ(j["schema_version"], schema["properties"]["schema_version"]["const"]);
    for (const auto& key : schema["required"]) EXPECT_TRUE(j.contains(key.get<std::string>())) << key;
    bool matched = false;
    for (const auto& branch : schema["allOf"]) {
      if (branch["if"]["properties"]["command"]["const"] != j["command"]) continue;
      matched = true;
      for (const char* part : {"input", "result"}) {
        const auto& sub = branch["then"]["properties"][part];
        if (!sub.contains("required")) continue;
        for (const auto& key : sub["required"]) {
          EXPECT_TRUE(j[part].contains(key.get<std::string>())) << args << ": " << part << "." << key;
        }
      }
    }
    EXPECT_TRUE(matched) << args;
  }
}
