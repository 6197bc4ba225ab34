// bayesmix: Bayes factor tests for binomial data under spike-and-slab priors.
//
// Exit status: 0 success, 1 verification failure, 2 invalid input,
// 3 numerical non-convergence.

#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "bayesmix/cli/commands.hpp"
#include "bayesmix/error.hpp"
#include "bayesmix/run_record.hpp"

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNonConvergence = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayes factors and mixture posteriors for binomial data"};
  app.require_subcommand(0, 1);
  app.fallthrough();

  bool as_json = false;
  bool run_verify = false;
  app.add_flag("--json", as_json, "Emit the full run record as JSON");
  app.add_flag("--verify", run_verify, "Run every oracle check")->group("");

  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
  std::string prior_path;
  auto* linkage = app.add_subcommand("linkage", "Two-model linkage analysis (default prior 11/12 point .5, 1/12 uniform(0,.5))");
  linkage->add_option("successes", successes, "Number of successes (cross-overs)")->required();
  linkage->add_option("trials", trials, "Number of trials")->required();
  linkage->add_option("--prior", prior_path, "Prior-spec file with two components");

  std::uint64_t law_n = 0;
  double law_k = 0.0;
  std::string slab = "uniform 0 1";
  auto* law = app.add_subcommand("law", "Posterior probability that a law holds after n confirmations");
  law->add_option("n", law_n, "Trials observed, none with the property")->required();
  law->add_option("k", law_k, "Prior probability that x = 0")->required();
  law->add_option("--slab", slab, "Continuous law for x > 0, e.g. \"uniform 0 1\", \"beta 1 3\", \"log-singular\"");

  std::uint64_t x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  double prior_odds = 1.0;
  auto* twoprop = app.add_subcommand("twoprop", "Two-proportion contingency test");
  twoprop->add_option("x0", x0, "Sample 0 with the property")->required();
  twoprop->add_option("y0", y0, "Sample 0 without")->required();
  twoprop->add_option("x1", x1, "Sample 1 with the property")->required();
  twoprop->add_option("y1", y1, "Sample 1 without")->required();
  twoprop->add_option("--prior-odds", prior_odds, "Prior odds M0:M1");

  std::uint64_t succ_m = 0;
  std::uint64_t succ_n = 0;
  auto* succession = app.add_subcommand("succession", "Finite-population succession (m+1)/(n+1)");
  succession->add_option("m", succ_m, "Sample size, all with the property")->required();
  succession->add_option("n", succ_n, "Population size")->required();

  std::vector<std::uint64_t> n_list;
  double theta0 = 0.5;
  double lindley_odds = 1.0;
  bool csv = false;
  auto* lindley = app.add_subcommand("lindley", "Critical deviation of a point null against sample size");
  lindley->add_option("--n-list", n_list, "Sample sizes")->required()->delimiter(',');
  lindley->add_option("--theta0", theta0, "Point-null value");
  lindley->add_option("--prior-odds", lindley_odds, "Prior odds M0:M1");
  lindley->add_flag("--csv", csv, "CSV output: n,critical_a,critical_z,log_bf_at_critical");

  std::string compare_prior;
  auto* compare = app.add_subcommand("compare", "Mixture posterior for an arbitrary prior-spec");
  compare->add_option("successes", successes, "Number of successes")->required();
  compare->add_option("trials", trials, "Number of trials")->required();
  compare->add_option("prior", compare_prior, "Prior-spec file")->required();

  auto* verify = app.add_subcommand("verify", "Run every oracle check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }

  const std::string stamp = bayesmix::utc_timestamp();
  try {
    namespace cmd = bayesmix::cli;
    cmd::CommandOutput out;
    if (run_verify || *verify) {
      out = cmd::verify(stamp);
    } else if (*linkage) {
      std::optional<std::filesystem::path> p;
      if (!prior_path.empty()) p = prior_path;
      out = cmd::linkage(successes, trials, p, stamp);
    } else if (*law) {
      out = cmd::law(law_n, law_k, slab, stamp);
    } else if (*twoprop) {
      out = cmd::twoprop({x0, y0, x1, y1}, prior_odds, stamp);
    } else if (*succession) {
      out = cmd::succession(succ_m, succ_n, stamp);
    } else if (*lindley) {
      out = cmd::lindley(n_list, theta0, lindley_odds, csv, stamp);
    } else if (*compare) {
      out = cmd::compare(successes, trials, compare_prior, stamp);
    } else {
      std::cerr << app.help();
      return kExitInput;
    }
    if (as_json) {
      std::cout << nlohmann::json(out.record).dump(2) << "\n";
    } else {
      std::cout << out.text;
    }
    return out.status;
  } catch (const bayesmix::NonConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
}
