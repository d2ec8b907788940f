// motlab: command-line driver for the multimarginal transport toolkit.
//
//   motlab solve problem.json
//   motlab certify --nmax-cycles 2 problem.json
//   motlab truncate --eps-ladder 1/5,1/10,1/20 problem.json
//   motlab generate --seed 7 --shape 3,4,5 > problem.json

#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "mot/cli.hpp"

namespace {

std::string read_input(const std::string& path) {
  if (path.empty() || path == "-") {
    return std::string(std::istreambuf_iterator<char>(std::cin), {});
  }
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact and entropic multimarginal optimal transport"};
  app.require_subcommand(1);

  mot::cli::RunFlags flags;
  std::string input;
  std::string ladder;

  const std::map<std::string, std::string> about{
      {"solve", "Exact optimum, improved conjugate duals and the duality gap"},
      {"certify", "Solve, then check c-splitting and cyclical monotonicity of the support"},
      {"truncate", "Core-set truncation experiment over an eps ladder"},
      {"entropic", "Multimarginal Sinkhorn over an eps ladder (units of the cost sup norm)"},
      {"oracle", "Cross-check the simplex against vertex enumeration (tiny instances)"},
      {"generate", "Emit a random rational problem document"}};

  for (const auto& name : mot::cli::commands()) {
    CLI::App* sub = app.add_subcommand(name, about.at(name));
    sub->add_option("--mode", flags.mode, "Numeric mode")
        ->check(CLI::IsMember({"rational", "float"}));
    sub->add_option("--guard-entries", flags.guard_entries, "Largest dense tensor accepted");
    sub->add_flag("--timing", flags.timing, "Add wall-clock time to the report");
    if (name == "generate") {
      sub->add_option("--seed", flags.seed, "Fixture seed");
      sub->add_option("--shape", flags.shape, "Marginal sizes, e.g. 3,4,5")->delimiter(',');
      continue;
    }
    sub->add_option("problem", input, "Problem document (default: stdin)");
    if (name == "truncate" || name == "entropic") {
      sub->add_option("--eps", flags.eps, "Single eps value (decimal or p/q)");
      sub->add_option("--eps-ladder", ladder, "Comma-separated eps values");
    }
    if (name == "certify") {
      sub->add_option("--nmax-cycles", flags.nmax_cycles, "Longest cycle for monotonicity");
    }
  }

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  std::stringstream split(ladder);
  for (std::string item; std::getline(split, item, ',');) {
    if (!item.empty()) flags.eps_ladder.push_back(item);
  }

  std::string document;
  if (command != "generate") {
    try {
      document = read_input(input);
    } catch (const std::exception& e) {
      std::cerr << "motlab: " << e.what() << "\n";
      return mot::cli::kError;
    }
  }
  mot::cli::RunResult result = mot::cli::run(command, flags, document);
  std::cout << result.report.dump(2) << "\n";
  for (const auto& w : result.report.value("warnings", nlohmann::json::array())) {
    std::cerr << "warning: " << w.get<std::string>() << "\n";
  }
  return result.exit_code;
}
