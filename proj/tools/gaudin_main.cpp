#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "gaudin/cli.hpp"

namespace {

struct Args {
  std::string file;
  std::string out;
  bool pretty = false;
  gaudin::CliOverrides overrides;
};

void add_common(CLI::App* cmd, Args& a) {
  cmd->add_option("file", a.file, "problem file (JSON), or - for stdin")->required();
  cmd->add_option("--out", a.out, "write the JSON report here instead of stdout");
  cmd->add_option("--seed", a.overrides.seed, "override the solver seed");
  cmd->add_option("--tol", a.overrides.tol, "override the residual tolerance");
  cmd->add_option("--starts", a.overrides.starts, "override the number of Newton starts");
  cmd->add_option("--perturb", a.overrides.perturb,
                  "verify: also check solutions shifted by this amount (expected to fail)");
  cmd->add_flag("--pretty", a.pretty, "print a human-readable table to stderr");
}

int read_input(const std::string& path, std::string& text) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    text = ss.str();
    return 0;
  }
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot open " << path << "\n";
    return 2;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  text = ss.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaudin model / oper correspondence toolkit"};
  app.require_subcommand(1);

  Args args;
  const char* names[] = {"solve", "verify", "spectrum", "miura"};
  const char* blurbs[] = {"solve the Bethe equations and report predicted eigenvalues",
                          "solve, then check every dictionary claim against the oracle",
                          "brute-force joint spectrum on singular weight spaces",
                          "Miura transform, residues and obstructions of a connection"};
  for (int i = 0; i < 4; ++i) add_common(app.add_subcommand(names[i], blurbs[i]), args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  std::string text;
  if (const int rc = read_input(args.file, text)) return rc;

  const std::string command = app.get_subcommands().front()->get_name();
  const gaudin::CliOutcome outcome = gaudin::run_problem(command, text, args.overrides);

  if (args.out.empty()) {
    std::cout << outcome.report;
  } else {
    std::ofstream out(args.out);
    if (!out) {
      std::cerr << "error: cannot write " << args.out << "\n";
      return 2;
    }
    out << outcome.report;
  }
  if (args.pretty) std::cerr << outcome.table;
  return outcome.exit_code;
}
