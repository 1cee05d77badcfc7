#include "pwak/scenario.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"relational-clock simulator: constraint histories, Weyl sequences, "
               "finite-bandwidth resolution"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "pwak_out";
  bool no_timestamp = false;

  CLI::App* run = app.add_subcommand("run", "execute a scenario config and write reports");
  run->add_option("-c,--config", config_path, "scenario config (JSON)")->required();
  run->add_option("-o,--output-dir", out_dir, "report directory (default pwak_out)");
  run->add_flag("--no-timestamp", no_timestamp, "omit generated_at from results.json");

  CLI::App* validate = app.add_subcommand("validate", "static config checks, no physics");
  validate->add_option("-c,--config", config_path, "scenario config (JSON)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    pwak::ScenarioConfig cfg = pwak::load_config(config_path);
    if (no_timestamp) cfg.timestamp = false;

    const pwak::ValidationReport rep = pwak::validate_config(cfg);
    std::cout << rep.table;
    for (const pwak::ValidationIssue& issue : rep.issues)
      std::cout << (issue.fatal ? "error: " : "warning: ") << issue.message << "\n";
    if (!rep.ok) return 1;
    if (validate->parsed()) {
      std::cout << "config ok\n";
      return 0;
    }

    const pwak::RunOutcome out = pwak::run_scenario(cfg, out_dir);
    std::cout << "\n" << pwak::summary_text(out);
    std::cout << "reports written to " << out_dir << "\n";
    return out.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
