// Command-line entry point: phi4 <simulate|renorm-table|tightness-report|selfcheck>.

#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>

#include "phi4/cli_io.hpp"
#include "phi4/errors.hpp"
#include "phi4/kernels.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Stochastic quantization of the cutoff phi^4_3 measure"};
  app.set_version_flag("--version", phi4::version_string());
  app.require_subcommand(1, 1);

  struct Sub {
    phi4::RunMode mode;
    CLI::App* app;
    std::string config;
    std::string output_dir;
  };
  Sub subs[] = {
      {phi4::RunMode::simulate, app.add_subcommand("simulate", "run an ensemble of trajectories"), {}, {}},
      {phi4::RunMode::renorm_table, app.add_subcommand("renorm-table", "tabulate C1, C2 over N"), {}, {}},
      {phi4::RunMode::tightness_report,
       app.add_subcommand("tightness-report", "uniformity table from simulate outputs"), {}, {}},
      {phi4::RunMode::selfcheck, app.add_subcommand("selfcheck", "exact-identity suite"), {}, {}},
  };
  for (auto& s : subs) {
    auto* opt = s.app->add_option("--config", s.config, "INI configuration file");
    if (s.mode == phi4::RunMode::simulate || s.mode == phi4::RunMode::tightness_report) {
      opt->required();
    }
    s.app->add_option("--output-dir", s.output_dir, "override [run] output_dir");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // usage errors share the configuration exit code
    return app.exit(e) == 0 ? phi4::exit_ok : phi4::exit_config;
  }

  phi4::kernels::apply_thread_cap_from_env();
  for (auto& s : subs) {
    if (!s.app->parsed()) continue;
    phi4::RunConfig cfg;
    try {
      if (!s.config.empty()) cfg = phi4::load_config(s.config);
    } catch (const phi4::ConfigError& e) {
      std::cerr << R"({"status":"error","exit_code":2,"kind":"config","message":)"
                << '"' << e.what() << "\"}\n";
      return phi4::exit_config;
    }
    cfg.mode = s.mode;
    if (!s.output_dir.empty()) cfg.output_dir = s.output_dir;
    const phi4::RunOutcome out = phi4::run(cfg, std::cerr);
    return out.exit_code;
  }
  return 1;
}
