#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "rhowave/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"spectral certification and time-periodic solutions for the variable-density string"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  const char* commands[] = {"ingest-seismic", "eigs", "spectrum", "certify",
                            "solve",          "verify", "report"};
  for (const char* name : commands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("-c,--config", config_path, "JSON run configuration")->required();
    sub->add_option("-o,--out-dir", out_override, "override the configured output directory");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    rhowave::RunConfig cfg = rhowave::load_config(config_path);
    if (!out_override.empty()) cfg.out_dir = out_override;
    return rhowave::run_command(app.get_subcommands().front()->get_name(), cfg, std::cout);
  } catch (const rhowave::Error& e) {
    std::cout << "error: " << e.what() << "\n";
    return rhowave::exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cout << "error: " << e.what() << "\n";
    return 3;
  }
}
