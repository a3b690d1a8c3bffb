#include <iostream>

#include <CLI11.hpp>

#include "thermoform/cli.hpp"

int main(int argc, char** argv) {
  using namespace thermoform::cli;
  CLI::App app{"Induced and nonlinear pressure of locally constant potentials on subshifts of finite type"};
  Invocation inv;
  app.add_option("command", inv.command, "What to compute")->required()->check(CLI::IsMember(commands()));
  app.add_option("--config", inv.config_path, "JSON run configuration")->required();
  app.add_option("--csv", inv.csv_path, "Write the table here instead of standard output");
  app.add_option("--svg", inv.svg_path, "Sweep plot (freeze-sweep only)");
  app.add_option("--seed", inv.seed, "Overrides parameters.seed");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  return execute(inv, std::cout, std::cerr);
}
