#include <cstdio>
#include <exception>

#include <CLI11.hpp>

#include "cli_support.hpp"
#include "commands.hpp"
#include "itolab/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"itolab: Langevin equations with nonlinear noise as equivalent Ito SDEs"};
  app.set_version_flag("--version", ITOLAB_VERSION);
  app.require_subcommand(1);
  auto commands = itolab::cli::register_commands(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;  // --help and --version exit 0
  }

  for (auto& command : commands) {
    if (!command->app->parsed()) continue;
    try {
      return command->run();
    } catch (const CLI::Error& e) {
      std::fprintf(stderr, "itolab %s: %s\n", command->app->get_name().c_str(), e.what());
      return 2;
    } catch (const itolab::cli::ConfigError& e) {
      std::fprintf(stderr, "itolab %s: config error at %s\n", command->app->get_name().c_str(), e.what());
      return 2;
    } catch (const itolab::ParseError& e) {
      std::fprintf(stderr, "itolab %s: parse error at %s\n", command->app->get_name().c_str(), e.what());
      return 2;
    } catch (const std::exception& e) {
      std::fprintf(stderr, "itolab %s: error: %s\n", command->app->get_name().c_str(), e.what());
      return 1;
    }
  }
  return 1;
}
