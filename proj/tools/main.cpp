#include <cstdio>
#include <exception>

#include <CLI11.hpp>

#include <corf/errors.hpp>
#include <corf/version.hpp>

#include "common.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Push-pull CORF feature extraction"};
  app.set_version_flag("--version", corf::kVersion);
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "Key=value config file; subcommand options go in a [subcommand] section");

  corf::cli::register_configure(app);
  corf::cli::register_respond(app);
  corf::cli::register_bank(app);
  corf::cli::register_noise_sweep(app);
  corf::cli::register_probe(app);
  corf::cli::register_metrics(app);
  corf::cli::register_selfcheck(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exit 0
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "%s\n\n%s", e.what(), app.help().c_str());
    return 2;
  } catch (const corf::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
