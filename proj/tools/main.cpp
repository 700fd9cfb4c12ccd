// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "kamreduce/errors.hpp"

namespace
{

using namespace kamreduce;
using namespace kamreduce::cli;

std::optional<int> env_threads()
{
  const char *v = std::getenv("KAMREDUCE_THREADS");
  if (!v || !*v)
  {
    return std::nullopt;
  }
  try
  {
    std::size_t used = 0;
    const int n = std::stoi(v, &used);
    if (used == std::string(v).size())
    {
      return n;
    }
  }
  catch (const std::exception &)
  {
  }
  throw ConfigError(std::string("KAMREDUCE_THREADS must be an integer, got ") + v);
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"KAM reduction of truncated linear Hamiltonian models"};
  app.require_subcommand(0, 1);
  app.fallthrough();
  std::string config_path, out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool reference = false, list = false;
  app.add_option("--config", config_path, "JSON config or run manifest");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "overrides the config seed");
  app.add_option("--threads", threads, "worker threads; KAMREDUCE_THREADS is the fallback");
  app.add_flag("--reference", reference, "print the configuration reference and exit");
  auto *check = app.add_subcommand("check-frequency", "non-resonance margins of the configured frequency list");
  auto *red = app.add_subcommand("reduce", "run the KAM iteration on the configured model");
  auto *meas = app.add_subcommand("measure", "excluded fraction against gamma and its log-log slope");
  auto *ver = app.add_subcommand("verify", "direct integration against the reduced reconstruction");
  auto *self = app.add_subcommand("selftest", "seeded property suite");
  self->add_flag("--list", list, "print the property names and exit");

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError &e)
  {
    const int code = app.exit(e);
    return code == 0 ? EXIT_OK : EXIT_CONFIG;
  }

  try
  {
    if (reference)
    {
      std::cout << reference_page();
      return EXIT_OK;
    }
    if (self->parsed() && list)
    {
      list_properties(std::cout);
      return EXIT_OK;
    }
    if (app.get_subcommands().empty())
    {
      std::cerr << app.help();
      return EXIT_CONFIG;
    }
    Json doc = default_config();
    if (!config_path.empty())
    {
      doc = merge_config(doc, read_config_file(config_path));
    }
    if (seed)
    {
      doc["seed"] = *seed;
    }
    if (!threads)
    {
      threads = env_threads();
    }
    if (threads)
    {
      doc["threads"] = *threads;
    }
    RunContext ctx{parse_config(doc), out_dir, &std::cerr};
    if (check->parsed())
    {
      return cmd_check_frequency(ctx);
    }
    if (red->parsed())
    {
      return cmd_reduce(ctx);
    }
    if (meas->parsed())
    {
      return cmd_measure(ctx);
    }
    if (ver->parsed())
    {
      return cmd_verify(ctx);
    }
    return cmd_selftest(ctx);
  }
  catch (const DivisorViolation &e)
  {
    std::cerr << "resonance: " << e.what() << '\n';
    return EXIT_RESONANCE;
  }
  catch (const ConfigError &e)
  {
    std::cerr << "config error: " << e.what() << '\n';
    return EXIT_CONFIG;
  }
  catch (const DomainError &e)
  {
    std::cerr << "domain error: " << e.what() << '\n';
    return EXIT_CONFIG;
  }
  catch (const IoError &e)
  {
    std::cerr << "io error: " << e.what() << '\n';
    return EXIT_IO;
  }
  catch (const std::exception &e)
  {
    std::cerr << "error: " << e.what() << '\n';
    return EXIT_PROPERTY;
  }
}
