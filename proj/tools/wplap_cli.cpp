#include "commands.hpp"

#include "wplap/error.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <filesystem>
#include <functional>
#include <iostream>

namespace {

int exit_code(wplap::ErrorKind kind) {
  switch (kind) {
    case wplap::ErrorKind::io:
      return 2;
    case wplap::ErrorKind::config:
    case wplap::ErrorKind::domain:
    case wplap::ErrorKind::invalid_input:
      return 3;
    default:
      return 4;
  }
}

int report_error(std::string_view kind, const std::string& message, int code) {
  nlohmann::json j{{"error", {{"kind", kind}, {"message", message}}}};
  std::cerr << j.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  using wplap::cli::RunOptions;
  CLI::App app{"Weighted p-Laplace laboratory: solves, oscillation estimates, sharpness and CZ sweeps"};
  app.require_subcommand(1);

  RunOptions opts;
  std::uint64_t seed = 0;
  double epsilon = 0.0;
  std::string q_grid;
  std::function<std::vector<std::filesystem::path>(const RunOptions&)> run;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config, "JSON config file")->required();
    sub->add_option("--out", opts.out, "output directory");
    sub->add_option("--seed", seed, "overrides the config seed");
    sub->add_option("--threads", opts.threads, "worker threads");
    sub->add_option("--format", opts.format, "csv or json");
  };
  auto* solve = app.add_subcommand("solve", "weighted p-Laplace Dirichlet solve");
  common(solve);
  solve->callback([&] { run = wplap::cli::cmd_solve; });
  auto* osc = app.add_subcommand("oscillation", "log-BMO, Muckenhoupt and weighted BMO estimates");
  common(osc);
  osc->callback([&] { run = wplap::cli::cmd_oscillation; });
  auto* sharp = app.add_subcommand("sharpness", "corner threshold fit");
  common(sharp);
  sharp->add_option("--epsilon", epsilon, "corner slope in (0, 1]");
  sharp->add_option("--q-grid", q_grid, "q values: a,b,c or lo..hi[:step]");
  sharp->callback([&] { run = wplap::cli::cmd_sharpness; });
  auto* cz = app.add_subcommand("cz-sweep", "gradient ratio sweep on a corner domain");
  common(cz);
  cz->callback([&] { run = wplap::cli::cmd_cz_sweep; });
  auto* energy = app.add_subcommand("energy-sweep", "energy ratio sweep on a corner domain");
  common(energy);
  energy->callback([&] { run = wplap::cli::cmd_energy_sweep; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("config", e.what(), 3);
  }

  auto given = [](CLI::App* sub, const char* name) {
    const CLI::Option* o = sub->get_option_no_throw(name);
    return o != nullptr && o->count() > 0;
  };
  for (auto* sub : app.get_subcommands()) {
    if (given(sub, "--seed")) opts.seed = seed;
    if (given(sub, "--epsilon")) opts.epsilon = epsilon;
    if (given(sub, "--q-grid")) opts.q_grid = q_grid;
  }

  try {
    for (const auto& path : run(opts)) std::cout << path.string() << '\n';
  } catch (const wplap::Error& e) {
    return report_error(wplap::to_string(e.kind()), e.what(), exit_code(e.kind()));
  } catch (const std::filesystem::filesystem_error& e) {
    return report_error("io", e.what(), 2);
  } catch (const std::exception& e) {
    return report_error("inconsistency", e.what(), 4);
  }
  return 0;
}
