#include <cstdlib>
#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "jainop/cli.hpp"

namespace {

struct Flag {
  const char* name;
  const char* help;
};

const std::vector<Flag> kFlags{
    {"operator", "jain, jain-baskakov or king"},
    {"function", "registry name: e0..e4, exp-neg, sin, recip-sq, abs-shift, t-exp-neg"},
    {"n", "n"},
    {"c", "c"},
    {"beta", "beta"},
    {"points", "comma-separated evaluation points"},
    {"x", "point for moments and sweeps"},
    {"a", "interval [0, a] of the rate bound"},
    {"l", "n beta_n for voronovskaja and weighted"},
    {"lambda", "weight exponent of the weighted norm"},
    {"m", "constant M of the direct bound"},
    {"n-values", "comma-separated sweep schedule"},
    {"theorem", "direct or rate (bound)"},
    {"format", "csv or json"},
    {"output", "write NAME.csv or NAME.json and NAME.plot.dat"},
    {"seed", "seed for point jitter"},
    {"jitter", "relative jitter of the points, in [0, 0.5)"},
    {"tail-eps", "series truncation mass"},
    {"quad-rel-tol", "kernel quadrature relative tolerance"},
    {"quad-max-nodes", "Gauss-Jacobi node cap"},
    {"grid-points", "samples for moduli and sup norms"},
    {"domain-cap", "truncation point of sups over [0, inf)"},
    {"beta-guard", "largest accepted beta"},
    {"v-max", "series length cap"},
    {"gap-tol", "errors and gaps below this count as resolved"},
};

}  // namespace

int main(int argc, char** argv) {
  namespace cli = jainop::cli;
  CLI::App app{"Jain-type positive linear operators: evaluation, moments and convergence checks"};
  app.require_subcommand(1);

  std::map<std::string, std::string> values;
  std::string config_path;
  std::vector<std::pair<std::string, CLI::App*>> subs;
  std::vector<std::pair<std::string, CLI::Option*>> options;
  for (auto name : cli::command_names()) {
    auto* sub = app.add_subcommand(std::string(name));
    sub->add_option("--config", config_path, "key = value config file");
    for (const auto& f : kFlags) {
      auto* opt = sub->add_option(std::string("--") + f.name, values[f.name], f.help);
      options.emplace_back(f.name, opt);
    }
    subs.emplace_back(std::string(name), sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << cli::error_json("config", e.what(), cli::kExitConfig) << '\n';
    return cli::kExitConfig;
  }

  cli::RunConfig cfg;
  try {
    for (const auto& [name, sub] : subs)
      if (sub->parsed()) cli::apply_setting(cfg, "command", name);
    if (!config_path.empty()) cli::apply_config_file(cfg, config_path);
    cli::apply_env(cfg, [](const char* k) { return std::getenv(k); });
    for (const auto& [name, opt] : options)
      if (opt->count() > 0) cli::apply_setting(cfg, name, values[name]);
  } catch (const cli::ConfigError& e) {
    std::cerr << cli::error_json(e.kind(), e.what(), cli::kExitConfig) << '\n';
    return cli::kExitConfig;
  }
  return cli::run(cfg, std::cout, std::cerr);
}
