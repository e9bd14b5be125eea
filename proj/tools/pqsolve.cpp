#include "run_config.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"pqsolve: positive solutions of singular (p,q)-Laplacian problems"};
  std::string command, config;
  std::uint64_t seed = 12345;
  std::string out;
  app.add_option("command", command, "solve | sweep | threshold | verify | oracle")
      ->required()
      ->check(CLI::IsMember({"solve", "sweep", "threshold", "verify", "oracle"}));
  app.add_option("--config", config, "configuration file")->required()->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "seed for randomized checks");
  app.add_option("--out", out, "output directory (overrides 'out' in the config)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    const pqsolve::RunConfig cfg = pqsolve::load_config(config, pqsolve::parse_command(command));
    pqsolve::RunOptions opts;
    opts.seed = seed;
    if (!out.empty()) opts.out_dir = out;
    const int code = pqsolve::run(cfg, opts);
    std::cout << command << ": exit " << code << "\n";
    return code;
  } catch (const std::exception& e) {
    std::cerr << "pqsolve: " << e.what() << "\n";
    return 1;
  }
}
