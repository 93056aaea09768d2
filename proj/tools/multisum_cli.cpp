#include <iostream>

#include "CLI11.hpp"
#include "multisum/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Moment bounds and limit-theorem checks for multi-indexed sums"};
  app.require_subcommand(1);
  multisum::CliOptions opts;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config, "experiment configuration (JSON)")->required();
    sub->add_option("--out", opts.out, "output directory")->capture_default_str();
    sub->add_option("--workers", opts.workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed-override", seed, "replace the config seed");
  };
  for (const char* name : {"bound", "simulate", "psi"}) add_common(app.add_subcommand(name));
  auto* verify = app.add_subcommand("verify", "run a verifier: nclt | sandwich | tail | parametric");
  add_common(verify);
  verify->add_option("--which", opts.which, "which check to run")
      ->check(CLI::IsMember({"nclt", "sandwich", "tail", "parametric"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : multisum::kExitConfig;
  }
  CLI::App* sub = app.get_subcommands().front();
  if (sub->count("--seed-override")) opts.seed_override = seed;

  auto res = multisum::run_command(sub->get_name(), opts);
  if (!res.error_json.empty()) std::cerr << res.error_json << "\n";
  for (const auto& [role, name] : res.files) std::cout << role << "\t" << (opts.out / name).string() << "\n";
  return res.exit_code;
}
