#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "hlx/error.hpp"
#include "hlx/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Discrete Hopf-Lax flows, comparison criteria and absolute minimiser experiments"};
  std::string task, config, out;
  std::uint64_t seed = 0;
  app.add_option("task", task,
                 "validate | legendre | flow | criteria | patch | solve | compare | aronsson | acceptance")
      ->required();
  app.add_option("--config", config, "INI experiment config")->required();
  auto* out_opt = app.add_option("--out", out, "output directory (overrides [run] out)");
  auto* seed_opt = app.add_option("--seed", seed, "random seed (overrides [run] seed)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  auto t = hlx::parse_task(task);
  if (!t) {
    std::cerr << "hlx: unknown task '" << task << "'\n";
    return 2;
  }
  hlx::ExperimentConfig cfg;
  try {
    cfg = hlx::load_config(config, *t);
  } catch (const hlx::Error& e) {
    std::cerr << "hlx: " << e.what() << '\n';
    return 2;
  }
  if (*out_opt) cfg.out_dir = std::filesystem::absolute(out).lexically_normal().string();
  if (*seed_opt) cfg.seed = seed;

  auto res = hlx::run_experiment(cfg);
  for (const auto& c : res.checks)
    std::cout << c.name << ' ' << (c.pass ? "pass" : "FAIL") << (c.detail.empty() ? "" : " " + c.detail) << '\n';
  if (!res.error.empty()) std::cerr << "hlx: " << res.error << '\n';
  std::cout << "manifest " << res.manifest_path << '\n';
  return res.exit_code;
}
