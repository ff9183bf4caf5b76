// Command-line front end: run, sweep, compare and oracle subcommands.

#include <cstdio>
#include <iostream>
#include <optional>

#include "CLI11.hpp"

#include "rsgp/harness.hpp"
#include "rsgp/io.hpp"

using namespace rsgp;

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<std::string> out;
  std::size_t parallel = 1;
  std::optional<Round> stride;
};

void add_flags(CLI::App* app, Overrides& o) {
  app->add_option("--seed", o.seed, "Base seed (trial k uses seed + k)");
  app->add_option("--trials", o.trials, "Number of Monte Carlo trials")->check(CLI::PositiveNumber);
  app->add_option("--out", o.out, "Output directory");
  app->add_option("--parallel", o.parallel, "Worker threads")->check(CLI::PositiveNumber);
  app->add_option("--sample-stride", o.stride, "Record trajectories every n rounds (0 = off)")
      ->check(CLI::NonNegativeNumber);
}

ExperimentConfig load(const std::string& path, const Overrides& o) {
  ExperimentConfig c = load_config(path);
  if (o.seed) c.base_seed = *o.seed;
  if (o.trials) c.trials = *o.trials;
  if (o.out) c.output_dir = *o.out;
  if (o.stride) c.sample_stride = *o.stride;
  c.validate();
  return c;
}

void print_summary(const std::string& label, const Aggregate& a) {
  std::printf("%s: %zu/%zu trials completed\n", label.c_str(), a.completed, a.trials);
  for (const auto& name : aggregate_metric_names()) {
    const auto& s = a.metrics.at(name);
    std::printf("  %-24s %.6g  (se %.3g, n=%zu)\n", name.c_str(), s.mean, s.stderr_, s.count);
  }
}

void print_oracle(const OracleReport& o) {
  std::cout << "x*        = [" << o.x_star.transpose() << "]\n"
            << "x^a       = [" << o.x_attack.transpose() << "]\n"
            << "lambda_min(H^r)          = " << fmt17(o.lambda_min) << '\n'
            << "|sum_m g_m(x^a)|         = " << fmt17(o.attack_gradient_norm) << '\n'
            << "lambda_min |x^a - x*|    = " << fmt17(o.bound) << '\n'
            << "relative slack           = " << fmt17(o.relative_slack) << '\n'
            << "inequality holds         = " << (o.holds ? "yes" : "no") << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resilient subgradient-push simulator"};
  app.require_subcommand(1);

  Overrides o;
  std::string cfg_path;
  std::vector<std::string> cfg_paths;

  auto* run = app.add_subcommand("run", "Run a Monte Carlo campaign");
  run->add_option("config", cfg_path, "Config file")->required()->check(CLI::ExistingFile);
  add_flags(run, o);

  auto* sweep = app.add_subcommand("sweep", "Sweep beta/alpha/lambda/kappa over a grid");
  sweep->add_option("config", cfg_path, "Config file")->required()->check(CLI::ExistingFile);
  add_flags(sweep, o);

  auto* cmp = app.add_subcommand("compare", "Run several configs and tabulate them");
  cmp->add_option("configs", cfg_paths, "Config files")->required()->check(CLI::ExistingFile);
  add_flags(cmp, o);

  auto* orc = app.add_subcommand("oracle", "Closed-form minimizers and the attack bound");
  orc->add_option("config", cfg_path, "Config file")->required()->check(CLI::ExistingFile);
  add_flags(orc, o);

  CLI11_PARSE(app, argc, argv);

  try {
    RunOptions ro{o.parallel, true};
    if (*run) {
      auto c = load(cfg_path, o);
      auto res = run_campaign(c, ro);
      print_summary(to_string(c.algorithm), res.summary);
      std::cout << "wrote " << c.output_dir.string() << '\n';
    } else if (*sweep) {
      auto c = load(cfg_path, o);
      auto res = run_sweep(c, ro);
      for (std::size_t k = 0; k < res.values.size(); ++k)
        print_summary(res.param + " = " + fmt17(res.values[k]), res.points[k].summary);
      std::cout << "wrote " << (c.output_dir / "sweep.csv").string() << '\n';
    } else if (*cmp) {
      std::vector<ExperimentConfig> cs;
      for (const auto& p : cfg_paths) cs.push_back(load(p, o));
      const std::filesystem::path out = o.out ? std::filesystem::path(*o.out) : cs.front().output_dir;
      auto res = compare(cs, out, ro);
      std::printf("%-4s %-10s %12s %12s %12s %12s\n", "#", "algorithm", "eps_2", "gamma_2", "xi_2", "isolated");
      for (std::size_t k = 0; k < res.size(); ++k) {
        const auto& m = res[k].summary.metrics;
        std::printf("%-4zu %-10s %12.5g %12.5g %12.5g %12.3g\n", k, to_string(res[k].cfg.algorithm).c_str(),
                    m.at("epsilon_p").mean, m.at("gamma_p").mean, m.at("xi_p").mean, m.at("isolated").mean);
      }
      std::cout << "wrote " << (out / "compare.csv").string() << '\n';
    } else if (*orc) {
      auto c = load(cfg_path, o);
      const std::size_t n = c.resample_instance ? c.trials : 1;
      bool all = true;
      for (std::size_t k = 0; k < n; ++k) {
        auto rep = oracle_check(make_instance(c, k));
        if (n > 1) std::cout << "-- instance " << k << '\n';
        print_oracle(rep);
        all = all && rep.holds;
      }
      return all ? 0 : 1;
    }
  } catch (const SingularSystemError& e) {
    std::cerr << "error: singular Hessian, campaign aborted: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
