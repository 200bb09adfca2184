// antix command line: dataset generation, RND pretraining and the experiment runners.
#include "antix/data/io.hpp"
#include "antix/experiments/checkpoint.hpp"
#include "antix/experiments/runners.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace antix;
using namespace antix::experiments;

namespace {

struct GlobalOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> sets;
};

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y%m%d-%H%M%S");
  return os.str();
}

ExperimentConfig resolve(const GlobalOptions& g) {
  ExperimentConfig cfg = g.config.empty() ? ExperimentConfig() : ExperimentConfig::from_file(g.config);
  for (const auto& s : g.sets) cfg.set_assignment(s);
  if (g.seed) cfg.set("seed", std::to_string(*g.seed));
  cfg.validate();
  return cfg;
}

fs::path out_dir(const GlobalOptions& g, const ExperimentConfig& cfg) {
  if (!g.out.empty()) return g.out;
  return fs::path("runs") / (timestamp() + "-" + std::to_string(cfg.seed()));
}

void print_discriminativity(const DiscriminativityResult& r) {
  for (const auto& row : r.rows)
    std::cout << row.estimator << "  " << std::setw(16) << std::left << row.perturbation << " mean " << row.mean
              << "  std " << row.std << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"antix: SAC-RND offline RL toolkit"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--config", g.config, "key = value config file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "run seed (overrides the config)");
  app.add_option("--out", g.out, "output directory (default ./runs/<timestamp>-<seed>)");
  app.add_option("--set", g.sets, "override a config key, key=value")->allow_extra_args(false);

  auto* gen = app.add_subcommand("gen-data", "generate the configured dataset and save it");
  auto* pre = app.add_subcommand("pretrain-rnd", "pretrain an RND on the configured dataset");
  auto* bc = app.add_subcommand("bc-rnd", "bonus minimization with the critic-free actor (prior_sweep)");
  bool plain = false;
  auto* train = app.add_subcommand("train", "pretrain RND, then train SAC-RND with periodic evaluation");
  train->add_flag("--plain-sac", plain, "control run: no RND, both alphas zero");
  auto* disc = app.add_subcommand("discriminativity", "bonus statistics for dataset vs perturbed actions");
  auto* field = app.add_subcommand("grad-field", "anti-gradient fields of the bonus on the toy dataset");
  auto* abl = app.add_subcommand("ablation", "predictor x prior conditioning matrix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    const ExperimentConfig cfg = resolve(g);
    const fs::path out = out_dir(g, cfg);
    if (gen->parsed()) {
      write_config_echo(cfg, out);
      const data::Dataset ds = make_dataset(cfg);
      data::save_dataset(ds, out / "dataset.jsonl");
      std::cout << "wrote " << ds.size() << " transitions to " << (out / "dataset.jsonl").string() << "\n";
    } else if (pre->parsed()) {
      write_config_echo(cfg, out);
      const data::Dataset ds = make_dataset(cfg);
      Rng rng = stream(cfg.seed(), "rnd");
      auto r = pretrain(cfg, ds, cfg.predictor(), cfg.prior(), rng);
      CsvTable t({"step", "loss", "data_bonus"});
      for (std::size_t i = 0; i < r.loss_curve.size(); ++i)
        t.add({CsvTable::cell(static_cast<std::int64_t>(i)), CsvTable::cell(r.loss_curve[i]),
               CsvTable::cell(r.data_bonus_curve[i])});
      write_csv(t, out / "pretrain.csv");
      save_checkpoint(checkpoint_rnd(r.model), out / "rnd.ckpt");
      std::cout << "initial loss " << r.initial_loss << "  final loss " << r.final_loss << "  running std "
                << r.model.running_stat().scale() << "\n";
    } else if (bc->parsed()) {
      for (const auto& run : run_bonus_minimization(cfg, out))
        std::cout << run.prior.label() << ": data bonus " << run.final_data_bonus << "  policy bonus "
                  << run.final_policy_bonus << "  action mse " << run.initial_action_mse << " -> "
                  << run.final_action_mse << "\n";
    } else if (train->parsed()) {
      const auto rep = run_offline_rl(cfg, out, plain);
      for (const auto& e : rep.evals)
        std::cout << "step " << e.step << "  return " << e.mean_return << "  score " << e.normalized_score << "\n";
      std::cout << "max |Q| " << rep.max_abs_q << "\n";
    } else if (disc->parsed()) {
      print_discriminativity(run_discriminativity(cfg, out));
    } else if (field->parsed()) {
      const auto r = run_gradient_field(cfg, out);
      for (const auto& [label, scores] : r.scores) {
        std::cout << label << ":";
        for (Scalar s : scores) std::cout << " " << s;
        std::cout << "\n";
      }
    } else if (abl->parsed()) {
      const auto r = run_conditioning_ablation(cfg, out);
      for (const auto& c : r.cells)
        std::cout << c.predictor.label() << " x " << c.prior.label() << ": "
                  << (c.skipped ? "skipped (" + c.reason + ")" : std::to_string(c.action_mse)) << "\n";
    }
    std::cout << "output: " << out.string() << "\n";
  } catch (const NumericalError& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
