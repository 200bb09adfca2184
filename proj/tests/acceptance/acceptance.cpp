// Acceptance suite: one PASS/FAIL line per criterion. Exit status 0 only when
// every selected criterion passes.

#include "antix/autodiff/grad_check.hpp"
#include "antix/data/io.hpp"
#include "antix/experiments/checkpoint.hpp"
#include "antix/experiments/runners.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstring>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

using namespace antix;
using namespace antix::experiments;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(Scalar x) {
  std::ostringstream ss;
  ss << std::setprecision(4) << x;
  return ss.str();
}

bool strictly_increasing(const std::vector<Scalar>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) return false;
  return true;
}

std::string join(const std::vector<Scalar>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " < " : "") + fmt(v[i]);
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

bool bit_equal(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), sizeof(Scalar) * static_cast<std::size_t>(a.size())) == 0;
}

// Shared toy-corner settings for the RND diagnostics.
ExperimentConfig toy_config(std::uint64_t seed) {
  ExperimentConfig c;
  c.set("seed", std::to_string(seed));
  c.set("dataset", "toy_corner");
  c.set("rnd_steps", "20000");
  c.set("rnd_hidden_dim", "64");
  c.set("hidden_dim", "64");
  c.set("predictor", "concat");
  return c;
}

ExperimentConfig point_mass_config(std::uint64_t seed) {
  ExperimentConfig c;
  c.set("seed", std::to_string(seed));
  c.set("dataset", "point_mass");
  c.set("behavior", "noisy_expert");
  c.set("n_transitions", "50000");
  c.set("rnd_steps", "20000");
  c.set("rnd_hidden_dim", "64");
  c.set("hidden_dim", "64");
  return c;
}

// ---------------------------------------------------------------- 1

Outcome gradient_correctness() {
  Rng rng(2024);
  Scalar worst = 0;
  std::string worst_name;
  int checked = 0;
  auto record = [&](const GradCheckReport& r, const std::string& name) {
    ++checked;
    if (r.max_relative_error > worst) {
      worst = r.max_relative_error;
      worst_name = name + " (" + r.worst_parameter + ")";
    }
  };
  auto rand = [&](Index r, Index c) {
    Matrix m(r, c);
    fill_uniform(m, 1.0, rng);
    return m;
  };

  for (bool ln : {false, true})
    for (auto kind : {nets::FusionKind::Concat, nets::FusionKind::Gating, nets::FusionKind::BilinearFull,
                      nets::FusionKind::BilinearSimplified, nets::FusionKind::Film})
      for (auto place : {nets::Placement::FirstLayer, nets::Placement::PenultimateLayer, nets::Placement::LastLayer,
                         nets::Placement::AllLayers}) {
        nets::NetSpec spec{4, 2, 16, 4, 5, kind, place, ln};
        try {
          spec.validate();
        } catch (const ValidationError&) {
          continue;
        }
        nets::Network net = nets::Network::build(spec, rng);
        for (Parameter* p : net.parameters()) p->value.array() += 0.05 * rand(p->value.rows(), p->value.cols()).array();
        Parameter s("s", rand(5, 4)), a("a", rand(5, 2));
        std::vector<Parameter*> ps = net.parameters();
        ps.push_back(&s);
        ps.push_back(&a);
        auto loss = [&](Tape& t) { return sum(square(net.forward(t, t.param(s), t.param(a)))); };
        record(grad_check(ps, loss, 1e-5),
               std::string(to_string(kind)) + ":" + std::string(to_string(place)) + (ln ? "+ln" : ""));
      }

  sac::Policy policy = sac::Policy::build(3, 2, 16, 3, rng);
  const Matrix s = rand(6, 3);
  Matrix xi(6, 2);
  fill_normal(xi, 1.0, rng);
  auto lp = [&](Tape& t) { return sum(policy.sample_with_noise(t, t.constant(s), xi).log_prob); };
  record(grad_check(policy.parameters(), lp, 1e-5), "tanh-gaussian log-prob");

  return {worst < 1e-4, std::to_string(checked) + " nets, worst rel err " + fmt(worst) + " at " + worst_name};
}

// ---------------------------------------------------------------- 2

Outcome rnd_convergence() {
  const ExperimentConfig cfg = toy_config(1);
  const data::Dataset ds = make_dataset(cfg);
  Rng rng = stream(cfg.seed(), "rnd");
  auto pre = pretrain(cfg, ds, cfg.predictor(), cfg.prior(), rng);
  Rng held_rng(777);
  const data::Dataset held = data::gen_toy_corner_dataset(cfg.toy(), held_rng, 777);
  const Scalar train_bonus = pre.model.bonus_values(ds.states(), ds.actions()).mean();
  const Scalar held_bonus = pre.model.bonus_values(held.states(), held.actions()).mean();
  const Scalar ratio = pre.final_loss / pre.initial_loss;
  const bool pass = ratio < 0.01 && held_bonus <= 2 * train_bonus;
  return {pass, "loss " + fmt(pre.initial_loss) + " -> " + fmt(pre.final_loss) + " (ratio " + fmt(ratio) +
                    "), held-out/train bonus " + fmt(held_bonus / train_bonus)};
}

// ---------------------------------------------------------------- 3

Outcome discriminativity() {
  bool pass = true;
  std::string detail;
  for (std::uint64_t seed : {1, 2, 3}) {
    for (bool toy : {true, false}) {
      ExperimentConfig cfg = toy ? toy_config(seed) : point_mass_config(seed);
      cfg.set("sigma_grid", "0.1,0.3");
      if (!toy) {
        cfg.set("ensemble_size", "8");
        cfg.set("ensemble_steps", "5000");
        cfg.set("batch_size", "256");
      }
      const auto res = run_discriminativity(cfg, {});
      for (const std::string est : {"rnd", "ensemble"}) {
        if (est == "ensemble" && cfg.integer("ensemble_size") == 0) continue;
        const auto m = res.means(est);
        const bool ok = strictly_increasing(m);
        pass = pass && ok;
        if (!ok || est == "ensemble")
          detail += std::string(toy ? "toy" : "point-mass") + " seed " + std::to_string(seed) + " " + est + ": " +
                    join(m) + (ok ? "; " : " FAILS; ");
      }
    }
  }
  if (pass) detail = "ordered for rnd on both datasets x 3 seeds; " + detail;
  return {pass, detail};
}

// ---------------------------------------------------------------- 4 and 6

struct AblationSeeds {
  std::vector<AblationResult> runs;
};

const std::vector<std::string> kAblationPredictors = {"concat", "gating:last", "bilinear:last"};
const std::vector<std::string> kAblationPriors = {"concat", "film:penultimate", "film:all"};

const AblationSeeds& ablation_runs() {
  static const AblationSeeds seeds = [] {
    AblationSeeds out;
    std::string preds, priors;
    for (const auto& p : kAblationPredictors) preds += (preds.empty() ? "" : ",") + p;
    for (const auto& p : kAblationPriors) priors += (priors.empty() ? "" : ",") + p;
    for (std::uint64_t seed : {1, 2, 3}) {
      ExperimentConfig cfg = toy_config(seed);
      cfg.set("bc_steps", "20000");
      cfg.set("ablation_predictors", preds);
      cfg.set("ablation_priors", priors);
      out.runs.push_back(run_conditioning_ablation(cfg, {}));
    }
    return out;
  }();
  return seeds;
}

Scalar seed_mean(const AblationSeeds& s, std::size_t p, std::size_t q, Scalar AblationCell::*field) {
  Scalar total = 0;
  for (const auto& r : s.runs) total += r.cell(p, q).*field;
  return total / static_cast<Scalar>(s.runs.size());
}

Outcome bonus_minimization() {
  const AblationSeeds& s = ablation_runs();
  // Predictor concat (row 0); priors concat (column 0) and FiLM penultimate (column 1).
  const Scalar film_data = seed_mean(s, 0, 1, &AblationCell::final_data_bonus);
  const Scalar film_policy = seed_mean(s, 0, 1, &AblationCell::final_policy_bonus);
  const Scalar film_mse0 = seed_mean(s, 0, 1, &AblationCell::initial_action_mse);
  const Scalar film_mse = seed_mean(s, 0, 1, &AblationCell::action_mse);
  const Scalar concat_data = seed_mean(s, 0, 0, &AblationCell::final_data_bonus);
  const Scalar concat_policy = seed_mean(s, 0, 0, &AblationCell::final_policy_bonus);
  const bool film_ok = film_policy <= 2 * film_data && film_mse < film_mse0;
  const bool concat_ok = concat_policy >= 3 * concat_data;
  return {film_ok && concat_ok, "film policy/data " + fmt(film_policy / film_data) + " (<= 2), mse " + fmt(film_mse0) +
                                    " -> " + fmt(film_mse) + "; concat policy/data " +
                                    fmt(concat_policy / concat_data) + " (>= 3)"};
}

Outcome conditioning_ablation() {
  const AblationSeeds& s = ablation_runs();
  Scalar best_film = std::numeric_limits<Scalar>::infinity(), best_concat = best_film;
  std::string film_label;
  for (std::size_t p = 0; p < kAblationPredictors.size(); ++p)
    for (std::size_t q = 0; q < kAblationPriors.size(); ++q) {
      const Scalar m = seed_mean(s, p, q, &AblationCell::action_mse);
      const auto fusion = s.runs[0].priors[q].fusion;
      if (fusion == nets::FusionKind::Film && m < best_film) {
        best_film = m;
        film_label = kAblationPredictors[p] + " x " + kAblationPriors[q];
      }
      if (fusion == nets::FusionKind::Concat) best_concat = std::min(best_concat, m);
    }
  return {best_film < best_concat,
          "best film cell " + film_label + " mse " + fmt(best_film) + ", best concat-prior cell " + fmt(best_concat)};
}

// ---------------------------------------------------------------- 5

Outcome gradient_smoothness() {
  std::map<std::string, std::vector<Scalar>> mean;
  const std::vector<std::uint64_t> seeds = {1, 2, 3};
  for (std::uint64_t seed : seeds) {
    ExperimentConfig cfg = toy_config(seed);
    cfg.set("field_predictor", "concat");
    cfg.set("field_priors", "concat,film:penultimate");
    const auto res = run_gradient_field(cfg, {});
    for (const auto& [label, scores] : res.scores) {
      auto& m = mean[label];
      m.resize(scores.size(), 0);
      for (std::size_t k = 0; k < scores.size(); ++k) m[k] += scores[k] / static_cast<Scalar>(seeds.size());
    }
  }
  const auto& film = mean.at("film:penultimate");
  const auto& concat = mean.at("concat");
  bool pass = film.size() == 4 && concat.size() == 4;
  std::string detail;
  for (std::size_t k = 0; k < film.size(); ++k) {
    pass = pass && film[k] > concat[k];
    detail += "state " + std::to_string(k) + " film " + fmt(film[k]) + " vs concat " + fmt(concat[k]) + "; ";
  }
  return {pass, detail};
}

// ---------------------------------------------------------------- 7

Outcome offline_rl() {
  bool pass = true;
  std::string detail;
  for (std::uint64_t seed : {1, 2}) {
    ExperimentConfig cfg = point_mass_config(seed);
    cfg.set("train_steps", "100000");
    cfg.set("eval_interval", "0");
    cfg.set("eval_episodes", "20");
    const auto rnd = run_offline_rl(cfg, {});
    const auto plain = run_offline_rl(cfg, {}, true);
    const Scalar q_bound = 1.5 * rnd.r_max / (1 - cfg.real("gamma"));
    const bool ok = rnd.final_score >= 80 && rnd.final_score > plain.final_score && rnd.max_abs_q <= q_bound;
    pass = pass && ok;
    detail += "seed " + std::to_string(seed) + ": score " + fmt(rnd.final_score) + " vs plain " +
              fmt(plain.final_score) + ", max|Q| " + fmt(rnd.max_abs_q) + " (bound " + fmt(q_bound) + "); ";
  }
  return {pass, detail};
}

// ---------------------------------------------------------------- 8

Outcome determinism(const fs::path& work) {
  std::string detail;
  bool pass = true;

  ExperimentConfig cfg = point_mass_config(5);
  cfg.set("n_transitions", "2000");
  cfg.set("rnd_steps", "300");
  cfg.set("train_steps", "300");
  cfg.set("batch_size", "64");
  cfg.set("eval_interval", "100");
  cfg.set("eval_episodes", "2");
  fs::remove_all(work / "det_a");
  fs::remove_all(work / "det_b");
  run_offline_rl(cfg, work / "det_a");
  run_offline_rl(cfg, work / "det_b");
  for (const char* f : {"metrics.csv", "evals.csv", "pretrain.csv", "agent.ckpt", "rnd.ckpt", "report.json"}) {
    if (slurp(work / "det_a" / f) != slurp(work / "det_b" / f)) {
      pass = false;
      detail += std::string(f) + " differs; ";
    }
  }

  const data::Dataset ds = make_dataset(cfg);
  data::save_dataset(ds, work / "dataset.jsonl");
  const data::Dataset back = data::load_dataset(work / "dataset.jsonl");
  const data::Batch x = ds.all(), y = back.all();
  const bool ds_ok = back.meta() == ds.meta() && bit_equal(x.s, y.s) && bit_equal(x.a, y.a) && bit_equal(x.r, y.r) &&
                     bit_equal(x.s_next, y.s_next) && bit_equal(x.done, y.done);
  if (!ds_ok) detail += "dataset round trip not lossless; ";

  rnd::RndModel model = restore_rnd(load_checkpoint(work / "det_a" / "rnd.ckpt"));
  save_checkpoint(checkpoint_rnd(model), work / "rnd_again.ckpt");
  rnd::RndModel again = restore_rnd(load_checkpoint(work / "rnd_again.ckpt"));
  const bool rnd_ok = bit_equal(model.bonus_values(ds.states(), ds.actions()), again.bonus_values(ds.states(), ds.actions())) &&
                      slurp(work / "det_a" / "rnd.ckpt") == slurp(work / "rnd_again.ckpt");
  if (!rnd_ok) detail += "rnd checkpoint round trip not lossless; ";

  Rng rng(0);
  sac::SacAgent agent = restore_agent(load_checkpoint(work / "det_a" / "agent.ckpt"), &rng);
  save_checkpoint(checkpoint_agent(agent, rng), work / "agent_again.ckpt");
  const bool agent_ok = slurp(work / "det_a" / "agent.ckpt") == slurp(work / "agent_again.ckpt");
  if (!agent_ok) detail += "agent checkpoint round trip not lossless; ";

  pass = pass && ds_ok && rnd_ok && agent_ok;
  if (pass) detail = "metric CSVs, checkpoints and report identical across runs; round trips lossless";
  return {pass, detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"antix acceptance suite"};
  fs::path work = fs::temp_directory_path() / "antix_acceptance";
  std::vector<int> only;
  app.add_option("--work", work, "scratch directory");
  app.add_option("--only", only, "criteria to run (default all)")->check(CLI::Range(1, 8));
  CLI11_PARSE(app, argc, argv);
  fs::create_directories(work);
  const std::set<int> selected(only.begin(), only.end());

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"gradient correctness", gradient_correctness},
      {"rnd convergence", rnd_convergence},
      {"discriminativity ordering", discriminativity},
      {"bonus minimization", bonus_minimization},
      {"gradient field smoothness", gradient_smoothness},
      {"conditioning ablation", conditioning_ablation},
      {"offline rl sanity", offline_rl},
      {"determinism and persistence", [&] { return determinism(work); }},
  };

  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    all = all && o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  [" << id << "] " << criteria[i].first << ": " << o.detail << " ("
              << std::fixed << std::setprecision(1) << secs << "s)" << std::defaultfloat << std::endl;
  }
  return all ? 0 : 1;
}
