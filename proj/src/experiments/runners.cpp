#include "antix/experiments/runners.hpp"

#include "antix/data/io.hpp"
#include "antix/data/perturb.hpp"
#include "antix/experiments/checkpoint.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

namespace antix::experiments {

namespace fs = std::filesystem;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string file_label(const Variant& v) {
  std::string s = v.label();
  std::replace(s.begin(), s.end(), ':', '_');
  return s;
}

bool writing(const fs::path& out) { return !out.empty(); }

CsvTable pretrain_table(const rnd::PretrainResult& r) {
  CsvTable t({"step", "loss", "data_bonus"});
  for (std::size_t i = 0; i < r.loss_curve.size(); ++i)
    t.add({CsvTable::cell(static_cast<std::int64_t>(i)), CsvTable::cell(r.loss_curve[i]),
           CsvTable::cell(r.data_bonus_curve[i])});
  return t;
}

BonusSummary summarize(const std::string& estimator, const std::string& perturbation, const ColVector& v, Scalar lo,
                       Scalar hi, Index bins) {
  BonusSummary b;
  b.estimator = estimator;
  b.perturbation = perturbation;
  b.mean = v.mean();
  b.std = std::sqrt((v.array() - b.mean).square().mean());
  b.hist_lo = lo;
  b.hist_hi = hi;
  b.histogram.assign(static_cast<std::size_t>(bins), 0);
  const Scalar width = hi > lo ? (hi - lo) / static_cast<Scalar>(bins) : Scalar(1);
  for (Index i = 0; i < v.size(); ++i) {
    auto k = static_cast<Index>((v(i) - lo) / width);
    k = std::clamp<Index>(k, 0, bins - 1);
    ++b.histogram[static_cast<std::size_t>(k)];
  }
  return b;
}

}  // namespace

Rng stream(std::uint64_t seed, std::string_view purpose) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : purpose) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return Rng(splitmix64(seed ^ splitmix64(h)));
}

data::Dataset make_dataset(const ExperimentConfig& cfg) {
  Rng rng = stream(cfg.seed(), "data");
  const std::string& kind = cfg.raw("dataset");
  if (kind == "toy_corner") return data::gen_toy_corner_dataset(cfg.toy(), rng, cfg.seed());
  if (kind == "point_mass")
    return data::gen_offline_dataset(cfg.env(), cfg.behavior(), static_cast<std::size_t>(cfg.integer("n_transitions")),
                                     rng, cfg.seed());
  return data::load_dataset(cfg.raw("dataset_path"));
}

rnd::PretrainResult pretrain(const ExperimentConfig& cfg, const data::Dataset& ds, const Variant& predictor,
                             const Variant& prior, Rng& rng) {
  return rnd::pretrain_rnd(ds, cfg.rnd_spec(ds.s_dim(), ds.a_dim(), predictor),
                           cfg.rnd_spec(ds.s_dim(), ds.a_dim(), prior), cfg.pretrain(), rng);
}

void write_config_echo(const ExperimentConfig& cfg, const fs::path& out) {
  if (!writing(out)) return;
  fs::create_directories(out);
  std::ofstream f(out / "config.txt", std::ios::binary | std::ios::trunc);
  f << cfg.echo();
  if (!f) throw std::runtime_error("cannot write " + (out / "config.txt").string());
}

// ---------------------------------------------------------------- discriminativity

const BonusSummary& DiscriminativityResult::at(const std::string& estimator, const std::string& perturbation) const {
  for (const auto& r : rows)
    if (r.estimator == estimator && r.perturbation == perturbation) return r;
  throw ValidationError("no discriminativity row for " + estimator + "/" + perturbation);
}

std::vector<Scalar> DiscriminativityResult::means(const std::string& estimator) const {
  std::vector<Scalar> out;
  for (const auto& p : perturbations) out.push_back(at(estimator, p).mean);
  return out;
}

DiscriminativityResult summarize_bonuses(const data::Dataset& ds,
                                         const std::vector<std::pair<std::string, BonusFn>>& estimators,
                                         std::vector<Scalar> sigmas, Index bins, Rng& rng) {
  DiscriminativityResult res;
  std::vector<data::StateActionPairs> pairs;
  res.perturbations.push_back("dataset");
  pairs.push_back({ds.states(), ds.actions()});
  std::sort(sigmas.begin(), sigmas.end());
  for (Scalar s : sigmas) {
    const auto mode = data::PerturbMode::gaussian(s);
    res.perturbations.push_back(mode.label());
    pairs.push_back(data::perturb_actions(ds, mode, rng));
  }
  res.perturbations.push_back(data::PerturbMode::uniform().label());
  pairs.push_back(data::perturb_actions(ds, data::PerturbMode::uniform(), rng));

  for (const auto& [name, fn] : estimators) {
    std::vector<ColVector> values;
    Scalar lo = std::numeric_limits<Scalar>::infinity(), hi = -lo;
    for (const auto& p : pairs) {
      values.push_back(fn(p.s, p.a));
      lo = std::min(lo, values.back().minCoeff());
      hi = std::max(hi, values.back().maxCoeff());
    }
    for (std::size_t i = 0; i < pairs.size(); ++i)
      res.rows.push_back(summarize(name, res.perturbations[i], values[i], lo, hi, bins));
  }
  return res;
}

DiscriminativityResult run_discriminativity(const ExperimentConfig& cfg, const fs::path& out) {
  cfg.validate();
  write_config_echo(cfg, out);
  const data::Dataset ds = make_dataset(cfg);
  Rng rnd_rng = stream(cfg.seed(), "rnd");
  auto pre = pretrain(cfg, ds, cfg.predictor(), cfg.prior(), rnd_rng);

  std::vector<std::pair<std::string, BonusFn>> estimators;
  estimators.emplace_back("rnd", [&](const Matrix& s, const Matrix& a) { return pre.model.bonus_values(s, a); });
  std::optional<sac::SacResult> ensemble;
  if (cfg.integer("ensemble_size") >= 2) {
    sac::SacConfig sc = cfg.sac();
    sc.num_critics = cfg.integer("ensemble_size");
    sc.train_steps = cfg.integer("ensemble_steps");
    sc.alpha_actor = 0;
    sc.alpha_critic = 0;
    Rng erng = stream(cfg.seed(), "ensemble");
    ensemble = sac::train_sac_rnd(ds, nullptr, sc, erng);
    estimators.emplace_back("ensemble", [&](const Matrix& s, const Matrix& a) {
      return rnd::ensemble_disagreement(ensemble->agent.critics.q_values(s, a));
    });
  }
  Rng prng = stream(cfg.seed(), "perturb");
  const DiscriminativityResult res =
      summarize_bonuses(ds, estimators, cfg.real_list("sigma_grid"), cfg.integer("histogram_bins"), prng);

  if (writing(out)) {
    CsvTable summary({"estimator", "perturbation", "mean", "std"});
    CsvTable hist({"estimator", "perturbation", "bin", "lo", "hi", "count"});
    for (const auto& r : res.rows) {
      summary.add({r.estimator, r.perturbation, CsvTable::cell(r.mean), CsvTable::cell(r.std)});
      const Scalar w = (r.hist_hi - r.hist_lo) / static_cast<Scalar>(r.histogram.size());
      for (std::size_t k = 0; k < r.histogram.size(); ++k)
        hist.add({r.estimator, r.perturbation, CsvTable::cell(static_cast<std::int64_t>(k)),
                  CsvTable::cell(r.hist_lo + w * static_cast<Scalar>(k)),
                  CsvTable::cell(r.hist_lo + w * static_cast<Scalar>(k + 1)), CsvTable::cell(r.histogram[k])});
    }
    write_csv(summary, out / "discriminativity.csv");
    write_csv(hist, out / "histograms.csv");
    write_csv(pretrain_table(pre), out / "pretrain.csv");
    save_checkpoint(checkpoint_rnd(pre.model), out / "rnd.ckpt");
    if (ensemble) write_csv(metric_table(ensemble->log), out / "ensemble_metrics.csv");
  }
  return res;
}

// ---------------------------------------------------------------- bonus minimization

std::vector<BonusMinimizationRun> run_bonus_minimization(const ExperimentConfig& cfg, const fs::path& out) {
  cfg.validate();
  write_config_echo(cfg, out);
  const data::Dataset ds = make_dataset(cfg);
  std::vector<BonusMinimizationRun> runs;
  CsvTable summary({"prior", "final_data_bonus", "final_policy_bonus", "initial_action_mse", "final_action_mse"});
  for (const Variant& prior : cfg.variant_list("prior_sweep")) {
    Rng rnd_rng = stream(cfg.seed(), "rnd");
    auto pre = pretrain(cfg, ds, cfg.predictor(), prior, rnd_rng);
    Rng bc_rng = stream(cfg.seed(), "bc");
    sac::BcResult bc = sac::train_bc_rnd(ds, pre.model, cfg.bc(), bc_rng);

    BonusMinimizationRun run;
    run.prior = prior;
    run.pretrain_data_bonus = pre.data_bonus_curve;
    for (const auto& row : bc.log) {
      run.policy_bonus.push_back(row.mean_policy_bonus);
      run.action_mse.push_back(row.action_mse);
    }
    run.final_data_bonus = bc.final_data_bonus;
    run.final_policy_bonus = bc.final_policy_bonus;
    run.initial_action_mse = bc.initial_action_mse;
    run.final_action_mse = bc.final_action_mse;
    if (writing(out)) {
      const std::string tag = file_label(prior);
      write_csv(pretrain_table(pre), out / ("pretrain_" + tag + ".csv"));
      write_csv(metric_table(bc.log), out / ("bc_" + tag + ".csv"));
      save_checkpoint(checkpoint_rnd(pre.model), out / ("rnd_" + tag + ".ckpt"));
      save_checkpoint(checkpoint_policy(bc.policy, bc.temperature), out / ("policy_" + tag + ".ckpt"));
    }
    summary.add({prior.label(), CsvTable::cell(run.final_data_bonus), CsvTable::cell(run.final_policy_bonus),
                 CsvTable::cell(run.initial_action_mse), CsvTable::cell(run.final_action_mse)});
    runs.push_back(std::move(run));
  }
  if (writing(out)) write_csv(summary, out / "bonus_minimization.csv");
  return runs;
}

// ---------------------------------------------------------------- gradient field

FieldGrid gradient_field(rnd::RndModel& model, Index state, Index s_dim, Index resolution) {
  if (resolution < 2) throw ValidationError("grid_resolution must be >= 2");
  if (state < 0 || state >= s_dim) throw ValidationError("gradient_field: state index out of range");
  const Index n = resolution * resolution;
  FieldGrid g;
  g.state = state;
  g.actions.resize(n, 2);
  for (Index i = 0; i < resolution; ++i)
    for (Index j = 0; j < resolution; ++j) {
      g.actions(i * resolution + j, 0) = -1 + 2 * static_cast<Scalar>(i) / static_cast<Scalar>(resolution - 1);
      g.actions(i * resolution + j, 1) = -1 + 2 * static_cast<Scalar>(j) / static_cast<Scalar>(resolution - 1);
    }
  Matrix s = Matrix::Zero(n, s_dim);
  s.col(state).setOnes();
  Tape tape;
  Var a = tape.input(g.actions);
  Var b = model.bonus(tape, tape.constant(s), a);
  tape.backward(sum(b));
  g.bonus = b.value().col(0);
  g.anti_grad = -a.grad();
  if (!all_finite(g.anti_grad)) throw NumericalError("gradient_field: non-finite gradient");
  return g;
}

Scalar centroid_cosine(const Matrix& actions, const Matrix& anti_grad, const Eigen::Vector2d& center) {
  Scalar total = 0;
  Index n = 0;
  for (Index i = 0; i < actions.rows(); ++i) {
    const Eigen::Vector2d d = center - actions.row(i).transpose();
    const Eigen::Vector2d g = anti_grad.row(i).transpose();
    if (d.norm() < 1e-12 || g.norm() == 0) continue;
    total += g.dot(d) / (g.norm() * d.norm());
    ++n;
  }
  if (n == 0) throw NumericalError("centroid_cosine: no usable cells");
  return total / static_cast<Scalar>(n);
}

GradientFieldResult run_gradient_field(const ExperimentConfig& cfg, const fs::path& out) {
  cfg.validate();
  write_config_echo(cfg, out);
  const data::ToyCornerConfig toy = cfg.toy();
  Rng drng = stream(cfg.seed(), "data");
  const data::Dataset ds = data::gen_toy_corner_dataset(toy, drng, cfg.seed());
  const Index res = cfg.integer("grid_resolution");
  GradientFieldResult result;
  CsvTable summary({"prior", "state", "score"});
  for (const Variant& prior : cfg.variant_list("field_priors")) {
    Rng rnd_rng = stream(cfg.seed(), "rnd");
    auto pre = pretrain(cfg, ds, Variant::parse(cfg.raw("field_predictor")), prior, rnd_rng);
    CsvTable cells({"state", "a0", "a1", "anti_grad0", "anti_grad1", "bonus"});
    for (Index k = 0; k < 4; ++k) {
      FieldGrid g = gradient_field(pre.model, k, ds.s_dim(), res);
      g.prior = prior;
      g.score = centroid_cosine(g.actions, g.anti_grad, toy.corner_centers[static_cast<std::size_t>(k)]);
      result.scores[prior.label()].push_back(g.score);
      summary.add({prior.label(), CsvTable::cell(static_cast<std::int64_t>(k)), CsvTable::cell(g.score)});
      for (Index i = 0; i < g.actions.rows(); ++i)
        cells.add({CsvTable::cell(static_cast<std::int64_t>(k)), CsvTable::cell(g.actions(i, 0)),
                   CsvTable::cell(g.actions(i, 1)), CsvTable::cell(g.anti_grad(i, 0)), CsvTable::cell(g.anti_grad(i, 1)),
                   CsvTable::cell(g.bonus(i))});
      result.grids.push_back(std::move(g));
    }
    if (writing(out)) {
      write_csv(cells, out / ("field_" + file_label(prior) + ".csv"));
      save_checkpoint(checkpoint_rnd(pre.model), out / ("rnd_" + file_label(prior) + ".ckpt"));
    }
  }
  if (writing(out)) write_csv(summary, out / "gradient_field.csv");
  return result;
}

// ---------------------------------------------------------------- ablation

const AblationCell& AblationResult::cell(std::size_t predictor, std::size_t prior) const {
  return cells.at(predictor * priors.size() + prior);
}

AblationResult run_conditioning_ablation(const ExperimentConfig& cfg, const fs::path& out) {
  cfg.validate();
  write_config_echo(cfg, out);
  const data::Dataset ds = make_dataset(cfg);
  AblationResult res;
  res.predictors = cfg.variant_list("ablation_predictors");
  res.priors = cfg.variant_list("ablation_priors");
  CsvTable table({"predictor", "prior", "action_mse", "initial_action_mse", "final_policy_bonus", "final_data_bonus",
                  "status"});
  std::optional<sac::BcResult> best;
  for (const Variant& pv : res.predictors) {
    for (const Variant& qv : res.priors) {
      AblationCell cell;
      cell.predictor = pv;
      cell.prior = qv;
      cell.action_mse = std::numeric_limits<Scalar>::quiet_NaN();
      try {
        cfg.rnd_spec(ds.s_dim(), ds.a_dim(), pv);
        cfg.rnd_spec(ds.s_dim(), ds.a_dim(), qv);
      } catch (const ValidationError& e) {
        cell.skipped = true;
        cell.reason = e.what();
      }
      if (!cell.skipped) {
        Rng rnd_rng = stream(cfg.seed(), "rnd");
        auto pre = pretrain(cfg, ds, pv, qv, rnd_rng);
        Rng bc_rng = stream(cfg.seed(), "bc");
        sac::BcResult bc = sac::train_bc_rnd(ds, pre.model, cfg.bc(), bc_rng);
        cell.action_mse = bc.final_action_mse;
        cell.initial_action_mse = bc.initial_action_mse;
        cell.final_policy_bonus = bc.final_policy_bonus;
        cell.final_data_bonus = bc.final_data_bonus;
        if (!best || bc.final_action_mse < best->final_action_mse) best = std::move(bc);
      }
      table.add({pv.label(), qv.label(), CsvTable::cell(cell.action_mse), CsvTable::cell(cell.initial_action_mse),
                 CsvTable::cell(cell.final_policy_bonus), CsvTable::cell(cell.final_data_bonus),
                 cell.skipped ? "skipped: " + cell.reason : std::string("ok")});
      res.cells.push_back(std::move(cell));
    }
  }
  if (writing(out)) {
    // Reasons may contain commas; keep the table parseable.
    for (auto& row : table.rows) std::replace(row.back().begin(), row.back().end(), ',', ';');
    write_csv(table, out / "ablation.csv");
    if (best) save_checkpoint(checkpoint_policy(best->policy, best->temperature), out / "best_policy.ckpt");
  }
  return res;
}

// ---------------------------------------------------------------- offline RL

data::EvalResult evaluate_policy(sac::Policy& policy, const data::PointMassEnv& env, int episodes, std::uint64_t seed) {
  return data::evaluate(
      env, [&policy](const RowVector& s, Rng&) -> RowVector { return policy.mean_action(Matrix(s)).row(0); }, episodes,
      seed);
}

OfflineRlReport run_offline_rl(const ExperimentConfig& cfg, const fs::path& out, bool plain_sac) {
  cfg.validate();
  plain_sac = plain_sac || cfg.flag("plain_sac");
  write_config_echo(cfg, out);
  const data::Dataset ds = make_dataset(cfg);
  if (ds.s_dim() != data::PointMassEnv::kStateDim || ds.a_dim() != data::PointMassEnv::kActionDim)
    throw ValidationError("offline RL evaluation needs a point-mass dataset");
  const data::PointMassEnv env = cfg.env();
  const int episodes = static_cast<int>(cfg.integer("eval_episodes"));
  const std::uint64_t eval_seed = static_cast<std::uint64_t>(cfg.integer("eval_seed"));

  OfflineRlReport rep;
  rep.plain_sac = plain_sac;
  rep.refs = data::point_mass_refs(env, episodes, eval_seed);
  rep.r_max = ds.rewards().cwiseAbs().maxCoeff();

  std::optional<rnd::RndModel> model;
  if (!plain_sac) {
    if (!cfg.raw("rnd_checkpoint").empty()) {
      model = restore_rnd(load_checkpoint(cfg.raw("rnd_checkpoint")));
      if (!model->frozen()) throw ValidationError("rnd_checkpoint holds an unfrozen model");
    } else {
      Rng rnd_rng = stream(cfg.seed(), "rnd");
      auto pre = pretrain(cfg, ds, cfg.predictor(), cfg.prior(), rnd_rng);
      if (writing(out)) write_csv(pretrain_table(pre), out / "pretrain.csv");
      model = std::move(pre.model);
    }
    if (writing(out)) save_checkpoint(checkpoint_rnd(*model), out / "rnd.ckpt");
  }

  sac::SacConfig sc = cfg.sac();
  if (plain_sac) {
    sc.alpha_actor = 0;
    sc.alpha_critic = 0;
  }
  Rng train_rng = stream(cfg.seed(), "train");
  sac::SacAgent agent = cfg.raw("resume_from").empty()
                            ? sac::SacAgent::create(ds.s_dim(), ds.a_dim(), sc, train_rng)
                            : restore_agent(load_checkpoint(cfg.raw("resume_from")), &train_rng);

  const std::int64_t interval = cfg.integer("eval_interval");
  auto eval_now = [&](std::int64_t step) {
    const auto r = evaluate_policy(agent.policy, env, episodes, eval_seed);
    rep.evals.push_back({step, r.mean_return,
                         data::normalized_score(r.mean_return, rep.refs.random_return, rep.refs.expert_return)});
  };
  sac::continue_sac_rnd(ds, agent, model ? &*model : nullptr, sc.train_steps, train_rng, rep.log,
                        [&](const sac::MetricRow&, sac::SacAgent& a) {
                          if (interval > 0 && a.step % interval == 0) eval_now(a.step);
                        });
  if (rep.evals.empty() || rep.evals.back().step != agent.step) eval_now(agent.step);

  rep.final_return = rep.evals.back().mean_return;
  rep.final_score = rep.evals.back().normalized_score;
  for (const auto& row : rep.log) {
    rep.max_abs_q = std::max(rep.max_abs_q, row.max_abs_q);
    rep.mean_policy_bonus += row.mean_policy_bonus;
    rep.mean_data_bonus += row.mean_data_bonus;
  }
  if (!rep.log.empty()) {
    rep.mean_policy_bonus /= static_cast<Scalar>(rep.log.size());
    rep.mean_data_bonus /= static_cast<Scalar>(rep.log.size());
  }

  if (writing(out)) {
    write_csv(metric_table(rep.log), out / "metrics.csv");
    CsvTable ev({"step", "mean_return", "normalized_score"});
    for (const auto& e : rep.evals)
      ev.add({CsvTable::cell(e.step), CsvTable::cell(e.mean_return), CsvTable::cell(e.normalized_score)});
    write_csv(ev, out / "evals.csv");
    save_checkpoint(checkpoint_agent(agent, train_rng), out / "agent.ckpt");
    nlohmann::json report;
    report["plain_sac"] = plain_sac;
    report["final_return"] = rep.final_return;
    report["final_score"] = rep.final_score;
    report["random_ref"] = rep.refs.random_return;
    report["expert_ref"] = rep.refs.expert_return;
    report["max_abs_q"] = rep.max_abs_q;
    report["r_max"] = rep.r_max;
    report["mean_policy_bonus"] = rep.mean_policy_bonus;
    report["mean_data_bonus"] = rep.mean_data_bonus;
    report["config"] = cfg.values();
    std::ofstream f(out / "report.json", std::ios::binary | std::ios::trunc);
    f << report.dump(2) << '\n';
  }
  return rep;
}

}  // namespace antix::experiments
