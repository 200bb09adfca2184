#include "antix/autodiff/grad_check.hpp"
#include "antix/data/point_mass.hpp"
#include "antix/data/toy_corner.hpp"
#include "antix/sac/agent.hpp"
#include "helpers.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>

using namespace antix;
using namespace antix::sac;
using antix::testing::bit_equal;
using antix::testing::random_matrix;

namespace {

SacConfig tiny_config() {
  SacConfig c;
  c.hidden_dim = 16;
  c.num_layers = 3;
  c.batch_size = 32;
  c.train_steps = 50;
  return c;
}

data::Dataset point_mass_data(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  return data::gen_offline_dataset(data::PointMassEnv{}, data::Behavior{}, n, rng, seed);
}

data::Dataset toy_data(Index n_per_state, std::uint64_t seed) {
  Rng rng(seed);
  data::ToyCornerConfig cfg;
  cfg.n_per_state = n_per_state;
  return data::gen_toy_corner_dataset(cfg, rng, seed);
}

Parameter& named(std::vector<Parameter*> ps, const std::string& name) {
  for (Parameter* p : ps)
    if (p->name == name) return *p;
  throw std::runtime_error("no parameter " + name);
}

// Heads emit constants: mean μ and log-std ls for every state.
void pin_heads(Policy& policy, Scalar mu, Scalar ls) {
  auto ps = policy.parameters();
  named(ps, "policy.mean.weight").value.setZero();
  named(ps, "policy.mean.bias").value.setConstant(mu);
  named(ps, "policy.log_std.weight").value.setZero();
  named(ps, "policy.log_std.bias").value.setConstant(ls);
}

// Critic output layers emit zero, so Q ≡ 0.
void flatten_critics(CriticSet& set) {
  for (auto* group : {&set.critics(), &set.targets()})
    for (auto& net : *group) {
      auto& last = std::get<LinearParams>(net.layers().back().body);
      last.weight.value.setZero();
      last.bias.value.setZero();
    }
}

rnd::RndModel small_rnd(const data::Dataset& ds, nets::FusionKind prior_kind, nets::Placement prior_place,
                        std::int64_t steps, Rng& rng) {
  nets::NetSpec pred{ds.s_dim(), ds.a_dim(), 32, 3, 8, nets::FusionKind::BilinearSimplified,
                     nets::Placement::FirstLayer, false};
  nets::NetSpec prior = pred;
  prior.fusion = prior_kind;
  prior.placement = prior_place;
  rnd::PretrainConfig pc;
  pc.steps = steps;
  pc.batch_size = 64;
  return rnd::pretrain_rnd(ds, pred, prior, pc, rng).model;
}

Scalar total_grad(std::vector<Parameter*> ps) {
  Scalar t = 0;
  for (auto* p : ps) t += p->grad.cwiseAbs().sum();
  return t;
}

}  // namespace

TEST(SampleAction, MinimalStdIsNearlyDeterministic) {
  Rng rng(1);
  Policy policy = Policy::build(3, 2, 8, 3, rng);
  auto ps = policy.parameters();
  named(ps, "policy.log_std.weight").value.setZero();
  named(ps, "policy.log_std.bias").value.setConstant(-50);
  const Matrix s = random_matrix(200, 3, rng);
  Tape tape;
  auto heads = policy.heads(tape, tape.constant(s));
  EXPECT_EQ(heads.log_std.value().maxCoeff(), kLogStdMin);
  auto smp = policy.sample(tape, tape.constant(s), rng);
  const Matrix det = heads.mean.value().array().tanh().matrix();
  EXPECT_LT((smp.action.value() - det).cwiseAbs().maxCoeff(), 6 * std::exp(kLogStdMin));
  EXPECT_TRUE(bit_equal(policy.mean_action(s), det));
}

TEST(SampleAction, LogStdClampedAbove) {
  Rng rng(2);
  Policy policy = Policy::build(3, 2, 8, 3, rng);
  pin_heads(policy, 0, 10);
  Tape tape;
  EXPECT_EQ(policy.heads(tape, tape.constant(random_matrix(4, 3, rng))).log_std.value().minCoeff(), kLogStdMax);
}

TEST(SampleAction, ActionsStrictlyInsideBox) {
  Rng rng(3);
  Policy policy = Policy::build(3, 2, 16, 3, rng);
  const Matrix s = random_matrix(10000, 3, rng, 3);
  Tape tape;
  const Matrix a = policy.sample(tape, tape.constant(s), rng).action.value();
  EXPECT_LT(a.cwiseAbs().maxCoeff(), 1.0);
  EXPECT_TRUE(all_finite(a));
}

TEST(SampleAction, LogProbMatchesHistogramDensity) {
  Rng rng(4);
  Policy policy = Policy::build(1, 1, 4, 2, rng);
  pin_heads(policy, 0.3, -0.5);
  const Index n = 100000;
  Tape tape;
  auto smp = policy.sample(tape, tape.constant(Matrix::Zero(n, 1)), rng);
  const Matrix& a = smp.action.value();
  const Matrix& lp = smp.log_prob.value();
  const int bins = 40;
  const Scalar width = 2.0 / bins;
  std::vector<Index> counts(bins, 0);
  std::vector<Scalar> density_sum(bins, 0);
  for (Index i = 0; i < n; ++i) {
    const int b = std::min(bins - 1, static_cast<int>((a(i, 0) + 1) / width));
    ++counts[b];
    density_sum[b] += std::exp(lp(i, 0));
  }
  int compared = 0;
  for (int b = 0; b < bins; ++b) {
    if (counts[b] < 2000) continue;
    const Scalar empirical = static_cast<Scalar>(counts[b]) / (n * width);
    const Scalar model = density_sum[b] / counts[b];
    EXPECT_NEAR(model / empirical, 1.0, 0.05) << "bin " << b;
    ++compared;
  }
  EXPECT_GE(compared, 10);
}

TEST(SampleAction, LogProbMatchesClosedForm) {
  Rng rng(5);
  Policy policy = Policy::build(2, 2, 8, 3, rng);
  const Matrix s = random_matrix(5, 2, rng), xi = standard_normal(5, 2, rng);
  Tape tape;
  auto heads = policy.heads(tape, tape.constant(s));
  auto smp = policy.sample_with_noise(tape, tape.constant(s), xi);
  for (Index n = 0; n < 5; ++n) {
    Scalar lp = 0;
    for (Index j = 0; j < 2; ++j) {
      const Scalar mu = heads.mean.value()(n, j), ls = heads.log_std.value()(n, j);
      const Scalar a = std::tanh(mu + std::exp(ls) * xi(n, j));
      lp += -0.5 * xi(n, j) * xi(n, j) - 0.5 * std::log(2 * std::numbers::pi) - ls - std::log(1 - a * a + kTanhLogProbEps);
      EXPECT_NEAR(smp.action.value()(n, j), a, 1e-14);
    }
    EXPECT_NEAR(smp.log_prob.value()(n, 0), lp, 1e-12);
  }
}

TEST(SampleAction, LogProbGradCheck) {
  Rng rng(6);
  Policy policy = Policy::build(2, 2, 8, 3, rng);
  const Matrix s = random_matrix(4, 2, rng), xi = standard_normal(4, 2, rng);
  auto loss = [&](Tape& t) {
    auto smp = policy.sample_with_noise(t, t.constant(s), xi);
    return sum(smp.log_prob) + sum(square(smp.action));
  };
  EXPECT_LT(grad_check(policy.parameters(), loss, 1e-5).max_relative_error, 1e-4);
}

TEST(TdTarget, TerminalGivesReward) {
  Rng rng(7);
  const auto ds = point_mass_data(64, 1);
  SacAgent agent = SacAgent::create(6, 2, tiny_config(), rng);
  data::Batch batch = ds.sample(16, rng);
  batch.done.setOnes();
  EXPECT_TRUE(bit_equal(td_target(batch, agent, nullptr, rng), batch.r));
}

TEST(TdTarget, NoDiscountNoEntropyGivesReward) {
  Rng rng(8);
  const auto ds = point_mass_data(64, 1);
  SacAgent agent = SacAgent::create(6, 2, tiny_config(), rng);
  agent.config.gamma = 0;
  agent.temperature.log_beta.value(0, 0) = -1000;
  EXPECT_EQ(agent.temperature.beta(), 0.0);
  const data::Batch batch = ds.sample(16, rng);
  EXPECT_TRUE(bit_equal(td_target(batch, agent, nullptr, rng), batch.r));
}

TEST(TdTarget, MatchesScalarRecomputation) {
  Rng rng(9);
  const auto ds = point_mass_data(64, 2);
  SacConfig cfg = tiny_config();
  cfg.alpha_critic = 0.7;
  SacAgent agent = SacAgent::create(6, 2, cfg, rng);
  agent.temperature.log_beta.value(0, 0) = std::log(0.3);
  auto model = small_rnd(ds, nets::FusionKind::Film, nets::Placement::PenultimateLayer, 50, rng);
  data::Batch batch = ds.gather({0, 5, 9});
  batch.done(1) = 1;
  const Matrix xi = standard_normal(3, 2, rng);
  const ColVector y = td_target_with_noise(batch, agent, &model, xi);

  Tape tape;
  auto heads = agent.policy.heads(tape, tape.constant(batch.s_next));
  for (Index n = 0; n < 3; ++n) {
    Matrix a(1, 2);
    Scalar lp = 0;
    for (Index j = 0; j < 2; ++j) {
      const Scalar mu = heads.mean.value()(n, j), ls = heads.log_std.value()(n, j);
      a(0, j) = std::tanh(mu + std::exp(ls) * xi(n, j));
      lp += -0.5 * xi(n, j) * xi(n, j) - 0.5 * std::log(2 * std::numbers::pi) - ls - std::log(1 - a(0, j) * a(0, j) + 1e-6);
    }
    Scalar qmin = std::numeric_limits<Scalar>::infinity();
    for (auto& t : agent.critics.targets()) qmin = std::min(qmin, t.predict(batch.s_next.row(n), a)(0, 0));
    const Scalar b = model.error_values(batch.s_next.row(n), a)(0) / model.running_stat().stddev();
    const Scalar expected = batch.r(n) + 0.99 * (1 - batch.done(n)) * (qmin - 0.3 * lp - 0.7 * b);
    EXPECT_NEAR(y(n), expected, 1e-12) << n;
  }
  EXPECT_EQ(y(1), batch.r(1));
}

TEST(TdTarget, NoGradientIntoTargetsOrRnd) {
  Rng rng(10);
  const auto ds = point_mass_data(64, 3);
  SacConfig cfg = tiny_config();
  cfg.alpha_critic = 1;
  SacAgent agent = SacAgent::create(6, 2, cfg, rng);
  auto model = small_rnd(ds, nets::FusionKind::Film, nets::Placement::PenultimateLayer, 10, rng);
  for (auto& t : agent.critics.targets()) t.zero_grad();
  model.predictor().zero_grad();
  model.prior().zero_grad();
  agent.policy.zero_grad();
  td_target(ds.sample(16, rng), agent, &model, rng);
  for (auto& t : agent.critics.targets()) EXPECT_EQ(total_grad(t.parameters()), 0.0);
  EXPECT_EQ(total_grad(model.predictor().parameters()), 0.0);
  EXPECT_EQ(total_grad(model.prior().parameters()), 0.0);
  EXPECT_EQ(total_grad(agent.policy.parameters()), 0.0);
}

TEST(TdTarget, RequiresFrozenRnd) {
  Rng rng(11);
  const auto ds = point_mass_data(64, 3);
  SacAgent agent = SacAgent::create(6, 2, tiny_config(), rng);
  nets::NetSpec spec{6, 2, 8, 3, 4, nets::FusionKind::Concat, nets::Placement::FirstLayer, false};
  rnd::RndModel unfrozen(spec, spec, rng);
  EXPECT_THROW(td_target(ds.sample(4, rng), agent, &unfrozen, rng), ContractViolation);
}

TEST(CriticUpdate, PerfectTargetsLeaveParametersUnchanged) {
  Rng rng(12);
  const auto ds = point_mass_data(64, 4);
  SacAgent agent = SacAgent::create(6, 2, tiny_config(), rng);
  agent.critics.critics()[1] = agent.critics.critics()[0];
  const data::Batch batch = ds.sample(32, rng);
  const ColVector y = agent.critics.critics()[0].predict(batch.s, batch.a).col(0);
  const nets::Network before = agent.critics.critics()[0];
  const auto stats = critic_update(batch, agent, y);
  EXPECT_EQ(stats.losses, std::vector<Scalar>({0.0, 0.0}));
  EXPECT_TRUE(agent.critics.critics()[0].same_parameters(before));
  EXPECT_TRUE(agent.critics.critics()[1].same_parameters(before));
}

TEST(CriticUpdate, SharedTargetsAndDecreasingLoss) {
  Rng rng(13);
  const auto ds = point_mass_data(256, 5);
  SacAgent agent = SacAgent::create(6, 2, tiny_config(), rng);
  const data::Batch batch = ds.sample(64, rng);
  const ColVector y = td_target(batch, agent, nullptr, rng);
  std::vector<Scalar> mean_losses;
  for (int i = 0; i < 300; ++i) {
    auto qs = agent.critics.q_values(batch.s, batch.a);
    const auto stats = critic_update(batch, agent, y);
    ASSERT_EQ(stats.losses.size(), 2u);
    for (std::size_t c = 0; c < 2; ++c) EXPECT_NEAR(stats.losses[c], (qs[c] - y).array().square().mean(), 1e-12);
    mean_losses.push_back(stats.mean_loss());
  }
  EXPECT_LT(mean_losses.back(), 0.5 * mean_losses.front());
}

TEST(ActorUpdate, EntropyRisesWithoutBonusAgainstFlatCritics) {
  Rng rng(14);
  const auto ds = point_mass_data(256, 6);
  SacConfig cfg = tiny_config();
  SacAgent agent = SacAgent::create(6, 2, cfg, rng);
  flatten_critics(agent.critics);
  pin_heads(agent.policy, 0.1, -2);
  const data::Batch batch = ds.sample(64, rng);
  std::vector<Scalar> entropy;
  for (int i = 0; i < 200; ++i) entropy.push_back(actor_update(batch, agent, nullptr, rng).entropy());
  const Scalar early = std::accumulate(entropy.begin(), entropy.begin() + 10, 0.0) / 10;
  const Scalar late = std::accumulate(entropy.end() - 10, entropy.end(), 0.0) / 10;
  EXPECT_GT(late, early + 0.5);
}

TEST(ActorUpdate, BonusTermAloneDrivesPolicyBonusDown) {
  Rng rng(15);
  const auto ds = toy_data(256, 7);
  auto model = small_rnd(ds, nets::FusionKind::Film, nets::Placement::PenultimateLayer, 3000, rng);
  SacConfig cfg = tiny_config();
  cfg.alpha_actor = 1;
  SacAgent agent = SacAgent::create(4, 2, cfg, rng);
  flatten_critics(agent.critics);
  agent.temperature.log_beta.value(0, 0) = -1000;
  std::vector<Scalar> bonus;
  for (int i = 0; i < 500; ++i) bonus.push_back(actor_update(ds.sample(64, rng), agent, &model, rng).mean_bonus);
  const Scalar early = std::accumulate(bonus.begin(), bonus.begin() + 20, 0.0) / 20;
  const Scalar late = std::accumulate(bonus.end() - 20, bonus.end(), 0.0) / 20;
  EXPECT_LT(late, 0.5 * early);
}

TEST(ActorUpdate, ObjectiveGradCheck) {
  Rng rng(16);
  const auto ds = toy_data(64, 8);
  auto model = small_rnd(ds, nets::FusionKind::Film, nets::Placement::PenultimateLayer, 20, rng);
  SacConfig cfg = tiny_config();
  cfg.hidden_dim = 6;
  cfg.alpha_actor = 0.5;
  SacAgent agent = SacAgent::create(4, 2, cfg, rng);
  agent.temperature.log_beta.value(0, 0) = std::log(0.2);
  const data::Batch batch = ds.sample(5, rng);
  const Matrix xi = standard_normal(5, 2, rng);
  auto loss = [&](Tape& t) {
    Var s = t.constant(batch.s);
    auto smp = agent.policy.sample_with_noise(t, s, xi);
    Var q = agent.critics.min_q(t, s, smp.action, Grad::Frozen);
    return mean(agent.temperature.beta() * smp.log_prob - q + 0.5 * model.bonus(t, s, smp.action));
  };
  EXPECT_LT(grad_check(agent.policy.parameters(), loss, 1e-5).max_relative_error, 1e-3);
}

TEST(ActorUpdate, CriticsNotTouched) {
  Rng rng(17);
  const auto ds = point_mass_data(64, 9);
  SacAgent agent = SacAgent::create(6, 2, tiny_config(), rng);
  const CriticSet before = agent.critics;
  actor_update(ds.sample(16, rng), agent, nullptr, rng);
  for (Index i = 0; i < 2; ++i) EXPECT_TRUE(agent.critics.critics()[i].same_parameters(before.critics()[i]));
}

TEST(Temperature, ZeroGradientAtTarget) {
  EXPECT_EQ(temperature_gradient(ColVector::Constant(8, 2.0), -2.0), 0.0);
}

TEST(Temperature, FollowsDescentOnTheLoss) {
  SacConfig cfg;
  // Entropy −logπ = −3 is below the target −2: the loss slope is negative, so log β grows.
  const ColVector low_entropy = ColVector::Constant(8, 3.0);
  EXPECT_LT(temperature_gradient(low_entropy, -2.0), 0.0);
  TemperatureState t;
  Adam opt({&t.log_beta}, AdamConfig{});
  EXPECT_GT(temperature_update(low_entropy, t, opt, cfg, 2), 1.0);
  // And the opposite side.
  TemperatureState t2;
  Adam opt2({&t2.log_beta}, AdamConfig{});
  EXPECT_LT(temperature_update(ColVector::Constant(8, 0.0), t2, opt2, cfg, 2), 1.0);
}

TEST(Temperature, FixedWhenNotLearned) {
  SacConfig cfg;
  cfg.learn_beta = false;
  TemperatureState t;
  Adam opt({&t.log_beta}, AdamConfig{});
  EXPECT_EQ(temperature_update(ColVector::Constant(8, 3.0), t, opt, cfg, 2), 1.0);
  EXPECT_EQ(opt.state().step_count, 0);
}

TEST(SoftUpdate, Extremes) {
  Rng rng(18);
  nets::NetSpec spec = CriticSet::critic_spec(3, 2, 8, 3);
  const nets::Network src = nets::Network::build(spec, rng);
  nets::Network tgt = nets::Network::build(spec, rng);
  const nets::Network orig = tgt;
  soft_update(src, tgt, 0.0);
  EXPECT_TRUE(tgt.same_parameters(orig));
  soft_update(src, tgt, 1.0);
  EXPECT_TRUE(tgt.same_parameters(src));
}

TEST(SoftUpdate, QuarterStep) {
  Rng rng(19);
  nets::NetSpec spec = CriticSet::critic_spec(3, 2, 8, 3);
  nets::Network src = nets::Network::build(spec, rng), tgt = nets::Network::build(spec, rng);
  for (auto* p : src.parameters()) p->value.setOnes();
  for (auto* p : tgt.parameters()) p->value.setZero();
  soft_update(src, tgt, 0.25);
  for (auto* p : tgt.parameters()) EXPECT_EQ(p->value, Matrix::Constant(p->value.rows(), p->value.cols(), 0.25));
}

TEST(CriticSet, Structure) {
  Rng rng(20);
  const nets::NetSpec spec = CriticSet::critic_spec(6, 2, 16, 3);
  EXPECT_EQ(spec.fusion, nets::FusionKind::Concat);
  EXPECT_TRUE(spec.use_layer_norm);
  EXPECT_EQ(spec.out_dim, 1);
  CriticSet set = CriticSet::build(6, 2, 16, 3, 3, rng);
  EXPECT_EQ(set.size(), 3);
  for (Index i = 0; i < 3; ++i) EXPECT_TRUE(set.critics()[i].same_parameters(set.targets()[i]));
  EXPECT_FALSE(set.critics()[0].same_parameters(set.critics()[1]));
}

TEST(SacConfig, Validation) {
  SacConfig c;
  EXPECT_NO_THROW(c.validate());
  for (auto mutate : std::vector<std::function<void(SacConfig&)>>{
           [](SacConfig& x) { x.gamma = 0; }, [](SacConfig& x) { x.gamma = 1.5; }, [](SacConfig& x) { x.tau = 0; },
           [](SacConfig& x) { x.tau = 1.01; }, [](SacConfig& x) { x.alpha_actor = -1; },
           [](SacConfig& x) { x.alpha_critic = -0.1; }, [](SacConfig& x) { x.num_critics = 1; }}) {
    SacConfig bad;
    mutate(bad);
    EXPECT_THROW(bad.validate(), ValidationError);
  }
  EXPECT_EQ(c.entropy_target(3), -3.0);
}

TEST(TrainSac, ZeroStepsEqualsInitialization) {
  const auto ds = point_mass_data(64, 10);
  SacConfig cfg = tiny_config();
  cfg.train_steps = 0;
  Rng a(3), b(3);
  const auto r = train_sac_rnd(ds, nullptr, cfg, a);
  SacAgent fresh = SacAgent::create(6, 2, cfg, b);
  EXPECT_TRUE(r.log.empty());
  EXPECT_EQ(r.agent.step, 0);
  SacAgent trained = r.agent;
  auto p1 = trained.policy.parameters(), p2 = fresh.policy.parameters();
  for (std::size_t i = 0; i < p1.size(); ++i) EXPECT_TRUE(bit_equal(p1[i]->value, p2[i]->value));
  for (Index i = 0; i < 2; ++i) EXPECT_TRUE(trained.critics.critics()[i].same_parameters(fresh.critics.critics()[i]));
}

TEST(TrainSac, SameSeedSameLog) {
  const auto ds = point_mass_data(256, 11);
  Rng pre(1);
  auto model = small_rnd(ds, nets::FusionKind::Film, nets::Placement::PenultimateLayer, 50, pre);
  SacConfig cfg = tiny_config();
  cfg.alpha_actor = 1;
  cfg.alpha_critic = 0.1;
  Rng a(5), b(5);
  const auto r1 = train_sac_rnd(ds, &model, cfg, a);
  const auto r2 = train_sac_rnd(ds, &model, cfg, b);
  ASSERT_EQ(r1.log.size(), 50u);
  EXPECT_EQ(r1.log, r2.log);
  EXPECT_EQ(r1.log.back().step, 49);
  EXPECT_GT(r1.log.back().mean_policy_bonus, 0.0);
}

TEST(TrainSac, NullRndWithZeroAlphasIsPlainSac) {
  const auto ds = point_mass_data(256, 12);
  Rng pre(2);
  auto null_model = rnd::RndModel::null_model({6, 2, 8, 3, 4, nets::FusionKind::Film, nets::Placement::PenultimateLayer, false}, pre);
  SacConfig cfg = tiny_config();
  Rng a(6), b(6);
  const auto with_null = train_sac_rnd(ds, &null_model, cfg, a);
  const auto plain = train_sac_rnd(ds, nullptr, cfg, b);
  EXPECT_EQ(with_null.log, plain.log);
}

TEST(TrainSac, ContinueMatchesSingleRun) {
  const auto ds = point_mass_data(256, 13);
  SacConfig cfg = tiny_config();
  cfg.train_steps = 40;
  Rng a(7), b(7);
  const auto whole = train_sac_rnd(ds, nullptr, cfg, a);
  cfg.train_steps = 15;
  auto half = train_sac_rnd(ds, nullptr, cfg, b);
  continue_sac_rnd(ds, half.agent, nullptr, 40, b, half.log);
  EXPECT_EQ(whole.log, half.log);
}

TEST(TrainSac, NumericalAbortNamesStep) {
  const auto ds = point_mass_data(256, 14);
  SacConfig cfg = tiny_config();
  Rng rng(8);
  auto poison = [](const MetricRow& row, SacAgent& agent) {
    if (row.step == 3) agent.critics.critics()[0].parameters()[0]->value(0, 0) = std::nan("");
  };
  try {
    train_sac_rnd(ds, nullptr, cfg, rng, poison);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("training step 4"), std::string::npos) << e.what();
  }
}

TEST(TrainSac, DimensionMismatchRejected) {
  const auto ds = toy_data(8, 1);
  Rng rng(9);
  SacAgent agent = SacAgent::create(6, 2, tiny_config(), rng);
  std::vector<MetricRow> log;
  EXPECT_THROW(continue_sac_rnd(ds, agent, nullptr, 5, rng, log), DimensionError);
}

TEST(TrainSac, EntropySettlesNearTarget) {
  const auto ds = point_mass_data(5000, 15);
  SacConfig cfg;
  cfg.hidden_dim = 32;
  cfg.num_layers = 3;
  cfg.batch_size = 64;
  cfg.train_steps = 6000;
  cfg.beta_lr = 3e-3;
  Rng rng(10);
  const auto r = train_sac_rnd(ds, nullptr, cfg, rng);
  Scalar late = 0;
  for (std::size_t i = r.log.size() - 1000; i < r.log.size(); ++i) late += r.log[i].entropy;
  late /= 1000;
  EXPECT_NEAR(late, cfg.entropy_target(2), 0.5);
}

TEST(TrainBc, NullBonusDoesNotPullTowardData) {
  const auto ds = toy_data(128, 16);
  Rng pre(3);
  auto null_model = rnd::RndModel::null_model({4, 2, 8, 3, 4, nets::FusionKind::Film, nets::Placement::PenultimateLayer, false}, pre);
  BcConfig cfg;
  cfg.train_steps = 500;
  cfg.batch_size = 64;
  cfg.hidden_dim = 16;
  cfg.num_layers = 3;
  Rng rng(4);
  const auto r = train_bc_rnd(ds, null_model, cfg, rng);
  EXPECT_EQ(r.final_policy_bonus, 0.0);
  EXPECT_GT(r.final_action_mse, 0.9 * r.initial_action_mse);
}

TEST(TrainBc, FilmPriorMovesPolicyTowardData) {
  const auto ds = toy_data(256, 17);
  Rng rng(5);
  auto model = small_rnd(ds, nets::FusionKind::Film, nets::Placement::PenultimateLayer, 3000, rng);
  BcConfig cfg;
  cfg.train_steps = 1500;
  cfg.batch_size = 64;
  cfg.hidden_dim = 32;
  cfg.num_layers = 3;
  const auto r = train_bc_rnd(ds, model, cfg, rng);
  ASSERT_EQ(r.log.size(), 1500u);
  EXPECT_LT(r.final_action_mse, r.initial_action_mse);
}

TEST(TrainBc, RequiresFrozenRnd) {
  const auto ds = toy_data(8, 1);
  Rng rng(6);
  nets::NetSpec spec{4, 2, 8, 3, 4, nets::FusionKind::Concat, nets::Placement::FirstLayer, false};
  rnd::RndModel unfrozen(spec, spec, rng);
  EXPECT_THROW(train_bc_rnd(ds, unfrozen, BcConfig{}, rng), ContractViolation);
}
