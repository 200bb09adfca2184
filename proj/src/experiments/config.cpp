#include "antix/experiments/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace antix::experiments {

namespace {

enum class Kind { Real, Positive, NonNegative, UnitInterval, Count, PositiveCount, Flag, Text, RealList, VariantSpec, VariantList, Choice };

struct KeySpec {
  std::string key;
  std::string value;
  Kind kind;
  std::vector<std::string> choices{};
};

const std::vector<KeySpec>& key_specs() {
  static const std::vector<KeySpec> specs = {
      {"seed", "0", Kind::Count},
      // data
      {"dataset", "point_mass", Kind::Choice, {"point_mass", "toy_corner", "file"}},
      {"dataset_path", "", Kind::Text},
      {"behavior", "noisy_expert", Kind::Choice, {"scripted", "noisy_expert", "random"}},
      {"behavior_sigma", "0.3", Kind::NonNegative},
      {"n_transitions", "50000", Kind::PositiveCount},
      {"toy_n_per_state", "4096", Kind::PositiveCount},
      {"toy_half_width", "0.2", Kind::Positive},
      {"env_horizon", "100", Kind::PositiveCount},
      {"env_goal_radius", "0.05", Kind::Positive},
      // SAC
      {"gamma", "0.99", Kind::UnitInterval},
      {"tau", "0.005", Kind::UnitInterval},
      {"alpha_actor", "1", Kind::NonNegative},
      {"alpha_critic", "0.1", Kind::NonNegative},
      {"target_entropy", "auto", Kind::Text},
      {"batch_size", "256", Kind::PositiveCount},
      {"train_steps", "100000", Kind::Count},
      {"actor_lr", "0.001", Kind::Positive},
      {"critic_lr", "0.001", Kind::Positive},
      {"beta_lr", "0.001", Kind::Positive},
      {"init_beta", "1", Kind::Positive},
      {"learn_beta", "true", Kind::Flag},
      {"num_critics", "2", Kind::PositiveCount},
      {"hidden_dim", "256", Kind::PositiveCount},
      {"num_layers", "4", Kind::PositiveCount},
      {"eval_interval", "10000", Kind::Count},
      {"eval_episodes", "10", Kind::PositiveCount},
      {"eval_seed", "1000003", Kind::Count},
      {"plain_sac", "false", Kind::Flag},
      {"resume_from", "", Kind::Text},
      {"rnd_checkpoint", "", Kind::Text},
      // RND
      {"rnd_steps", "20000", Kind::Count},
      {"rnd_batch_size", "256", Kind::PositiveCount},
      {"rnd_lr", "0.001", Kind::Positive},
      {"rnd_hidden_dim", "256", Kind::PositiveCount},
      {"rnd_num_layers", "4", Kind::PositiveCount},
      {"rnd_embedding_dim", "32", Kind::PositiveCount},
      {"rnd_layer_norm", "false", Kind::Flag},
      {"predictor", "bilinear:first", Kind::VariantSpec},
      {"prior", "film:penultimate", Kind::VariantSpec},
      // BC-RND
      {"bc_steps", "20000", Kind::Count},
      {"bc_batch_size", "256", Kind::PositiveCount},
      {"bc_lr", "0.001", Kind::Positive},
      {"bc_init_beta", "1", Kind::Positive},
      {"bc_learn_beta", "true", Kind::Flag},
      {"bc_eval_rows", "0", Kind::Count},
      // runners
      {"sigma_grid", "0.01,0.1,0.3,1.0", Kind::RealList},
      {"histogram_bins", "20", Kind::PositiveCount},
      {"ensemble_size", "0", Kind::Count},
      {"ensemble_steps", "20000", Kind::Count},
      {"prior_sweep", "film:penultimate", Kind::VariantList},
      {"field_predictor", "concat", Kind::VariantSpec},
      {"field_priors", "concat,film:penultimate", Kind::VariantList},
      {"grid_resolution", "21", Kind::PositiveCount},
      {"ablation_predictors",
       "concat,gating:first,gating:last,gating:all,bilinear:first,bilinear:last,bilinear:all,bilinear_full:first,"
       "bilinear_full:last,bilinear_full:all,film:penultimate,film:last,film:all",
       Kind::VariantList},
      {"ablation_priors",
       "concat,gating:first,gating:last,gating:all,bilinear:first,bilinear:last,bilinear:all,bilinear_full:first,"
       "bilinear_full:last,bilinear_full:all,film:penultimate,film:last,film:all",
       Kind::VariantList},
  };
  return specs;
}

const KeySpec& spec_for(const std::string& key) {
  for (const KeySpec& s : key_specs())
    if (s.key == key) return s;
  throw ValidationError("unknown config key '" + key + "'");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

Scalar parse_real(const std::string& key, const std::string& text) {
  Scalar x = 0;
  const char* end = text.data() + text.size();
  auto [p, ec] = std::from_chars(text.data(), end, x);
  if (ec != std::errc() || p != end || text.empty())
    throw ValidationError("config key '" + key + "': '" + text + "' is not a number");
  return x;
}

std::int64_t parse_int(const std::string& key, const std::string& text) {
  std::int64_t x = 0;
  const char* end = text.data() + text.size();
  auto [p, ec] = std::from_chars(text.data(), end, x);
  if (ec != std::errc() || p != end || text.empty())
    throw ValidationError("config key '" + key + "': '" + text + "' is not an integer");
  return x;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void check_value(const KeySpec& spec, const std::string& v) {
  const std::string& k = spec.key;
  switch (spec.kind) {
    case Kind::Real:
      parse_real(k, v);
      break;
    case Kind::Positive:
      if (!(parse_real(k, v) > 0)) throw ValidationError("config key '" + k + "' must be > 0, got " + v);
      break;
    case Kind::NonNegative:
      if (!(parse_real(k, v) >= 0)) throw ValidationError("config key '" + k + "' must be >= 0, got " + v);
      break;
    case Kind::UnitInterval: {
      const Scalar x = parse_real(k, v);
      if (!(x > 0 && x <= 1)) throw ValidationError("config key '" + k + "' must lie in (0, 1], got " + v);
      break;
    }
    case Kind::Count:
      if (v.empty() || v[0] == '-') throw ValidationError("config key '" + k + "' must be a non-negative integer, got " + v);
      if (k == "seed" || k == "eval_seed") {
        std::uint64_t x = 0;
        auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
        if (ec != std::errc() || p != v.data() + v.size())
          throw ValidationError("config key '" + k + "': '" + v + "' is not an unsigned integer");
      } else {
        parse_int(k, v);
      }
      break;
    case Kind::PositiveCount:
      if (parse_int(k, v) < 1) throw ValidationError("config key '" + k + "' must be >= 1, got " + v);
      break;
    case Kind::Flag:
      if (v != "true" && v != "false") throw ValidationError("config key '" + k + "' must be true or false, got " + v);
      break;
    case Kind::Text:
      break;
    case Kind::RealList:
      for (const auto& item : split(v, ',')) parse_real(k, item);
      break;
    case Kind::VariantSpec:
      Variant::parse(v);
      break;
    case Kind::VariantList:
      for (const auto& item : split(v, ',')) Variant::parse(item);
      break;
    case Kind::Choice:
      if (std::find(spec.choices.begin(), spec.choices.end(), v) == spec.choices.end())
        throw ValidationError("config key '" + k + "': unknown value '" + v + "'");
      break;
  }
}

}  // namespace

std::string Variant::label() const {
  if (fusion == nets::FusionKind::Concat) return "concat";
  return std::string(nets::to_string(fusion)) + ":" + std::string(nets::to_string(placement));
}

Variant Variant::parse(const std::string& text) {
  Variant v;
  const auto colon = text.find(':');
  v.fusion = nets::parse_fusion_kind(trim(text.substr(0, colon)));
  if (colon != std::string::npos)
    v.placement = nets::parse_placement(trim(text.substr(colon + 1)));
  else if (v.fusion == nets::FusionKind::Film)
    v.placement = nets::Placement::PenultimateLayer;
  if (v.fusion == nets::FusionKind::Film && v.placement == nets::Placement::FirstLayer)
    throw ValidationError("variant '" + text + "': FiLM cannot condition the first layer");
  return v;
}

const std::vector<std::pair<std::string, std::string>>& ExperimentConfig::defaults() {
  static const auto pairs = [] {
    std::vector<std::pair<std::string, std::string>> out;
    for (const KeySpec& s : key_specs()) out.emplace_back(s.key, s.value);
    return out;
  }();
  return pairs;
}

ExperimentConfig::ExperimentConfig() {
  for (const auto& [k, v] : defaults()) values_[k] = v;
}

ExperimentConfig ExperimentConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  ExperimentConfig cfg;
  cfg.merge_text(ss.str(), path.string());
  return cfg;
}

void ExperimentConfig::merge_text(const std::string& text, const std::string& origin) {
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    try {
      set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ValidationError& e) {
      throw ValidationError(origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  const KeySpec& spec = spec_for(key);
  check_value(spec, value);
  values_[key] = value;
}

void ExperimentConfig::set_assignment(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ValidationError("--set expects key=value, got '" + assignment + "'");
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

const std::string& ExperimentConfig::raw(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ValidationError("unknown config key '" + key + "'");
  return it->second;
}

Scalar ExperimentConfig::real(const std::string& key) const { return parse_real(key, raw(key)); }
std::int64_t ExperimentConfig::integer(const std::string& key) const { return parse_int(key, raw(key)); }

std::uint64_t ExperimentConfig::seed() const {
  const std::string& v = raw("seed");
  std::uint64_t x = 0;
  std::from_chars(v.data(), v.data() + v.size(), x);
  return x;
}

bool ExperimentConfig::flag(const std::string& key) const { return raw(key) == "true"; }

std::vector<Scalar> ExperimentConfig::real_list(const std::string& key) const {
  std::vector<Scalar> out;
  for (const auto& item : split(raw(key), ',')) out.push_back(parse_real(key, item));
  return out;
}

std::vector<std::string> ExperimentConfig::string_list(const std::string& key) const { return split(raw(key), ','); }

std::vector<Variant> ExperimentConfig::variant_list(const std::string& key) const {
  std::vector<Variant> out;
  for (const auto& item : split(raw(key), ',')) out.push_back(Variant::parse(item));
  return out;
}

void ExperimentConfig::validate() const {
  for (const KeySpec& s : key_specs()) check_value(s, raw(s.key));
  if (raw("target_entropy") != "auto") parse_real("target_entropy", raw("target_entropy"));
  if (integer("num_critics") < 2) throw ValidationError("config key 'num_critics' must be >= 2");
  if (integer("num_layers") < 2 || integer("rnd_num_layers") < 2)
    throw ValidationError("num_layers and rnd_num_layers must be >= 2");
  if (raw("dataset") == "file" && raw("dataset_path").empty())
    throw ValidationError("dataset = file requires dataset_path");
  if (integer("ensemble_size") == 1) throw ValidationError("ensemble_size must be 0 (off) or >= 2");
  for (Scalar s : real_list("sigma_grid"))
    if (!(s >= 0)) throw ValidationError("sigma_grid entries must be >= 0");
}

std::string ExperimentConfig::echo() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

sac::SacConfig ExperimentConfig::sac() const {
  sac::SacConfig c;
  c.gamma = real("gamma");
  c.tau = real("tau");
  c.alpha_actor = real("alpha_actor");
  c.alpha_critic = real("alpha_critic");
  if (raw("target_entropy") != "auto") c.target_entropy = real("target_entropy");
  c.batch_size = integer("batch_size");
  c.train_steps = integer("train_steps");
  c.actor_lr = real("actor_lr");
  c.critic_lr = real("critic_lr");
  c.beta_lr = real("beta_lr");
  c.init_beta = real("init_beta");
  c.learn_beta = flag("learn_beta");
  c.num_critics = integer("num_critics");
  c.hidden_dim = integer("hidden_dim");
  c.num_layers = integer("num_layers");
  c.validate();
  return c;
}

sac::BcConfig ExperimentConfig::bc() const {
  sac::BcConfig c;
  c.train_steps = integer("bc_steps");
  c.batch_size = integer("bc_batch_size");
  c.lr = real("bc_lr");
  c.beta_lr = real("beta_lr");
  c.init_beta = real("bc_init_beta");
  c.learn_beta = flag("bc_learn_beta");
  if (raw("target_entropy") != "auto") c.target_entropy = real("target_entropy");
  c.hidden_dim = integer("hidden_dim");
  c.num_layers = integer("num_layers");
  c.eval_rows = integer("bc_eval_rows");
  c.validate();
  return c;
}

rnd::PretrainConfig ExperimentConfig::pretrain() const {
  rnd::PretrainConfig c;
  c.steps = integer("rnd_steps");
  c.batch_size = integer("rnd_batch_size");
  c.adam.lr = real("rnd_lr");
  return c;
}

nets::NetSpec ExperimentConfig::rnd_spec(Index s_dim, Index a_dim, const Variant& v) const {
  nets::NetSpec s;
  s.s_dim = s_dim;
  s.a_dim = a_dim;
  s.hidden_dim = integer("rnd_hidden_dim");
  s.num_layers = integer("rnd_num_layers");
  s.out_dim = integer("rnd_embedding_dim");
  s.fusion = v.fusion;
  s.placement = v.placement;
  s.use_layer_norm = flag("rnd_layer_norm");
  s.validate();
  return s;
}

Variant ExperimentConfig::predictor() const { return Variant::parse(raw("predictor")); }
Variant ExperimentConfig::prior() const { return Variant::parse(raw("prior")); }

data::ToyCornerConfig ExperimentConfig::toy() const {
  data::ToyCornerConfig c;
  c.n_per_state = integer("toy_n_per_state");
  c.half_width = real("toy_half_width");
  c.validate();
  return c;
}

data::PointMassEnv ExperimentConfig::env() const {
  data::PointMassEnv e;
  e.horizon = static_cast<int>(integer("env_horizon"));
  e.goal_radius = real("env_goal_radius");
  return e;
}

data::Behavior ExperimentConfig::behavior() const { return data::Behavior::parse(raw("behavior"), real("behavior_sigma")); }

}  // namespace antix::experiments
