#include "antix/experiments/checkpoint.hpp"

#include "antix/data/io.hpp"

#include <sstream>

namespace antix::experiments {

using nlohmann::json;

namespace {

std::string tensor_row(const std::string& name, const Matrix& m) {
  std::string out = "[" + json(name).dump() + "," + std::to_string(m.rows()) + "," + std::to_string(m.cols());
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) out += "," + data::format_number(m(i, j));
  return out + "]";
}

void add_params(Checkpoint& c, const std::string& prefix, const std::vector<Parameter*>& params) {
  for (const Parameter* p : params) c.tensors.emplace_back(prefix + p->name, p->value);
}

void load_params(const Checkpoint& c, const std::string& prefix, const std::vector<Parameter*>& params) {
  for (Parameter* p : params) {
    const Matrix& m = c.tensor(prefix + p->name);
    if (m.rows() != p->value.rows() || m.cols() != p->value.cols())
      throw ValidationError("checkpoint tensor '" + prefix + p->name + "' has shape " + shape_str(m) +
                            ", expected " + shape_str(p->value));
    p->value = m;
    p->zero_grad();
  }
}

void add_adam(Checkpoint& c, const std::string& prefix, const Adam& opt) {
  const AdamState& st = opt.state();
  for (std::size_t i = 0; i < st.first_moment.size(); ++i) {
    c.tensors.emplace_back(prefix + "/m/" + std::to_string(i), st.first_moment[i]);
    c.tensors.emplace_back(prefix + "/v/" + std::to_string(i), st.second_moment[i]);
  }
  c.spec["optimizer_steps"][prefix] = st.step_count;
}

void load_adam(const Checkpoint& c, const std::string& prefix, Adam& opt) {
  AdamState& st = opt.state();
  for (std::size_t i = 0; i < st.first_moment.size(); ++i) {
    st.first_moment[i] = c.tensor(prefix + "/m/" + std::to_string(i));
    st.second_moment[i] = c.tensor(prefix + "/v/" + std::to_string(i));
  }
  st.step_count = c.spec.at("optimizer_steps").at(prefix).get<std::int64_t>();
}

void expect_component(const Checkpoint& c, const std::string& name) {
  if (c.component != name)
    throw ValidationError("checkpoint holds component '" + c.component + "', expected '" + name + "'");
}

}  // namespace

const Matrix& Checkpoint::tensor(const std::string& name) const {
  for (const auto& [n, m] : tensors)
    if (n == name) return m;
  throw ValidationError("checkpoint has no tensor '" + name + "'");
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  json meta;
  meta["kind"] = "checkpoint";
  meta["version"] = 1;
  meta["component"] = ckpt.component;
  meta["spec"] = ckpt.spec;
  meta["rng"] = ckpt.rng_state;
  meta["step"] = ckpt.step;
  std::vector<std::string> rows;
  rows.reserve(ckpt.tensors.size());
  for (const auto& [name, m] : ckpt.tensors) rows.push_back(tensor_row(name, m));
  data::write_container(path, std::move(meta), rows);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  data::Container c = data::read_container(path);
  Checkpoint out;
  try {
    if (c.meta.at("kind").get<std::string>() != "checkpoint") throw ParseError("not a checkpoint file");
    out.component = c.meta.at("component").get<std::string>();
    out.spec = c.meta.at("spec");
    out.rng_state = c.meta.at("rng").get<std::string>();
    out.step = c.meta.at("step").get<std::int64_t>();
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ":1: bad checkpoint meta: " + e.what());
  }
  for (std::size_t k = 0; k < c.rows.size(); ++k) {
    const std::size_t line = k + 2;
    const json row = data::parse_row(c.rows[k], line);
    try {
      const auto rows = row.at(1).get<Index>();
      const auto cols = row.at(2).get<Index>();
      if (rows < 0 || cols < 0 || row.size() != static_cast<std::size_t>(3 + rows * cols))
        throw ParseError(path.string() + ":" + std::to_string(line) + ": tensor size does not match its shape");
      Matrix m(rows, cols);
      for (Index i = 0; i < rows * cols; ++i) m(i / cols, i % cols) = row[3 + i].get<Scalar>();
      out.tensors.emplace_back(row.at(0).get<std::string>(), std::move(m));
    } catch (const json::exception& e) {
      throw ParseError(path.string() + ":" + std::to_string(line) + ": " + e.what());
    }
  }
  return out;
}

json to_json(const nets::NetSpec& s) {
  return {{"s_dim", s.s_dim},
          {"a_dim", s.a_dim},
          {"hidden_dim", s.hidden_dim},
          {"num_layers", s.num_layers},
          {"out_dim", s.out_dim},
          {"fusion", nets::to_string(s.fusion)},
          {"placement", nets::to_string(s.placement)},
          {"use_layer_norm", s.use_layer_norm}};
}

nets::NetSpec net_spec_from_json(const json& j) {
  nets::NetSpec s;
  s.s_dim = j.at("s_dim").get<Index>();
  s.a_dim = j.at("a_dim").get<Index>();
  s.hidden_dim = j.at("hidden_dim").get<Index>();
  s.num_layers = j.at("num_layers").get<Index>();
  s.out_dim = j.at("out_dim").get<Index>();
  s.fusion = nets::parse_fusion_kind(j.at("fusion").get<std::string>());
  s.placement = nets::parse_placement(j.at("placement").get<std::string>());
  s.use_layer_norm = j.at("use_layer_norm").get<bool>();
  s.validate();
  return s;
}

json to_json(const sac::SacConfig& c) {
  json j = {{"gamma", c.gamma},           {"tau", c.tau},
            {"alpha_actor", c.alpha_actor}, {"alpha_critic", c.alpha_critic},
            {"batch_size", c.batch_size}, {"train_steps", c.train_steps},
            {"actor_lr", c.actor_lr},     {"critic_lr", c.critic_lr},
            {"beta_lr", c.beta_lr},       {"init_beta", c.init_beta},
            {"learn_beta", c.learn_beta}, {"num_critics", c.num_critics},
            {"hidden_dim", c.hidden_dim}, {"num_layers", c.num_layers}};
  j["target_entropy"] = c.target_entropy ? json(*c.target_entropy) : json(nullptr);
  return j;
}

sac::SacConfig sac_config_from_json(const json& j) {
  sac::SacConfig c;
  c.gamma = j.at("gamma").get<Scalar>();
  c.tau = j.at("tau").get<Scalar>();
  c.alpha_actor = j.at("alpha_actor").get<Scalar>();
  c.alpha_critic = j.at("alpha_critic").get<Scalar>();
  c.batch_size = j.at("batch_size").get<Index>();
  c.train_steps = j.at("train_steps").get<std::int64_t>();
  c.actor_lr = j.at("actor_lr").get<Scalar>();
  c.critic_lr = j.at("critic_lr").get<Scalar>();
  c.beta_lr = j.at("beta_lr").get<Scalar>();
  c.init_beta = j.at("init_beta").get<Scalar>();
  c.learn_beta = j.at("learn_beta").get<bool>();
  c.num_critics = j.at("num_critics").get<Index>();
  c.hidden_dim = j.at("hidden_dim").get<Index>();
  c.num_layers = j.at("num_layers").get<Index>();
  if (!j.at("target_entropy").is_null()) c.target_entropy = j.at("target_entropy").get<Scalar>();
  c.validate();
  return c;
}

std::string rng_state(const Rng& rng) {
  std::ostringstream os;
  os << rng;
  return os.str();
}

void restore_rng(Rng& rng, const std::string& state) {
  std::istringstream is(state);
  is >> rng;
  if (!is) throw ParseError("malformed rng state in checkpoint");
}

Checkpoint checkpoint_rnd(const rnd::RndModel& model) {
  Checkpoint c;
  c.component = "rnd";
  c.spec["predictor"] = to_json(model.predictor().spec());
  c.spec["prior"] = to_json(model.prior().spec());
  const auto& st = model.running_stat();
  c.spec["frozen"] = model.frozen();
  c.spec["stat_count"] = st.count;
  // Welford state goes through the tensor rows for exact round trips.
  c.tensors.emplace_back("stat", Matrix{{st.mean, st.m2}});
  auto& m = const_cast<rnd::RndModel&>(model);
  add_params(c, "predictor/", m.predictor().parameters());
  add_params(c, "prior/", m.prior().parameters());
  return c;
}

rnd::RndModel restore_rnd(const Checkpoint& c) {
  expect_component(c, "rnd");
  Rng scratch(0);
  rnd::RndModel m(net_spec_from_json(c.spec.at("predictor")), net_spec_from_json(c.spec.at("prior")), scratch);
  load_params(c, "predictor/", m.predictor().parameters());
  load_params(c, "prior/", m.prior().parameters());
  rnd::RunningStat st;
  st.count = c.spec.at("stat_count").get<std::int64_t>();
  const Matrix& s = c.tensor("stat");
  st.mean = s(0, 0);
  st.m2 = s(0, 1);
  m.set_state(st, c.spec.at("frozen").get<bool>());
  return m;
}

Checkpoint checkpoint_policy(sac::Policy& policy, const sac::TemperatureState& temp) {
  Checkpoint c;
  c.component = "policy";
  c.spec = {{"s_dim", policy.s_dim()},
            {"a_dim", policy.a_dim()},
            {"hidden_dim", policy.hidden_dim()},
            {"num_layers", policy.num_layers()}};
  add_params(c, "", policy.parameters());
  c.tensors.emplace_back("log_beta", temp.log_beta.value);
  return c;
}

sac::Policy restore_policy(const Checkpoint& c, sac::TemperatureState* temp) {
  if (c.component != "policy" && c.component != "sac_agent")
    throw ValidationError("checkpoint holds component '" + c.component + "', expected a policy");
  const json& s = c.component == "policy" ? c.spec : c.spec.at("policy");
  Rng scratch(0);
  sac::Policy p = sac::Policy::build(s.at("s_dim").get<Index>(), s.at("a_dim").get<Index>(),
                                     s.at("hidden_dim").get<Index>(), s.at("num_layers").get<Index>(), scratch);
  load_params(c, "", p.parameters());
  if (temp != nullptr) temp->log_beta.value = c.tensor("log_beta");
  return p;
}

Checkpoint checkpoint_agent(sac::SacAgent& agent, const Rng& rng) {
  Checkpoint c;
  c.component = "sac_agent";
  c.step = agent.step;
  c.rng_state = rng_state(rng);
  c.spec["config"] = to_json(agent.config);
  c.spec["policy"] = {{"s_dim", agent.s_dim()},
                      {"a_dim", agent.a_dim()},
                      {"hidden_dim", agent.policy.hidden_dim()},
                      {"num_layers", agent.policy.num_layers()}};
  add_params(c, "", agent.policy.parameters());
  c.tensors.emplace_back("log_beta", agent.temperature.log_beta.value);
  for (Index i = 0; i < agent.critics.size(); ++i) {
    add_params(c, "critic" + std::to_string(i) + "/", agent.critics.critics()[i].parameters());
    add_params(c, "target" + std::to_string(i) + "/", agent.critics.targets()[i].parameters());
    add_adam(c, "critic_opt" + std::to_string(i), agent.critic_opts[i]);
  }
  add_adam(c, "actor_opt", agent.actor_opt);
  add_adam(c, "beta_opt", agent.beta_opt);
  return c;
}

sac::SacAgent restore_agent(const Checkpoint& c, Rng* rng) {
  expect_component(c, "sac_agent");
  const sac::SacConfig cfg = sac_config_from_json(c.spec.at("config"));
  const json& ps = c.spec.at("policy");
  Rng scratch(0);
  sac::SacAgent agent = sac::SacAgent::create(ps.at("s_dim").get<Index>(), ps.at("a_dim").get<Index>(), cfg, scratch);
  load_params(c, "", agent.policy.parameters());
  agent.temperature.log_beta.value = c.tensor("log_beta");
  for (Index i = 0; i < agent.critics.size(); ++i) {
    load_params(c, "critic" + std::to_string(i) + "/", agent.critics.critics()[i].parameters());
    load_params(c, "target" + std::to_string(i) + "/", agent.critics.targets()[i].parameters());
    load_adam(c, "critic_opt" + std::to_string(i), agent.critic_opts[i]);
  }
  load_adam(c, "actor_opt", agent.actor_opt);
  load_adam(c, "beta_opt", agent.beta_opt);
  agent.step = c.step;
  if (rng != nullptr) restore_rng(*rng, c.rng_state);
  return agent;
}

}  // namespace antix::experiments
