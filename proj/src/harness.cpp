#include "pref/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <limits>
#include <mutex>
#include <optional>
#include <thread>

namespace pref {

namespace {

constexpr double kTol = 1e-9;

[[noreturn]] void fail_field(const std::string& field, const std::string& what) {
  throw ConfigError("config." + field + ": " + what);
}

void require_known_fields(const nlohmann::json& j, const std::string& scope,
                          std::initializer_list<const char*> known) {
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || item.key() == k;
    if (!ok) {
      throw ConfigError("config" + scope + ": unknown field \"" + item.key() + "\"");
    }
  }
}

const nlohmann::json& get_object(const nlohmann::json& j, const std::string& field) {
  const auto& v = j.at(field);
  if (!v.is_object()) fail_field(field, "expected an object");
  return v;
}

double get_double(const nlohmann::json& j, const std::string& field, double fallback) {
  if (!j.contains(field)) return fallback;
  const auto& v = j.at(field);
  if (!v.is_number()) fail_field(field, "expected a number");
  return v.get<double>();
}

long long get_integer(const nlohmann::json& j, const std::string& field, long long fallback) {
  if (!j.contains(field)) return fallback;
  const auto& v = j.at(field);
  if (!v.is_number_integer()) fail_field(field, "expected an integer");
  return v.get<long long>();
}

int get_int(const nlohmann::json& j, const std::string& field, int fallback) {
  long long v = get_integer(j, field, fallback);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    fail_field(field, "out of range");
  }
  return static_cast<int>(v);
}

bool get_bool(const nlohmann::json& j, const std::string& field, bool fallback) {
  if (!j.contains(field)) return fallback;
  const auto& v = j.at(field);
  if (!v.is_boolean()) fail_field(field, "expected a boolean");
  return v.get<bool>();
}

std::uint64_t get_seed(const nlohmann::json& j, const std::string& field,
                       std::uint64_t fallback) {
  if (!j.contains(field)) return fallback;
  const auto& v = j.at(field);
  const bool ok = v.is_number_unsigned() ||
                  (v.is_number_integer() && v.get<std::int64_t>() >= 0);
  if (!ok) fail_field(field, "expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

OracleConfig get_oracle(const nlohmann::json& j) {
  OracleConfig cfg;
  if (!j.contains("oracle")) return cfg;
  const auto& o = get_object(j, "oracle");
  require_known_fields(o, ".oracle", {"eta", "constant"});
  if (o.contains("eta")) {
    cfg.eta = get_double(o, "eta", 0.0);
    if (*cfg.eta < 0.0) fail_field("oracle.eta", "must be >= 0");
  }
  if (o.contains("constant")) {
    cfg.constant = get_double(o, "constant", 0.0);
    if (!(*cfg.constant > 0.0)) fail_field("oracle.constant", "must be > 0");
  }
  return cfg;
}

void append_g9(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  out += buf;
}

// Per-round checks shared by the bandit and the stacked-instance runs. Every
// check throws on violation, so the counters tally evaluated-and-passed
// rounds only.
void check_round_invariants(const FunctionClass& cls, int truth_index, double instance_gap,
                            const CbParams& params, int x, const RoundDecision& d,
                            int lambda_prev, bool truth_in_version, InvariantCounts& counts,
                            const std::string& where) {
  if (d.lambda < lambda_prev) {
    throw InvariantError("lambda switched back to 0 at " + where);
  }
  ++counts.lambda_monotone;
  const RewardPreferenceFunction& truth = cls.members[static_cast<std::size_t>(truth_index)];
  const int opt = best_arm(truth, x);
  if (d.queried) {
    if (truth_in_version) {
      for (int a : d.candidate_arms) {
        if (truth.margin(x, opt, a) > d.width + kTol) {
          throw InvariantError("width fails to dominate the candidate regret at " + where);
        }
      }
      ++counts.width_domination;
      if (d.width < instance_gap - kTol) {
        throw InvariantError("width fell below the instance gap at " + where);
      }
      ++counts.gap_width;
    }
    if (d.lambda == 1) {
      const int A = params.A;
      double regret = 0.0;
      double squared_error = 0.0;
      for (int a = 0; a < A; ++a) {
        regret += d.distribution[a] * truth.margin(x, opt, a);
        for (int b = 0; b < A; ++b) {
          double diff = (d.mean_rewards[a] - d.mean_rewards[b]) - truth.margin(x, a, b);
          diff *= diff;
          squared_error += d.distribution[a] * d.distribution[b] * diff;
        }
      }
      if (regret > params.gamma * squared_error + A / params.gamma + kTol) {
        throw InvariantError("igw regret inequality violated at " + where);
      }
      ++counts.igw_inequality;
      if (params.gamma >= 2.0 * A) {
        IgwCheck check =
            igw_constraint_check(d.distribution, d.mean_rewards, params.gamma, d.candidate_arms);
        if (!check.ok) {
          throw InvariantError("igw program constraint violated at " + where + " (arm " +
                               std::to_string(check.offending_arm) + ")");
        }
        ++counts.igw_feasibility;
      }
    }
  } else if (truth_in_version) {
    if (d.a != opt) {
      throw InvariantError("unqueried round played a non-optimal arm at " + where);
    }
    ++counts.query_gating;
  }
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

}  // namespace

std::string round_csv_header() {
  return "t,Z_t,lambda_t,w_t,a_t,b_t,regret_increment,cum_regret,cum_queries,"
         "oracle_cum_loss,version_space_size\n";
}

std::string round_csv_line(const RoundRecord& r) {
  std::string out;
  out += std::to_string(r.t);
  out += ',';
  out += std::to_string(r.z);
  out += ',';
  out += std::to_string(r.lambda);
  out += ',';
  append_g9(out, r.w);
  out += ',';
  out += std::to_string(r.a);
  out += ',';
  out += std::to_string(r.b);
  out += ',';
  append_g9(out, r.regret_increment);
  out += ',';
  append_g9(out, r.cum_regret);
  out += ',';
  out += std::to_string(r.cum_queries);
  out += ',';
  append_g9(out, r.oracle_cum_loss);
  out += ',';
  out += std::to_string(r.version_space_size);
  out += '\n';
  return out;
}

std::string episode_csv_header() {
  return "episode,regret_increment,cum_regret,cum_queries,adv_increment\n";
}

std::string episode_csv_line(const EpisodeRecord& r) {
  std::string out;
  out += std::to_string(r.episode);
  out += ',';
  append_g9(out, r.regret_increment);
  out += ',';
  append_g9(out, r.cum_regret);
  out += ',';
  out += std::to_string(r.cum_queries);
  out += ',';
  append_g9(out, r.adv_increment);
  out += '\n';
  return out;
}

nlohmann::json InvariantCounts::to_json() const {
  return {{"width_domination", width_domination}, {"gap_width", gap_width},
          {"igw_inequality", igw_inequality},     {"igw_feasibility", igw_feasibility},
          {"lambda_monotone", lambda_monotone},   {"query_gating", query_gating}};
}

CbRunConfig CbRunConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  require_known_fields(j, "", {"seed", "horizon", "delta", "check_invariants", "gap_epsilon",
                               "checkpoints", "oracle", "generator", "instance",
                               "instance_seed"});
  CbRunConfig cfg;
  cfg.seed = get_seed(j, "seed", 0);
  if (j.contains("horizon")) {
    cfg.horizon = get_int(j, "horizon", 0);
    if (*cfg.horizon < 0) fail_field("horizon", "must be >= 0");
  }
  cfg.delta = get_double(j, "delta", cfg.delta);
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) fail_field("delta", "must lie in (0,1)");
  cfg.check_invariants = get_bool(j, "check_invariants", false);
  if (j.contains("gap_epsilon")) {
    cfg.gap_epsilon = get_double(j, "gap_epsilon", 0.0);
    if (*cfg.gap_epsilon < 0.0) fail_field("gap_epsilon", "must be >= 0");
  }
  if (j.contains("checkpoints")) {
    const auto& arr = j.at("checkpoints");
    if (!arr.is_array()) fail_field("checkpoints", "expected an integer list");
    for (const auto& el : arr) {
      if (!el.is_number_integer()) fail_field("checkpoints", "expected an integer list");
      long long t = el.get<long long>();
      if (t < 1) fail_field("checkpoints", "rounds are 1-based");
      cfg.checkpoints.push_back(static_cast<int>(t));
    }
    std::sort(cfg.checkpoints.begin(), cfg.checkpoints.end());
    cfg.checkpoints.erase(std::unique(cfg.checkpoints.begin(), cfg.checkpoints.end()),
                          cfg.checkpoints.end());
  }
  cfg.oracle = get_oracle(j);
  const bool has_generator = j.contains("generator");
  const bool has_instance = j.contains("instance");
  if (has_generator == has_instance) {
    throw ConfigError("config: exactly one of generator/instance is required");
  }
  if (has_generator) {
    if (j.contains("instance_seed")) cfg.instance_seed = get_seed(j, "instance_seed", 0);
    try {
      cfg.generator = generator_from_json(j.at("generator"));
    } catch (const std::exception& e) {
      fail_field("generator", e.what());
    }
  } else {
    if (j.contains("instance_seed")) {
      fail_field("instance_seed", "only meaningful with a generator");
    }
    try {
      cfg.instance = CbInstance::from_json(j.at("instance"));
    } catch (const std::exception& e) {
      fail_field("instance", e.what());
    }
  }
  return cfg;
}

CbRunOutput run_cb(const nlohmann::json& config) {
  CbRunConfig cfg = CbRunConfig::from_json(config);
  CbInstance instance;
  if (cfg.generator) {
    Rng gen(derive_seed(cfg.instance_seed ? *cfg.instance_seed : cfg.seed, "instance-gen"));
    try {
      instance = generate_instance(*cfg.generator, gen);
    } catch (const std::invalid_argument& e) {
      fail_field("generator", e.what());
    }
  } else {
    instance = std::move(*cfg.instance);
  }
  const int T = cfg.horizon ? *cfg.horizon : instance.horizon;
  const int A = instance.cls.num_actions;
  const int X = instance.cls.num_contexts;
  if (!cfg.checkpoints.empty() && cfg.checkpoints.back() > T) {
    fail_field("checkpoints", "round " + std::to_string(cfg.checkpoints.back()) +
                                  " is beyond the horizon");
  }
  if (instance.schedule.kind == ScheduleKind::Explicit &&
      static_cast<int>(instance.schedule.order.size()) < T) {
    fail_field("instance", "explicit schedule shorter than the horizon");
  }

  const double instance_gap = gap(instance);
  CbRunOutput out;
  out.rounds_csv = round_csv_header();
  nlohmann::json& summary = out.summary;
  summary["config"] = config;
  summary["seed"] = cfg.seed;
  InvariantCounts counts;
  nlohmann::json params_json = {{"T", T},
                                {"A", A},
                                {"class_size", static_cast<int>(instance.cls.members.size())},
                                {"gap", instance_gap}};

  if (T == 0) {
    summary["final_cum_regret"] = 0.0;
    summary["final_cum_queries"] = 0;
    summary["realizability_held"] = true;
    summary["invariant_checks"] = counts.to_json();
    summary["params"] = params_json;
    if (cfg.gap_epsilon) summary["low_gap_rounds"] = 0;
    if (!cfg.checkpoints.empty()) summary["checkpoints"] = nlohmann::json::array();
    return out;
  }

  CbParams params;
  std::optional<CbLearner> learner;
  try {
    const double upsilon =
        upsilon_bound(static_cast<int>(instance.cls.members.size()), instance.link, cfg.oracle);
    params = CbParams::make(upsilon, instance.link.alpha, cfg.delta, T, A);
    learner.emplace(params, instance.cls, instance.link, cfg.oracle,
                    derive_seed(cfg.seed, "algorithm", 0));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  Rng feedback(derive_seed(cfg.seed, "feedback", 0));
  ScheduleCursor cursor(instance.schedule, X, derive_seed(cfg.seed, "contexts"));
  std::vector<PublicRound> public_history;
  public_history.reserve(static_cast<std::size_t>(T));
  std::vector<int> contexts;
  contexts.reserve(static_cast<std::size_t>(T));

  bool realizability_held = true;
  double cum_regret = 0.0;
  long cum_queries = 0;
  int lambda_prev = 0;
  auto checkpoint_it = cfg.checkpoints.begin();
  nlohmann::json checkpoint_rows = nlohmann::json::array();

  for (int t = 1; t <= T; ++t) {
    const int x = cursor.next(public_history);
    RoundDecision d = learner->act(x);
    const bool truth_in =
        std::binary_search(d.version.begin(), d.version.end(), instance.truth_index);
    realizability_held = realizability_held && truth_in;
    if (d.queried) {
      int y = sample_preference(instance, x, d.a, d.b, feedback);
      learner->observe(x, d, y);
    } else {
      learner->advance(d);
    }
    if (cfg.check_invariants) {
      check_round_invariants(instance.cls, instance.truth_index, instance_gap, params, x, d,
                             lambda_prev, truth_in, counts, "round " + std::to_string(t));
    }
    lambda_prev = d.lambda;
    const double increment = regret_increment(instance, x, d.a, d.b);
    cum_regret += increment;
    cum_queries += d.queried;

    RoundRecord row;
    row.t = t;
    row.z = d.queried;
    row.lambda = d.lambda;
    row.w = d.width;
    row.a = d.a;
    row.b = d.b;
    row.regret_increment = increment;
    row.cum_regret = cum_regret;
    row.cum_queries = cum_queries;
    row.oracle_cum_loss = learner->oracle().cumulative_loss();
    row.version_space_size = static_cast<int>(d.version.size());
    out.rounds_csv += round_csv_line(row);

    contexts.push_back(x);
    public_history.push_back({x, d.a, d.b, d.queried == 1});
    if (checkpoint_it != cfg.checkpoints.end() && *checkpoint_it == t) {
      checkpoint_rows.push_back(
          {{"t", t}, {"cum_regret", cum_regret}, {"cum_queries", cum_queries}});
      ++checkpoint_it;
    }
  }

  params_json["beta"] = params.beta;
  params_json["gamma"] = params.gamma;
  summary["final_cum_regret"] = cum_regret;
  summary["final_cum_queries"] = cum_queries;
  summary["realizability_held"] = realizability_held;
  summary["invariant_checks"] = counts.to_json();
  summary["params"] = params_json;
  if (cfg.gap_epsilon) {
    summary["low_gap_rounds"] = context_gap_count(instance, contexts, *cfg.gap_epsilon);
  }
  if (!cfg.checkpoints.empty()) summary["checkpoints"] = checkpoint_rows;
  return out;
}

IlRunConfig IlRunConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  require_known_fields(j, "",
                       {"seed", "episodes", "delta", "link", "check_invariants",
                        "dump_step_logs", "oracle", "mdp", "chain", "classes",
                        "class_generator"});
  IlRunConfig cfg;
  cfg.seed = get_seed(j, "seed", 0);
  if (!j.contains("episodes")) fail_field("episodes", "required");
  cfg.episodes = get_int(j, "episodes", 0);
  if (cfg.episodes < 0) fail_field("episodes", "must be >= 0");
  cfg.delta = get_double(j, "delta", cfg.delta);
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) fail_field("delta", "must lie in (0,1)");
  if (j.contains("link")) {
    const auto& v = j.at("link");
    if (!v.is_string()) fail_field("link", "expected a string");
    try {
      cfg.link = parse_link(v.get<std::string>());
    } catch (const std::invalid_argument& e) {
      fail_field("link", e.what());
    }
  }
  cfg.check_invariants = get_bool(j, "check_invariants", false);
  cfg.dump_step_logs = get_bool(j, "dump_step_logs", false);
  cfg.oracle = get_oracle(j);

  const bool has_mdp = j.contains("mdp");
  const bool has_chain = j.contains("chain");
  if (has_mdp == has_chain) {
    throw ConfigError("config: exactly one of mdp/chain is required");
  }
  PolicyTable expert;
  if (has_mdp) {
    try {
      auto [mdp, policy] = mdp_from_json(j.at("mdp"));
      cfg.mdp = std::move(mdp);
      expert = std::move(policy);
    } catch (const std::exception& e) {
      fail_field("mdp", e.what());
    }
  } else {
    const auto& c = get_object(j, "chain");
    require_known_fields(c, ".chain", {"num_states", "horizon", "s_lo", "s_hi", "bonus",
                                       "p_slip", "expert_greedy_p"});
    std::vector<double> bonus = {0.0, 0.1, 0.25};
    if (c.contains("bonus")) {
      const auto& arr = c.at("bonus");
      if (!arr.is_array()) fail_field("chain.bonus", "expected a number list");
      bonus.clear();
      for (const auto& el : arr) {
        if (!el.is_number()) fail_field("chain.bonus", "expected a number list");
        bonus.push_back(el.get<double>());
      }
    }
    const double greedy_p = get_double(c, "expert_greedy_p", 0.7);
    if (!(greedy_p > 0.0 && greedy_p <= 1.0)) {
      fail_field("chain.expert_greedy_p", "must lie in (0,1]");
    }
    try {
      cfg.mdp = make_chain(get_int(c, "num_states", 6), get_int(c, "horizon", 4),
                           get_double(c, "s_lo", 0.1), get_double(c, "s_hi", 0.55), bonus,
                           get_double(c, "p_slip", 0.1));
      expert = soft_greedy_expert(cfg.mdp, greedy_p);
    } catch (const std::exception& e) {
      fail_field("chain", e.what());
    }
  }
  cfg.model = expert_q(cfg.mdp, expert);

  const bool has_classes = j.contains("classes");
  const bool has_generator = j.contains("class_generator");
  if (has_classes == has_generator) {
    throw ConfigError("config: exactly one of classes/class_generator is required");
  }
  if (has_classes) {
    const auto& arr = j.at("classes");
    if (!arr.is_array()) fail_field("classes", "expected a list of classes");
    for (std::size_t h = 0; h < arr.size(); ++h) {
      try {
        cfg.classes.push_back(FunctionClass::from_json(arr[h]));
      } catch (const std::exception& e) {
        fail_field("classes[" + std::to_string(h) + "]", e.what());
      }
    }
    if (static_cast<int>(cfg.classes.size()) != cfg.mdp.horizon) {
      fail_field("classes", "need one class per step");
    }
  } else {
    const auto& g = get_object(j, "class_generator");
    require_known_fields(g, ".class_generator",
                         {"seed", "class_size", "saturated_flips", "noise", "repair"});
    if (!g.contains("seed")) fail_field("class_generator.seed", "required");
    IlGeneratorConfig gen;
    gen.class_size = get_int(g, "class_size", gen.class_size);
    gen.saturated_flips = get_int(g, "saturated_flips", gen.saturated_flips);
    gen.noise = get_double(g, "noise", gen.noise);
    gen.repair = get_double(g, "repair", gen.repair);
    Rng class_rng(get_seed(g, "seed", 0));
    try {
      cfg.classes = generate_il_classes(cfg.model, gen, class_rng);
    } catch (const std::invalid_argument& e) {
      fail_field("class_generator", e.what());
    }
  }
  return cfg;
}

IlRunOutput run_il(const nlohmann::json& config) {
  IlRunConfig cfg = IlRunConfig::from_json(config);
  const int H = cfg.mdp.horizon;
  IlRunOutput out;
  out.episodes_csv = episode_csv_header();
  if (cfg.dump_step_logs) out.steps_csv = round_csv_header();
  nlohmann::json& summary = out.summary;
  summary["config"] = config;
  summary["seed"] = cfg.seed;
  nlohmann::json expert_values = nlohmann::json::array();
  for (int x0 : cfg.mdp.initial_states) {
    expert_values.push_back(cfg.model.v_values[0][static_cast<std::size_t>(x0)]);
  }
  summary["expert_value"] = expert_values;
  InvariantCounts counts;
  std::vector<long> queries_per_step(static_cast<std::size_t>(H), 0);

  if (cfg.episodes == 0) {
    summary["final_cum_regret"] = 0.0;
    summary["final_cum_queries"] = 0;
    summary["adv_total"] = 0.0;
    summary["queries_per_step"] = queries_per_step;
    summary["realizability_held"] = true;
    summary["invariant_checks"] = counts.to_json();
    return out;
  }

  std::optional<IlRunner> runner;
  try {
    runner.emplace(cfg.mdp, cfg.model, cfg.classes,
                   IlConfig{cfg.episodes, cfg.delta, cfg.link, cfg.oracle}, cfg.seed);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  std::vector<double> step_gap(static_cast<std::size_t>(H), 0.0);
  for (int h = 0; h < H; ++h) {
    const auto& truth = cfg.classes[static_cast<std::size_t>(h)].members[0];
    double lowest = 1.0;
    for (int x = 0; x < cfg.mdp.num_states; ++x) {
      lowest = std::min(lowest, context_gap(truth, x));
    }
    step_gap[static_cast<std::size_t>(h)] = lowest;
  }

  bool realizability_held = true;
  double cum_regret = 0.0;
  double adv_total = 0.0;
  long cum_queries = 0;
  std::vector<int> lambda_prev(static_cast<std::size_t>(H), 0);
  std::vector<std::size_t> history_seen(static_cast<std::size_t>(H), 0);
  long step_t = 0;
  double step_cum_regret = 0.0;
  double step_cum_loss = 0.0;
  long step_cum_queries = 0;

  for (long e = 1; e <= cfg.episodes; ++e) {
    EpisodeResult result = runner->run_episode();
    for (const IlStepRecord& step : result.steps) {
      const std::size_t h = static_cast<std::size_t>(step.h);
      const RoundDecision& d = step.decision;
      const bool truth_in = std::binary_search(d.version.begin(), d.version.end(), 0);
      realizability_held = realizability_held && truth_in;
      if (cfg.check_invariants) {
        check_round_invariants(cfg.classes[h], 0, step_gap[h],
                               runner->instance(step.h).params(), step.x, d, lambda_prev[h],
                               truth_in, counts,
                               "episode " + std::to_string(e) + " step " + std::to_string(step.h));
      }
      lambda_prev[h] = d.lambda;
      if (d.queried) {
        ++queries_per_step[h];
        const QueryRecord& rec = runner->instance(step.h).history().records[history_seen[h]++];
        step_cum_loss += loss_value(cfg.link, rec.prediction, rec.label);
      }
      if (cfg.dump_step_logs) {
        const RewardPreferenceFunction& truth = cfg.classes[h].members[0];
        const int opt = best_arm(truth, step.x);
        const double increment = truth.margin(step.x, opt, d.a) + truth.margin(step.x, opt, d.b);
        step_cum_regret += increment;
        step_cum_queries += d.queried;
        ++step_t;
        RoundRecord row;
        row.t = step_t;
        row.z = d.queried;
        row.lambda = d.lambda;
        row.w = d.width;
        row.a = d.a;
        row.b = d.b;
        row.regret_increment = increment;
        row.cum_regret = step_cum_regret;
        row.cum_queries = step_cum_queries;
        row.oracle_cum_loss = step_cum_loss;
        row.version_space_size = static_cast<int>(d.version.size());
        out.steps_csv += round_csv_line(row);
      }
    }
    cum_regret += result.regret_increment;
    cum_queries += result.queries;
    adv_total += result.adv_increment;
    EpisodeRecord row;
    row.episode = e;
    row.regret_increment = result.regret_increment;
    row.cum_regret = cum_regret;
    row.cum_queries = cum_queries;
    row.adv_increment = result.adv_increment;
    out.episodes_csv += episode_csv_line(row);
  }

  PolicySnapshot snapshot = runner->snapshot_policy();
  auto values = evaluate_policy(cfg.mdp, snapshot);
  nlohmann::json snapshot_values = nlohmann::json::array();
  for (int x0 : cfg.mdp.initial_states) {
    snapshot_values.push_back(values[0][static_cast<std::size_t>(x0)]);
  }
  nlohmann::json params_json = {{"H", H},
                                {"A", cfg.mdp.num_actions},
                                {"episodes", cfg.episodes},
                                {"delta_split", cfg.delta / H}};
  nlohmann::json beta = nlohmann::json::array();
  nlohmann::json gamma = nlohmann::json::array();
  nlohmann::json gaps = nlohmann::json::array();
  for (int h = 0; h < H; ++h) {
    beta.push_back(runner->instance(h).params().beta);
    gamma.push_back(runner->instance(h).params().gamma);
    gaps.push_back(step_gap[static_cast<std::size_t>(h)]);
  }
  params_json["beta"] = beta;
  params_json["gamma"] = gamma;
  params_json["gap"] = gaps;
  summary["final_cum_regret"] = cum_regret;
  summary["final_cum_queries"] = cum_queries;
  summary["adv_total"] = adv_total;
  summary["queries_per_step"] = queries_per_step;
  summary["realizability_held"] = realizability_held;
  summary["invariant_checks"] = counts.to_json();
  summary["params"] = params_json;
  summary["final_snapshot"] = snapshot.probs;
  summary["snapshot_value"] = snapshot_values;
  return out;
}

SweepOutput sweep(const nlohmann::json& config) {
  if (!config.is_object()) throw ConfigError("config: expected a JSON object");
  require_known_fields(config, "", {"cb", "horizons", "seeds", "threads"});
  if (!config.contains("cb")) fail_field("cb", "required");
  const nlohmann::json base = get_object(config, "cb");
  if (!config.contains("horizons")) fail_field("horizons", "required");
  std::vector<int> horizons;
  {
    const auto& arr = config.at("horizons");
    if (!arr.is_array() || arr.empty()) fail_field("horizons", "must be a nonempty list");
    for (const auto& el : arr) {
      if (!el.is_number_integer()) fail_field("horizons", "expected integers");
      horizons.push_back(el.get<int>());
    }
  }
  if (!config.contains("seeds")) fail_field("seeds", "required");
  std::vector<std::uint64_t> seeds;
  {
    const auto& arr = config.at("seeds");
    if (!arr.is_array() || arr.empty()) fail_field("seeds", "must be a nonempty list");
    for (const auto& el : arr) {
      const bool ok = el.is_number_unsigned() ||
                      (el.is_number_integer() && el.get<std::int64_t>() >= 0);
      if (!ok) fail_field("seeds", "expected nonnegative integers");
      seeds.push_back(el.get<std::uint64_t>());
    }
  }
  const int threads = get_int(config, "threads", 1);
  if (threads < 1) fail_field("threads", "must be >= 1");
  {
    nlohmann::json probe = base;
    probe["horizon"] = horizons[0];
    probe["seed"] = seeds[0];
    (void)CbRunConfig::from_json(probe);
  }

  struct Cell {
    double regret = 0.0;
    long queries = 0;
  };
  const std::size_t n_cells = horizons.size() * seeds.size();
  std::vector<Cell> cells(n_cells);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n_cells || stop.load()) return;
      try {
        nlohmann::json cell_config = base;
        cell_config["horizon"] = horizons[i / seeds.size()];
        cell_config["seed"] = seeds[i % seeds.size()];
        CbRunOutput run = run_cb(cell_config);
        cells[i].regret = run.summary.at("final_cum_regret").get<double>();
        cells[i].queries = run.summary.at("final_cum_queries").get<long>();
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        stop.store(true);
      }
    }
  };

  const int workers = static_cast<int>(std::min<std::size_t>(
      static_cast<std::size_t>(threads), n_cells));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  SweepOutput out;
  out.cells_csv = "T,seed,final_cum_regret,final_cum_queries\n";
  for (std::size_t ti = 0; ti < horizons.size(); ++ti) {
    for (std::size_t si = 0; si < seeds.size(); ++si) {
      const Cell& cell = cells[ti * seeds.size() + si];
      out.cells_csv += std::to_string(horizons[ti]);
      out.cells_csv += ',';
      out.cells_csv += std::to_string(seeds[si]);
      out.cells_csv += ',';
      append_g9(out.cells_csv, cell.regret);
      out.cells_csv += ',';
      out.cells_csv += std::to_string(cell.queries);
      out.cells_csv += '\n';
    }
  }
  out.medians_csv = "T,median_cum_regret,median_cum_queries,query_growth_vs_prev\n";
  for (std::size_t ti = 0; ti < horizons.size(); ++ti) {
    std::vector<double> regrets;
    std::vector<double> queries;
    for (std::size_t si = 0; si < seeds.size(); ++si) {
      regrets.push_back(cells[ti * seeds.size() + si].regret);
      queries.push_back(static_cast<double>(cells[ti * seeds.size() + si].queries));
    }
    out.medians_csv += std::to_string(horizons[ti]);
    out.medians_csv += ',';
    append_g9(out.medians_csv, median(regrets));
    out.medians_csv += ',';
    append_g9(out.medians_csv, median(queries));
    out.medians_csv += ',';
    if (ti > 0) {
      std::vector<double> ratios;
      bool defined = true;
      for (std::size_t si = 0; si < seeds.size(); ++si) {
        const long prev = cells[(ti - 1) * seeds.size() + si].queries;
        if (prev <= 0) {
          defined = false;
          break;
        }
        ratios.push_back(static_cast<double>(cells[ti * seeds.size() + si].queries) /
                         static_cast<double>(prev));
      }
      if (defined) append_g9(out.medians_csv, median(ratios));
    }
    out.medians_csv += '\n';
  }
  return out;
}

}  // namespace pref
