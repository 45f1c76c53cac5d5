#include "pref/envs.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pref {

ScheduleCursor::ScheduleCursor(const ContextSchedule& schedule, int num_contexts,
                               std::uint64_t seed)
    : schedule_(&schedule), num_contexts_(num_contexts), rng_(seed) {
  if (num_contexts < 1) throw std::invalid_argument("schedule needs at least one context");
}

int ScheduleCursor::next(const std::vector<PublicRound>& public_history) {
  const int t = t_++;
  switch (schedule_->kind) {
    case ScheduleKind::Iid:
      return rng_.uniform_int(num_contexts_);
    case ScheduleKind::RoundRobin:
      return t % num_contexts_;
    case ScheduleKind::Explicit: {
      if (t >= static_cast<int>(schedule_->order.size())) {
        throw std::out_of_range("explicit schedule exhausted at round " + std::to_string(t));
      }
      int x = schedule_->order[t];
      if (x < 0 || x >= num_contexts_) {
        throw std::out_of_range("scheduled context out of range: " + std::to_string(x));
      }
      return x;
    }
    case ScheduleKind::Adaptive: {
      if (!schedule_->adapt) throw std::invalid_argument("adaptive schedule has no callback");
      int x = schedule_->adapt(public_history);
      if (x < 0 || x >= num_contexts_) {
        throw std::out_of_range("adaptive context out of range: " + std::to_string(x));
      }
      return x;
    }
  }
  throw std::logic_error("unknown schedule kind");
}

std::vector<int> materialize_schedule(const ContextSchedule& schedule, int horizon,
                                      int num_contexts, std::uint64_t seed) {
  if (schedule.kind == ScheduleKind::Adaptive) {
    throw std::invalid_argument("adaptive schedules cannot be materialized");
  }
  if (horizon < 0) throw std::invalid_argument("negative horizon");
  ScheduleCursor cursor(schedule, num_contexts, seed);
  std::vector<int> contexts;
  contexts.reserve(static_cast<std::size_t>(horizon));
  std::vector<PublicRound> empty;
  for (int t = 0; t < horizon; ++t) contexts.push_back(cursor.next(empty));
  return contexts;
}

void CbInstance::validate() const {
  cls.validate();
  if (truth_index < 0 || truth_index >= static_cast<int>(cls.members.size())) {
    throw std::invalid_argument("truth index outside the class");
  }
  if (horizon < 0) throw std::invalid_argument("negative horizon");
  if (schedule.kind == ScheduleKind::Explicit) {
    for (int x : schedule.order) {
      if (x < 0 || x >= cls.num_contexts) {
        throw std::invalid_argument("scheduled context out of range: " + std::to_string(x));
      }
    }
  }
}

static nlohmann::json schedule_to_json(const ContextSchedule& schedule) {
  switch (schedule.kind) {
    case ScheduleKind::Iid:
      return "iid";
    case ScheduleKind::RoundRobin:
      return "round-robin";
    case ScheduleKind::Explicit:
      return schedule.order;
    case ScheduleKind::Adaptive:
      throw std::invalid_argument("adaptive schedules do not serialize");
  }
  throw std::logic_error("unknown schedule kind");
}

static ContextSchedule schedule_from_json(const nlohmann::json& j) {
  ContextSchedule schedule;
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (name == "iid") {
      schedule.kind = ScheduleKind::Iid;
    } else if (name == "round-robin") {
      schedule.kind = ScheduleKind::RoundRobin;
    } else {
      throw std::invalid_argument("unknown schedule name: " + name);
    }
  } else if (j.is_array()) {
    schedule.kind = ScheduleKind::Explicit;
    schedule.order = j.get<std::vector<int>>();
  } else {
    throw std::invalid_argument("schedule must be a name or an index list");
  }
  return schedule;
}

CbInstance CbInstance::from_json(const nlohmann::json& j) {
  CbInstance instance;
  instance.cls = FunctionClass::from_json(j);
  if (!j.contains("truth_index")) throw std::invalid_argument("missing truth_index");
  instance.truth_index = j.at("truth_index").get<int>();
  if (!j.contains("link")) throw std::invalid_argument("missing link");
  instance.link = parse_link(j.at("link").get<std::string>());
  if (j.contains("schedule")) instance.schedule = schedule_from_json(j.at("schedule"));
  if (j.contains("horizon")) instance.horizon = j.at("horizon").get<int>();
  instance.validate();
  return instance;
}

nlohmann::json CbInstance::to_json() const {
  nlohmann::json j = cls.to_json();
  j["truth_index"] = truth_index;
  j["link"] = link_name(link);
  j["schedule"] = schedule_to_json(schedule);
  j["horizon"] = horizon;
  return j;
}

double context_gap(const RewardPreferenceFunction& truth, int x) {
  const auto& row = truth.rewards.at(static_cast<std::size_t>(x));
  const int opt = best_arm(truth, x);
  double runner = -1.0;
  for (int a = 0; a < static_cast<int>(row.size()); ++a) {
    if (a == opt) continue;
    runner = std::max(runner, row[a]);
  }
  if (runner < 0.0) return 0.0;  // single arm
  return row[opt] - runner;
}

double gap(const CbInstance& instance) {
  double g = 2.0;
  for (int x = 0; x < instance.cls.num_contexts; ++x) {
    g = std::min(g, context_gap(instance.truth(), x));
  }
  return g;
}

long context_gap_count(const CbInstance& instance, const std::vector<int>& contexts,
                       double epsilon) {
  long count = 0;
  for (int x : contexts) {
    if (context_gap(instance.truth(), x) <= epsilon) ++count;
  }
  return count;
}

long context_gap_count(const CbInstance& instance, double epsilon, std::uint64_t seed) {
  return context_gap_count(
      instance,
      materialize_schedule(instance.schedule, instance.horizon, instance.cls.num_contexts, seed),
      epsilon);
}

double regret_increment(const CbInstance& instance, int x, int a, int b) {
  const auto& truth = instance.truth();
  const int opt = best_arm(truth, x);
  return truth.margin(x, opt, a) + truth.margin(x, opt, b);
}

int sample_preference(const CbInstance& instance, int x, int a, int b, Rng& rng) {
  return sample_feedback(instance.link, instance.truth().margin(x, a, b), rng);
}

CbInstance generate_instance(const GeneratorConfig& config, Rng& rng) {
  const int X = config.num_contexts;
  const int A = config.num_actions;
  const int M = config.class_size;
  if (X < 1) throw std::invalid_argument("need at least one context");
  if (A < 2) throw std::invalid_argument("need at least two actions");
  if (M < 1) throw std::invalid_argument("need at least one member");
  if (config.gap < 0.0 || config.gap > 1.0) throw std::invalid_argument("infeasible gap");
  if (config.base < 0.05 || config.base + config.gap > 1.0) {
    throw std::invalid_argument("base must fit [0.05, 1 - gap]");
  }
  if (config.noise < 0.0) throw std::invalid_argument("negative noise");
  if (config.flip_frac < 0.0 || config.flip_frac > 1.0) {
    throw std::invalid_argument("flip_frac outside [0,1]");
  }
  if (config.flip_lo > config.flip_hi) throw std::invalid_argument("flip range inverted");

  RewardPreferenceFunction truth;
  truth.rewards.assign(static_cast<std::size_t>(X), std::vector<double>(A, 0.0));
  for (int x = 0; x < X; ++x) {
    const int opt = rng.uniform_int(A);
    int runner = rng.uniform_int(A - 1);
    if (runner >= opt) ++runner;
    for (int a = 0; a < A; ++a) truth.rewards[x][a] = rng.uniform(0.05, config.base);
    truth.rewards[x][opt] = config.base + config.gap;
    truth.rewards[x][runner] = config.base;
  }

  CbInstance instance;
  instance.cls.num_contexts = X;
  instance.cls.num_actions = A;
  instance.cls.members.push_back(truth);
  const long n_flip = std::lround((M - 1) * config.flip_frac);
  for (int i = 0; i < M - 1; ++i) {
    RewardPreferenceFunction pert = truth;
    for (int x = 0; x < X; ++x) {
      for (int a = 0; a < A; ++a) {
        const double sign = rng.uniform_int(2) == 0 ? -1.0 : 1.0;
        pert.rewards[x][a] = std::clamp(truth.rewards[x][a] + config.noise * sign, 0.0, 1.0);
      }
    }
    if (i < n_flip) {
      const int x = rng.uniform_int(X);
      const int opt = best_arm(truth, x);
      int other = rng.uniform_int(A - 1);
      if (other >= opt) ++other;
      const double top = *std::max_element(pert.rewards[x].begin(), pert.rewards[x].end());
      pert.rewards[x][other] = std::min(1.0, top + rng.uniform(config.flip_lo, config.flip_hi));
    }
    instance.cls.members.push_back(pert);
  }
  instance.truth_index = 0;
  instance.link = config.link;
  instance.schedule = config.schedule;
  instance.horizon = config.horizon;
  instance.validate();
  return instance;
}

GeneratorConfig generator_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("generator must be an object");
  GeneratorConfig config;
  if (j.contains("num_contexts")) config.num_contexts = j.at("num_contexts").get<int>();
  if (j.contains("num_actions")) config.num_actions = j.at("num_actions").get<int>();
  if (j.contains("class_size")) config.class_size = j.at("class_size").get<int>();
  if (j.contains("gap")) config.gap = j.at("gap").get<double>();
  if (j.contains("base")) config.base = j.at("base").get<double>();
  if (j.contains("noise")) config.noise = j.at("noise").get<double>();
  if (j.contains("flip_frac")) config.flip_frac = j.at("flip_frac").get<double>();
  if (j.contains("flip_lo")) config.flip_lo = j.at("flip_lo").get<double>();
  if (j.contains("flip_hi")) config.flip_hi = j.at("flip_hi").get<double>();
  if (j.contains("link")) config.link = parse_link(j.at("link").get<std::string>());
  if (j.contains("schedule")) config.schedule = schedule_from_json(j.at("schedule"));
  if (j.contains("horizon")) config.horizon = j.at("horizon").get<int>();
  return config;
}

nlohmann::json generator_to_json(const GeneratorConfig& config) {
  nlohmann::json j;
  j["num_contexts"] = config.num_contexts;
  j["num_actions"] = config.num_actions;
  j["class_size"] = config.class_size;
  j["gap"] = config.gap;
  j["base"] = config.base;
  j["noise"] = config.noise;
  j["flip_frac"] = config.flip_frac;
  j["flip_lo"] = config.flip_lo;
  j["flip_hi"] = config.flip_hi;
  j["link"] = link_name(config.link);
  j["schedule"] = schedule_to_json(config.schedule);
  j["horizon"] = config.horizon;
  return j;
}

}  // namespace pref
