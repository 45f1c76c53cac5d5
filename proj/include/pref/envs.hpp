#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "pref/funcspace.hpp"
#include "pref/links.hpp"
#include "pref/rng.hpp"

namespace pref {

// What an external observer sees of a round; labels stay private.
struct PublicRound {
  int x = 0;
  int a = 0;
  int b = 0;
  bool queried = false;
};

enum class ScheduleKind { Iid, RoundRobin, Explicit, Adaptive };

struct ContextSchedule {
  ScheduleKind kind = ScheduleKind::Iid;
  std::vector<int> order;  // Explicit only
  // Adaptive only; called once per round with the public history so far.
  std::function<int(const std::vector<PublicRound>&)> adapt;
};

// Per-run cursor over a schedule. Iid draws one uniform_int per round from
// its own stream; Explicit requires order to cover every round requested.
class ScheduleCursor {
 public:
  ScheduleCursor(const ContextSchedule& schedule, int num_contexts, std::uint64_t seed);

  int next(const std::vector<PublicRound>& public_history);

 private:
  const ContextSchedule* schedule_;
  int num_contexts_;
  int t_ = 0;
  Rng rng_;
};

// Iid uses the same one-draw-per-round stream as ScheduleCursor, so a cursor
// seeded identically visits exactly this sequence. Adaptive cannot be
// materialized without a run loop.
std::vector<int> materialize_schedule(const ContextSchedule& schedule, int horizon,
                                      int num_contexts, std::uint64_t seed);

struct CbInstance {
  FunctionClass cls;
  int truth_index = 0;
  LinkSpec link;
  ContextSchedule schedule;
  int horizon = 0;

  const RewardPreferenceFunction& truth() const { return cls.members[truth_index]; }
  void validate() const;

  // Adaptive schedules do not serialize.
  static CbInstance from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

// max - runner-up of the truth's rewards at x; 0 when the optimum is tied
double context_gap(const RewardPreferenceFunction& truth, int x);

// min of context_gap over all contexts
double gap(const CbInstance& instance);

// rounds of the realized context sequence whose context gap is <= epsilon
long context_gap_count(const CbInstance& instance, const std::vector<int>& contexts,
                       double epsilon);

// materializes the instance's own schedule over its horizon
long context_gap_count(const CbInstance& instance, double epsilon, std::uint64_t seed);

// truth(x, opt) - truth(x, a) + truth(x, opt) - truth(x, b), opt = best_arm
double regret_increment(const CbInstance& instance, int x, int a, int b);

// one uniform01 draw; +1 with probability phi(truth margin)
int sample_preference(const CbInstance& instance, int x, int a, int b, Rng& rng);

// Planted-gap construction: per context one optimal arm at base+gap, one
// runner-up at base, the rest below base. Decoys are sign-noise copies of the
// truth; the first round(flip_frac*(class_size-1)) of them additionally get
// one arm raised above the row maximum at a random context, so their argmax
// disagrees with the truth there.
struct GeneratorConfig {
  int num_contexts = 5;
  int num_actions = 4;
  int class_size = 16;
  double gap = 0.25;
  double base = 0.5;
  double noise = 0.55;
  double flip_frac = 0.5;
  double flip_lo = 0.2;
  double flip_hi = 0.45;
  LinkSpec link = make_link(LinkKind::Square);
  ContextSchedule schedule{};
  int horizon = 0;
};

// truth lands at member index 0; gap(result) == config.gap exactly
CbInstance generate_instance(const GeneratorConfig& config, Rng& rng);

// Absent fields keep their defaults. Adaptive schedules do not serialize.
GeneratorConfig generator_from_json(const nlohmann::json& j);
nlohmann::json generator_to_json(const GeneratorConfig& config);

}  // namespace pref
