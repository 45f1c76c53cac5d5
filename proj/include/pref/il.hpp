#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "pref/bandit.hpp"
#include "pref/mdp.hpp"

namespace pref {

// expert-Q difference scaled by 1/H so margins land in [-1,1]
double preference_margin(const ExpertModel& model, int h, int x, int a, int b);

// Per step h, built around the scaled expert-Q table (member 0): first
// saturated_flips members are one-hot tables whose argmax avoids the expert
// arm at every state, the rest are sign-noise copies with the expert argmax
// restored whenever clipping broke it.
struct IlGeneratorConfig {
  int class_size = 8;
  int saturated_flips = 3;
  double noise = 0.3;
  double repair = 0.05;
};

std::vector<FunctionClass> generate_il_classes(const ExpertModel& model,
                                               const IlGeneratorConfig& config, Rng& rng);

struct IlStepRecord {
  int h = 0;
  int x = 0;
  RoundDecision decision;
  int label = 0;  // 0 when unqueried
  int executed = 0;
};

struct EpisodeResult {
  int x0 = 0;
  std::vector<IlStepRecord> steps;
  int queries = 0;
  double regret_increment = 0.0;  // V^e(x0) - V^snapshot(x0), exact DP
  double adv_increment = 0.0;
};

struct IlConfig {
  int episodes = 0;
  double delta = 0.05;  // split across the stacked instances
  LinkSpec link = make_link(LinkKind::Square);
  OracleConfig oracle{};
};

// regret increment = V^e_0(x0) - V^pi_0(x0); adv increment = occupancy-weighted
// sum over steps of the best expert advantage
std::pair<double, double> il_regret_and_adv(const TabularMdp& mdp, const ExpertModel& model,
                                            const PolicySnapshot& snapshot, int x0);

// One stacked learner per step. Per episode: each step's learner acts on the
// current state, queried pairs get expert-margin feedback, and the executed
// action is a fair pick between the pair. Streams: instance h draws from
// ("algorithm", h) and ("feedback", h), execution and transitions share
// ("execution", 0), so step 0 of a one-step problem replays identically to a
// standalone learner run under the same master seed.
class IlRunner {
 public:
  IlRunner(TabularMdp mdp, ExpertModel model, std::vector<FunctionClass> classes,
           IlConfig config, std::uint64_t master_seed);

  // instances point into the stored classes
  IlRunner(const IlRunner&) = delete;
  IlRunner& operator=(const IlRunner&) = delete;
  IlRunner(IlRunner&&) = default;
  IlRunner& operator=(IlRunner&&) = default;

  EpisodeResult run_episode();
  PolicySnapshot snapshot_policy() const;

  const CbLearner& instance(int h) const { return instances_[static_cast<std::size_t>(h)]; }
  const TabularMdp& mdp() const { return mdp_; }
  const ExpertModel& model() const { return model_; }
  const IlConfig& config() const { return config_; }
  long episode() const { return episode_; }
  long total_queries() const { return queries_; }

 private:
  TabularMdp mdp_;
  ExpertModel model_;
  std::vector<FunctionClass> classes_;
  IlConfig config_;
  std::vector<CbLearner> instances_;
  std::vector<Rng> feedback_rngs_;
  Rng execution_rng_;
  long episode_ = 0;
  long queries_ = 0;
};

}  // namespace pref
