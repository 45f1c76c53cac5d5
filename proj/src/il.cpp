#include "pref/il.hpp"

#include <algorithm>
#include <stdexcept>

namespace pref {

// through the scaled per-arm values so it agrees bitwise with the margin of
// the generated truth member
double preference_margin(const ExpertModel& model, int h, int x, int a, int b) {
  const double scale = static_cast<double>(model.q_values.size());
  return model.q_values.at(h)[x][a] / scale - model.q_values[h][x][b] / scale;
}

std::vector<FunctionClass> generate_il_classes(const ExpertModel& model,
                                               const IlGeneratorConfig& config, Rng& rng) {
  const int H = static_cast<int>(model.q_values.size());
  if (H < 1) throw std::invalid_argument("model has no steps");
  if (config.class_size < 1) throw std::invalid_argument("need at least one member");
  if (config.saturated_flips > config.class_size - 1) {
    throw std::invalid_argument("more flips than decoys");
  }
  if (config.noise < 0.0 || config.repair < 0.0) {
    throw std::invalid_argument("negative perturbation");
  }
  const int X = static_cast<int>(model.q_values[0].size());
  const int A = static_cast<int>(model.q_values[0][0].size());
  if (A < 2) throw std::invalid_argument("need at least two actions");
  std::vector<FunctionClass> classes;
  classes.reserve(static_cast<std::size_t>(H));
  for (int h = 0; h < H; ++h) {
    RewardPreferenceFunction truth;
    truth.rewards.assign(static_cast<std::size_t>(X), std::vector<double>(A, 0.0));
    for (int x = 0; x < X; ++x) {
      for (int a = 0; a < A; ++a) truth.rewards[x][a] = model.q_values[h][x][a] / H;
    }
    FunctionClass cls;
    cls.num_contexts = X;
    cls.num_actions = A;
    cls.members.push_back(truth);
    for (int i = 0; i < config.class_size - 1; ++i) {
      RewardPreferenceFunction pert;
      pert.rewards.assign(static_cast<std::size_t>(X), std::vector<double>(A, 0.0));
      if (i < config.saturated_flips) {
        for (int x = 0; x < X; ++x) {
          const int opt = best_arm(truth, x);
          int other = rng.uniform_int(A - 1);
          if (other >= opt) ++other;
          pert.rewards[x][other] = 1.0;
        }
      } else {
        for (int x = 0; x < X; ++x) {
          for (int a = 0; a < A; ++a) {
            const double sign = rng.uniform_int(2) == 0 ? -1.0 : 1.0;
            pert.rewards[x][a] =
                std::clamp(truth.rewards[x][a] + config.noise * sign, 0.0, 1.0);
          }
        }
        for (int x = 0; x < X; ++x) {
          const int opt = best_arm(truth, x);
          if (best_arm(pert, x) != opt) {
            const double top =
                *std::max_element(pert.rewards[x].begin(), pert.rewards[x].end());
            pert.rewards[x][opt] = std::min(1.0, top + config.repair);
          }
        }
      }
      cls.members.push_back(pert);
    }
    cls.validate();
    classes.push_back(std::move(cls));
  }
  return classes;
}

std::pair<double, double> il_regret_and_adv(const TabularMdp& mdp, const ExpertModel& model,
                                            const PolicySnapshot& snapshot, int x0) {
  const auto v = evaluate_policy(mdp, snapshot);
  const double regret = model.v_values[0][x0] - v[0][x0];
  const auto d = occupancy(mdp, snapshot, x0);
  double adv = 0.0;
  for (int h = 0; h < mdp.horizon; ++h) {
    for (int x = 0; x < mdp.num_states; ++x) {
      if (d[h][x] == 0.0) continue;
      double best = model.advantage[h][x][0];
      for (int a = 1; a < mdp.num_actions; ++a) {
        best = std::max(best, model.advantage[h][x][a]);
      }
      adv += d[h][x] * best;
    }
  }
  return {regret, adv};
}

IlRunner::IlRunner(TabularMdp mdp, ExpertModel model, std::vector<FunctionClass> classes,
                   IlConfig config, std::uint64_t master_seed)
    : mdp_(std::move(mdp)),
      model_(std::move(model)),
      classes_(std::move(classes)),
      config_(config),
      execution_rng_(derive_seed(master_seed, "execution")) {
  mdp_.validate();
  if (static_cast<int>(classes_.size()) != mdp_.horizon) {
    throw std::invalid_argument("need one class per step");
  }
  
  const double delta_eff = config_.delta / mdp_.horizon;
  instances_.reserve(classes_.size());
  for (int h = 0; h < mdp_.horizon; ++h) {
    const auto& cls = classes_[static_cast<std::size_t>(h)];
    cls.validate();
    if (cls.num_contexts != mdp_.num_states || cls.num_actions != mdp_.num_actions) {
      throw std::invalid_argument("class shape does not match the mdp");
    }
    const double upsilon =
        upsilon_bound(static_cast<int>(cls.members.size()), config_.link, config_.oracle);
    const CbParams params = CbParams::make(upsilon, config_.link.alpha, delta_eff,
                                           config_.episodes, mdp_.num_actions);
    instances_.emplace_back(params, classes_[static_cast<std::size_t>(h)], config_.link,
                            config_.oracle,
                            derive_seed(master_seed, "algorithm", static_cast<std::uint64_t>(h)));
    feedback_rngs_.emplace_back(
        derive_seed(master_seed, "feedback", static_cast<std::uint64_t>(h)));
  }
}

EpisodeResult IlRunner::run_episode() {
  if (episode_ >= config_.episodes) throw std::logic_error("episodes exhausted");
  EpisodeResult result;
  result.x0 = mdp_.initial_state(episode_);
  int x = result.x0;
  for (int h = 0; h < mdp_.horizon; ++h) {
    auto& learner = instances_[static_cast<std::size_t>(h)];
    IlStepRecord rec;
    rec.h = h;
    rec.x = x;
    rec.decision = learner.act(x);
    const auto& d = rec.decision;
    if (d.queried) {
      const int y = sample_feedback(config_.link, preference_margin(model_, h, x, d.a, d.b),
                                    feedback_rngs_[static_cast<std::size_t>(h)]);
      learner.observe(x, d, y);
      rec.label = y;
      ++result.queries;
    } else {
      learner.advance(d);
    }
    rec.executed = d.a;
    if (d.a != d.b) {
      rec.executed = execution_rng_.uniform01() < 0.5 ? d.a : d.b;
    }
    if (h + 1 < mdp_.horizon) {
      x = execution_rng_.pick_cdf(mdp_.transitions[h][x][rec.executed]);
    }
    result.steps.push_back(std::move(rec));
  }
  const auto snapshot = snapshot_policy();
  const auto [regret, adv] = il_regret_and_adv(mdp_, model_, snapshot, result.x0);
  result.regret_increment = regret;
  result.adv_increment = adv;
  queries_ += result.queries;
  ++episode_;
  return result;
}

PolicySnapshot IlRunner::snapshot_policy() const {
  PolicySnapshot snapshot;
  snapshot.probs.assign(static_cast<std::size_t>(mdp_.horizon), {});
  for (int h = 0; h < mdp_.horizon; ++h) {
    auto& step = snapshot.probs[static_cast<std::size_t>(h)];
    step.assign(static_cast<std::size_t>(mdp_.num_states), {});
    for (int x = 0; x < mdp_.num_states; ++x) {
      step[static_cast<std::size_t>(x)] =
          instances_[static_cast<std::size_t>(h)].action_distribution(x);
    }
  }
  return snapshot;
}

}  // namespace pref
