#pragma once

#include <utility>
#include <vector>

#include <json.hpp>

namespace pref {

struct PolicyTable {
  std::vector<std::vector<std::vector<double>>> probs;  // [step][state][action]
};

// Finite-horizon, time-indexed transitions, step-independent rewards in [0,1].
struct TabularMdp {
  int num_states = 0;
  int num_actions = 0;
  int horizon = 0;
  std::vector<std::vector<std::vector<std::vector<double>>>> transitions;  // [h][x][a][x']
  std::vector<std::vector<double>> rewards;                                // [x][a]
  std::vector<int> initial_states = {0};  // episode t starts at [t mod size]

  int initial_state(long episode) const;
  void validate() const;
};

void validate_policy(const TabularMdp& mdp, const PolicyTable& policy);

struct ExpertModel {
  PolicyTable policy;
  std::vector<std::vector<std::vector<double>>> q_values;   // [h][x][a]
  std::vector<std::vector<double>> v_values;                // [h][x], row H is zero
  std::vector<std::vector<std::vector<double>>> advantage;  // q - v
};

// exact backward dynamic programming
ExpertModel expert_q(const TabularMdp& mdp, const PolicyTable& policy);

// Action distribution per (step, state); same shape as PolicyTable but holds
// whatever a learner currently plays rather than a fixed policy.
struct PolicySnapshot {
  std::vector<std::vector<std::vector<double>>> probs;
};

// V[h][x] for h = 0..H, row H zero
std::vector<std::vector<double>> evaluate_policy(const TabularMdp& mdp,
                                                 const PolicySnapshot& snapshot);

// state-visit distribution d[h][x] from a fixed start, forward DP
std::vector<std::vector<double>> occupancy(const TabularMdp& mdp,
                                           const PolicySnapshot& snapshot, int x0);

// argmax_a q per (step, state), ties to the lowest index
PolicyTable greedy_policy(const ExpertModel& model);

nlohmann::json mdp_to_json(const TabularMdp& mdp, const PolicyTable& expert);
std::pair<TabularMdp, PolicyTable> mdp_from_json(const nlohmann::json& j);

// Line of states; action 0 steps left, 1 stays, 2 steps right, and moves slip
// to stay with probability p_slip. r(x,a) = s(x) + bonus(a) with s linearly
// spaced over [s_lo, s_hi]; the largest sum must stay within 1.
TabularMdp make_chain(int num_states = 6, int horizon = 4, double s_lo = 0.1,
                      double s_hi = 0.55, const std::vector<double>& bonus = {0.0, 0.1, 0.25},
                      double p_slip = 0.1);

// greedy_p on the optimal action of the unrestricted DP, rest split evenly
PolicyTable soft_greedy_expert(const TabularMdp& mdp, double greedy_p = 0.7);

}  // namespace pref
