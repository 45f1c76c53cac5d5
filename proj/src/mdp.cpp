#include "pref/mdp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pref {

namespace {

constexpr double kRowTol = 1e-9;

void check_distribution(const std::vector<double>& row, std::size_t size,
                        const std::string& what) {
  if (row.size() != size) throw std::invalid_argument(what + " has wrong length");
  double sum = 0.0;
  for (double v : row) {
    if (!(v >= 0.0)) throw std::invalid_argument(what + " has a negative entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kRowTol) {
    throw std::invalid_argument(what + " sums to " + std::to_string(sum));
  }
}

}  // namespace

int TabularMdp::initial_state(long episode) const {
  return initial_states[static_cast<std::size_t>(episode) % initial_states.size()];
}

void TabularMdp::validate() const {
  if (num_states < 1 || num_actions < 1 || horizon < 1) {
    throw std::invalid_argument("mdp dimensions must be positive");
  }
  const auto X = static_cast<std::size_t>(num_states);
  const auto A = static_cast<std::size_t>(num_actions);
  if (transitions.size() != static_cast<std::size_t>(horizon)) {
    throw std::invalid_argument("transition step count mismatch");
  }
  for (const auto& step : transitions) {
    if (step.size() != X) throw std::invalid_argument("transition state count mismatch");
    for (const auto& state : step) {
      if (state.size() != A) throw std::invalid_argument("transition action count mismatch");
      for (const auto& row : state) check_distribution(row, X, "transition row");
    }
  }
  if (rewards.size() != X) throw std::invalid_argument("reward state count mismatch");
  for (const auto& row : rewards) {
    if (row.size() != A) throw std::invalid_argument("reward action count mismatch");
    for (double r : row) {
      if (!(r >= 0.0 && r <= 1.0)) {
        throw std::invalid_argument("reward outside [0,1]: " + std::to_string(r));
      }
    }
  }
  if (initial_states.empty()) throw std::invalid_argument("no initial states");
  for (int x : initial_states) {
    if (x < 0 || x >= num_states) {
      throw std::invalid_argument("initial state out of range: " + std::to_string(x));
    }
  }
}

void validate_policy(const TabularMdp& mdp, const PolicyTable& policy) {
  if (policy.probs.size() != static_cast<std::size_t>(mdp.horizon)) {
    throw std::invalid_argument("policy step count mismatch");
  }
  for (const auto& step : policy.probs) {
    if (step.size() != static_cast<std::size_t>(mdp.num_states)) {
      throw std::invalid_argument("policy state count mismatch");
    }
    for (const auto& row : step) {
      check_distribution(row, static_cast<std::size_t>(mdp.num_actions), "policy row");
    }
  }
}

ExpertModel expert_q(const TabularMdp& mdp, const PolicyTable& policy) {
  mdp.validate();
  validate_policy(mdp, policy);
  const int H = mdp.horizon;
  const int X = mdp.num_states;
  const int A = mdp.num_actions;
  ExpertModel model;
  model.policy = policy;
  model.q_values.assign(H, std::vector<std::vector<double>>(X, std::vector<double>(A, 0.0)));
  model.v_values.assign(H + 1, std::vector<double>(X, 0.0));
  model.advantage = model.q_values;
  for (int h = H - 1; h >= 0; --h) {
    for (int x = 0; x < X; ++x) {
      for (int a = 0; a < A; ++a) {
        double q = mdp.rewards[x][a];
        for (int y = 0; y < X; ++y) q += mdp.transitions[h][x][a][y] * model.v_values[h + 1][y];
        model.q_values[h][x][a] = q;
      }
      double v = 0.0;
      for (int a = 0; a < A; ++a) v += policy.probs[h][x][a] * model.q_values[h][x][a];
      model.v_values[h][x] = v;
      for (int a = 0; a < A; ++a) model.advantage[h][x][a] = model.q_values[h][x][a] - v;
    }
  }
  return model;
}

std::vector<std::vector<double>> evaluate_policy(const TabularMdp& mdp,
                                                 const PolicySnapshot& snapshot) {
  const int H = mdp.horizon;
  const int X = mdp.num_states;
  const int A = mdp.num_actions;
  std::vector<std::vector<double>> v(H + 1, std::vector<double>(X, 0.0));
  for (int h = H - 1; h >= 0; --h) {
    for (int x = 0; x < X; ++x) {
      double vx = 0.0;
      for (int a = 0; a < A; ++a) {
        double q = mdp.rewards[x][a];
        for (int y = 0; y < X; ++y) q += mdp.transitions[h][x][a][y] * v[h + 1][y];
        vx += snapshot.probs[h][x][a] * q;
      }
      v[h][x] = vx;
    }
  }
  return v;
}

std::vector<std::vector<double>> occupancy(const TabularMdp& mdp,
                                           const PolicySnapshot& snapshot, int x0) {
  const int H = mdp.horizon;
  const int X = mdp.num_states;
  const int A = mdp.num_actions;
  if (x0 < 0 || x0 >= X) throw std::out_of_range("start state out of range");
  std::vector<std::vector<double>> d(H, std::vector<double>(X, 0.0));
  d[0][x0] = 1.0;
  for (int h = 0; h + 1 < H; ++h) {
    for (int x = 0; x < X; ++x) {
      if (d[h][x] == 0.0) continue;
      for (int a = 0; a < A; ++a) {
        const double flow = d[h][x] * snapshot.probs[h][x][a];
        if (flow == 0.0) continue;
        for (int y = 0; y < X; ++y) d[h + 1][y] += flow * mdp.transitions[h][x][a][y];
      }
    }
  }
  return d;
}

PolicyTable greedy_policy(const ExpertModel& model) {
  PolicyTable greedy;
  greedy.probs.assign(model.q_values.size(), {});
  for (std::size_t h = 0; h < model.q_values.size(); ++h) {
    greedy.probs[h].assign(model.q_values[h].size(), {});
    for (std::size_t x = 0; x < model.q_values[h].size(); ++x) {
      const auto& q = model.q_values[h][x];
      std::size_t best = 0;
      for (std::size_t a = 1; a < q.size(); ++a) {
        if (q[a] > q[best]) best = a;
      }
      greedy.probs[h][x].assign(q.size(), 0.0);
      greedy.probs[h][x][best] = 1.0;
    }
  }
  return greedy;
}

nlohmann::json mdp_to_json(const TabularMdp& mdp, const PolicyTable& expert) {
  return nlohmann::json{{"H", mdp.horizon},
                        {"num_states", mdp.num_states},
                        {"num_actions", mdp.num_actions},
                        {"transitions", mdp.transitions},
                        {"rewards", mdp.rewards},
                        {"expert_policy", expert.probs},
                        {"initial_states", mdp.initial_states}};
}

std::pair<TabularMdp, PolicyTable> mdp_from_json(const nlohmann::json& j) {
  for (const char* field : {"H", "num_states", "num_actions", "transitions", "rewards",
                            "expert_policy"}) {
    if (!j.contains(field)) throw std::invalid_argument(std::string("missing ") + field);
  }
  TabularMdp mdp;
  mdp.horizon = j.at("H").get<int>();
  mdp.num_states = j.at("num_states").get<int>();
  mdp.num_actions = j.at("num_actions").get<int>();
  mdp.transitions = j.at("transitions")
                        .get<std::vector<std::vector<std::vector<std::vector<double>>>>>();
  mdp.rewards = j.at("rewards").get<std::vector<std::vector<double>>>();
  if (j.contains("initial_states")) mdp.initial_states = j.at("initial_states").get<std::vector<int>>();
  PolicyTable expert;
  expert.probs = j.at("expert_policy").get<std::vector<std::vector<std::vector<double>>>>();
  mdp.validate();
  validate_policy(mdp, expert);
  return {std::move(mdp), std::move(expert)};
}

TabularMdp make_chain(int num_states, int horizon, double s_lo, double s_hi,
                      const std::vector<double>& bonus, double p_slip) {
  if (num_states < 2) throw std::invalid_argument("chain needs at least two states");
  if (bonus.size() != 3) throw std::invalid_argument("chain actions are left/stay/right");
  if (p_slip < 0.0 || p_slip > 1.0) throw std::invalid_argument("slip outside [0,1]");
  TabularMdp mdp;
  mdp.num_states = num_states;
  mdp.num_actions = 3;
  mdp.horizon = horizon;
  mdp.rewards.assign(num_states, std::vector<double>(3, 0.0));
  for (int x = 0; x < num_states; ++x) {
    const double s = s_lo + (s_hi - s_lo) * x / (num_states - 1);
    for (int a = 0; a < 3; ++a) mdp.rewards[x][a] = s + bonus[a];
  }
  mdp.transitions.assign(
      horizon, std::vector<std::vector<std::vector<double>>>(
                   num_states, std::vector<std::vector<double>>(
                                   3, std::vector<double>(num_states, 0.0))));
  for (int h = 0; h < horizon; ++h) {
    for (int x = 0; x < num_states; ++x) {
      mdp.transitions[h][x][0][std::max(x - 1, 0)] += 1.0 - p_slip;
      mdp.transitions[h][x][0][x] += p_slip;
      mdp.transitions[h][x][1][x] = 1.0;
      mdp.transitions[h][x][2][std::min(x + 1, num_states - 1)] += 1.0 - p_slip;
      mdp.transitions[h][x][2][x] += p_slip;
    }
  }
  mdp.initial_states = {0};
  mdp.validate();
  return mdp;
}

PolicyTable soft_greedy_expert(const TabularMdp& mdp, double greedy_p) {
  mdp.validate();
  if (mdp.num_actions < 2) throw std::invalid_argument("soft policy needs two actions");
  if (greedy_p < 0.0 || greedy_p > 1.0) throw std::invalid_argument("greedy_p outside [0,1]");
  const int H = mdp.horizon;
  const int X = mdp.num_states;
  const int A = mdp.num_actions;
  PolicyTable policy;
  policy.probs.assign(H, std::vector<std::vector<double>>(X, std::vector<double>(A, 0.0)));
  std::vector<double> v_next(X, 0.0);
  std::vector<double> v_here(X, 0.0);
  for (int h = H - 1; h >= 0; --h) {
    for (int x = 0; x < X; ++x) {
      int best = 0;
      double best_q = -1.0;
      for (int a = 0; a < A; ++a) {
        double q = mdp.rewards[x][a];
        for (int y = 0; y < X; ++y) q += mdp.transitions[h][x][a][y] * v_next[y];
        if (q > best_q) {
          best_q = q;
          best = a;
        }
      }
      v_here[x] = best_q;
      for (int a = 0; a < A; ++a) {
        policy.probs[h][x][a] = a == best ? greedy_p : (1.0 - greedy_p) / (A - 1);
      }
    }
    v_next = v_here;
  }
  return policy;
}

}  // namespace pref
