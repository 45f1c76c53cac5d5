#include <doctest.h>

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "pref/il.hpp"

using namespace pref;

namespace {

struct ChainSetup {
  TabularMdp mdp;
  ExpertModel model;
  std::vector<FunctionClass> classes;
};

ChainSetup chain_setup(int horizon, std::uint64_t class_seed, double p_slip = 0.1,
                       IlGeneratorConfig config = {}) {
  ChainSetup setup;
  setup.mdp = make_chain(6, horizon, 0.1, 0.55, {0.0, 0.1, 0.25}, p_slip);
  setup.model = expert_q(setup.mdp, soft_greedy_expert(setup.mdp));
  Rng rng(class_seed);
  setup.classes = generate_il_classes(setup.model, config, rng);
  return setup;
}

}  // namespace

TEST_CASE("preference margin scales q-differences by the horizon") {
  auto setup = chain_setup(4, 1);
  const auto& q = setup.model.q_values;
  CHECK(preference_margin(setup.model, 0, 0, 1, 1) == 0.0);
  CHECK(preference_margin(setup.model, 2, 3, 0, 2) ==
        -preference_margin(setup.model, 2, 3, 2, 0));
  CHECK(preference_margin(setup.model, 1, 2, 2, 0) == (q[1][2][2] - q[1][2][0]) / 4.0);
  for (int h = 0; h < 4; ++h) {
    for (int x = 0; x < 6; ++x) {
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
          double m = preference_margin(setup.model, h, x, a, b);
          CHECK(m <= 1.0);
          CHECK(m >= -1.0);
        }
      }
    }
  }
}

TEST_CASE("generated step classes keep the scaled truth at member zero") {
  auto setup = chain_setup(4, 777);
  REQUIRE(setup.classes.size() == 4);
  for (int h = 0; h < 4; ++h) {
    const auto& cls = setup.classes[h];
    CHECK(cls.members.size() == 8);
    CHECK(cls.num_contexts == 6);
    CHECK(cls.num_actions == 3);
    for (int x = 0; x < 6; ++x) {
      for (int a = 0; a < 3; ++a) {
        CHECK(cls.members[0].rewards[x][a] == setup.model.q_values[h][x][a] / 4.0);
      }
    }
    for (int m = 1; m <= 3; ++m) {
      for (int x = 0; x < 6; ++x) {
        const auto& row = cls.members[m].rewards[x];
        CHECK(std::accumulate(row.begin(), row.end(), 0.0) == 1.0);
        CHECK(*std::max_element(row.begin(), row.end()) == 1.0);
        CHECK(best_arm(cls.members[m], x) != best_arm(cls.members[0], x));
      }
    }
    for (int m = 4; m <= 7; ++m) {
      for (int x = 0; x < 6; ++x) {
        CHECK(best_arm(cls.members[m], x) == best_arm(cls.members[0], x));
        for (double r : cls.members[m].rewards[x]) {
          CHECK(r >= 0.0);
          CHECK(r <= 1.0);
        }
      }
    }
  }
}

TEST_CASE("class generation rejects malformed configs") {
  auto setup = chain_setup(2, 5);
  Rng rng(5);
  IlGeneratorConfig config;
  config.saturated_flips = 8;
  CHECK_THROWS_AS(generate_il_classes(setup.model, config, rng), std::invalid_argument);
  config = {};
  config.class_size = 0;
  CHECK_THROWS_AS(generate_il_classes(setup.model, config, rng), std::invalid_argument);
}

TEST_CASE("expert snapshot has zero regret and nonnegative advantage") {
  auto setup = chain_setup(4, 9);
  PolicySnapshot expert_snapshot{setup.model.policy.probs};
  auto [regret, adv] = il_regret_and_adv(setup.mdp, setup.model, expert_snapshot, 0);
  CHECK(regret == 0.0);
  CHECK(adv >= 0.0);
  CHECK(adv > 0.1);  // soft expert leaves room above its own value
}

TEST_CASE("greedy snapshot beats the expert on the chain") {
  auto setup = chain_setup(4, 9);
  PolicySnapshot greedy{greedy_policy(setup.model).probs};
  auto [regret, adv] = il_regret_and_adv(setup.mdp, setup.model, greedy, 0);
  CHECK(regret < -0.3);
  CHECK(adv >= 0.0);
}

TEST_CASE("singleton classes give an unqueried deterministic greedy run") {
  IlGeneratorConfig config;
  config.class_size = 1;
  config.saturated_flips = 0;
  auto setup = chain_setup(4, 3, 0.0, config);
  IlConfig il;
  il.episodes = 20;
  IlRunner runner(setup.mdp, setup.model, setup.classes, il, 42);
  auto greedy = greedy_policy(setup.model);
  for (int t = 0; t < 20; ++t) {
    auto episode = runner.run_episode();
    CHECK(episode.queries == 0);
    CHECK(episode.regret_increment < 0.0);
    CHECK(episode.adv_increment >= 0.0);
    int x = 0;
    for (const auto& step : episode.steps) {
      CHECK(step.x == x);
      CHECK(step.decision.queried == 0);
      int greedy_arm = 0;
      for (int a = 1; a < 3; ++a) {
        if (greedy.probs[step.h][x][a] > greedy.probs[step.h][x][greedy_arm]) greedy_arm = a;
      }
      CHECK(step.executed == greedy_arm);
      int next = 0;
      while (setup.mdp.transitions[step.h][x][greedy_arm][next] != 1.0) ++next;
      x = next;
    }
  }
  CHECK(runner.total_queries() == 0);
}

TEST_CASE("episode queries stay within the horizon and tally per instance") {
  auto setup = chain_setup(4, 777);
  IlConfig il;
  il.episodes = 120;
  IlRunner runner(setup.mdp, setup.model, setup.classes, il, 7);
  long total = 0;
  for (int t = 0; t < 120; ++t) {
    auto episode = runner.run_episode();
    CHECK(episode.queries <= setup.mdp.horizon);
    CHECK(episode.adv_increment >= 0.0);
    total += episode.queries;
  }
  CHECK(total == runner.total_queries());
  long per_instance = 0;
  for (int h = 0; h < 4; ++h) {
    per_instance += static_cast<long>(runner.instance(h).history().records.size());
  }
  CHECK(per_instance == runner.total_queries());
  CHECK_THROWS_AS([&] {
    IlRunner bad(setup.mdp, setup.model, {setup.classes[0]}, il, 7);
  }(), std::invalid_argument);
}

TEST_CASE("snapshot rows are distributions and evaluation matches monte carlo") {
  auto setup = chain_setup(4, 778);
  IlConfig il;
  il.episodes = 400;
  IlRunner runner(setup.mdp, setup.model, setup.classes, il, 11);
  for (int t = 0; t < 200; ++t) runner.run_episode();
  auto snapshot = runner.snapshot_policy();
  for (const auto& step : snapshot.probs) {
    for (const auto& row : step) {
      double sum = 0.0;
      for (double p : row) {
        CHECK(p >= 0.0);
        sum += p;
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  const auto v = evaluate_policy(setup.mdp, snapshot);
  const int n = 10000;
  Rng rng(derive_seed(99, "execution"));
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    int x = 0;
    double ret = 0.0;
    for (int h = 0; h < setup.mdp.horizon; ++h) {
      int a = rng.pick_cdf(snapshot.probs[h][x]);
      ret += setup.mdp.rewards[x][a];
      x = rng.pick_cdf(setup.mdp.transitions[h][x][a]);
    }
    sum += ret;
    sumsq += ret * ret;
  }
  const double mean = sum / n;
  const double var = (sumsq - n * mean * mean) / (n - 1);
  const double se = std::sqrt(var / n);
  CHECK(std::abs(mean - v[0][0]) <= 3.0 * se + 1e-12);
}

TEST_CASE("one-step stack replays a standalone learner byte for byte") {
  auto setup = chain_setup(1, 900);
  const std::uint64_t master = 31;
  IlConfig il;
  il.episodes = 300;
  IlRunner runner(setup.mdp, setup.model, setup.classes, il, master);

  const auto& cls = setup.classes[0];
  CbParams params = CbParams::make(upsilon_bound(static_cast<int>(cls.members.size()),
                                                 il.link, il.oracle),
                                   il.link.alpha, il.delta, il.episodes, 3);
  CbLearner learner(params, cls, il.link, il.oracle, derive_seed(master, "algorithm", 0));
  Rng feedback(derive_seed(master, "feedback", 0));

  for (int t = 0; t < 300; ++t) {
    auto episode = runner.run_episode();
    REQUIRE(episode.steps.size() == 1);
    const auto& theirs = episode.steps[0].decision;
    auto ours = learner.act(0);
    CHECK(ours.a == theirs.a);
    CHECK(ours.b == theirs.b);
    CHECK(ours.queried == theirs.queried);
    CHECK(ours.lambda == theirs.lambda);
    CHECK(ours.width == theirs.width);
    CHECK(ours.distribution == theirs.distribution);
    if (ours.queried) {
      int y = sample_feedback(il.link, cls.members[0].margin(0, ours.a, ours.b), feedback);
      CHECK(y == episode.steps[0].label);
      learner.observe(0, ours, y);
    } else {
      learner.advance(ours);
    }
  }
  CHECK(static_cast<long>(learner.history().records.size()) == runner.total_queries());
}
