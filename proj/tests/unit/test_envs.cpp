#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "pref/bandit.hpp"
#include "pref/envs.hpp"

using namespace pref;

namespace {

CbInstance single_context(std::vector<double> rewards) {
  CbInstance instance;
  instance.cls.num_contexts = 1;
  instance.cls.num_actions = static_cast<int>(rewards.size());
  instance.cls.members.push_back({{std::move(rewards)}});
  instance.link = make_link(LinkKind::Square);
  return instance;
}

}  // namespace

TEST_CASE("gap is the exact min over contexts of max minus runner-up") {
  auto lopsided = single_context({0.9, 0.1});
  CHECK(gap(lopsided) == 0.9 - 0.1);

  auto tied = single_context({0.7, 0.7});
  CHECK(gap(tied) == 0.0);

  CbInstance multi;
  multi.cls.num_contexts = 3;
  multi.cls.num_actions = 3;
  multi.cls.members.push_back({{{0.9, 0.1, 0.2}, {0.5, 0.7, 0.65}, {0.3, 0.25, 0.3}}});
  multi.link = make_link(LinkKind::Square);
  CHECK(context_gap(multi.truth(), 0) == 0.9 - 0.2);
  CHECK(context_gap(multi.truth(), 1) == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(context_gap(multi.truth(), 2) == 0.0);
  CHECK(gap(multi) == 0.0);
}

TEST_CASE("gap matches a brute-force scan on random truths") {
  Rng rng(derive_seed(11, "instance-gen"));
  for (int trial = 0; trial < 50; ++trial) {
    int X = 1 + static_cast<int>(rng.uniform_int(4));
    int A = 2 + static_cast<int>(rng.uniform_int(4));
    CbInstance instance;
    instance.cls.num_contexts = X;
    instance.cls.num_actions = A;
    RewardPreferenceFunction truth;
    truth.rewards.assign(X, std::vector<double>(A));
    for (auto& row : truth.rewards) {
      for (auto& v : row) v = rng.uniform01();
    }
    instance.cls.members.push_back(truth);
    double expect = 2.0;
    for (int x = 0; x < X; ++x) {
      int opt = best_arm(truth, x);
      for (int a = 0; a < A; ++a) {
        if (a != opt) expect = std::min(expect, truth.margin(x, opt, a));
      }
    }
    CHECK(gap(instance) == expect);
  }
}

TEST_CASE("context gap counts over a realized schedule") {
  CbInstance instance;
  instance.cls.num_contexts = 3;
  instance.cls.num_actions = 2;
  instance.cls.members.push_back({{{0.9, 0.1}, {0.6, 0.4}, {0.8, 0.5}}});
  instance.link = make_link(LinkKind::Square);
  std::vector<int> contexts = {0, 1, 2, 1, 0};
  CHECK(context_gap_count(instance, contexts, 0.1) == 0);
  CHECK(context_gap_count(instance, contexts, 0.2) == 2);
  CHECK(context_gap_count(instance, contexts, 0.8) == 5);

  instance.schedule.kind = ScheduleKind::RoundRobin;
  instance.horizon = 6;
  CHECK(context_gap_count(instance, 0.25, 0u) == 2);
}

TEST_CASE("regret increment reads the planted truth") {
  auto instance = single_context({0.9, 0.1});
  CHECK(regret_increment(instance, 0, 0, 0) == 0.0);
  CHECK(regret_increment(instance, 0, 1, 1) == 2.0 * (0.9 - 0.1));
  CHECK(regret_increment(instance, 0, 0, 1) == context_gap(instance.truth(), 0));
}

TEST_CASE("generated instances plant the requested gap exactly") {
  GeneratorConfig config;
  Rng rng(derive_seed(7, "instance-gen"));
  auto instance = generate_instance(config, rng);
  CHECK(instance.cls.members.size() == 16);
  CHECK(instance.truth_index == 0);
  CHECK(gap(instance) == 0.25);
  for (int x = 0; x < instance.cls.num_contexts; ++x) {
    const auto& row = instance.truth().rewards[x];
    CHECK(std::count(row.begin(), row.end(), 0.75) == 1);
    CHECK(std::count(row.begin(), row.end(), 0.5) == 1);
    CHECK(*std::max_element(row.begin(), row.end()) == 0.75);
  }
  int flipped = 0;
  for (std::size_t m = 1; m < instance.cls.members.size(); ++m) {
    bool disagrees = false;
    for (int x = 0; x < instance.cls.num_contexts; ++x) {
      if (best_arm(instance.cls.members[m], x) != best_arm(instance.truth(), x)) {
        disagrees = true;
      }
    }
    flipped += disagrees;
  }
  CHECK(flipped >= 8);
}

TEST_CASE("generation is deterministic in the seed") {
  GeneratorConfig config;
  Rng rng_a(derive_seed(3, "instance-gen"));
  Rng rng_b(derive_seed(3, "instance-gen"));
  Rng rng_c(derive_seed(4, "instance-gen"));
  CHECK(generate_instance(config, rng_a).to_json() == generate_instance(config, rng_b).to_json());
  CHECK(generate_instance(config, rng_a).to_json() != generate_instance(config, rng_c).to_json());
}

TEST_CASE("zero gap request ties the top two arms") {
  GeneratorConfig config;
  config.gap = 0.0;
  Rng rng(derive_seed(9, "instance-gen"));
  auto instance = generate_instance(config, rng);
  CHECK(gap(instance) == 0.0);
}

TEST_CASE("singleton generated class never queries") {
  GeneratorConfig config;
  config.class_size = 1;
  Rng rng(derive_seed(5, "instance-gen"));
  auto instance = generate_instance(config, rng);
  CHECK(instance.cls.members.size() == 1);
  CbParams params = CbParams::make(1.0, instance.link.alpha, 0.05, 50, config.num_actions);
  CbLearner learner(params, instance.cls, instance.link, {}, derive_seed(5, "algorithm"));
  for (int t = 0; t < 50; ++t) {
    auto d = learner.act(t % config.num_contexts);
    CHECK(d.queried == 0);
    learner.advance(d);
  }
}

TEST_CASE("generator rejects infeasible requests") {
  Rng rng(derive_seed(1, "instance-gen"));
  GeneratorConfig config;
  config.gap = 1.2;
  CHECK_THROWS_AS(generate_instance(config, rng), std::invalid_argument);
  config.gap = 0.25;
  config.base = 0.9;
  CHECK_THROWS_AS(generate_instance(config, rng), std::invalid_argument);
  config.base = 0.5;
  config.flip_lo = 0.5;
  config.flip_hi = 0.2;
  CHECK_THROWS_AS(generate_instance(config, rng), std::invalid_argument);
  config.flip_hi = 0.6;
  config.num_actions = 1;
  CHECK_THROWS_AS(generate_instance(config, rng), std::invalid_argument);
}

TEST_CASE("preference sampling matches the link marginal") {
  auto instance = single_context({0.9, 0.1});
  const int n = 100000;
  for (auto kind : {LinkKind::Square, LinkKind::Logistic}) {
    instance.link = make_link(kind);
    Rng rng(derive_seed(21, "feedback"));
    int plus = 0;
    for (int i = 0; i < n; ++i) plus += sample_preference(instance, 0, 0, 1, rng) == 1;
    double target = link_value(instance.link, 0.8);
    CHECK(std::abs(static_cast<double>(plus) / n - target) < 0.01);
  }
}

TEST_CASE("round robin and explicit schedules materialize in order") {
  ContextSchedule rr;
  rr.kind = ScheduleKind::RoundRobin;
  CHECK(materialize_schedule(rr, 7, 3, 0) == std::vector<int>{0, 1, 2, 0, 1, 2, 0});

  ContextSchedule ex;
  ex.kind = ScheduleKind::Explicit;
  ex.order = {2, 0, 1};
  CHECK(materialize_schedule(ex, 3, 3, 0) == std::vector<int>{2, 0, 1});
  CHECK_THROWS_AS(materialize_schedule(ex, 4, 3, 0), std::out_of_range);
  ex.order = {5};
  CHECK_THROWS_AS(materialize_schedule(ex, 1, 3, 0), std::out_of_range);
}

TEST_CASE("iid schedule is a deterministic stream of in-range draws") {
  ContextSchedule iid;
  auto seed = derive_seed(13, "contexts");
  auto a = materialize_schedule(iid, 200, 4, seed);
  auto b = materialize_schedule(iid, 200, 4, seed);
  auto c = materialize_schedule(iid, 200, 4, derive_seed(14, "contexts"));
  CHECK(a == b);
  CHECK(a != c);
  CHECK(std::all_of(a.begin(), a.end(), [](int x) { return x >= 0 && x < 4; }));

  ScheduleCursor cursor(iid, 4, seed);
  std::vector<PublicRound> history;
  for (int t = 0; t < 200; ++t) CHECK(cursor.next(history) == a[t]);
}

TEST_CASE("adaptive schedule sees the public history") {
  ContextSchedule adaptive;
  adaptive.kind = ScheduleKind::Adaptive;
  adaptive.adapt = [](const std::vector<PublicRound>& history) {
    return static_cast<int>(history.size()) % 3;
  };
  ScheduleCursor cursor(adaptive, 3, 0);
  std::vector<PublicRound> history;
  for (int t = 0; t < 9; ++t) {
    CHECK(cursor.next(history) == t % 3);
    history.push_back({t % 3, 0, 0, false});
  }
  CHECK_THROWS_AS(materialize_schedule(adaptive, 5, 3, 0), std::invalid_argument);

  ContextSchedule broken;
  broken.kind = ScheduleKind::Adaptive;
  broken.adapt = [](const std::vector<PublicRound>&) { return 7; };
  ScheduleCursor bad(broken, 3, 0);
  CHECK_THROWS_AS(bad.next(history), std::out_of_range);
}

TEST_CASE("instance json round trips every schedule form") {
  GeneratorConfig config;
  config.horizon = 123;
  Rng rng(derive_seed(2, "instance-gen"));
  auto instance = generate_instance(config, rng);

  for (auto kind : {ScheduleKind::Iid, ScheduleKind::RoundRobin, ScheduleKind::Explicit}) {
    instance.schedule.kind = kind;
    instance.schedule.order = kind == ScheduleKind::Explicit ? std::vector<int>{0, 4, 2}
                                                             : std::vector<int>{};
    auto j = instance.to_json();
    auto back = CbInstance::from_json(j);
    CHECK(back.to_json() == j);
    CHECK(back.schedule.kind == kind);
    CHECK(back.horizon == 123);
    CHECK(back.truth_index == 0);
  }

  instance.schedule.kind = ScheduleKind::Adaptive;
  CHECK_THROWS_AS(instance.to_json(), std::invalid_argument);

  instance.schedule.kind = ScheduleKind::Iid;
  auto j = instance.to_json();
  auto missing_truth = j;
  missing_truth.erase("truth_index");
  CHECK_THROWS_AS(CbInstance::from_json(missing_truth), std::invalid_argument);
  auto missing_link = j;
  missing_link.erase("link");
  CHECK_THROWS_AS(CbInstance::from_json(missing_link), std::invalid_argument);
  auto bad_schedule = j;
  bad_schedule["schedule"] = nlohmann::json::object();
  CHECK_THROWS_AS(CbInstance::from_json(bad_schedule), std::invalid_argument);
  auto bad_truth = j;
  bad_truth["truth_index"] = 99;
  CHECK_THROWS_AS(CbInstance::from_json(bad_truth), std::invalid_argument);
}

TEST_CASE("generated instances keep the truth in the class across seeds") {
  GeneratorConfig config;
  for (int seed = 0; seed < 20; ++seed) {
    Rng rng(derive_seed(static_cast<std::uint64_t>(seed), "instance-gen"));
    auto instance = generate_instance(config, rng);
    instance.validate();
    const auto& truth = instance.truth();
    CHECK(instance.cls.members[0].rewards == truth.rewards);
    for (const auto& member : instance.cls.members) {
      for (const auto& row : member.rewards) {
        for (double r : row) {
          CHECK(r >= 0.0);
          CHECK(r <= 1.0);
        }
      }
    }
  }
}
