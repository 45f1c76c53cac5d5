#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pref/envs.hpp"
#include "pref/il.hpp"

namespace pref {

// rejected run configuration; the CLI maps it to exit code 2
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// a per-round check failed; the message names the check and the round; exit 3
class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One row of the per-round log. The cum columns are prefix sums of the
// increments; on unqueried rounds w is 0 and lambda is still the threshold
// indicator.
struct RoundRecord {
  long t = 0;  // 1-based
  int z = 0;
  int lambda = 0;
  double w = 0.0;
  int a = 0;
  int b = 0;
  double regret_increment = 0.0;
  double cum_regret = 0.0;
  long cum_queries = 0;
  double oracle_cum_loss = 0.0;
  int version_space_size = 0;
};

// header plus rows, floats at nine significant digits
std::string round_csv_header();
std::string round_csv_line(const RoundRecord& r);

struct EpisodeRecord {
  long episode = 0;  // 1-based
  double regret_increment = 0.0;
  double cum_regret = 0.0;
  long cum_queries = 0;
  double adv_increment = 0.0;
};

std::string episode_csv_header();
std::string episode_csv_line(const EpisodeRecord& r);

// Rounds where each named per-round check was evaluated; a run that finishes
// had zero violations, a violated check throws instead.
struct InvariantCounts {
  long width_domination = 0;
  long gap_width = 0;
  long igw_inequality = 0;
  long igw_feasibility = 0;
  long lambda_monotone = 0;
  long query_gating = 0;

  nlohmann::json to_json() const;
};

// Exactly one of generator/instance. horizon falls back to the instance's own;
// 0 is a legal empty run, 1 and 2 are rejected by the confidence radius.
struct CbRunConfig {
  std::uint64_t seed = 0;
  std::optional<int> horizon;
  double delta = 0.05;
  bool check_invariants = false;
  std::optional<double> gap_epsilon;  // adds a low-gap round count to the summary
  std::vector<int> checkpoints;       // rounds whose cum columns go to the summary
  OracleConfig oracle{};
  std::optional<GeneratorConfig> generator;
  std::optional<CbInstance> instance;
  std::optional<std::uint64_t> instance_seed;  // pins the generator stream across seeds

  static CbRunConfig from_json(const nlohmann::json& j);
};

struct CbRunOutput {
  std::string rounds_csv;
  nlohmann::json summary;
};

// Deterministic in (config, seed). Streams: "instance-gen" builds the
// instance, "contexts" drives the schedule, "algorithm" and "feedback" at
// index 0 drive the learner and the labels.
CbRunOutput run_cb(const nlohmann::json& config);

// mdp given explicitly (with its expert policy) or as a chain block with a
// soft-greedy expert; classes given explicitly or through a seeded generator.
struct IlRunConfig {
  std::uint64_t seed = 0;
  int episodes = 0;
  double delta = 0.05;
  LinkSpec link = make_link(LinkKind::Square);
  bool check_invariants = false;
  bool dump_step_logs = false;
  OracleConfig oracle{};
  TabularMdp mdp;
  ExpertModel model;
  std::vector<FunctionClass> classes;

  static IlRunConfig from_json(const nlohmann::json& j);
};

struct IlRunOutput {
  std::string episodes_csv;
  std::string steps_csv;  // empty unless dump_step_logs
  nlohmann::json summary;
};

// Per-episode rows carry the exact value gap of the post-episode snapshot.
// With dump_step_logs the per-step log uses the round schema with one global
// step index; an H=1 run reproduces the induced run_cb log byte for byte.
IlRunOutput run_il(const nlohmann::json& config);

struct SweepOutput {
  std::string cells_csv;    // one row per (T, seed)
  std::string medians_csv;  // per T: medians and query growth vs the previous T
};

// Cells run independently on `threads` workers; outputs do not depend on the
// worker count.
SweepOutput sweep(const nlohmann::json& config);

}  // namespace pref
