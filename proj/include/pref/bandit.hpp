#pragma once

#include <cstdint>
#include <vector>

#include "pref/funcspace.hpp"
#include "pref/links.hpp"
#include "pref/oracle.hpp"
#include "pref/rng.hpp"

namespace pref {

struct CbParams {
  int T = 0;
  int A = 0;
  double beta = 0.0;
  double gamma = 0.0;  // sqrt(A * T / beta), also the switch threshold
  double delta = 0.0;

  static CbParams make(double upsilon, double alpha, double delta, int T, int A);
};

// beta = 4*upsilon/alpha + ((16 + 24*alpha)/alpha^2) * ln(4 ln(T)/delta)
double confidence_radius(double upsilon, double alpha, double delta, int T);

struct RoundDecision {
  int a = 0;
  int b = 0;
  int queried = 0;  // 1 iff the candidate set is non-singleton
  int lambda = 0;
  double width = 0.0;
  std::vector<int> candidate_arms;
  std::vector<int> version;
  std::vector<double> distribution;  // over all actions; empty when unqueried
  std::vector<double> mean_rewards;  // oracle representation; empty when unqueried
};

// closed form: p(a) = 1/(A + gamma*(rhat(ahat) - rhat(a))) off the greedy arm,
// remainder on the greedy arm
std::vector<double> igw_distribution(const std::vector<double>& rhat, double gamma);

struct IgwCheck {
  bool ok = true;
  int offending_arm = -1;
  double lhs = 0.0;
  double bound = 0.0;
};

// every candidate arm must satisfy
//   sum_b fhat(a,b) p(b) + 2/(gamma p(a)) <= 5A/gamma + 1e-9
IgwCheck igw_constraint_check(const std::vector<double>& p,
                              const std::vector<double>& rhat, double gamma,
                              const std::vector<int>& arms);

// One round: act -> (observe | advance). act mutates only the rng.
class CbLearner {
 public:
  CbLearner(CbParams params, const FunctionClass& cls, LinkSpec link,
            OracleConfig oracle_cfg, std::uint64_t algo_seed);

  RoundDecision act(int x);
  void observe(int x, const RoundDecision& decision, int y);
  void advance(const RoundDecision& decision);

  // decision branch at x without touching the rng; distribution composed with
  // the final uniform pick over {a,b} equals this distribution itself
  std::vector<double> action_distribution(int x) const;

  const CbParams& params() const { return params_; }
  const OracleState& oracle() const { return oracle_; }
  const QueryHistory& history() const { return history_; }
  const std::vector<double>& residuals() const { return residuals_; }
  double zw_sum() const { return zw_sum_; }
  int round() const { return round_; }
  bool in_version(int member) const;

 private:
  CbParams params_;
  const FunctionClass* cls_;
  LinkSpec link_;
  OracleState oracle_;
  QueryHistory history_;
  std::vector<double> residuals_;  // per member, against stored predictions
  double zw_sum_ = 0.0;
  int round_ = 0;
  Rng rng_;

  std::vector<int> current_version() const;
  int lambda_now() const;
};

}  // namespace pref
