#pragma once

#include <optional>
#include <vector>

#include "pref/funcspace.hpp"
#include "pref/links.hpp"

namespace pref {

// Per-link learning rate and regret constant for the exponentially weighted
// forecaster. The defaults keep loss(mean) within the mixture bound, which is
// what makes oracle_regret <= constant * ln|F| hold on every stream:
//   square:   eta = 1/2, constant = 2   ((d-y)^2/4 is 1/2-exp-concave)
//   logistic: eta = 1/e, constant = e   (margin-space curvature floor is 1/e)
struct OracleConfig {
  std::optional<double> eta;
  std::optional<double> constant;
};

double default_eta(const LinkSpec& link);
double default_constant(const LinkSpec& link);

// Improper predictor: the weighted mean margin need not be any member's.
// Version spaces consume only the stored pointwise predictions, so that is
// sufficient.
class OracleState {
 public:
  OracleState(const FunctionClass& cls, LinkSpec link, OracleConfig cfg = {});

  // weighted mean rewards per action at context x
  std::vector<double> mean_rewards(int x) const;

  // Evaluated through the per-arm means so the inverse-gap-weighting
  // representation r_hat(x,a) - r_hat(x,b) reproduces it bit for bit.
  double predict(int x, int a, int b) const;

  void update(int x, int a, int b, int y);

  double cumulative_loss() const { return cumulative_loss_; }
  double oracle_regret() const;
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& per_member_loss() const { return per_member_loss_; }
  double eta() const { return eta_; }
  const FunctionClass& cls() const { return *cls_; }

 private:
  const FunctionClass* cls_;
  LinkSpec link_;
  double eta_;
  std::vector<double> log_weights_;
  std::vector<double> weights_;  // normalized cache, rebuilt on update
  double cumulative_loss_ = 0.0;
  std::vector<double> per_member_loss_;

  void refresh_weights();
};

double upsilon_bound(int class_size, const LinkSpec& link, OracleConfig cfg = {});

}  // namespace pref
