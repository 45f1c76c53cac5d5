#include "pref/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace pref {

double default_eta(const LinkSpec& link) {
  return link.kind == LinkKind::Square ? 0.5 : 1.0 / std::exp(1.0);
}

double default_constant(const LinkSpec& link) {
  return link.kind == LinkKind::Square ? 2.0 : std::exp(1.0);
}

OracleState::OracleState(const FunctionClass& cls, LinkSpec link, OracleConfig cfg)
    : cls_(&cls), link_(link), eta_(cfg.eta.value_or(default_eta(link))) {
  cls.validate();
  if (!(eta_ >= 0.0)) throw std::invalid_argument("oracle eta must be >= 0");
  log_weights_.assign(cls.members.size(), 0.0);
  per_member_loss_.assign(cls.members.size(), 0.0);
  refresh_weights();
}

void OracleState::refresh_weights() {
  double top = *std::max_element(log_weights_.begin(), log_weights_.end());
  double total = 0.0;
  weights_.resize(log_weights_.size());
  for (std::size_t m = 0; m < log_weights_.size(); ++m) {
    weights_[m] = std::exp(log_weights_[m] - top);
    total += weights_[m];
  }
  for (auto& w : weights_) w /= total;
}

std::vector<double> OracleState::mean_rewards(int x) const {
  std::vector<double> r(cls_->num_actions, 0.0);
  for (std::size_t m = 0; m < weights_.size(); ++m) {
    const auto& row = cls_->members[m].rewards[x];
    for (int a = 0; a < cls_->num_actions; ++a) r[a] += weights_[m] * row[a];
  }
  return r;
}

double OracleState::predict(int x, int a, int b) const {
  auto r = mean_rewards(x);
  return std::clamp(r[a] - r[b], -1.0, 1.0);
}

void OracleState::update(int x, int a, int b, int y) {
  cumulative_loss_ += loss_value(link_, predict(x, a, b), y);
  for (std::size_t m = 0; m < log_weights_.size(); ++m) {
    double loss = loss_value(link_, cls_->margin(static_cast<int>(m), x, a, b), y);
    per_member_loss_[m] += loss;
    log_weights_[m] -= eta_ * loss;
  }
  refresh_weights();
}

double OracleState::oracle_regret() const {
  double best = *std::min_element(per_member_loss_.begin(), per_member_loss_.end());
  return cumulative_loss_ - best;
}

double upsilon_bound(int class_size, const LinkSpec& link, OracleConfig cfg) {
  if (class_size < 1) throw std::invalid_argument("class size must be >= 1");
  return cfg.constant.value_or(default_constant(link)) *
         std::log(static_cast<double>(class_size));
}

}  // namespace pref
