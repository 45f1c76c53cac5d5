#include "pref/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pref {

namespace {
constexpr double kTol = 1e-9;
}

double confidence_radius(double upsilon, double alpha, double delta, int T) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must be in (0,1)");
  if (T < 3) throw std::invalid_argument("horizon must be >= 3");
  return 4.0 * upsilon / alpha +
         (16.0 + 24.0 * alpha) / (alpha * alpha) * std::log(4.0 * std::log(T) / delta);
}

CbParams CbParams::make(double upsilon, double alpha, double delta, int T, int A) {
  if (A < 2) throw std::invalid_argument("need at least two actions");
  CbParams p;
  p.T = T;
  p.A = A;
  p.delta = delta;
  p.beta = confidence_radius(upsilon, alpha, delta, T);
  p.gamma = std::sqrt(static_cast<double>(A) * T / p.beta);
  return p;
}

std::vector<double> igw_distribution(const std::vector<double>& rhat, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
  const int A = static_cast<int>(rhat.size());
  int ahat = 0;
  for (int a = 1; a < A; ++a) {
    if (rhat[a] > rhat[ahat]) ahat = a;
  }
  std::vector<double> p(A, 0.0);
  double rest = 0.0;
  for (int a = 0; a < A; ++a) {
    if (a == ahat) continue;
    p[a] = 1.0 / (A + gamma * (rhat[ahat] - rhat[a]));
    rest += p[a];
  }
  p[ahat] = 1.0 - rest;  // >= 1/A since every other mass is <= 1/A
  return p;
}

IgwCheck igw_constraint_check(const std::vector<double>& p,
                              const std::vector<double>& rhat, double gamma,
                              const std::vector<int>& arms) {
  const int A = static_cast<int>(rhat.size());
  IgwCheck out;
  out.bound = 5.0 * A / gamma + kTol;
  for (int a : arms) {
    if (!(p[a] > 0.0)) {
      out.ok = false;
      out.offending_arm = a;
      out.lhs = std::numeric_limits<double>::infinity();
      return out;
    }
    double expected_margin = 0.0;
    for (int b = 0; b < A; ++b) expected_margin += (rhat[a] - rhat[b]) * p[b];
    double lhs = expected_margin + 2.0 / (gamma * p[a]);
    if (lhs > out.bound) {
      out.ok = false;
      out.offending_arm = a;
      out.lhs = lhs;
      return out;
    }
    out.lhs = std::max(out.lhs, lhs);
  }
  return out;
}

CbLearner::CbLearner(CbParams params, const FunctionClass& cls, LinkSpec link,
                     OracleConfig oracle_cfg, std::uint64_t algo_seed)
    : params_(params),
      cls_(&cls),
      link_(link),
      oracle_(cls, link, oracle_cfg),
      rng_(algo_seed) {
  cls.validate();
  if (cls.num_actions != params.A) {
    throw std::invalid_argument("class action count disagrees with params");
  }
  residuals_.assign(cls.members.size(), 0.0);
}

std::vector<int> CbLearner::current_version() const {
  std::vector<int> version;
  for (int m = 0; m < static_cast<int>(residuals_.size()); ++m) {
    if (residuals_[m] <= params_.beta + kTol) version.push_back(m);
  }
  return version;
}

bool CbLearner::in_version(int member) const {
  return residuals_[member] <= params_.beta + kTol;
}

int CbLearner::lambda_now() const {
  return zw_sum_ >= params_.gamma - kTol ? 1 : 0;
}

RoundDecision CbLearner::act(int x) {
  RoundDecision d;
  d.version = current_version();
  d.candidate_arms = candidate_arms(*cls_, d.version, x);
  d.lambda = lambda_now();
  if (d.candidate_arms.size() == 1) {
    d.queried = 0;
    d.a = d.b = d.candidate_arms[0];
    return d;
  }
  d.queried = 1;
  d.width = width(*cls_, d.version, d.candidate_arms, x);
  d.mean_rewards = oracle_.mean_rewards(x);
  if (d.lambda == 0) {
    d.distribution.assign(params_.A, 0.0);
    double share = 1.0 / static_cast<double>(d.candidate_arms.size());
    for (int a : d.candidate_arms) d.distribution[a] = share;
    int k = static_cast<int>(d.candidate_arms.size());
    d.a = d.candidate_arms[rng_.uniform_int(k)];
    d.b = d.candidate_arms[rng_.uniform_int(k)];
  } else {
    d.distribution = igw_distribution(d.mean_rewards, params_.gamma);
    d.a = rng_.pick_cdf(d.distribution);
    d.b = rng_.pick_cdf(d.distribution);
  }
  return d;
}

void CbLearner::observe(int x, const RoundDecision& decision, int y) {
  if (!decision.queried) {
    throw std::logic_error("observe called on an unqueried round");
  }
  if (y != 1 && y != -1) throw std::invalid_argument("label must be +1 or -1");
  double pred = oracle_.predict(x, decision.a, decision.b);
  for (int m = 0; m < static_cast<int>(residuals_.size()); ++m) {
    double gap = cls_->margin(m, x, decision.a, decision.b) - pred;
    residuals_[m] += gap * gap;
  }
  history_.records.push_back({x, decision.a, decision.b, pred, y});
  oracle_.update(x, decision.a, decision.b, y);
  zw_sum_ += decision.width;
  ++round_;
}

void CbLearner::advance(const RoundDecision& decision) {
  if (decision.queried) {
    throw std::logic_error("advance called on a queried round");
  }
  ++round_;
}

std::vector<double> CbLearner::action_distribution(int x) const {
  auto version = current_version();
  auto arms = candidate_arms(*cls_, version, x);
  std::vector<double> p(params_.A, 0.0);
  if (arms.size() == 1) {
    p[arms[0]] = 1.0;
  } else if (lambda_now() == 0) {
    double share = 1.0 / static_cast<double>(arms.size());
    for (int a : arms) p[a] = share;
  } else {
    p = igw_distribution(oracle_.mean_rewards(x), params_.gamma);
  }
  return p;
}

}  // namespace pref
