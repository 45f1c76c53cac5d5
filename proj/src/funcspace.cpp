#include "pref/funcspace.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <set>

namespace pref {

namespace {
constexpr double kBetaTol = 1e-9;
}

int best_arm(const RewardPreferenceFunction& f, int x) {
  if (x < 0 || x >= static_cast<int>(f.rewards.size())) {
    throw std::out_of_range("context index " + std::to_string(x));
  }
  const auto& row = f.rewards[x];
  int best = 0;
  for (int a = 1; a < static_cast<int>(row.size()); ++a) {
    if (row[a] > row[best]) best = a;
  }
  return best;
}

void FunctionClass::validate() const {
  if (members.empty()) throw std::invalid_argument("function class has no members");
  if (num_contexts < 1 || num_actions < 1) {
    throw std::invalid_argument("function class dimensions must be positive");
  }
  for (const auto& m : members) {
    if (static_cast<int>(m.rewards.size()) != num_contexts) {
      throw std::invalid_argument("member context count mismatch");
    }
    for (const auto& row : m.rewards) {
      if (static_cast<int>(row.size()) != num_actions) {
        throw std::invalid_argument("member action count mismatch");
      }
      for (double r : row) {
        if (!(r >= 0.0 && r <= 1.0)) {
          throw std::invalid_argument("reward outside [0,1]: " + std::to_string(r));
        }
      }
    }
  }
}

FunctionClass FunctionClass::from_json(const nlohmann::json& j) {
  FunctionClass cls;
  if (!j.is_object() || !j.contains("num_contexts") || !j.contains("num_actions") ||
      !j.contains("members")) {
    throw std::invalid_argument(
        "function class document needs num_contexts, num_actions, members");
  }
  cls.num_contexts = j.at("num_contexts").get<int>();
  cls.num_actions = j.at("num_actions").get<int>();
  for (const auto& m : j.at("members")) {
    RewardPreferenceFunction f;
    f.rewards = m.get<std::vector<std::vector<double>>>();
    cls.members.push_back(std::move(f));
  }
  cls.validate();
  return cls;
}

nlohmann::json FunctionClass::to_json() const {
  nlohmann::json j;
  j["num_contexts"] = num_contexts;
  j["num_actions"] = num_actions;
  auto members_json = nlohmann::json::array();
  for (const auto& m : members) members_json.push_back(m.rewards);
  j["members"] = std::move(members_json);
  return j;
}

std::vector<int> version_space(const FunctionClass& cls, const QueryHistory& history,
                               double beta) {
  if (beta < 0.0) throw std::invalid_argument("beta must be >= 0");
  std::vector<int> version;
  for (int m = 0; m < static_cast<int>(cls.members.size()); ++m) {
    double sum = 0.0;
    for (const auto& rec : history.records) {
      double d = cls.margin(m, rec.x, rec.a, rec.b) - rec.prediction;
      sum += d * d;
    }
    if (sum <= beta + kBetaTol) version.push_back(m);
  }
  return version;
}

std::vector<int> candidate_arms(const FunctionClass& cls, const std::vector<int>& version,
                                int x) {
  if (version.empty()) {
    throw realizability_error("empty version space at context " + std::to_string(x));
  }
  std::set<int> arms;
  for (int m : version) arms.insert(best_arm(cls.members[m], x));
  return {arms.begin(), arms.end()};
}

double width(const FunctionClass& cls, const std::vector<int>& version,
             const std::vector<int>& arms, int x) {
  if (version.empty() || arms.empty()) {
    throw std::invalid_argument("width needs non-empty version and arm sets");
  }
  double w = 0.0;
  for (int a : arms) {
    for (int b : arms) {
      double lo = cls.margin(version[0], x, a, b);
      double hi = lo;
      for (std::size_t i = 1; i < version.size(); ++i) {
        double v = cls.margin(version[i], x, a, b);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      w = std::max(w, hi - lo);
    }
  }
  return w;
}

int eluder_dimension_core(const std::vector<std::vector<double>>& values, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  if (values.empty()) throw std::invalid_argument("empty function matrix");
  const int points = static_cast<int>(values[0].size());
  const int funcs = static_cast<int>(values.size());
  for (const auto& row : values) {
    if (static_cast<int>(row.size()) != points) {
      throw std::invalid_argument("ragged function matrix");
    }
  }
  if (points == 0) return 0;
  if (points > 16) throw std::length_error("domain too large for exhaustive search");

  // per-pair absolute differences at every point
  std::vector<std::vector<double>> diff;
  for (int g = 0; g < funcs; ++g) {
    for (int g2 = g + 1; g2 < funcs; ++g2) {
      std::vector<double> row(points);
      bool any = false;
      for (int z = 0; z < points; ++z) {
        row[z] = std::fabs(values[g][z] - values[g2][z]);
        any = any || row[z] != 0.0;
      }
      if (any) diff.push_back(std::move(row));
    }
  }

  // Scanning eps' over left limits at achievable differences is exact:
  // between consecutive achievable values the pair predicate is constant and
  // the prefix-sum predicate only eases as eps' grows.
  std::set<double> thresholds;
  for (const auto& row : diff) {
    for (double d : row) {
      if (d > epsilon) thresholds.insert(d);
    }
  }
  if (thresholds.empty()) return 0;

  const int pairs = static_cast<int>(diff.size());
  const std::uint32_t full = 1u << points;
  std::vector<std::vector<double>> sumsq(pairs, std::vector<double>(full, 0.0));
  for (int p = 0; p < pairs; ++p) {
    for (std::uint32_t s = 1; s < full; ++s) {
      int z = std::countr_zero(s);
      sumsq[p][s] = sumsq[p][s & (s - 1)] + diff[p][z] * diff[p][z];
    }
  }

  int best = 0;
  std::vector<char> buildable(full, 0);
  for (double d : thresholds) {
    const double cap = d * d;
    buildable.assign(full, 0);
    buildable[0] = 1;
    for (std::uint32_t s = 1; s < full; ++s) {
      for (std::uint32_t rest = s; rest != 0; rest &= rest - 1) {
        int z = std::countr_zero(rest);
        std::uint32_t prev = s & ~(1u << z);
        if (!buildable[prev]) continue;
        bool indep = false;
        for (int p = 0; p < pairs && !indep; ++p) {
          indep = diff[p][z] >= d && sumsq[p][prev] < cap;
        }
        if (indep) {
          buildable[s] = 1;
          best = std::max(best, std::popcount(s));
          break;
        }
      }
    }
  }
  return best;
}

int eluder_dimension(const FunctionClass& cls, double epsilon, int domain_cap) {
  cls.validate();
  const int domain = cls.num_contexts * cls.num_actions * cls.num_actions;
  if (domain > domain_cap) {
    throw std::length_error("induced domain size " + std::to_string(domain) +
                            " exceeds cap " + std::to_string(domain_cap));
  }
  std::vector<std::vector<double>> values(cls.members.size(),
                                          std::vector<double>(domain));
  for (std::size_t m = 0; m < cls.members.size(); ++m) {
    int z = 0;
    for (int x = 0; x < cls.num_contexts; ++x) {
      for (int a = 0; a < cls.num_actions; ++a) {
        for (int b = 0; b < cls.num_actions; ++b) {
          values[m][z++] = cls.margin(static_cast<int>(m), x, a, b);
        }
      }
    }
  }
  return eluder_dimension_core(values, epsilon);
}

}  // namespace pref
