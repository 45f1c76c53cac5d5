#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace pref {

// r[x][a] in [0,1]; induces the preference margin f(x,a,b) = r(x,a) - r(x,b).
struct RewardPreferenceFunction {
  std::vector<std::vector<double>> rewards;  // [context][action]

  double margin(int x, int a, int b) const {
    return rewards[x][a] - rewards[x][b];
  }
};

// ties broken to the lowest action index
int best_arm(const RewardPreferenceFunction& f, int x);

// Finite, explicitly enumerated, ordered; member index identity is what
// tie-breaks and logs refer to.
struct FunctionClass {
  int num_contexts = 0;
  int num_actions = 0;
  std::vector<RewardPreferenceFunction> members;

  double margin(int m, int x, int a, int b) const {
    return members[m].margin(x, a, b);
  }
  void validate() const;

  static FunctionClass from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct QueryRecord {
  int x = 0;
  int a = 0;
  int b = 0;
  double prediction = 0.0;  // stored at insertion time, never recomputed
  int label = 0;            // +1 or -1
};

// Append-only; only queried rounds are stored.
struct QueryHistory {
  std::vector<QueryRecord> records;
};

// empty version set: the planted function cannot be in the class
class realizability_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// members whose squared deviation from the stored predictions is <= beta
// (absolute tolerance 1e-9 on the keeping side)
std::vector<int> version_space(const FunctionClass& cls, const QueryHistory& history,
                               double beta);

// sorted unique best arms over the version members; throws realizability_error
// when the version set is empty
std::vector<int> candidate_arms(const FunctionClass& cls, const std::vector<int>& version,
                                int x);

// sup over arms^2 x version^2 of f(x,a,b) - f'(x,a,b), by enumeration
double width(const FunctionClass& cls, const std::vector<int>& version,
             const std::vector<int>& arms, int x);

// Longest sequence of columns where each is eps'-independent of its
// predecessors for some eps' >= epsilon; values[g][z] is function g at domain
// point z. Exact for finite classes: the independence predicate only changes
// at achievable pairwise-difference values, so eps' scans their left limits.
int eluder_dimension_core(const std::vector<std::vector<double>>& values, double epsilon);

// over the induced domain X x A x A; throws length_error above the cap
int eluder_dimension(const FunctionClass& cls, double epsilon, int domain_cap = 12);

}  // namespace pref
