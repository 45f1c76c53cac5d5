#pragma once

#include <string>

#include "pref/rng.hpp"

namespace pref {

enum class LinkKind { Square, Logistic };

// phi maps a preference margin d in [-1,1] to Pr(y=+1); Phi is its
// antiderivative and loss(d,y) = Phi(d) - d*(y+1)/2 up to a constant that is
// zero for both kinds. alpha is the strong-convexity floor of Phi on [-1,1].
struct LinkSpec {
  LinkKind kind = LinkKind::Square;
  double alpha = 0.25;
};

LinkSpec make_link(LinkKind kind);
LinkSpec parse_link(const std::string& name);  // "square" | "logistic"
std::string link_name(const LinkSpec& link);

double link_value(const LinkSpec& link, double d);       // phi(d)
double potential_value(const LinkSpec& link, double d);  // Phi(d)
double loss_value(const LinkSpec& link, double d, int y);

// one uniform01 draw; returns +1 with probability phi(d), else -1
int sample_feedback(const LinkSpec& link, double d, Rng& rng);

}  // namespace pref
