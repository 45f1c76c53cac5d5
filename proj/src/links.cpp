#include "pref/links.hpp"

#include <cmath>
#include <stdexcept>

namespace pref {

namespace {

constexpr double kMarginTol = 1e-9;

void check_margin(double d) {
  if (!(std::fabs(d) <= 1.0 + kMarginTol)) {
    throw std::domain_error("preference margin outside [-1,1]: " +
                            std::to_string(d));
  }
}

double sigmoid(double d) {
  if (d >= 0.0) return 1.0 / (1.0 + std::exp(-d));
  double e = std::exp(d);
  return e / (1.0 + e);
}

// log(1 + e^d) without overflow on either sign
double softplus(double d) {
  if (d > 0.0) return d + std::log1p(std::exp(-d));
  return std::log1p(std::exp(d));
}

}  // namespace

LinkSpec make_link(LinkKind kind) {
  if (kind == LinkKind::Square) return {LinkKind::Square, 0.25};
  double p = sigmoid(1.0);
  return {LinkKind::Logistic, p * (1.0 - p)};
}

LinkSpec parse_link(const std::string& name) {
  if (name == "square") return make_link(LinkKind::Square);
  if (name == "logistic") return make_link(LinkKind::Logistic);
  throw std::invalid_argument("unknown link: " + name);
}

std::string link_name(const LinkSpec& link) {
  return link.kind == LinkKind::Square ? "square" : "logistic";
}

double link_value(const LinkSpec& link, double d) {
  check_margin(d);
  if (link.kind == LinkKind::Square) return (d + 1.0) / 2.0;
  return sigmoid(d);
}

double potential_value(const LinkSpec& link, double d) {
  check_margin(d);
  if (link.kind == LinkKind::Square) return d * d / 4.0 + d / 2.0 + 0.25;
  return softplus(d);
}

double loss_value(const LinkSpec& link, double d, int y) {
  check_margin(d);
  if (y != 1 && y != -1) throw std::invalid_argument("label must be +1 or -1");
  if (link.kind == LinkKind::Square) {
    double e = d - static_cast<double>(y);
    return e * e / 4.0;
  }
  return softplus(-static_cast<double>(y) * d);
}

int sample_feedback(const LinkSpec& link, double d, Rng& rng) {
  double p = link_value(link, d);
  return rng.uniform01() < p ? 1 : -1;
}

}  // namespace pref
