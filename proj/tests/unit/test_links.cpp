#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "pref/links.hpp"
#include "pref/rng.hpp"

using namespace pref;

namespace {
const LinkSpec kSquare = make_link(LinkKind::Square);
const LinkSpec kLogistic = make_link(LinkKind::Logistic);

// 201 margins spanning [-0.999, 0.999] so central differences stay in domain
double grid_point(int k) { return -0.999 + 1.998 * k / 200.0; }
}  // namespace

TEST_CASE("link_value pinned points") {
  CHECK(link_value(kSquare, 0.0) == 0.5);
  CHECK(link_value(kSquare, 1.0) == 1.0);
  CHECK(link_value(kSquare, -1.0) == 0.0);
  CHECK(link_value(kLogistic, 0.0) == 0.5);
  CHECK(link_value(kLogistic, 1.0) == doctest::Approx(0.7310585786300049).epsilon(1e-12));
}

TEST_CASE("link names round-trip") {
  CHECK(link_name(parse_link("square")) == "square");
  CHECK(link_name(parse_link("logistic")) == "logistic");
  CHECK_THROWS_AS((void)parse_link("probit"), std::invalid_argument);
}

TEST_CASE("alpha constants") {
  CHECK(kSquare.alpha == 0.25);
  double p = 1.0 / (1.0 + std::exp(-1.0));
  CHECK(kLogistic.alpha == doctest::Approx(p * (1.0 - p)).epsilon(1e-15));
  CHECK(kLogistic.alpha == doctest::Approx(0.19661193324148185).epsilon(1e-12));
}

TEST_CASE("loss pinned points") {
  CHECK(loss_value(kSquare, 0.5, 1) == 0.0625);
  CHECK(loss_value(kSquare, 1.0, 1) == 0.0);
  CHECK(loss_value(kLogistic, 0.0, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("domain guard at 1 + 1e-9") {
  CHECK_NOTHROW((void)link_value(kSquare, 1.0 + 0.5e-9));
  CHECK_THROWS_AS((void)link_value(kSquare, 1.0 + 1e-8), std::domain_error);
  CHECK_THROWS_AS((void)link_value(kLogistic, -1.0 - 1e-8), std::domain_error);
  CHECK_THROWS_AS((void)loss_value(kSquare, 1.1, 1), std::domain_error);
  Rng rng(1);
  CHECK_THROWS_AS((void)sample_feedback(kLogistic, 1.2, rng), std::domain_error);
  CHECK_THROWS_AS((void)loss_value(kSquare, 0.0, 2), std::invalid_argument);
}

TEST_CASE("symmetry phi(d) + phi(-d) = 1 on the grid") {
  for (int k = 0; k <= 200; ++k) {
    double d = grid_point(k);
    // exact for the square form; within 1e-12 for logistic
    CHECK(link_value(kSquare, d) + link_value(kSquare, -d) == 1.0);
    CHECK(std::fabs(link_value(kLogistic, d) + link_value(kLogistic, -d) - 1.0) <= 1e-12);
  }
}

TEST_CASE("potential derivative matches phi by central difference") {
  const double h = 1e-5;
  for (const auto& link : {kSquare, kLogistic}) {
    for (int k = 0; k <= 200; ++k) {
      double d = grid_point(k) * 0.999;  // keep d +/- h inside the domain
      double fd = (potential_value(link, d + h) - potential_value(link, d - h)) / (2.0 * h);
      CHECK(std::fabs(fd - link_value(link, d)) <= 1e-8);
    }
  }
}

TEST_CASE("potential is alpha-strongly convex on the grid") {
  const double h = 1e-4;
  for (const auto& link : {kSquare, kLogistic}) {
    for (int k = 0; k <= 200; ++k) {
      double d = grid_point(k) * 0.999;
      double second = (potential_value(link, d + h) - 2.0 * potential_value(link, d) +
                       potential_value(link, d - h)) /
                      (h * h);
      CHECK(second >= link.alpha - 1e-6);
    }
  }
}

TEST_CASE("loss equals potential minus d*(y+1)/2 with zero constant") {
  for (const auto& link : {kSquare, kLogistic}) {
    for (int k = 0; k <= 200; ++k) {
      double d = grid_point(k);
      for (int y : {-1, 1}) {
        double lhs = loss_value(link, d, y);
        double rhs = potential_value(link, d) - d * (y + 1) / 2.0;
        CHECK(std::fabs(lhs - rhs) <= 1e-12);
      }
    }
  }
}

TEST_CASE("loss difference across labels is -d") {
  for (const auto& link : {kSquare, kLogistic}) {
    for (int k = 0; k <= 200; ++k) {
      double d = grid_point(k);
      CHECK(std::fabs(loss_value(link, d, 1) - loss_value(link, d, -1) + d) <= 1e-12);
    }
  }
}

TEST_CASE("sample_feedback is deterministic at the square extremes") {
  Rng rng(derive_seed(3, "feedback"));
  for (int i = 0; i < 500; ++i) {
    CHECK(sample_feedback(kSquare, 1.0, rng) == 1);
    CHECK(sample_feedback(kSquare, -1.0, rng) == -1);
  }
}

TEST_CASE("sample_feedback marginal matches phi at d = 0") {
  Rng rng(derive_seed(11, "feedback"));
  const int n = 100000;
  for (const auto& link : {kSquare, kLogistic}) {
    long pos = 0;
    for (int i = 0; i < n; ++i) {
      if (sample_feedback(link, 0.0, rng) == 1) ++pos;
    }
    double mean = static_cast<double>(pos) / n;
    CHECK(std::fabs(mean - 0.5) <= 0.01);
  }
}

TEST_CASE("sample_feedback consumes exactly one draw") {
  Rng a(77);
  Rng b(77);
  for (int i = 0; i < 50; ++i) {
    (void)sample_feedback(kLogistic, 0.3, a);
    (void)b.uniform01();
  }
  CHECK(a.raw() == b.raw());
}
