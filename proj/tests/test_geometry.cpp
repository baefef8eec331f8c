#include <algorithm>
#include <cmath>
#include <functional>

#include "doctest.h"
#include "slitcap/error.hpp"
#include "slitcap/geometry.hpp"

using namespace slitcap;

namespace {

const Complex I{0.0, 1.0};

bool kind_is(ErrorKind k, const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind() == k;
  }
  return false;
}

std::array<double, 4> sorted_ls(const NormalizedConfig& n) {
  std::array<double, 4> l{n.l1, n.l2, n.l3, n.l4};
  std::sort(l.begin(), l.end());
  return l;
}

void check_frame_maps_back(const SlitConfig& cfg, const NormalizedConfig& n) {
  const auto in = cfg.points();
  const auto phys = n.physical_target();
  for (int k = 0; k < 4; ++k) {
    CAPTURE(k);
    CHECK(std::abs(phys[k] - in[n.renumbering.source[k]]) < 1e-12 * std::max(1.0, cfg.diameter()));
  }
}

}  // namespace

TEST_CASE("classify") {
  CHECK(classify({-2.0 * I, 3.0 * I, 1.0, 3.0}) == SlitCase::Generic);
  CHECK(classify({I, 2.0 + I, -2.0 - I, -1.0 - I}) == SlitCase::Parallel);
  CHECK(kind_is(ErrorKind::DegenerateGeometry, [] { classify({0.0, 1.0, 2.0, 3.0}); }));
  // crossing
  CHECK(kind_is(ErrorKind::DegenerateGeometry, [] { classify({-1.0, 1.0, -I, I}); }));
  // touching at an endpoint
  CHECK(kind_is(ErrorKind::DegenerateGeometry, [] { classify({0.0, 1.0, 0.0, I}); }));
  // zero length
  CHECK(kind_is(ErrorKind::DegenerateGeometry, [] { classify({I, I, 0.0, 1.0}); }));
  // nearly parallel but not parallel
  CHECK(kind_is(ErrorKind::DegenerateGeometry, [] { classify({I, 1.0 + I * (1.0 + 1e-8), 0.0, 1.0}); }));
}

TEST_CASE("normalize_generic on the listing configuration") {
  const SlitConfig cfg{-2.0 * I, 3.0 * I, 1.0, 3.0};
  const NormalizedConfig n = normalize_generic(cfg);
  CHECK(std::abs(n.a5) < 1e-15);
  CHECK(n.beta == doctest::Approx(kPi / 2).epsilon(1e-15));
  CHECK(n.l3 == doctest::Approx(1.0));
  CHECK(n.l4 == doctest::Approx(3.0));
  // A5 lies strictly inside A1A2, so l1 is negative
  CHECK(n.l1 == doctest::Approx(-2.0));
  CHECK(n.l2 == doctest::Approx(3.0));
  CHECK(std::abs(n.v1 - (n.l1 - n.l3) * std::polar(1.0, n.beta / 2)) < 1e-15);
  CHECK(std::abs(n.v2 - (n.l2 - n.l4) * std::polar(1.0, n.beta / 2)) < 1e-15);
  check_frame_maps_back(cfg, n);
}

TEST_CASE("Example 1 configuration") {
  for (double a : {1.5, 3.0, 7.0}) {
    const SlitConfig cfg{-I, -2.0 * I, a - 0.5, a + 0.5};
    const NormalizedConfig n = normalize_generic(cfg);
    CHECK(n.beta == doctest::Approx(kPi / 2));
    CHECK(n.beta / (4 * kPi) == doctest::Approx(0.125));
    check_frame_maps_back(cfg, n);
  }
  // a = 1.5 is already symmetric
  const NormalizedConfig s = normalize_generic({-I, -2.0 * I, 1.0, 2.0});
  CHECK(std::abs(s.v1) < 1e-15);
  CHECK(std::abs(s.v2) < 1e-15);
}

TEST_CASE("normalization is a fixed point") {
  for (const SlitConfig& cfg :
       {SlitConfig{I, 2.0 + I, 3.0 - 2.0 * I, 4.0 - 3.0 * I}, SlitConfig{I, 3.0 * I, -3.0, 2.0},
        SlitConfig{-2.0 * I, 3.0 * I, 1.0, 3.0}, SlitConfig{I, 3.0 * I, 0.0, 2.0}}) {
    const NormalizedConfig n = normalize_generic(cfg);
    const NormalizedConfig again = normalize_generic(SlitConfig::from_points(n.target));
    CHECK(std::abs(again.beta - n.beta) < 1e-14);
    CHECK(std::abs(again.l1 - n.l1) < 1e-14);
    CHECK(std::abs(again.l2 - n.l2) < 1e-14);
    CHECK(std::abs(again.l3 - n.l3) < 1e-14);
    CHECK(std::abs(again.l4 - n.l4) < 1e-14);
    CHECK(again.renumbering.source == std::array<int, 4>{0, 1, 2, 3});
    CHECK_FALSE(again.renumbering.reflected);
  }
}

TEST_CASE("renumbering edge cases") {
  SUBCASE("A5 inside the second slit swaps the slits") {
    const SlitConfig cfg{I, 3.0 * I, -3.0, 2.0};
    const NormalizedConfig n = normalize_generic(cfg);
    CHECK(n.renumbering.swapped_slits);
    CHECK(n.l3 == doctest::Approx(1.0));
    CHECK(n.l4 == doctest::Approx(3.0));
    // A2 is taken on the side where arg((A2 - A5)/(A4 - A5)) is in (0, pi)
    CHECK(n.l1 == doctest::Approx(-2.0));
    CHECK(n.l2 == doctest::Approx(3.0));
    check_frame_maps_back(cfg, n);
  }
  SUBCASE("A5 at an endpoint gives l1 = 0") {
    const SlitConfig cfg{I, 3.0 * I, 0.0, 2.0};
    const NormalizedConfig n = normalize_generic(cfg);
    CHECK(n.renumbering.swapped_slits);
    CHECK(n.l1 == 0.0);
    CHECK(n.l2 == doctest::Approx(2.0));
    check_frame_maps_back(cfg, n);
  }
  SUBCASE("A5 at an endpoint of A1A2 without swapping") {
    const SlitConfig cfg{I, 2.0 + I, 3.0 - 2.0 * I, 4.0 - 3.0 * I};
    const NormalizedConfig n = normalize_generic(cfg);
    CHECK_FALSE(n.renumbering.swapped_slits);
    CHECK(n.l1 == 0.0);
    check_frame_maps_back(cfg, n);
  }
  SUBCASE("negative angle is removed by reflection") {
    const SlitConfig cfg{1.0, 3.0, I, 2.0 * I};
    const NormalizedConfig n = normalize_generic(cfg);
    CHECK(n.beta > 0.0);
    CHECK(n.beta < kPi);
    check_frame_maps_back(cfg, n);
  }
}

TEST_CASE("invariance under relabeling") {
  const Complex a1 = I, a2 = 3.0 + 2.0 * I, a3 = 3.0 - 2.0 * I, a4 = 4.0 - 3.0 * I;
  const NormalizedConfig ref = normalize_generic({a1, a2, a3, a4});
  for (const SlitConfig& cfg : {SlitConfig{a2, a1, a3, a4}, SlitConfig{a1, a2, a4, a3}, SlitConfig{a3, a4, a1, a2},
                                SlitConfig{a4, a3, a2, a1}, SlitConfig{std::conj(a1), std::conj(a2), std::conj(a3), std::conj(a4)}}) {
    const NormalizedConfig n = normalize_generic(cfg);
    CHECK(std::abs(n.beta - ref.beta) < 1e-12);
    const auto l = sorted_ls(n), r = sorted_ls(ref);
    for (int k = 0; k < 4; ++k) CHECK(std::abs(l[k] - r[k]) < 1e-12);
    check_frame_maps_back(cfg, n);
  }
}

TEST_CASE("normalize_parallel") {
  SUBCASE("listing example") {
    const SlitConfig cfg{I, 2.0 + I, -2.0 - I, -1.0 - I};
    const NormalizedConfig n = normalize_parallel(cfg);
    CHECK(n.beta == 0.0);
    CHECK(n.v1.real() == doctest::Approx(2.0));
    CHECK(n.v2.real() == doctest::Approx(3.0));
    CHECK(n.half_gap == doctest::Approx(1.0));
    CHECK(n.fixed_length == doctest::Approx(1.0));
    check_frame_maps_back(cfg, n);
  }
  SUBCASE("mirror symmetric") {
    const NormalizedConfig n = normalize_parallel({-1.0 + I, 1.0 + I, -1.0 - I, 1.0 - I});
    CHECK(std::abs(n.v1) < 1e-15);
    CHECK(std::abs(n.v2) < 1e-15);
  }
  SUBCASE("equal lengths shifted by s") {
    const double s = 0.7;
    const NormalizedConfig n = normalize_parallel({-1.0 + s + I, 1.0 + s + I, -1.0 - I, 1.0 - I});
    CHECK(n.v1.real() == doctest::Approx(s));
    CHECK(n.v2.real() == doctest::Approx(s));
  }
  SUBCASE("rotated, upside down and relabeled") {
    const Complex r = std::polar(1.0, 2.1);
    const SlitConfig base{I, 2.0 + I, -2.0 - I, -1.0 - I};
    const SlitConfig cfg{r * base.a3, r * base.a4, r * base.a2, r * base.a1};
    const NormalizedConfig n = normalize_parallel(cfg);
    check_frame_maps_back(cfg, n);
    CHECK(n.half_gap == doctest::Approx(1.0));
    // A1A2 is the upper slit after normalization
    CHECK(n.target[0].imag() > n.target[2].imag());
    CHECK(n.target[0].real() < n.target[1].real());
    CHECK(n.target[2].real() < n.target[3].real());
  }
  CHECK_THROWS_AS(normalize_parallel({-2.0 * I, 3.0 * I, 1.0, 3.0}), Error);
}

TEST_CASE("homotopy endpoints") {
  const NormalizedConfig n = normalize({I, 3.0 + 2.0 * I, -2.0 - I, -1.0 - I});
  const auto e0 = n.endpoints_at(0.0), e1 = n.endpoints_at(1.0);
  for (int k = 0; k < 4; ++k) {
    CHECK(std::abs(e0[k] - n.start[k]) < 1e-15);
    CHECK(std::abs(e1[k] - n.target[k]) < 1e-12);
  }
  // symmetric start: A1A2 mirrors A3A4 across the bisector
  CHECK(std::abs(n.start[0] - std::conj(n.start[2])) < 1e-12);
  CHECK(std::abs(n.start[1] - std::conj(n.start[3])) < 1e-12);
}
