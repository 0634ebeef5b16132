#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dob/analysis.hpp"
#include "dob/error.hpp"

using namespace dob;

namespace {

LoopSet loop_for_k(ObserverKind kind, double k) {
  return build_loop(PlantParams{}, {kind, k / 1e-3, std::nullopt});
}

}  // namespace

// |T_v| equals 1 at DC for every k, so its peak is max(1, k/(2-k)); the value
// at Nyquist is k/(2-k).
TEST_CASE("peak gains of the velocity loop match 2/(2-k) and max(1, k/(2-k))") {
  for (int i = 1; i <= 50; ++i) {
    const double k = 0.02 + (1.98 - 0.02) * (i - 0.5) / 50.0;
    const LoopSet l = loop_for_k(ObserverKind::Velocity, k);
    const Peak s = peak_gain(l.sensitivity);
    const Peak t = peak_gain(l.complementary);
    CHECK(s.magnitude == doctest::Approx(2.0 / (2.0 - k)).epsilon(1e-6));
    CHECK(t.magnitude == doctest::Approx(std::max(1.0, k / (2.0 - k))).epsilon(1e-6));
    CHECK(std::abs(freqresp(l.complementary, std::numbers::pi)) == doctest::Approx(k / (2.0 - k)).epsilon(1e-12));
    CHECK(s.theta == doctest::Approx(std::numbers::pi));
  }
  const Peak t = peak_gain(loop_for_k(ObserverKind::Velocity, 1.5).complementary);
  CHECK(t.theta == doctest::Approx(std::numbers::pi));
  CHECK(t.magnitude == doctest::Approx(3.0));
  // k < 1: |T| peaks at DC with value 1
  const Peak low = peak_gain(loop_for_k(ObserverKind::Velocity, 0.5).complementary);
  CHECK(low.magnitude == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("peak gain rejects poles on the unit circle") {
  const Rational integrator(Poly({1.0}), Poly({1.0, -1.0}));
  CHECK_THROWS_AS(peak_gain(integrator), Error);
}

TEST_CASE("constraint bounds") {
  CHECK(constraint_max_k({0.5, 1e-12}) == doctest::Approx(1.0));
  CHECK(constraint_max_k({1e-12, 0.5}) == doctest::Approx(4.0 / 3.0));
  CHECK(constraint_max_k({0.5, 0.5}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(ConstraintSpec({1.0, 0.5}).validate(), Error);
  CHECK_THROWS_AS(ConstraintSpec({0.5, 0.0}).validate(), Error);
  // The binding constraint is met with equality at k_max.
  for (double gs : {0.1, 0.3, 0.5, 0.8}) {
    for (double gt : {0.1, 0.3, 0.5, 0.8}) {
      const double k = constraint_max_k({gs, gt});
      const LoopSet l = loop_for_k(ObserverKind::Velocity, k);
      const double ps = peak_gain(l.sensitivity).magnitude;
      const double pt = peak_gain(l.complementary).magnitude;
      const bool s_binds = 2.0 * (1.0 - gs) <= 2.0 / (1.0 + gt);
      if (s_binds) {
        CHECK(ps == doctest::Approx(1.0 / gs).epsilon(1e-9));
        CHECK(pt <= 1.0 / gt + 1e-9);
      } else {
        CHECK(pt == doctest::Approx(1.0 / gt).epsilon(1e-9));
        CHECK(ps <= 1.0 / gs + 1e-9);
      }
    }
  }
  const BandwidthLimits lim = max_bandwidth(PlantParams{}, {0.5, 0.5});
  CHECK(lim.g_max == doctest::Approx(1000.0));
  CHECK(lim.g_osc == doctest::Approx(1000.0));
  CHECK(lim.g_unstable == doctest::Approx(2000.0));
}

TEST_CASE("response classification by loop gain") {
  CHECK(classify_k(0.75) == Response::Monotone);
  CHECK(classify_k(1.0) == Response::Monotone);
  CHECK(classify_k(1.5) == Response::Oscillatory);
  CHECK(classify_k(2.0) == Response::Marginal);
  CHECK(classify_k(2.5) == Response::Unstable);
  CHECK(classify_k(1000.0, ObserverKind::Acceleration) == Response::Monotone);
  CHECK_THROWS_AS(classify_k(0.0), Error);
}

TEST_CASE("Bode integral") {
  SUBCASE("velocity loops integrate to zero") {
    for (double k : {0.25, 0.75, 1.5}) {
      const LoopSet l = loop_for_k(ObserverKind::Velocity, k);
      const BodeReport r = bode_integral(l.sensitivity, l.open_loop);
      CHECK(r.analytic_rhs == 0.0);
      CHECK(std::abs(r.numeric_integral) <= 1e-2);
      CHECK(r.abs_error <= 1e-2);
    }
  }
  SUBCASE("acceleration loops integrate to -2 pi ln(1+k)") {
    for (double k : {0.25, 0.75, 1.5, 10.0}) {
      const LoopSet l = loop_for_k(ObserverKind::Acceleration, k);
      const BodeReport r = bode_integral(l.sensitivity, l.open_loop);
      CHECK(r.analytic_rhs == doctest::Approx(-2.0 * std::numbers::pi * std::log1p(k)));
      CHECK(r.abs_error <= 1e-2);
    }
    const LoopSet l = loop_for_k(ObserverKind::Acceleration, 0.75);
    CHECK(bode_integral(l.sensitivity, l.open_loop).analytic_rhs == doctest::Approx(-3.5160).epsilon(1e-4));
  }
  SUBCASE("L = 0") {
    const BodeReport r = bode_integral(Rational::constant(1.0), Rational::constant(0.0));
    CHECK(r.numeric_integral == 0.0);
    CHECK(r.analytic_rhs == 0.0);
  }
  SUBCASE("refining the grid 4x reduces the error") {
    for (ObserverKind kind : {ObserverKind::Velocity, ObserverKind::Acceleration}) {
      for (double k : {0.25, 0.75, 1.5}) {
        const LoopSet l = loop_for_k(kind, k);
        const double coarse = bode_integral(l.sensitivity, l.open_loop, kMinBodeIntervals).abs_error;
        const double fine = bode_integral(l.sensitivity, l.open_loop, 4 * kMinBodeIntervals).abs_error;
        CHECK(fine < coarse);
      }
    }
  }
  SUBCASE("unstable sensitivity is rejected") {
    const LoopSet l = loop_for_k(ObserverKind::Velocity, 2.5);
    try {
      bode_integral(l.sensitivity, l.open_loop);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnstableSensitivity);
    }
  }
}

TEST_CASE("acceleration loop: no waterbed over k in [1e-3, 1e3]") {
  double previous = 2.0;
  for (int i = 0; i <= 60; ++i) {
    const double k = std::pow(10.0, -3.0 + 6.0 * i / 60.0);
    const LoopSet l = loop_for_k(ObserverKind::Acceleration, k);
    const auto poles = l.sensitivity.poles();
    REQUIRE(poles.size() == 1);
    CHECK(poles[0].real() > 0.0);
    CHECK(poles[0].real() < 1.0);
    const Peak s = peak_gain(l.sensitivity);
    CHECK(s.magnitude == doctest::Approx(2.0 / (2.0 + k)).epsilon(1e-6));
    CHECK(s.magnitude < 1.0);
    CHECK(s.magnitude < previous);
    previous = s.magnitude;
    const Peak t = peak_gain(l.complementary);
    CHECK(t.magnitude == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(t.theta == doctest::Approx(0.0).scale(1.0).epsilon(1e-6));
  }
}

TEST_CASE("root locus") {
  const PlantParams p;
  SUBCASE("velocity kind, zero outer gains: radius crosses 1 at k = 2") {
    const std::vector<double> alphas{1.0, 1.5, 1.9, 2.1, 2.5, 3.0};
    const auto pts = root_locus(p, {ObserverKind::Velocity, 1000.0, std::nullopt}, 0.0, 0.0, alphas);
    REQUIRE(pts.size() == alphas.size());
    for (const LocusPoint& pt : pts) {
      const double k = pt.alpha;  // g T = 1
      CHECK(pt.spectral_radius == doctest::Approx(std::max(1.0, std::abs(1.0 - k))).epsilon(1e-6));
    }
  }
  SUBCASE("acceleration kind, nominal gains: radius non-increasing in alpha") {
    const std::vector<double> alphas{1.0, 2.0, 4.0, 8.0};
    const auto pts = root_locus(p, {ObserverKind::Acceleration, 750.0, std::nullopt}, 2500.0, 125.0, alphas);
    for (std::size_t i = 1; i < pts.size(); ++i) CHECK(pts[i].spectral_radius <= pts[i - 1].spectral_radius);
    for (const auto& pt : pts) CHECK(pt.spectral_radius < 1.0);
  }
  SUBCASE("one alpha gives one point; order of roots is stable") {
    const std::vector<double> alphas{1.0};
    const auto pts = root_locus(p, {ObserverKind::Velocity, 750.0, std::nullopt}, 2500.0, 125.0, alphas);
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].alpha == 1.0);
    for (std::size_t i = 1; i < pts[0].roots.size(); ++i)
      CHECK(std::abs(pts[0].roots[i]) <= std::abs(pts[0].roots[i - 1]) + 1e-12);
  }
  SUBCASE("output is independent of the worker schedule") {
    std::vector<double> alphas;
    for (int i = 1; i <= 40; ++i) alphas.push_back(0.1 * i);
    const auto a = root_locus(p, {ObserverKind::Velocity, 750.0, std::nullopt}, 2500.0, 125.0, alphas);
    const auto b = root_locus(p, {ObserverKind::Velocity, 750.0, std::nullopt}, 2500.0, 125.0, alphas);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].alpha == alphas[i]);
      CHECK(a[i].roots == b[i].roots);
    }
  }
  SUBCASE("invalid alphas") {
    const std::vector<double> unsorted{2.0, 1.0};
    CHECK_THROWS_AS(root_locus(p, {ObserverKind::Velocity, 750.0, std::nullopt}, 0.0, 0.0, unsorted), Error);
    const std::vector<double> negative{-1.0};
    CHECK_THROWS_AS(root_locus(p, {ObserverKind::Velocity, 750.0, std::nullopt}, 0.0, 0.0, negative), Error);
  }
}
