#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "dob/error.hpp"
#include "dob/models.hpp"

using namespace dob;

namespace {

Complex random_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> r(0.1, 1.4), a(-std::numbers::pi, std::numbers::pi);
  return std::polar(r(rng), a(rng));
}

// Inner loop written out equation by equation and solved at one point z.
// Unknowns: x = K_taun I (commanded torque), a (mean acceleration), v
// (velocity), d (disturbance estimate).
struct InnerSolve {
  Complex x, a, v, d;
};

InnerSolve solve_inner(const PlantParams& p, ObserverKind kind, double g, Complex z, Complex tau_d,
                       Complex u_des, Complex noise) {
  using M = Eigen::Matrix4cd;
  using V = Eigen::Vector4cd;
  const double t = p.sample_time;
  const double beta = p.torque_constant / p.nominal_torque_constant;
  const Complex q = g * t * z / ((1.0 + g * t) * z - 1.0);
  M m = M::Zero();
  V rhs = V::Zero();
  m(0, 0) = 1.0;  // x - d = u_des
  m(0, 3) = -1.0;
  rhs(0) = u_des;
  m(1, 1) = p.inertia;  // J_m a - beta x = -tau_d
  m(1, 0) = -beta;
  rhs(1) = -tau_d;
  m(2, 2) = z - 1.0;  // (z-1) v = T a
  m(2, 1) = -t;
  m(3, 3) = 1.0;
  m(3, 0) = -q;
  if (kind == ObserverKind::Velocity) {
    const Complex diff = (z - 1.0) / (t * z);
    m(3, 2) = q * p.nominal_inertia * diff;
    rhs(3) = -q * p.nominal_inertia * diff * noise;
  } else {
    m(3, 1) = q * p.nominal_inertia;
    rhs(3) = -q * p.nominal_inertia * noise;
  }
  const V s = m.partialPivLu().solve(rhs);
  return {s(0), s(1), s(2), s(3)};
}

PlantParams mismatched() {
  PlantParams p;
  p.inertia = 0.013;
  p.torque_constant = 0.27;
  p.nominal_inertia = 0.009;
  p.nominal_torque_constant = 0.22;
  return p;
}

}  // namespace

TEST_CASE("alpha") {
  PlantParams p;
  CHECK(p.alpha() == 1.0);
  const PlantParams m = mismatched();
  CHECK(m.alpha() == doctest::Approx(0.009 * 0.27 / (0.013 * 0.22)));
  PlantParams scaled = m;
  scaled.inertia *= 3.7;
  scaled.nominal_inertia *= 3.7;
  CHECK(scaled.alpha() == doctest::Approx(m.alpha()).epsilon(1e-15));
  CHECK(m.with_alpha(2.5).alpha() == doctest::Approx(2.5).epsilon(1e-15));
  PlantParams bad;
  bad.sample_time = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("Q filter has unit DC gain and the backward-Euler form") {
  const Rational q = q_filter(750.0, 1e-3);
  CHECK(std::abs(q(Complex(1.0)) - 1.0) < 1e-15);
  const Complex z(0.3, 0.8);
  CHECK(std::abs(q(z) - 0.75 * z / (1.75 * z - 1.0)) < 1e-15);
  CHECK_THROWS_AS(q_filter(-1.0, 1e-3), Error);
}

TEST_CASE("loop forms agree with the equation-level inner loop") {
  std::mt19937_64 rng(21);
  for (ObserverKind kind : {ObserverKind::Velocity, ObserverKind::Acceleration}) {
    for (const PlantParams& p : {PlantParams{}, mismatched()}) {
      for (double g : {10.0, 300.0, 750.0, 1500.0}) {
        CAPTURE(static_cast<int>(kind));
        CAPTURE(g);
        const LoopSet loop = build_loop(p, {kind, g, std::nullopt});
        const Rational cmd = inner_command_path(p, {kind, g, std::nullopt});
        CHECK(loop.loop_gain == doctest::Approx(p.alpha() * g * p.sample_time));
        for (int i = 0; i < 10; ++i) {
          const Complex z = random_point(rng);
          const InnerSolve dist = solve_inner(p, kind, g, z, 1.0, 0.0, 0.0);
          const InnerSolve cmdr = solve_inner(p, kind, g, z, 0.0, p.nominal_inertia, 0.0);
          const InnerSolve noise = solve_inner(p, kind, g, z, 0.0, 0.0, 1.0);
          const double beta = p.torque_constant / p.nominal_torque_constant;
          CHECK(std::abs(loop.sensitivity(z) - (-p.inertia * dist.a)) < 1e-9 * std::abs(dist.a * p.inertia) + 1e-12);
          CHECK(std::abs(loop.complementary(z) - beta * dist.x) < 1e-9 * std::abs(beta * dist.x) + 1e-12);
          CHECK(std::abs(loop.noise(z) - noise.a) < 1e-9 * std::abs(noise.a) + 1e-12);
          CHECK(std::abs(cmd(z) - cmdr.a) < 1e-9 * std::abs(cmdr.a) + 1e-12);
          CHECK(std::abs(loop.sensitivity(z) + loop.complementary(z) - 1.0) < 1e-10);
          CHECK(std::abs(loop.sensitivity(z) - 1.0 / (1.0 + loop.open_loop(z))) < 1e-9);
        }
      }
    }
  }
}

TEST_CASE("S + T = 1 at random points for the listed loop gains") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> r(0.0, 1.0), a(-std::numbers::pi, std::numbers::pi);
  for (ObserverKind kind : {ObserverKind::Velocity, ObserverKind::Acceleration}) {
    for (double k : {0.01, 0.1, 0.75, 1.0, 1.5, 1.99}) {
      const LoopSet loop = build_loop(PlantParams{}, {kind, k / 1e-3, std::nullopt});
      for (int i = 0; i < 100; ++i) {
        const Complex z = std::polar(r(rng), a(rng));
        CHECK(std::abs(loop.sensitivity(z) + loop.complementary(z) - 1.0) < 1e-10);
      }
    }
  }
}

TEST_CASE("closed forms of the loops") {
  const PlantParams p;
  const LoopSet v = velocity_loop(p, 750.0);
  CHECK(v.loop_gain == doctest::Approx(0.75));
  REQUIRE(v.sensitivity.poles().size() == 1);
  CHECK(std::abs(v.sensitivity.poles()[0] - 0.25) < 1e-15);
  CHECK(classify(velocity_loop(p, 2500.0).sensitivity) == Stability::Unstable);
  const LoopSet a = acceleration_loop(p, 100000.0);
  CHECK(std::abs(a.sensitivity.poles()[0] - 1.0 / 101.0) < 1e-15);
  CHECK(classify(a.sensitivity) == Stability::Stable);
  const LoopSet none = build_loop(p, {ObserverKind::None, 750.0, std::nullopt});
  CHECK(none.sensitivity(Complex(0.3, 0.3)) == Complex(1.0));
  CHECK(none.noise(Complex(0.3, 0.3)) == Complex(0.0));
  // velocity noise path: -((z-1)/T) T_v
  const Complex z(0.1, -0.6);
  CHECK(std::abs(v.noise(z) + (z - 1.0) / 1e-3 * v.complementary(z)) < 1e-9);
  CHECK(std::abs(a.noise(z) + a.complementary(z)) < 1e-12);
}

TEST_CASE("observer estimate is Q times the lumped disturbance for both realisations") {
  std::mt19937_64 rng(4);
  for (ObserverKind kind : {ObserverKind::Velocity, ObserverKind::Acceleration}) {
    const PlantParams p = mismatched();
    const ObserverPaths paths = observer_paths(p, {kind, 600.0, std::nullopt});
    const Rational q = q_filter(600.0, p.sample_time);
    for (int i = 0; i < 20; ++i) {
      const Complex z = random_point(rng);
      CHECK(std::abs(paths.from_torque(z) - q(z)) < 1e-12);
      CHECK(std::abs(paths.from_acceleration(z) + p.nominal_inertia * q(z)) < 1e-12);
    }
  }
}

namespace {

// Position loop (PD around the inner loop) as a polynomial matrix in z.
// Unknowns: x, a, v, q, d. Its determinant vanishes exactly at the
// closed-loop poles.
Complex position_det(const PlantParams& p, ObserverKind kind, double g, double kp, double kd,
                     PositionIntegrator integ, Complex z) {
  using M = Eigen::Matrix<Complex, 5, 5>;
  const double t = p.sample_time;
  const double beta = p.torque_constant / p.nominal_torque_constant;
  const double gt = g * t;
  M m = M::Zero();
  // x - d + J_mn (K_p q + K_D v) = 0
  m(0, 0) = 1.0;
  m(0, 4) = -1.0;
  m(0, 3) = p.nominal_inertia * kp;
  m(0, 2) = p.nominal_inertia * kd;
  m(1, 1) = p.inertia;  // J_m a - beta x = 0
  m(1, 0) = -beta;
  m(2, 2) = z - 1.0;  // (z-1) v - T a = 0
  m(2, 1) = -t;
  if (integ == PositionIntegrator::BackwardEuler) {
    m(3, 3) = z - 1.0;  // (z-1) q - T z v = 0
    m(3, 2) = -t * z;
  } else {
    m(3, 3) = z - 1.0;  // (z-1) q - T v - T^2/2 a = 0
    m(3, 2) = -t;
    m(3, 1) = -t * t / 2.0;
  }
  if (kind == ObserverKind::Velocity) {
    // ((1+gT)z - 1) T z d - gT z T z x + gT z J_mn (z-1) v = 0
    m(4, 4) = ((1.0 + gt) * z - 1.0) * t * z;
    m(4, 0) = -gt * z * t * z;
    m(4, 2) = gt * z * p.nominal_inertia * (z - 1.0);
  } else {
    m(4, 4) = (1.0 + gt) * z - 1.0;
    m(4, 0) = -gt * z;
    m(4, 1) = gt * z * p.nominal_inertia;
  }
  return m.determinant();
}

}  // namespace

TEST_CASE("position characteristic polynomial vanishes with the loop determinant") {
  std::mt19937_64 rng(17);
  for (ObserverKind kind : {ObserverKind::Velocity, ObserverKind::Acceleration}) {
    for (PositionIntegrator integ : {PositionIntegrator::BackwardEuler, PositionIntegrator::ZeroOrderHold}) {
      for (double alpha : {0.5, 1.0, 3.0}) {
        const PlantParams p = PlantParams{}.with_alpha(alpha);
        const Poly cp = position_charpoly(p, {kind, 750.0, std::nullopt}, 2500.0, 125.0, integ);
        // det and charpoly differ by a nonzero constant times a power of z.
        const Complex z0 = random_point(rng);
        int shift = 0;
        Complex best;
        double spread = 1e300;
        for (int m = 0; m <= 3; ++m) {
          std::vector<Complex> ratios;
          for (int i = 0; i < 6; ++i) {
            const Complex z = i == 0 ? z0 : random_point(rng);
            ratios.push_back(position_det(p, kind, 750.0, 2500.0, 125.0, integ, z) / (cp(z) * std::pow(z, m)));
          }
          double s = 0.0;
          for (Complex r : ratios) s = std::max(s, std::abs(r - ratios[0]) / std::abs(ratios[0]));
          if (s < spread) {
            spread = s;
            shift = m;
            best = ratios[0];
          }
        }
        CAPTURE(shift);
        CHECK(spread < 1e-8);
        CHECK(std::abs(best) > 0.0);
        for (Complex r : roots(cp)) CHECK(std::abs(position_det(p, kind, 750.0, 2500.0, 125.0, integ, r)) <
                                          1e-6 * std::abs(position_det(p, kind, 750.0, 2500.0, 125.0, integ, 0.5 * r + 0.3)));
      }
    }
  }
}

TEST_CASE("zero outer gains leave the two integrators and the inner pole") {
  for (double g : {250.0, 750.0, 1500.0}) {
    const Poly cp = position_charpoly(PlantParams{}, {ObserverKind::Velocity, g, std::nullopt}, 0.0, 0.0);
    const auto rs = roots(cp);
    int ones = 0, inner = 0;
    for (Complex r : rs) {
      ones += std::abs(r - 1.0) < 1e-6;
      inner += std::abs(r - (1.0 - g * 1e-3)) < 1e-9;
    }
    CHECK(ones == 2);
    CHECK(inner == 1);
  }
}

TEST_CASE("nominal gains with the velocity observer give a stable position loop") {
  const Poly cp = position_charpoly(PlantParams{}, {ObserverKind::Velocity, 750.0, std::nullopt}, 2500.0, 125.0);
  CHECK(classify(cp) == Stability::Stable);
  CHECK(cp.degree() <= 4);
}

TEST_CASE("accelerometer charpoly equals a rescaled velocity charpoly") {
  // alpha_v = alpha_a / (1 + alpha_a g T): same polynomial up to scale.
  for (double alpha : {0.3, 1.0, 4.0, 8.0}) {
    const double g = 750.0, t = 1e-3;
    const PlantParams pa = PlantParams{}.with_alpha(alpha);
    const PlantParams pv = PlantParams{}.with_alpha(alpha / (1.0 + alpha * g * t));
    const Poly ca = position_charpoly(pa, {ObserverKind::Acceleration, g, std::nullopt}, 2500.0, 125.0);
    const Poly cv = position_charpoly(pv, {ObserverKind::Velocity, g, std::nullopt}, 2500.0, 125.0);
    REQUIRE(ca.degree() == cv.degree());
    const double ratio = ca.leading() / cv.leading();
    for (std::size_t i = 0; i < ca.coeffs().size(); ++i)
      CHECK(ca.coeffs()[i] == doctest::Approx(ratio * cv.coeffs()[i]).epsilon(1e-12).scale(1.0));
    CHECK(spectral_radius(roots(ca)) == doctest::Approx(spectral_radius(roots(cv))).epsilon(1e-9));
  }
}

TEST_CASE("observer config validation") {
  CHECK_THROWS_AS((ObserverConfig{ObserverKind::Velocity, 0.0, std::nullopt}.validate()), Error);
  CHECK_THROWS_AS((ObserverConfig{ObserverKind::Velocity, 10.0, -1.0}.validate()), Error);
  CHECK_NOTHROW((ObserverConfig{ObserverKind::Acceleration, 10.0, 5.0}.validate()));
  CHECK(parse_observer_kind("velocity") == ObserverKind::Velocity);
  CHECK(!parse_observer_kind("vel"));
}
