#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "nsqa/environment.hpp"

using namespace nsqa;
using namespace nsqa::environment;

namespace {

// Integral of J(w)/w over [0, 50 w_c] with w = u^2, which removes the
// w^(s_b - 1) endpoint singularity for s_b < 1.
double quadrature_Lambda(const BathSpec& b) {
  auto f = [&](double u) {
    const double w = u * u;
    return u == 0.0 ? 0.0 : 2.0 * u * spectral_density(b, w) / w;
  };
  if (b.s_b == 0.5) {
    // integrand tends to 2a w_c^(1/2) at u = 0
    auto g = [&](double u) { return 2.0 * b.a * std::exp(-u * u / b.omega_c) / std::pow(b.omega_c, b.s_b - 1.0); };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, 0.0, std::sqrt(50.0 * b.omega_c), 15, 1e-14);
  }
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, std::sqrt(50.0 * b.omega_c), 15, 1e-14);
}

}  // namespace

TEST_CASE("reorganization constant: closed form vs quadrature") {
  CHECK(reorganization_constant({Axis::x, 1.0, 0.5, 2.0}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(reorganization_constant({Axis::x, 3.0, 1.0, 1.0}) - 2.0) < 1e-12);
  CHECK(std::abs(reorganization_constant({Axis::z, 1.0, 1.0, 1.0}) - 1.0) < 1e-12);
  for (double sb : {0.5, 1.0, 1.5, 2.0, 3.0}) {
    const BathSpec b{Axis::x, sb, 0.7, 1.3};
    const double L = reorganization_constant(b);
    CHECK(std::abs(L - quadrature_Lambda(b)) / L < 1e-8);
  }
  CHECK_THROWS_AS(reorganization_constant({Axis::x, 0.0, 1.0, 1.0}), ParameterError);
  CHECK_THROWS_AS(reorganization_constant({Axis::x, -1.0, 1.0, 1.0}), ParameterError);
  CHECK_THROWS_AS(parse_axis("y"), ParameterError);
}

TEST_CASE("effective energy identities, k=2") {
  const ModelSpec spec{5, 2};
  for (double th = 0.0; th <= std::numbers::pi; th += 0.07) {
    for (double s : {0.2, 0.5, 0.8}) {
      for (double lam : {0.1, 0.6}) {
        const AnnealPoint pt{s, lam};
        CHECK(effective_energy(th, pt, spec, {Axis::x, 1.0, 0.0, 1.0}) == landscape::nonstoquastic_energy(th, pt, spec));

        const BathSpec bx{Axis::x, 1.0, 0.13, 1.0};
        const double L = reorganization_constant(bx);
        const double c = std::cos(th), sn = std::sin(th);
        const double adjusted_x = -s * lam * std::pow(sn, 5) + (s * (1 - lam) - L) * c * c - (1 - s) * c;
        CHECK(std::abs(effective_energy(th, pt, spec, bx) - adjusted_x) < 1e-14);

        const BathSpec bz{Axis::z, 1.0, 0.13, 1.0};
        const double adjusted_z = -s * lam * std::pow(sn, 5) + (s * (1 - lam) + L) * c * c - (1 - s) * c - L;
        CHECK(std::abs(effective_energy(th, pt, spec, bz) - adjusted_z) < 1e-14);
      }
    }
  }
}

TEST_CASE("z-coupling constant offset keeps the minimizer") {
  const ModelSpec spec{5, 2};
  // fixed coefficients: bath_z Lambda vs bath_x -Lambda produce the same
  // cos^2 coefficient; they differ by the constant -Lambda only
  auto tz = bath_terms({0.5, 0.3}, spec, Axis::z, 0.1);
  auto tx = landscape::terms_for({0.5, 0.3}, spec);
  tx.multi_x += 0.1;
  const landscape::ThetaGrid g(5, 2);
  CHECK(std::abs(g.minimize(tz).minimizer - g.minimize(tx).minimizer) < 1e-7);
  CHECK(g.minimize(tz).value == doctest::Approx(g.minimize(tx).value - 0.1).epsilon(1e-12));
}

TEST_CASE("bath-shifted scans") {
  const ModelSpec spec{5, 2};
  SUBCASE("Lambda = 0 reproduces the bare scan") {
    const auto a = bath_shifted_phase_scan(spec, Axis::x, 0.0, 0.1);
    const auto b = phase::locate_transition(0.1, spec);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].s_c == b[i].s_c);
      CHECK(a[i].order == b[i].order);
    }
  }
  SUBCASE("x coupling pushes lambda=0.1 toward first order") {
    CHECK(bath_shifted_phase_scan(spec, Axis::x, 0.0, 0.1).front().order == phase::Order::second);
    CHECK(bath_shifted_phase_scan(spec, Axis::x, 0.5, 0.1).front().order == phase::Order::first);
  }
  SUBCASE("z coupling turns lambda=0.95 second order") {
    CHECK(bath_shifted_phase_scan(spec, Axis::z, 0.0, 0.95).front().order == phase::Order::first);
    const auto strong = bath_shifted_phase_scan(spec, Axis::z, 0.45, 0.95);
    REQUIRE_FALSE(strong.empty());
    CHECK(strong.front().order == phase::Order::second);
    CHECK(strong.front().below == phase::Phase::qp_plus);
  }
  CHECK_THROWS_AS(bath_shifted_phase_scan({5, 3}, Axis::x, 0.1, 0.5), ParameterError);
}
