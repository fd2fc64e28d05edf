#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "nsqa/gap_scan.hpp"
#include "nsqa/spin_sector.hpp"

using namespace nsqa;
using namespace nsqa::gap;

TEST_CASE("s=0 gap is exactly 2") {
  for (int N : {2, 3, 10, 40, 101}) {
    const auto g = gap_at({5, 2}, {0.0, 0.3}, N);
    CHECK(std::abs(g.gap01 - 2.0) < 1e-10);
    CHECK(g.E0 <= g.E1);
    CHECK(g.E1 <= g.E2);
  }
  CHECK_THROWS_AS(gap_at({5, 2}, {0.5, 0.5}, 1), ParameterError);
}

TEST_CASE("sector gap vs full spectrum") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 8; ++trial) {
    const ModelSpec spec{trial % 2 ? 5 : 3, 2};
    const AnnealPoint pt{u(rng), u(rng)};
    const int N = 6 + trial % 3;
    const auto g = gap_at(spec, pt, N);
    const auto full = sector::brute_force_spectrum(spec, pt, N);
    CHECK(std::abs(g.E0 - full[0]) < 1e-9);
    // E1 of the sector is a level of the full spectrum
    double nearest = 1e300;
    for (double e : full) nearest = std::min(nearest, std::abs(e - g.E1));
    CHECK(nearest < 1e-9);
  }
}

TEST_CASE("multiprecision gap agrees with double where both resolve it") {
  const ModelSpec spec{5, 2};
  const auto g = gap_at(spec, {0.45, 1.0}, 40);
  const double mp = gap01_multiprecision(spec, "0.45", "1", 40, 40);
  CHECK(std::abs(mp - g.gap01) < 1e-10 * std::max(1.0, g.gap01));
}

TEST_CASE("least squares and synthetic scaling") {
  const auto f = least_squares({0, 1, 2, 3}, {1, 3, 5, 7});
  CHECK(std::abs(f.intercept - 1) < 1e-14);
  CHECK(std::abs(f.slope - 2) < 1e-14);
  CHECK(f.rss < 1e-25);

  const auto Ns = default_N_list();
  REQUIRE(Ns.size() == 10);
  CHECK(Ns.front() == 40);
  CHECK(Ns.back() == 400);

  std::vector<double> ex, po;
  for (int N : Ns) {
    ex.push_back(0.8 * std::exp(-0.07 * N));
    po.push_back(2.5 * std::pow(N, -1.3));
  }
  const auto fe = fit_scaling(Ns, ex);
  CHECK(fe.verdict == Verdict::exponential);
  CHECK(std::abs(fe.exponential.slope / -0.07 - 1) < 0.02);
  const auto fp = fit_scaling(Ns, po);
  CHECK(fp.verdict == Verdict::polynomial);
  CHECK(std::abs(fp.polynomial.slope / -1.3 - 1) < 0.02);

  CHECK_THROWS_AS(fit_scaling({1, 2, 3}, {1, 1, 1}), ParameterError);
}

TEST_CASE("minimum gap location approaches the transition") {
  const ModelSpec spec{5, 2};
  GapOptions opts;
  double prev = 1.0;
  for (int N : {40, 80, 160}) {
    const auto r = minimum_gap(spec, AnnealPath::constant(0.1), N, opts);
    const double d = std::abs(r.point.s - 0.357);
    CHECK(d < prev);
    prev = d;
    CHECK(r.gap01 > 0);
  }
}

TEST_CASE("path comparison") {
  const ModelSpec spec{5, 2};
  const auto rows = path_gap_compare(spec, {AnnealPath::constant(1.0), AnnealPath::constant(1.0)}, 40);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].gap_min == rows[1].gap_min);
  CHECK(rows[0].s_min == rows[1].s_min);

  const auto cmp = path_gap_compare(spec, {AnnealPath::constant(0.1), AnnealPath::constant(1.0)}, 100);
  CHECK(cmp[0].gap_min > cmp[1].gap_min);
  CHECK_THROWS_AS(path_gap_compare(spec, {AnnealPath::constant(1.0)}, 40), ParameterError);
}

TEST_CASE("path parsing") {
  const auto p = AnnealPath::parse("0:0.1,0.5:0.1,1:1");
  CHECK(p.lambda_at(0.25) == doctest::Approx(0.1));
  CHECK(p.lambda_at(0.75) == doctest::Approx(0.55));
  CHECK_THROWS_AS(AnnealPath::parse("0:0.1,0.5"), ParameterError);
  CHECK_THROWS_AS(AnnealPath::parse("0.1:0.1,1:1"), ParameterError);
  CHECK_THROWS_AS(AnnealPath::parse("0:0.1,0.5:0.2,0.4:0.3,1:1"), ParameterError);
}
