#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "ctxkit/cbd.hpp"
#include "ctxkit/fractions.hpp"
#include "ctxkit/prlike.hpp"
#include "models.hpp"

using namespace ctxkit;
using Catch::Matchers::WithinAbs;
using fixtures::error_kind;

TEST_CASE("construction checks", "[prlike]") {
  CHECK(error_kind([] { PrLikeModel({0.1, 0.2}); }) == ErrorKind::InvalidArgument);
  CHECK(error_kind([] { PrLikeModel({0.1, 1.2, 0.0}); }) == ErrorKind::InvalidArgument);
  CHECK(error_kind([] { PrLikeModel({0.1, 0.2, 0.0}, {0, 1}); }) == ErrorKind::InvalidArgument);
  CHECK(error_kind([] { PrLikeModel({0.1, 0.2, 0.0}, {3}); }) == ErrorKind::InvalidArgument);
  CHECK(error_kind([] { PrLikeModel({0.1, 0.2, 0.0}, {1, 1, 2}); }) == ErrorKind::InvalidArgument);
  const PrLikeModel pr({0.1, 0.2, 0.3});
  CHECK(pr.is_canonical());
  CHECK(pr.anticorrelated() == std::vector<std::size_t>{2});
  CHECK(PrLikeModel({0.1, 0.2, 0.3}, {0, 1, 2}).anticorrelated().size() == 3);
}

TEST_CASE("from probabilities", "[prlike]") {
  const std::vector<double> p = {0.75, 0.4, 0.55};
  const auto pr = from_probabilities(p);
  CHECK_THAT(pr.epsilons()[0], WithinAbs(0.5, 1e-15));
  CHECK_THAT(pr.epsilons()[1], WithinAbs(-0.2, 1e-15));
  CHECK_THAT(pr.epsilons()[2], WithinAbs(0.1, 1e-15));
  const std::vector<double> bad = {0.5, 1.5, 0.5};
  CHECK(error_kind([&] { from_probabilities(bad); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("empirical tables", "[prlike]") {
  const auto m = to_empirical(PrLikeModel({0.2, 0.2, 0.2}));
  CHECK_NOTHROW(validate(m));
  const std::vector<Table> expected = {{0.6, 0, 0, 0.4}, {0.6, 0, 0, 0.4}, {0, 0.6, 0.4, 0}};
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t s = 0; s < 4; ++s) CHECK_THAT(m.table(c)[s], WithinAbs(expected[c][s], 1e-15));
  }
}

TEST_CASE("analytic measures", "[prlike]") {
  CHECK_THAT(sf_analytic(PrLikeModel({0.4, -0.2, 0.1})), WithinAbs(0.4, 0));
  CHECK(cf_analytic(PrLikeModel({0.4, -0.2, 0.1})) == 1.0);
  CHECK_THAT(delta_analytic(PrLikeModel({0.5, -0.5, 0.25})), WithinAbs(2.5, 1e-15));
  CHECK(error_kind([] { delta_analytic(PrLikeModel({0.5, -0.5, 0.25}, {0})); }) == ErrorKind::InvalidArgument);

  const auto b = delta_bounds(PrLikeModel({0.3, 0.3, 0.3}));
  CHECK_THAT(b.lower, WithinAbs(0.6, 1e-15));
  CHECK_THAT(b.upper, WithinAbs(1.8, 1e-15));
  CHECK_THAT(delta_analytic(PrLikeModel({0.3, 0.3, 0.3})), WithinAbs(0.6, 1e-15));
  CHECK_THAT(delta_analytic(PrLikeModel({0.3, -0.3, 0.3})), WithinAbs(1.8, 1e-15));
  CHECK_THAT(delta_bounds(PrLikeModel({0.5, 0.0, 0.0, 0.0})).upper, WithinAbs(3.0, 1e-15));
}

TEST_CASE("canonicalize preserves the model up to relabelling", "[prlike][property]") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 3 + t % 4;
    const auto eps = fixtures::random_epsilons(rng, n);
    std::vector<std::size_t> anti;
    for (std::size_t c = 0; c < n; ++c) {
      if (rng() % 2) anti.push_back(c);
    }
    if (anti.size() % 2 == 0) {
      if (anti.empty() || anti.back() != n - 1) anti.push_back(n - 1);
      else anti.pop_back();
    }
    if (anti.empty()) anti.push_back(0);
    const PrLikeModel pr(eps, anti);
    const auto canon = canonicalize(pr);
    REQUIRE(canon.is_canonical());
    CHECK(sf_analytic(canon) == sf_analytic(pr));
    // relabelling outcomes leaves CbD's CNT1 and direct influence unchanged
    const auto a = cbd::from_empirical(to_empirical(pr));
    const auto b = cbd::from_empirical(to_empirical(canon));
    CHECK_THAT(cbd::direct_influence(a), WithinAbs(cbd::direct_influence(b), 1e-12));
    CHECK_THAT(cbd::cnt1(a), WithinAbs(cbd::cnt1(b), 1e-12));
    CHECK_THAT(cbd::direct_influence(a), WithinAbs(delta_analytic(canon), 1e-12));
  }
}

TEST_CASE("report flags", "[prlike]") {
  const auto r = analyze(PrLikeModel({0.1, 0.05, -0.08}));
  CHECK_THAT(r.sf, WithinAbs(0.1, 1e-15));
  CHECK_THAT(r.delta, WithinAbs(0.2, 1e-15));
  CHECK(r.sheaf_flag);
  CHECK(r.cbd_flag);
  CHECK_THAT(r.cnt1, WithinAbs(1.8, 1e-15));

  const auto peak = analyze(PrLikeModel({1.0, 1.0, 1.0}));
  CHECK(peak.sf == 1.0);
  CHECK(peak.delta == 2.0);
  CHECK_FALSE(peak.sheaf_flag);
  CHECK_FALSE(peak.cbd_flag);

  const auto centre = analyze(PrLikeModel({0.0, 0.0, 0.0}));
  CHECK(centre.sheaf_flag);
  CHECK(centre.cbd_flag);

  const auto lp = analyze(PrLikeModel({0.4, -0.2, 0.1}), true);
  CHECK_THAT(lp.cf, WithinAbs(1.0, 1e-6));
}

TEST_CASE("sheaf flag around the 1/6 threshold", "[prlike]") {
  const double t = 1.0 / 6.0;
  for (double sf : {std::nextafter(t, 0.0), t, std::nextafter(t, 1.0), 0.1666, 0.1667}) {
    const auto r = analyze(PrLikeModel({sf, 0.0, 0.0}));
    CHECK(r.sheaf_flag == (sf < t));
  }
}

TEST_CASE("symmetric models", "[prlike]") {
  CHECK(is_symmetric(fixtures::pr_prism()));
  CHECK_FALSE(is_symmetric(to_empirical(PrLikeModel({0.5, 0.0, 0.0}))));
  std::mt19937_64 rng(9);
  for (int t = 0; t < 100; ++t) {
    const auto m = fixtures::random_symmetric_cyclic(rng, 3 + t % 3);
    CHECK(is_symmetric(m));
    CHECK(signalling_fraction(m).fraction <= 1e-9);
  }
  const EmpiricalModel ternary(MeasurementScenario({"a"}, {{"a"}}, {"0", "1", "2"}), {{1, 0, 0}});
  CHECK(error_kind([&] { is_symmetric(ternary); }) == ErrorKind::InvalidArgument);
}
