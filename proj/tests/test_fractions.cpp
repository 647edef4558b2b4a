#include <catch_amalgamated.hpp>

#include <numeric>
#include <random>

#include "ctxkit/fractions.hpp"
#include "ctxkit/prlike.hpp"
#include "lp_oracle.hpp"
#include "models.hpp"

using namespace ctxkit;
using Catch::Matchers::WithinAbs;

namespace {

// CF by building the program from scratch and solving it by vertex enumeration.
double cf_by_enumeration(const EmpiricalModel& m) {
  const auto& sc = m.scenario();
  std::vector<GlobalAssignment> gs;
  for_each_global_assignment(sc, [&](const GlobalAssignment& g) { gs.push_back(g); });
  lp::Matrix a;
  std::vector<double> b;
  for (std::size_t c = 0; c < sc.num_contexts(); ++c) {
    for (std::size_t s = 0; s < sc.table_size(c); ++s) {
      std::vector<double> row(gs.size(), 0.0);
      for (std::size_t k = 0; k < gs.size(); ++k) row[k] = restrict_to(sc, gs[k], c) == s ? 1.0 : 0.0;
      a.push_back(row);
      b.push_back(m.table(c)[s]);
    }
  }
  const std::vector<double> c(gs.size(), 1.0);
  return 1.0 - fixtures::vertex_enumeration_max(a, b, c).value();
}

void check_cf_witness(const EmpiricalModel& m, const DecompositionResult& r) {
  const auto& sc = m.scenario();
  double total = 0.0;
  for (double w : r.witness_weights) {
    CHECK(w >= -1e-12);
    total += w;
  }
  CHECK_THAT(total, WithinAbs(1.0 - r.fraction, 1e-9));
  std::size_t k = 0;
  std::vector<Table> induced;
  for (std::size_t c = 0; c < sc.num_contexts(); ++c) induced.emplace_back(sc.table_size(c), 0.0);
  for_each_global_assignment(sc, [&](const GlobalAssignment& g) {
    for (std::size_t c = 0; c < sc.num_contexts(); ++c) induced[c][restrict_to(sc, g, c)] += r.witness_weights[k];
    ++k;
  });
  for (std::size_t c = 0; c < sc.num_contexts(); ++c) {
    for (std::size_t s = 0; s < induced[c].size(); ++s) CHECK(induced[c][s] <= m.table(c)[s] + 1e-9);
  }
}

void check_sf_witness(const EmpiricalModel& m, const DecompositionResult& r) {
  const auto& sc = m.scenario();
  CHECK_THAT(r.common_mass, WithinAbs(1.0 - r.fraction, 1e-9));
  REQUIRE(r.no_signalling_part.size() == sc.num_contexts());
  for (std::size_t c = 0; c < sc.num_contexts(); ++c) {
    const auto& f = r.no_signalling_part[c];
    CHECK_THAT(std::accumulate(f.begin(), f.end(), 0.0), WithinAbs(r.common_mass, 1e-9));
    for (std::size_t s = 0; s < f.size(); ++s) {
      CHECK(f[s] >= -1e-12);
      CHECK(f[s] <= m.table(c)[s] + 1e-9);
    }
  }
  if (r.common_mass > 1e-9) {
    std::vector<Table> scaled = r.no_signalling_part;
    for (auto& t : scaled) for (auto& v : t) v /= r.common_mass;
    CHECK(is_no_signalling(EmpiricalModel(sc, scaled), 1e-7));
  }
}

}  // namespace

TEST_CASE("contextual fraction of the hierarchy fixtures", "[fractions]") {
  CHECK_THAT(contextual_fraction(fixtures::pr_prism()).fraction, WithinAbs(1.0, 1e-9));
  CHECK_THAT(contextual_fraction(fixtures::pr_box_bell()).fraction, WithinAbs(1.0, 1e-9));
  CHECK_THAT(contextual_fraction(fixtures::bell_model()).fraction, WithinAbs(0.25, 1e-9));
  CHECK_THAT(contextual_fraction(fixtures::deterministic_cyclic(3)).fraction, WithinAbs(0.0, 1e-12));
  CHECK_THAT(signalling_fraction(fixtures::deterministic_cyclic(3)).fraction, WithinAbs(0.0, 1e-12));
}

TEST_CASE("half PR prism plus half deterministic has CF 1/2", "[fractions]") {
  const auto m = fixtures::mix(fixtures::pr_prism(), fixtures::deterministic_cyclic(3), 0.5);
  const double expected = cf_by_enumeration(m);
  CHECK_THAT(expected, WithinAbs(0.5, 1e-9));
  const auto r = contextual_fraction(m);
  CHECK_THAT(r.fraction, WithinAbs(expected, 1e-9));
  check_cf_witness(m, r);
}

TEST_CASE("CF agrees with vertex enumeration on random cyclic models", "[fractions][property]") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 10; ++t) {
    std::vector<Table> tables;
    for (int c = 0; c < 3; ++c) {
      Table row(4);
      for (auto& v : row) v = u(rng) * u(rng);
      const double s = std::accumulate(row.begin(), row.end(), 0.0);
      for (auto& v : row) v /= s;
      tables.push_back(row);
    }
    const EmpiricalModel m(cyclic_scenario(3), tables);
    const auto r = contextual_fraction(m);
    CHECK_THAT(r.fraction, WithinAbs(cf_by_enumeration(m), 1e-8));
    check_cf_witness(m, r);
    check_sf_witness(m, signalling_fraction(m));
  }
}

TEST_CASE("signalling fraction of PR-like models is max |eps|", "[fractions]") {
  const auto pr = PrLikeModel({0.5, 0.0, 0.0});
  const auto r = signalling_fraction(to_empirical(pr));
  CHECK_THAT(r.fraction, WithinAbs(0.5, 1e-9));
  check_sf_witness(to_empirical(pr), r);
  CHECK_THAT(signalling_fraction(fixtures::bell_model()).fraction, WithinAbs(0.0, 1e-9));
  const auto cf = contextual_fraction(to_empirical(PrLikeModel({0.4, -0.2, 0.1})));
  CHECK_THAT(cf.fraction, WithinAbs(1.0, 1e-6));
}

TEST_CASE("sheaf criterion is strict", "[fractions]") {
  CHECK(sheaf_contextual(to_empirical(PrLikeModel({0.1, 0.0, 0.05}))).contextual);
  CHECK_FALSE(sheaf_contextual(to_empirical(PrLikeModel({0.2, 0.0, 0.05}))).contextual);
  const auto v = sheaf_contextual(fixtures::bell_model());
  CHECK(v.contextual);
  CHECK_FALSE(sheaf_contextual(fixtures::deterministic_cyclic(4)).contextual);
}

TEST_CASE("fractions validate their input", "[fractions]") {
  const EmpiricalModel bad(cyclic_scenario(3), {{0.5, 0.5, 0.5, 0.0}, {1, 0, 0, 0}, {1, 0, 0, 0}});
  CHECK(fixtures::error_kind([&] { contextual_fraction(bad); }) == ErrorKind::InvalidModel);
  CHECK(fixtures::error_kind([&] { signalling_fraction(bad); }) == ErrorKind::InvalidModel);
}
