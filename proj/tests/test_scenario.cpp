#include <catch_amalgamated.hpp>

#include <random>

#include "ctxkit/prlike.hpp"
#include "ctxkit/scenario.hpp"
#include "models.hpp"

using namespace ctxkit;
using Catch::Matchers::WithinAbs;
using fixtures::error_kind;

TEST_CASE("scenario construction validates its inputs", "[scenario]") {
  const auto sc = fixtures::bell_scenario();
  CHECK(sc.num_observables() == 4);
  CHECK(sc.num_contexts() == 4);
  CHECK(sc.table_size(0) == 4);
  CHECK(sc.observable_index("b2") == 3);
  CHECK(sc.position_in_context(0, sc.observable_index("b1")) == 1);
  CHECK(sc.position_in_context(0, sc.observable_index("b2")) == MeasurementScenario::npos);
  CHECK(error_kind([&] { (void)sc.observable_index("zz"); }) == ErrorKind::InvalidArgument);

  CHECK(error_kind([] { MeasurementScenario({"a", "a"}, {{"a"}}, {"0", "1"}); }) == ErrorKind::InvalidScenario);
  CHECK(error_kind([] { MeasurementScenario({"a"}, {{"a"}}, {"0"}); }) == ErrorKind::InvalidScenario);
  CHECK(error_kind([] { MeasurementScenario({"a", "b"}, {{"a", "c"}}, {"0", "1"}); }) ==
        ErrorKind::InvalidScenario);
  CHECK(error_kind([] { MeasurementScenario({"a", "b"}, {{"a"}}, {"0", "1"}); }) == ErrorKind::InvalidScenario);
  CHECK(error_kind([] { MeasurementScenario({"a", "b"}, {{"a", "b"}, {"b", "a"}}, {"0", "1"}); }) ==
        ErrorKind::DegenerateScenario);
}

TEST_CASE("cyclic scenarios", "[scenario]") {
  const auto sc = cyclic_scenario(3);
  CHECK(sc.observables() == std::vector<std::string>{"x1", "x2", "x3"});
  CHECK(sc.contexts()[2] == std::vector<std::string>{"x3", "x1"});
  CHECK(error_kind([] { cyclic_scenario(2); }) == ErrorKind::DegenerateScenario);
}

TEST_CASE("joint outcomes are lexicographic, first observable most significant", "[scenario]") {
  const MeasurementScenario sc({"a", "b"}, {{"a", "b"}}, {"0", "1", "2"});
  CHECK(sc.table_size(0) == 9);
  // joint 5 = (1, 2)
  CHECK(sc.outcome_at(0, 5, 0) == 1);
  CHECK(sc.outcome_at(0, 5, 1) == 2);
}

TEST_CASE("validate reports the offending context", "[scenario]") {
  auto sc = fixtures::bell_scenario();
  CHECK_NOTHROW(validate(fixtures::bell_model()));
  // printed typo row sums to 1.75
  EmpiricalModel typo(sc, {{0.5, 0, 0, 0.5}, {0.375, 0.5, 0.5, 0.375}, {0.375, 0.125, 0.125, 0.375},
                           {0.125, 0.375, 0.375, 0.125}});
  try {
    validate(typo);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidModel);
    CHECK(std::string(e.what()).find("context 1") != std::string::npos);
  }
  EmpiricalModel negative(sc, {{1.5, -0.5, 0, 0}, {1, 0, 0, 0}, {1, 0, 0, 0}, {1, 0, 0, 0}});
  CHECK(error_kind([&] { validate(negative); }) == ErrorKind::InvalidModel);
  EmpiricalModel shape(sc, {{1, 0, 0}, {1, 0, 0, 0}, {1, 0, 0, 0}, {1, 0, 0, 0}});
  CHECK(error_kind([&] { validate(shape); }) == ErrorKind::InvalidModel);
  EmpiricalModel count(sc, {{1, 0, 0, 0}});
  CHECK(error_kind([&] { validate(count); }) == ErrorKind::InvalidModel);
}

TEST_CASE("marginals and no-signalling", "[scenario]") {
  const auto m = to_empirical(PrLikeModel({0.5, 0.0, 0.0}));
  const auto x1 = marginal(m, 0, "x1");
  CHECK_THAT(x1[0], WithinAbs(0.75, 1e-15));
  CHECK_THAT(x1[1], WithinAbs(0.25, 1e-15));
  // x1 sits second in context 3
  CHECK_THAT(marginal(m, 2, "x1")[0], WithinAbs(0.5, 1e-15));
  CHECK_FALSE(is_no_signalling(m, 1e-9));
  CHECK(is_no_signalling(fixtures::bell_model(), 1e-12));
  CHECK(is_no_signalling(fixtures::pr_prism(), 1e-12));
  CHECK(error_kind([&] { marginal(m, 0, "x3"); }) == ErrorKind::NotInContext);
}

TEST_CASE("symmetric models have uniform marginals", "[scenario][property]") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 200; ++t) {
    const auto m = fixtures::random_symmetric_cyclic(rng, 3 + t % 4);
    for (std::size_t c = 0; c < m.scenario().num_contexts(); ++c) {
      for (std::size_t x : m.scenario().context_indices()[c]) {
        const auto p = marginal(m, c, x);
        CHECK_THAT(p[0], WithinAbs(0.5, 1e-12));
      }
    }
    CHECK(is_no_signalling(m, 1e-12));
  }
}

TEST_CASE("possibilistic collapse", "[scenario]") {
  const auto pm = possibilistic_collapse(fixtures::bell_model());
  CHECK(pm.support(0) == Support{1, 0, 0, 1});
  CHECK(pm.support(1) == Support{1, 1, 1, 1});
  const auto thresholded = possibilistic_collapse(fixtures::bell_model(), 0.2);
  CHECK(thresholded.support(1) == Support{1, 0, 0, 1});
  CHECK(error_kind([] { PossibilisticModel(cyclic_scenario(3), {{0, 0, 0, 0}, {1, 0, 0, 0}, {1, 0, 0, 0}}); }) ==
        ErrorKind::InvalidModel);
}

TEST_CASE("global sections and the contextuality hierarchy", "[scenario]") {
  const auto sc = cyclic_scenario(3);
  std::vector<std::size_t> codes;
  for_each_global_assignment(sc, [&](const GlobalAssignment& g) {
    codes.push_back(g.outcome_of[0] * 4 + g.outcome_of[1] * 2 + g.outcome_of[2]);
  });
  CHECK(codes == std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6, 7});

  CHECK(global_sections(possibilistic_collapse(fixtures::pr_prism())).empty());
  CHECK(is_strongly_contextual(fixtures::pr_prism()));
  CHECK(is_strongly_contextual(fixtures::pr_box_bell()));
  CHECK(is_logically_contextual(fixtures::pr_box_bell()));

  CHECK(is_logically_contextual(fixtures::hardy_model()));
  CHECK_FALSE(is_strongly_contextual(fixtures::hardy_model()));

  CHECK_FALSE(is_logically_contextual(fixtures::bell_model()));
  const auto sections = global_sections(possibilistic_collapse(fixtures::bell_model()));
  REQUIRE_FALSE(sections.empty());
  CHECK(sections.front().outcome_of == std::vector<std::size_t>{0, 0, 0, 0});
  CHECK(sections.front().label(fixtures::bell_scenario(), "a2") == "0");

  const auto det = fixtures::deterministic_cyclic(5);
  CHECK_FALSE(is_logically_contextual(det));
  CHECK(global_sections(possibilistic_collapse(det)).size() == 1);
}

TEST_CASE("enumeration guard", "[scenario]") {
  std::vector<std::string> obs;
  std::vector<std::vector<std::string>> ctx;
  for (int i = 0; i < 21; ++i) obs.push_back("o" + std::to_string(i));
  for (int i = 0; i < 21; ++i) ctx.push_back({obs[i], obs[(i + 1) % 21]});
  const MeasurementScenario big(obs, ctx, {"0", "1"});
  CHECK(error_kind([&] { (void)num_global_assignments(big); }) == ErrorKind::EnumerationGuard);
  CHECK(num_global_assignments(cyclic_scenario(20)) == (std::size_t{1} << 20));
}
