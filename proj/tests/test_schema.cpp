#include <catch_amalgamated.hpp>

#include "ctxkit/schema.hpp"
#include "models.hpp"

using namespace ctxkit;
using namespace ctxkit::schema;
using Catch::Matchers::WithinAbs;
using fixtures::error_kind;

TEST_CASE("rendering the running example", "[schema]") {
  const SchemaInstance inst({"apple", "strawberry"}, {"red", "round", "sweet"});
  const auto s = render_sentences(inst);
  CHECK(s[0] == "There is an apple and a strawberry. The [MASK] is red and the same one is round.");
  CHECK(s[1] == "There is an apple and a strawberry. The [MASK] is round and the same one is sweet.");
  CHECK(s[2] == "There is an apple and a strawberry. The [MASK] is sweet and the other one is red.");
  CHECK(render_sentences(inst, "<mask>")[0].find("The <mask> is red") != std::string::npos);
  CHECK(error_kind([&] { render_sentences(inst, ""); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("articles and modifier kinds", "[schema]") {
  const SchemaInstance inst({"dog", "owl"}, {"big", "old", "quiet"});
  CHECK(render_sentences(inst)[0].starts_with("There is a dog and an owl."));
  CHECK(indefinite_article("Umbrella") == "an");
  CHECK(indefinite_article("cat") == "a");
  const SchemaInstance verbs({"dog", "cat"}, {"sleeping", "eating", "running"}, ModifierKind::Verb);
  CHECK(render_sentences(verbs)[2].ends_with("The [MASK] is being running and the other one is being sleeping."));
  CHECK(parse_modifier_kind("preposition") == ModifierKind::Preposition);
  CHECK(error_kind([] { parse_modifier_kind("noun"); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("instance invariants", "[schema]") {
  CHECK(error_kind([] { SchemaInstance({"a", "a"}, {"x", "y", "z"}); }) == ErrorKind::InvalidArgument);
  CHECK(error_kind([] { SchemaInstance({"a", "b"}, {"x", "x", "z"}); }) == ErrorKind::InvalidArgument);
  CHECK(error_kind([] { SchemaInstance({"a", ""}, {"x", "y", "z"}); }) == ErrorKind::InvalidArgument);
  CHECK(error_kind([] { SchemaInstance({"a", "b"}, {"x", "y", ""}); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("pair normalisation", "[schema]") {
  const auto [a, b] = normalize_pair(0.3, 0.1);
  CHECK_THAT(a, WithinAbs(0.75, 1e-15));
  CHECK_THAT(b, WithinAbs(0.25, 1e-15));
  CHECK(error_kind([] { normalize_pair(0.0, 0.0); }) == ErrorKind::DegeneratePrediction);
  CHECK(error_kind([] { normalize_pair(-0.1, 0.2); }) == ErrorKind::InvalidArgument);
  CHECK(error_kind([] { normalize_pair(std::nan(""), 0.2); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("model construction", "[schema]") {
  const SchemaInstance inst({"apple", "strawberry"}, {"red", "round", "sweet"});
  const std::array<double, 3> p = {0.6, 0.45, 0.52};
  const auto pr = build_model(inst, p);
  CHECK(pr.is_canonical());
  CHECK_THAT(pr.epsilons()[0], WithinAbs(0.2, 1e-15));
  CHECK_THAT(pr.epsilons()[1], WithinAbs(-0.1, 1e-15));
  CHECK_THAT(pr.epsilons()[2], WithinAbs(0.04, 1e-15));
  // "the other one": the first noun in the third context pairs with the second noun
  const auto m = to_empirical(pr);
  CHECK_THAT(m.table(2)[1], WithinAbs(0.52, 1e-15));
}
