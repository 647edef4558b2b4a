#pragma once

// The two-noun, three-modifier anaphora schema. Contexts are (X1,X2),
// (X2,X3), (X3,X1); the first two ask for "the same one", the third for
// "the other one", so the third context is the anti-correlated one.

#include <array>
#include <cctype>
#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <utility>

#include "ctxkit/error.hpp"
#include "ctxkit/prlike.hpp"

namespace ctxkit::schema {

enum class ModifierKind { Adjective, Verb, Preposition };

inline ModifierKind parse_modifier_kind(std::string_view s) {
  if (s == "adjective") return ModifierKind::Adjective;
  if (s == "verb") return ModifierKind::Verb;
  if (s == "preposition") return ModifierKind::Preposition;
  throw Error(ErrorKind::InvalidArgument, "unknown modifier kind '" + std::string(s) + "'");
}

class SchemaInstance {
 public:
  SchemaInstance(std::pair<std::string, std::string> nouns, std::array<std::string, 3> modifiers,
                 ModifierKind kind = ModifierKind::Adjective)
      : nouns_(std::move(nouns)), modifiers_(std::move(modifiers)), kind_(kind) {
    if (nouns_.first.empty() || nouns_.second.empty()) {
      throw Error(ErrorKind::InvalidArgument, "nouns must be nonempty");
    }
    if (nouns_.first == nouns_.second) {
      throw Error(ErrorKind::InvalidArgument, "nouns must be distinct");
    }
    for (std::size_t i = 0; i < 3; ++i) {
      if (modifiers_[i].empty()) throw Error(ErrorKind::InvalidArgument, "modifiers must be nonempty");
      for (std::size_t j = i + 1; j < 3; ++j) {
        if (modifiers_[i] == modifiers_[j]) {
          throw Error(ErrorKind::InvalidArgument, "modifiers must be pairwise distinct");
        }
      }
    }
  }

  const std::pair<std::string, std::string>& nouns() const noexcept { return nouns_; }
  const std::array<std::string, 3>& modifiers() const noexcept { return modifiers_; }
  ModifierKind kind() const noexcept { return kind_; }

 private:
  std::pair<std::string, std::string> nouns_;
  std::array<std::string, 3> modifiers_;
  ModifierKind kind_;
};

/// "an" before a vowel-initial noun, "a" otherwise.
inline std::string_view indefinite_article(std::string_view noun) {
  if (noun.empty()) return "a";
  switch (std::tolower(static_cast<unsigned char>(noun.front()))) {
    case 'a': case 'e': case 'i': case 'o': case 'u': return "an";
    default: return "a";
  }
}

inline std::array<std::string, 3> render_sentences(const SchemaInstance& inst,
                                                   std::string_view mask_token = "[MASK]") {
  if (mask_token.empty()) throw Error(ErrorKind::InvalidArgument, "empty mask token");
  const auto& [o1, o2] = inst.nouns();
  const std::string intro = "There is " + std::string(indefinite_article(o1)) + " " + o1 + " and " +
                            std::string(indefinite_article(o2)) + " " + o2 + ".";
  const std::string copula = inst.kind() == ModifierKind::Verb ? "is being " : "is ";
  const auto& x = inst.modifiers();
  auto sentence = [&](const std::string& lead, const char* which, const std::string& tail) {
    return intro + " The " + std::string(mask_token) + " " + copula + lead + " and " + which +
           " one " + copula + tail + ".";
  };
  return {sentence(x[0], "the same", x[1]), sentence(x[1], "the same", x[2]),
          sentence(x[2], "the other", x[0])};
}

/// Restricts a masked prediction to the two candidate nouns.
inline std::pair<double, double> normalize_pair(double p_a, double p_b) {
  if (!(std::isfinite(p_a) && std::isfinite(p_b)) || p_a < 0.0 || p_b < 0.0) {
    throw Error(ErrorKind::InvalidArgument, "probabilities must be finite and nonnegative");
  }
  const double total = p_a + p_b;
  if (total <= 0.0) {
    throw Error(ErrorKind::DegeneratePrediction, "no probability mass on either candidate noun");
  }
  return {p_a / total, p_b / total};
}

/// Rank-3 PR-like model with the third context anti-correlated; the first
/// noun is outcome 0 of every observable.
inline PrLikeModel build_model(const SchemaInstance&, std::span<const double, 3> p_first) {
  return from_probabilities(p_first, {2});
}

}  // namespace ctxkit::schema
