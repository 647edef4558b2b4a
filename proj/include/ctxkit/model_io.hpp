#pragma once

// Text object format for empirical models:
//   {"observables":[...], "outcomes":[...], "contexts":[[...],...], "tables":[[...],...]}
// Table rows follow context order; entries use the dense joint-outcome order.

#include <string>
#include <vector>

#include <json.hpp>

#include "ctxkit/error.hpp"
#include "ctxkit/scenario.hpp"

namespace ctxkit::io {

namespace detail {

inline std::string label(const nlohmann::json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  throw Error(ErrorKind::Parse, "labels must be strings or integers");
}

inline std::vector<std::string> labels(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array()) {
    throw Error(ErrorKind::Parse, std::string("missing array '") + key + "'");
  }
  std::vector<std::string> out;
  for (const auto& v : j[key]) out.push_back(label(v));
  return out;
}

}  // namespace detail

inline EmpiricalModel model_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorKind::Parse, "model must be a JSON object");
  auto observables = detail::labels(j, "observables");
  auto outcomes = detail::labels(j, "outcomes");
  if (!j.contains("contexts") || !j["contexts"].is_array()) {
    throw Error(ErrorKind::Parse, "missing array 'contexts'");
  }
  std::vector<std::vector<std::string>> contexts;
  for (const auto& c : j["contexts"]) {
    if (!c.is_array()) throw Error(ErrorKind::Parse, "each context must be an array");
    std::vector<std::string> ctx;
    for (const auto& x : c) ctx.push_back(detail::label(x));
    contexts.push_back(std::move(ctx));
  }
  if (!j.contains("tables") || !j["tables"].is_array()) {
    throw Error(ErrorKind::Parse, "missing array 'tables'");
  }
  std::vector<Table> tables;
  for (const auto& row : j["tables"]) {
    if (!row.is_array()) throw Error(ErrorKind::Parse, "each table must be an array");
    Table t;
    for (const auto& v : row) {
      if (!v.is_number()) throw Error(ErrorKind::Parse, "table entries must be numbers");
      t.push_back(v.get<double>());
    }
    tables.push_back(std::move(t));
  }
  return EmpiricalModel(MeasurementScenario(std::move(observables), std::move(contexts), std::move(outcomes)),
                        std::move(tables));
}

inline EmpiricalModel model_from_string(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, e.what());
  }
  return model_from_json(j);
}

inline nlohmann::json to_json(const EmpiricalModel& model) {
  const auto& sc = model.scenario();
  return nlohmann::json{{"observables", sc.observables()},
                        {"outcomes", sc.outcomes()},
                        {"contexts", sc.contexts()},
                        {"tables", model.tables()}};
}

}  // namespace ctxkit::io
