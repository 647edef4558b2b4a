#pragma once

// Batch processing of schema probability records: line-delimited JSON in,
// per-record contextuality reports and aggregate CSV tables out.
//
// Record wire format, one object per line:
//   {"id": "...", "nouns": [O1, O2], "adjectives": [X1, X2, X3],
//    "p_first": [p1, p2, p3],
//    "raw": [[a1, b1], [a2, b2], [a3, b3]],            (optional)
//    "features": {"euclidean_dist": d, "bias_diff": b,  (optional)
//                 "noun_freqs": [f1, f2], "adj_freqs": [g1, g2, g3],
//                 "cosine_sim": c}}                     (cosine optional)
// p_first[i] is the normalised probability of O1 in context i, contexts
// ordered (X1,X2), (X2,X3), (X3,X1).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ctxkit/error.hpp"
#include "ctxkit/format.hpp"
#include "ctxkit/fractions.hpp"
#include "ctxkit/prlike.hpp"
#include "ctxkit/schema.hpp"
#include "ctxkit/stats.hpp"

namespace ctxkit::pipeline {

inline constexpr double kRawConsistencyTolerance = 1e-9;
inline constexpr double kLpCrossCheckTolerance = 1e-6;

struct RawFeatures {
  double euclidean_dist = 0.0;
  double bias_diff = 0.0;
  std::array<double, 2> noun_freqs{};
  std::array<double, 3> adj_freqs{};
  std::optional<double> cosine_sim;

  bool operator==(const RawFeatures&) const = default;
};

struct ProbabilityRecord {
  std::string id;
  std::array<std::string, 2> nouns;
  std::array<std::string, 3> adjectives;
  std::array<double, 3> p_first{};
  std::optional<std::array<std::array<double, 2>, 3>> raw;
  std::optional<RawFeatures> features;

  bool operator==(const ProbabilityRecord&) const = default;
};

inline stats::FeatureVector feature_vector(const RawFeatures& f) {
  stats::FeatureVector v;
  v.euclidean_dist = f.euclidean_dist;
  v.bias_diff = f.bias_diff;
  v.nouns_entropy = stats::entropy_bits(f.noun_freqs);
  v.adjectives_entropy = stats::entropy_bits(f.adj_freqs);
  v.cosine_similarity = f.cosine_sim;
  return v;
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

using nlohmann::json;

[[noreturn]] inline void bad(const std::string& what) { throw Error(ErrorKind::Parse, what); }

inline double number(const json& j, const char* what) {
  if (!j.is_number()) bad(std::string(what) + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) bad(std::string(what) + " must be finite");
  return v;
}

template <std::size_t N>
std::array<std::string, N> strings(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array() || j[key].size() != N) {
    bad(std::string("'") + key + "' must be an array of " + std::to_string(N) + " strings");
  }
  std::array<std::string, N> out;
  for (std::size_t i = 0; i < N; ++i) {
    if (!j[key][i].is_string() || j[key][i].get<std::string>().empty()) {
      bad(std::string("'") + key + "' entries must be nonempty strings");
    }
    out[i] = j[key][i].get<std::string>();
  }
  return out;
}

template <std::size_t N>
std::array<double, N> numbers(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array() || j[key].size() != N) {
    bad(std::string("'") + key + "' must be an array of " + std::to_string(N) + " numbers");
  }
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = number(j[key][i], key);
  return out;
}

inline ProbabilityRecord record_from_json(const json& j) {
  if (!j.is_object()) bad("record must be a JSON object");
  ProbabilityRecord r;
  if (!j.contains("id") || !j["id"].is_string() || j["id"].get<std::string>().empty()) {
    bad("'id' must be a nonempty string");
  }
  r.id = j["id"].get<std::string>();
  r.nouns = strings<2>(j, "nouns");
  if (r.nouns[0] == r.nouns[1]) bad("nouns must be distinct");
  r.adjectives = strings<3>(j, "adjectives");
  if (r.adjectives[0] == r.adjectives[1] || r.adjectives[1] == r.adjectives[2] ||
      r.adjectives[0] == r.adjectives[2]) {
    bad("adjectives must be pairwise distinct");
  }
  r.p_first = numbers<3>(j, "p_first");
  for (double p : r.p_first) {
    if (p < 0.0 || p > 1.0) {
      std::ostringstream os;
      os << "p_first value " << p << " outside [0, 1]";
      bad(os.str());
    }
  }
  if (j.contains("raw") && !j["raw"].is_null()) {
    const auto& raw = j["raw"];
    if (!raw.is_array() || raw.size() != 3) bad("'raw' must be an array of 3 pairs");
    std::array<std::array<double, 2>, 3> pairs{};
    for (std::size_t i = 0; i < 3; ++i) {
      if (!raw[i].is_array() || raw[i].size() != 2) bad("'raw' must be an array of 3 pairs");
      for (std::size_t k = 0; k < 2; ++k) {
        pairs[i][k] = number(raw[i][k], "raw");
        if (pairs[i][k] < 0.0) bad("raw probabilities must be nonnegative");
      }
      if (pairs[i][0] + pairs[i][1] > 0.0) {
        const double p = schema::normalize_pair(pairs[i][0], pairs[i][1]).first;
        if (std::abs(p - r.p_first[i]) > kRawConsistencyTolerance) {
          bad("raw pair " + std::to_string(i) + " does not normalise to p_first");
        }
      }
    }
    r.raw = pairs;
  }
  if (j.contains("features") && !j["features"].is_null()) {
    const auto& f = j["features"];
    if (!f.is_object()) bad("'features' must be an object");
    RawFeatures rf;
    if (!f.contains("euclidean_dist")) bad("features need 'euclidean_dist'");
    rf.euclidean_dist = number(f["euclidean_dist"], "euclidean_dist");
    if (rf.euclidean_dist < 0.0) bad("euclidean_dist must be nonnegative");
    if (!f.contains("bias_diff")) bad("features need 'bias_diff'");
    rf.bias_diff = number(f["bias_diff"], "bias_diff");
    rf.noun_freqs = numbers<2>(f, "noun_freqs");
    rf.adj_freqs = numbers<3>(f, "adj_freqs");
    for (double v : rf.noun_freqs) if (v < 0.0) bad("frequencies must be nonnegative");
    for (double v : rf.adj_freqs) if (v < 0.0) bad("frequencies must be nonnegative");
    if (f.contains("cosine_sim") && !f["cosine_sim"].is_null()) {
      const double c = number(f["cosine_sim"], "cosine_sim");
      if (c < -1.0 || c > 1.0) bad("cosine_sim outside [-1, 1]");
      rf.cosine_sim = c;
    }
    r.features = rf;
  }
  return r;
}

}  // namespace detail

struct ParseIssue {
  std::size_t line = 0;  // 1-based
  std::string message;
};

struct ParseResult {
  std::vector<ProbabilityRecord> records;
  std::vector<ParseIssue> issues;
};

/// Blank lines are skipped. Malformed lines are collected with their line
/// numbers; with `strict` the first one throws instead.
inline ParseResult parse_records(std::istream& in, bool strict = false) {
  ParseResult out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        detail::bad(std::string("malformed JSON: ") + e.what());
      }
      out.records.push_back(detail::record_from_json(j));
    } catch (const Error& e) {
      if (strict) {
        throw Error(ErrorKind::Parse, "line " + std::to_string(lineno) + ": " + e.what());
      }
      out.issues.push_back({lineno, e.what()});
    }
  }
  return out;
}

inline nlohmann::json to_json(const ProbabilityRecord& r) {
  nlohmann::json j{{"id", r.id}, {"nouns", r.nouns}, {"adjectives", r.adjectives}, {"p_first", r.p_first}};
  if (r.raw) j["raw"] = *r.raw;
  if (r.features) {
    nlohmann::json f{{"euclidean_dist", r.features->euclidean_dist},
                     {"bias_diff", r.features->bias_diff},
                     {"noun_freqs", r.features->noun_freqs},
                     {"adj_freqs", r.features->adj_freqs}};
    if (r.features->cosine_sim) f["cosine_sim"] = *r.features->cosine_sim;
    j["features"] = std::move(f);
  }
  return j;
}

inline std::string serialize_record(const ProbabilityRecord& r) { return to_json(r).dump(); }

// ---------------------------------------------------------------------------
// Per-record analysis

struct ReportRow {
  std::string id;
  std::optional<ContextualityReport> report;
  std::string error;

  bool ok() const { return report.has_value() && error.empty(); }
};

struct AnalyzeOptions {
  bool with_lp = false;
  /// 0 picks the hardware concurrency.
  unsigned threads = 0;
};

inline ReportRow analyze_record(const ProbabilityRecord& rec, bool with_lp) {
  ReportRow row{rec.id, std::nullopt, {}};
  try {
    if (rec.raw) {
      for (const auto& pair : *rec.raw) schema::normalize_pair(pair[0], pair[1]);
    }
    const schema::SchemaInstance inst({rec.nouns[0], rec.nouns[1]},
                                      {rec.adjectives[0], rec.adjectives[1], rec.adjectives[2]});
    const auto pr = schema::build_model(inst, rec.p_first);
    row.report = analyze(pr, with_lp);
    if (with_lp) {
      const double sf_lp = signalling_fraction(to_empirical(pr)).fraction;
      if (std::abs(sf_lp - row.report->sf) > kLpCrossCheckTolerance) {
        row.error = "lp-mismatch: signalling fraction " + fmt::format_double(sf_lp);
      }
    }
  } catch (const Error& e) {
    row.report.reset();
    row.error = std::string(to_string(e.kind())) + ": " + e.what();
  }
  return row;
}

/// Output order equals input order for any thread count.
inline std::vector<ReportRow> analyze_batch(const std::vector<ProbabilityRecord>& records,
                                            AnalyzeOptions opt = {}) {
  std::vector<ReportRow> rows(records.size());
  unsigned workers = opt.threads != 0 ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(records.size(), 1)));
  const std::size_t chunk = (records.size() + workers - 1) / workers;
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t lo = w * chunk, hi = std::min(records.size(), lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back([&, lo, hi] {
        for (std::size_t i = lo; i < hi; ++i) rows[i] = analyze_record(records[i], opt.with_lp);
      });
    }
  }
  return rows;
}

inline constexpr const char* kReportHeader = "id,sf,delta,cf,cnt1,sheaf,cbd,error";

inline void write_reports_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
  out << kReportHeader << '\n';
  for (const auto& row : rows) {
    out << fmt::csv_escape(row.id) << ',';
    if (row.report) {
      const auto& r = *row.report;
      out << fmt::format_double(r.sf) << ',' << fmt::format_double(r.delta) << ','
          << fmt::format_double(r.cf) << ',' << fmt::format_double(r.cnt1) << ','
          << (r.sheaf_flag ? 1 : 0) << ',' << (r.cbd_flag ? 1 : 0) << ',';
    } else {
      out << ",,,,,,";
    }
    out << fmt::csv_escape(row.error) << '\n';
  }
}

inline std::vector<ReportRow> read_reports_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::Parse, "empty report file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kReportHeader) throw Error(ErrorKind::Parse, "unexpected report header '" + line + "'");
  std::vector<ReportRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = fmt::csv_split(line);
    if (f.size() != 8) throw Error(ErrorKind::Parse, "line " + std::to_string(lineno) + ": expected 8 fields");
    ReportRow row{f[0], std::nullopt, f[7]};
    if (!f[1].empty()) {
      ContextualityReport r;
      r.sf = fmt::parse_double(f[1]);
      r.delta = fmt::parse_double(f[2]);
      r.cf = fmt::parse_double(f[3]);
      r.cnt1 = fmt::parse_double(f[4]);
      r.sheaf_flag = f[5] == "1";
      r.cbd_flag = f[6] == "1";
      row.report = r;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Aggregation

struct AggregateOptions {
  std::size_t rank = 3;
  /// Bins of the 1-D histograms; 60 puts both thresholds (SF 1/6, delta 2) on edges.
  std::size_t histogram_bins = 60;
  std::size_t grid_bins = 200;
  std::vector<int> degrees = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<double> percentiles = {100, 50, 25, 10, 5, 1};
};

struct CorrelationRow {
  std::string feature;
  std::string target;
  std::optional<double> kendall;
  std::optional<double> spearman;
  std::optional<double> pearson;
};

struct R2Row {
  std::string feature;
  std::string target;
  int degree = 1;
  std::optional<double> r2;
};

struct Summary {
  std::size_t total = 0;
  std::size_t errors = 0;
  std::size_t analysed = 0;
  std::size_t sheaf_count = 0;
  std::size_t cbd_count = 0;
  double sheaf_fraction = 0.0;
  double cbd_fraction = 0.0;
  stats::Histogram1D sf_histogram;
  stats::Histogram1D delta_histogram;
  stats::Histogram2D grid;
  std::vector<CorrelationRow> correlations;
  std::vector<R2Row> r2;
  std::vector<stats::SweepPoint> sweep;
};

namespace detail {

template <class Fn>
std::optional<double> maybe(Fn&& fn) {
  try {
    return fn();
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace detail

/// `records` may be empty (no features) or aligned with `rows` by position.
inline Summary aggregate(const std::vector<ReportRow>& rows,
                         const std::vector<ProbabilityRecord>& records,
                         const AggregateOptions& opt = {}) {
  if (!records.empty() && records.size() != rows.size()) {
    throw Error(ErrorKind::InvalidArgument, "records and reports differ in length");
  }
  Summary s;
  s.total = rows.size();
  std::vector<ContextualityReport> reports;
  std::vector<std::size_t> source;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!records.empty() && records[i].id != rows[i].id) {
      throw Error(ErrorKind::InvalidArgument, "record/report id mismatch at row " + std::to_string(i));
    }
    if (!rows[i].ok()) {
      ++s.errors;
      continue;
    }
    reports.push_back(*rows[i].report);
    source.push_back(i);
  }
  if (reports.empty()) throw Error(ErrorKind::InvalidArgument, "no analysable reports to aggregate");
  s.analysed = reports.size();

  std::vector<double> sf, delta;
  std::vector<bool> sheaf_flags, cbd_flags;
  for (const auto& r : reports) {
    sf.push_back(r.sf);
    delta.push_back(r.delta);
    sheaf_flags.push_back(r.sheaf_flag);
    cbd_flags.push_back(r.cbd_flag);
    s.sheaf_count += r.sheaf_flag ? 1 : 0;
    s.cbd_count += r.cbd_flag ? 1 : 0;
  }
  s.sheaf_fraction = static_cast<double>(s.sheaf_count) / static_cast<double>(s.analysed);
  s.cbd_fraction = static_cast<double>(s.cbd_count) / static_cast<double>(s.analysed);

  // std::vector<bool> has no contiguous storage, so copy into a plain array
  auto as_array = [](const std::vector<bool>& v) {
    std::unique_ptr<bool[]> a(new bool[v.size()]);
    std::copy(v.begin(), v.end(), a.get());
    return a;
  };
  const auto sheaf_arr = as_array(sheaf_flags);
  const auto cbd_arr = as_array(cbd_flags);
  s.sf_histogram = stats::histogram(sf, {sheaf_arr.get(), sf.size()}, opt.histogram_bins, 0.0, 1.0);
  s.delta_histogram = stats::histogram(delta, {cbd_arr.get(), delta.size()}, opt.histogram_bins, 0.0,
                                       2.0 * static_cast<double>(opt.rank));
  s.grid = stats::sf_delta_grid(reports, opt.grid_bins, opt.rank);

  if (records.empty()) return s;

  // features per analysed record
  struct Sample {
    stats::FeatureVector f;
    const ContextualityReport* r;
  };
  std::vector<Sample> samples;
  for (std::size_t k = 0; k < reports.size(); ++k) {
    const auto& rec = records[source[k]];
    if (!rec.features) continue;
    try {
      samples.push_back({feature_vector(*rec.features), &reports[k]});
    } catch (const Error&) {
      // a record whose frequencies are all zero carries no entropy feature
    }
  }

  using Getter = std::optional<double> (*)(const stats::FeatureVector&);
  const std::vector<std::pair<std::string, Getter>> features = {
      {"euclidean_dist", [](const stats::FeatureVector& f) -> std::optional<double> { return f.euclidean_dist; }},
      {"bias_diff", [](const stats::FeatureVector& f) -> std::optional<double> { return f.bias_diff; }},
      {"nouns_entropy", [](const stats::FeatureVector& f) -> std::optional<double> { return f.nouns_entropy; }},
      {"adjectives_entropy",
       [](const stats::FeatureVector& f) -> std::optional<double> { return f.adjectives_entropy; }},
      {"cosine_similarity", [](const stats::FeatureVector& f) { return f.cosine_similarity; }},
  };
  using Target = double (*)(const ContextualityReport&);
  const std::vector<std::pair<std::string, Target>> continuous = {
      {"sf", [](const ContextualityReport& r) { return r.sf; }},
      {"delta", [](const ContextualityReport& r) { return r.delta; }},
  };
  const std::vector<std::pair<std::string, Target>> flags = {
      {"sheaf", [](const ContextualityReport& r) { return r.sheaf_flag ? 1.0 : 0.0; }},
      {"cbd", [](const ContextualityReport& r) { return r.cbd_flag ? 1.0 : 0.0; }},
  };

  for (const auto& [fname, get] : features) {
    std::vector<double> xs;
    std::vector<const ContextualityReport*> rs;
    for (const auto& smp : samples) {
      if (const auto v = get(smp.f)) {
        xs.push_back(*v);
        rs.push_back(smp.r);
      }
    }
    auto column = [&](Target t) {
      std::vector<double> ys;
      for (const auto* r : rs) ys.push_back(t(*r));
      return ys;
    };
    for (const auto& [tname, t] : continuous) {
      const auto ys = column(t);
      CorrelationRow row{fname, tname, std::nullopt, std::nullopt, std::nullopt};
      row.kendall = detail::maybe([&] { return stats::kendall(xs, ys); });
      row.spearman = detail::maybe([&] { return stats::spearman(xs, ys); });
      row.pearson = detail::maybe([&] { return stats::pearson(xs, ys); });
      s.correlations.push_back(std::move(row));
    }
    for (const auto& [tname, t] : flags) {
      const auto ys = column(t);
      CorrelationRow row{fname, tname, std::nullopt, std::nullopt, std::nullopt};
      row.pearson = detail::maybe([&] { return stats::pearson(xs, ys); });
      s.correlations.push_back(std::move(row));
    }
    for (const auto& [tname, t] : continuous) {
      const auto ys = column(t);
      for (int d : opt.degrees) {
        s.r2.push_back({fname, tname, d, detail::maybe([&] { return stats::polyfit_r2(xs, ys, d); })});
      }
    }
  }

  std::vector<std::pair<ContextualityReport, double>> with_cosine;
  for (const auto& smp : samples) {
    if (smp.f.cosine_similarity) with_cosine.emplace_back(*smp.r, *smp.f.cosine_similarity);
  }
  if (!with_cosine.empty() && !opt.percentiles.empty()) {
    s.sweep = stats::similarity_sweep(with_cosine, opt.percentiles);
  }
  return s;
}

inline void write_histogram_csv(std::ostream& out, const stats::Histogram1D& h) {
  out << "bin_lo,bin_hi,count,contextual_count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    out << fmt::format_double(h.edges[i]) << ',' << fmt::format_double(h.edges[i + 1]) << ','
        << h.counts[i] << ',' << h.highlighted[i] << '\n';
  }
}

inline void write_grid_csv(std::ostream& out, const stats::Histogram2D& g) {
  out << "sf_bin,delta_bin,sf_lo,sf_hi,delta_lo,delta_hi,count,region\n";
  for (std::size_t i = 0; i < g.bins; ++i) {
    for (std::size_t j = 0; j < g.bins; ++j) {
      out << i << ',' << j << ',' << fmt::format_double(g.sf_edges[i]) << ','
          << fmt::format_double(g.sf_edges[i + 1]) << ',' << fmt::format_double(g.delta_edges[j]) << ','
          << fmt::format_double(g.delta_edges[j + 1]) << ',' << g.count(i, j) << ','
          << stats::to_string(g.region(i, j)) << '\n';
    }
  }
}

inline void write_summary_csv(std::ostream& out, const Summary& s) {
  out << "total,analysed,errors,sheaf_count,cbd_count,sheaf_fraction,cbd_fraction\n"
      << s.total << ',' << s.analysed << ',' << s.errors << ',' << s.sheaf_count << ',' << s.cbd_count
      << ',' << fmt::format_double(s.sheaf_fraction) << ',' << fmt::format_double(s.cbd_fraction) << '\n';
}

inline void write_correlations_csv(std::ostream& out, const std::vector<CorrelationRow>& rows) {
  out << "feature,target,kendall,spearman,pearson\n";
  for (const auto& r : rows) {
    out << r.feature << ',' << r.target << ',' << fmt::format_optional(r.kendall) << ','
        << fmt::format_optional(r.spearman) << ',' << fmt::format_optional(r.pearson) << '\n';
  }
}

inline void write_r2_csv(std::ostream& out, const std::vector<R2Row>& rows) {
  out << "feature,target,degree,r2\n";
  for (const auto& r : rows) {
    out << r.feature << ',' << r.target << ',' << r.degree << ',' << fmt::format_optional(r.r2) << '\n';
  }
}

inline void write_sweep_csv(std::ostream& out, const std::vector<stats::SweepPoint>& pts) {
  out << "percentile,count,sheaf_fraction,cbd_fraction\n";
  for (const auto& p : pts) {
    out << fmt::format_double(p.percentile) << ',' << p.count << ',' << fmt::format_double(p.sheaf_fraction)
        << ',' << fmt::format_double(p.cbd_fraction) << '\n';
  }
}

/// Writes summary.csv, histogram_sf.csv, histogram_delta.csv,
/// grid_sf_delta.csv, correlations.csv, r2.csv and sweep.csv into `dir`.
inline void write_aggregate(const std::filesystem::path& dir, const Summary& s) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write " + (dir / name).string());
    return f;
  };
  { auto f = open("summary.csv"); write_summary_csv(f, s); }
  { auto f = open("histogram_sf.csv"); write_histogram_csv(f, s.sf_histogram); }
  { auto f = open("histogram_delta.csv"); write_histogram_csv(f, s.delta_histogram); }
  { auto f = open("grid_sf_delta.csv"); write_grid_csv(f, s.grid); }
  { auto f = open("correlations.csv"); write_correlations_csv(f, s.correlations); }
  { auto f = open("r2.csv"); write_r2_csv(f, s.r2); }
  { auto f = open("sweep.csv"); write_sweep_csv(f, s.sweep); }
}

}  // namespace ctxkit::pipeline
