// ctxkit: batch contextuality analysis of schema probability records.
//
//   ctxkit analyze [--with-lp] [--threads N] [--strict] [--out DIR] [INPUT|-]
//   ctxkit stats --reports FILE [--records FILE] [--degrees 1..10] [--percentiles 100,10,1] [--out DIR]
//   ctxkit schema render --nouns A,B --adjectives X,Y,Z [--kind adjective|verb|preposition]
//   ctxkit selftest [--seed N] [--trials K]
//   ctxkit inspect --model FILE [--support-eps E]
//
// Exit status: 0 ok, 1 usage, 2 data errors under --strict, 3 selftest failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ctxkit/cbd.hpp"
#include "ctxkit/error.hpp"
#include "ctxkit/format.hpp"
#include "ctxkit/fractions.hpp"
#include "ctxkit/model_io.hpp"
#include "ctxkit/pipeline.hpp"
#include "ctxkit/scenario.hpp"
#include "ctxkit/schema.hpp"
#include "ctxkit/selftest.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitSelftest = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

// "1..10" or "1,3,5"
std::vector<int> parse_degrees(const std::string& s) {
  std::vector<int> out;
  try {
    if (const auto dots = s.find(".."); dots != std::string::npos) {
      const int lo = std::stoi(s.substr(0, dots)), hi = std::stoi(s.substr(dots + 2));
      if (lo < 1 || hi < lo) throw UsageError("bad degree range '" + s + "'");
      for (int d = lo; d <= hi; ++d) out.push_back(d);
    } else {
      for (const auto& p : split(s, ',')) {
        const int d = std::stoi(p);
        if (d < 1) throw UsageError("degrees must be >= 1");
        out.push_back(d);
      }
    }
  } catch (const std::logic_error&) {
    throw UsageError("bad degree list '" + s + "'");
  }
  return out;
}

std::vector<double> parse_percentiles(const std::string& s) {
  std::vector<double> out;
  for (const auto& p : split(s, ',')) {
    double q;
    try {
      q = ctxkit::fmt::parse_double(p);
    } catch (const ctxkit::Error&) {
      throw UsageError("bad percentile '" + p + "'");
    }
    if (!(q > 0.0 && q <= 100.0)) throw UsageError("percentiles must lie in (0, 100]");
    out.push_back(q);
  }
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot open '" + path + "'");
  return f;
}

void report_issues(const std::vector<ctxkit::pipeline::ParseIssue>& issues, const std::string& source) {
  for (const auto& i : issues) std::cerr << source << ":" << i.line << ": " << i.message << '\n';
}

struct AnalyzeArgs {
  std::string input = "-";
  std::string out_dir;
  bool with_lp = false;
  bool strict = false;
  unsigned threads = 0;
};

int cmd_analyze(const AnalyzeArgs& a) {
  using namespace ctxkit::pipeline;
  ParseResult parsed;
  if (a.input == "-") {
    parsed = parse_records(std::cin, a.strict);
  } else {
    auto f = open_in(a.input);
    parsed = parse_records(f, a.strict);
  }
  report_issues(parsed.issues, a.input == "-" ? "<stdin>" : a.input);
  const auto rows = analyze_batch(parsed.records, {a.with_lp, a.threads});
  std::size_t failed = 0;
  for (const auto& r : rows) failed += r.ok() ? 0 : 1;

  if (a.out_dir.empty()) {
    write_reports_csv(std::cout, rows);
  } else {
    std::filesystem::create_directories(a.out_dir);
    std::ofstream f(std::filesystem::path(a.out_dir) / "reports.csv", std::ios::binary);
    if (!f) throw UsageError("cannot write into '" + a.out_dir + "'");
    write_reports_csv(f, rows);
  }
  std::cerr << "analyzed " << rows.size() << " records, " << failed << " with errors, "
            << parsed.issues.size() << " unparsable lines\n";
  if (a.strict && failed > 0) return kExitData;
  return kExitOk;
}

struct StatsArgs {
  std::string reports;
  std::string records;
  std::string degrees = "1..10";
  std::string percentiles = "100,50,25,10,5,1";
  std::string out_dir = ".";
  std::size_t bins = 200;
  std::size_t hist_bins = 60;
  std::size_t rank = 3;
  bool strict = false;
};

int cmd_stats(const StatsArgs& a) {
  using namespace ctxkit::pipeline;
  AggregateOptions opt;
  opt.degrees = parse_degrees(a.degrees);
  opt.percentiles = parse_percentiles(a.percentiles);
  opt.grid_bins = a.bins;
  opt.histogram_bins = a.hist_bins;
  opt.rank = a.rank;

  auto rf = open_in(a.reports);
  const auto rows = read_reports_csv(rf);
  std::vector<ProbabilityRecord> records;
  if (!a.records.empty()) {
    auto f = open_in(a.records);
    auto parsed = parse_records(f, a.strict);
    report_issues(parsed.issues, a.records);
    if (!parsed.issues.empty()) {
      throw ctxkit::Error(ctxkit::ErrorKind::Parse, "records file has unparsable lines; cannot align with reports");
    }
    records = std::move(parsed.records);
  }
  const auto summary = aggregate(rows, records, opt);
  write_aggregate(a.out_dir, summary);
  std::cout << "records " << summary.total << ", analysed " << summary.analysed << ", errors "
            << summary.errors << '\n'
            << "sheaf-contextual " << summary.sheaf_count << " ("
            << ctxkit::fmt::format_double(summary.sheaf_fraction) << ")\n"
            << "CbD-contextual   " << summary.cbd_count << " ("
            << ctxkit::fmt::format_double(summary.cbd_fraction) << ")\n";
  return kExitOk;
}

struct RenderArgs {
  std::string nouns;
  std::string adjectives;
  std::string kind = "adjective";
  std::string mask = "[MASK]";
};

int cmd_render(const RenderArgs& a) {
  const auto n = split(a.nouns, ',');
  const auto x = split(a.adjectives, ',');
  if (n.size() != 2) throw UsageError("--nouns takes exactly two comma-separated nouns");
  if (x.size() != 3) throw UsageError("--adjectives takes exactly three comma-separated modifiers");
  try {
    const ctxkit::schema::SchemaInstance inst({n[0], n[1]}, {x[0], x[1], x[2]},
                                              ctxkit::schema::parse_modifier_kind(a.kind));
    for (const auto& s : ctxkit::schema::render_sentences(inst, a.mask)) std::cout << s << '\n';
  } catch (const ctxkit::Error& e) {
    throw UsageError(e.what());
  }
  return kExitOk;
}

int cmd_selftest(const ctxkit::SelftestOptions& opt) {
  if (opt.trials == 0) throw UsageError("--trials must be at least 1");
  const auto rep = ctxkit::run_selftest(opt);
  ctxkit::print_selftest(std::cout, rep);
  return rep.passed() ? kExitOk : kExitSelftest;
}

int cmd_inspect(const std::string& path, double support_eps) {
  auto f = open_in(path);
  std::stringstream ss;
  ss << f.rdbuf();
  const auto model = ctxkit::io::model_from_string(ss.str());
  ctxkit::validate(model);
  using ctxkit::fmt::format_double;
  const auto cf = ctxkit::contextual_fraction(model);
  const auto sf = ctxkit::signalling_fraction(model);
  const auto& sc = model.scenario();
  std::cout << "observables " << sc.num_observables() << ", contexts " << sc.num_contexts() << ", outcomes "
            << sc.num_outcomes() << '\n'
            << "no-signalling        " << (ctxkit::is_no_signalling(model, ctxkit::kNormalisationTolerance) ? "yes" : "no") << '\n'
            << "contextual fraction  " << format_double(cf.fraction) << '\n'
            << "signalling fraction  " << format_double(sf.fraction) << '\n'
            << "sheaf criterion      "
            << (cf.fraction > 2.0 * static_cast<double>(sc.num_contexts()) * sf.fraction ? "contextual" : "not contextual")
            << '\n';
  try {
    std::cout << "logically contextual " << (ctxkit::is_logically_contextual(model, support_eps) ? "yes" : "no") << '\n'
              << "strongly contextual  " << (ctxkit::is_strongly_contextual(model, support_eps) ? "yes" : "no") << '\n';
  } catch (const ctxkit::Error& e) {
    if (e.kind() != ctxkit::ErrorKind::EnumerationGuard) throw;
    std::cout << "global sections      skipped (" << e.what() << ")\n";
  }
  try {
    const auto st = ctxkit::cbd::from_empirical(model);
    std::cout << "direct influence     " << format_double(ctxkit::cbd::direct_influence(st)) << '\n'
              << "CNT1                 " << format_double(ctxkit::cbd::cnt1(st)) << '\n';
  } catch (const ctxkit::Error&) {
    std::cout << "CbD                  not a binary cyclic system\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contextuality analysis of schema probability records"};
  app.require_subcommand(1);

  AnalyzeArgs aa;
  auto* analyze = app.add_subcommand("analyze", "Per-record contextuality reports as CSV");
  analyze->add_option("input", aa.input, "Line-delimited records, '-' for stdin");
  analyze->add_flag("--with-lp", aa.with_lp, "Cross-check CF and SF with the linear programs");
  analyze->add_option("--out", aa.out_dir, "Write DIR/reports.csv instead of stdout");
  analyze->add_option("--threads", aa.threads, "Worker threads, 0 for all cores");
  analyze->add_flag("--strict", aa.strict, "Stop at the first malformed line; exit 2 on record errors");

  StatsArgs sa;
  auto* stats = app.add_subcommand("stats", "Aggregate tables from a report CSV");
  stats->add_option("--reports", sa.reports, "reports.csv from analyze")->required();
  stats->add_option("--records", sa.records, "The records the reports were computed from (features)");
  stats->add_option("--degrees", sa.degrees, "Polynomial degrees, 'a..b' or a comma list");
  stats->add_option("--percentiles", sa.percentiles, "Similarity percentiles, comma list");
  stats->add_option("--bins", sa.bins, "Bins per axis of the SF/delta grid");
  stats->add_option("--hist-bins", sa.hist_bins, "Bins of the 1-D histograms");
  stats->add_option("--rank", sa.rank, "Rank of the PR-like models");
  stats->add_option("--out", sa.out_dir, "Output directory");
  stats->add_flag("--strict", sa.strict, "Stop at the first malformed record line");

  RenderArgs ra;
  auto* schema = app.add_subcommand("schema", "Schema utilities");
  schema->require_subcommand(1);
  auto* render = schema->add_subcommand("render", "Print the three masked sentences");
  render->add_option("--nouns", ra.nouns, "A,B")->required();
  render->add_option("--adjectives", ra.adjectives, "X,Y,Z")->required();
  render->add_option("--kind", ra.kind, "adjective, verb or preposition");
  render->add_option("--mask", ra.mask, "Mask token");

  ctxkit::SelftestOptions so;
  auto* selftest = app.add_subcommand("selftest", "Closed forms against linear programs on random models");
  selftest->add_option("--seed", so.seed, "RNG seed");
  selftest->add_option("--trials", so.trials, "Number of random models");
  selftest->add_flag("--inject-fault", so.negate_last_epsilon)->group("");

  std::string model_path;
  double support_eps = 0.0;
  auto* inspect = app.add_subcommand("inspect", "Measures of one empirical model given as JSON");
  inspect->add_option("--model", model_path, "Model file")->required();
  inspect->add_option("--support-eps", support_eps, "Entries above this count as possible");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*analyze) return cmd_analyze(aa);
    if (*stats) return cmd_stats(sa);
    if (*render) return cmd_render(ra);
    if (*selftest) return cmd_selftest(so);
    if (*inspect) return cmd_inspect(model_path, support_eps);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ctxkit::Error& e) {
    std::cerr << "error (" << ctxkit::to_string(e.kind()) << "): " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
