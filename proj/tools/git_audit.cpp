// git-audit: collect contributor metadata from repositories, merge identities,
// and report which addresses are exposed.

#include <unistd.h>

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "gitaudit/analytics.hpp"
#include "gitaudit/catalog.hpp"
#include "gitaudit/coherence.hpp"
#include "gitaudit/errors.hpp"
#include "gitaudit/pipeline.hpp"
#include "gitaudit/report.hpp"
#include "gitaudit/rewrite.hpp"
#include "gitaudit/shortlog.hpp"
#include "gitaudit/store.hpp"
#include "gitaudit/synthcorpus.hpp"

namespace fs = std::filesystem;
using namespace gitaudit;

namespace {

constexpr int kUsageError = 1;
constexpr int kRuntimeError = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text)) throw IoError("cannot write " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path pipeline_sidecar(const fs::path& db) { return fs::path(db.string() + ".pipeline.json"); }

PipelineStats sidecar_or_empty(const fs::path& db) {
  auto side = pipeline_sidecar(db);
  return fs::exists(side) ? load_pipeline_stats(side) : PipelineStats{};
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------

struct FetchArgs {
  int num_repos = 0;
  bool live = false;
  std::string fixtures;
  std::string out;
  std::string base_url = "https://api.github.com";
};

int cmd_fetch(const FetchArgs& a) {
  if (a.live == !a.fixtures.empty()) throw UsageError("fetch needs exactly one of --live or --fixtures DIR");
  RateBudget budget;
  FetchLog log;
  std::vector<RepoRecord> records;
  const auto t0 = std::chrono::steady_clock::now();
  if (a.live) {
    SystemClock clock;
    LiveOptions opts;
    opts.base_url = a.base_url;
    LiveSource source(opts, budget, clock);
    records = fetch_top(a.num_repos, source, budget, &log);
  } else {
    FixtureSource source(a.fixtures);
    records = fetch_top(a.num_repos, source, budget, &log);
  }
  save_catalog(records, a.out);
  std::cerr << "fetched " << records.size() << " repositories in " << log.page_requests << " page requests over "
            << log.windows.size() << " star window(s), " << seconds_since(t0) << " s\n";
  return 0;
}

struct RunArgs {
  std::string catalog;
  double keep = 0.4;
  std::size_t workers = 4;
  std::size_t max_on_disk = 20;
  int timeout = 300;
  std::string db;
  std::string work_dir;
  bool live = false;
  bool own_repos = false;
  bool quiet = false;
};

int cmd_run(const RunArgs& a) {
  if (a.live && !a.own_repos)
    throw UsageError("run --live clones remote repositories; confirm with --i-own-these-repos");
  auto catalog = load_catalog(a.catalog);
  if (!a.live) {
    for (const auto& r : catalog)
      if (!is_local_clone_url(r.clone_url))
        throw UsageError("catalog entry " + r.full_name + " has a remote clone URL; pass --live --i-own-these-repos");
  }
  SelectionPolicy policy{a.keep};
  auto selection = select_for_cloning(catalog, policy);

  PipelineConfig cfg;
  cfg.max_on_disk = a.max_on_disk;
  cfg.cloner_workers = a.workers;
  cfg.per_repo_timeout = std::chrono::seconds(a.timeout);
  const bool temp_work_dir = a.work_dir.empty();
  cfg.work_dir = temp_work_dir ? fs::temp_directory_path() / ("git-audit-" + std::to_string(::getpid())) : fs::path(a.work_dir);

  PersonDatabase db;
  std::size_t step = 0;
  auto sink = [&](const RepoRecord& repo, const fs::path& path) {
    SinkResult res;
    auto t0 = std::chrono::steady_clock::now();
    auto parsed = parse_shortlog(collect_shortlog(path));
    res.shortlog_seconds = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    auto summary = db.ingest_repository(repo.full_name, parsed.lines);
    res.merge_seconds = seconds_since(t0);
    ++step;
    if (!a.quiet)
      std::cerr << "[" << step << "/" << selection.size() << "] " << repo.full_name << ": " << summary.new_persons
                << " new, " << summary.updated_persons << " updated, db " << db.size() << " persons"
                << (parsed.warnings.empty() ? "" : ", " + std::to_string(parsed.warnings.size()) + " unparsed lines")
                << "\n";
    return res;
  };
  auto stats = run_pipeline(selection, cfg, sink);
  stats.fetched = catalog.size();
  if (temp_work_dir) {
    std::error_code ec;
    fs::remove_all(cfg.work_dir, ec);
  }

  save_database(db, a.db);
  save_pipeline_stats(stats, pipeline_sidecar(a.db));
  for (const auto& f : stats.failures) std::cerr << "failed: " << f.full_name << ": " << f.reason << "\n";
  for (const auto& w : db.warnings()) std::cerr << "warning: " << w << "\n";
  for (auto id : overmerged_persons(db))
    std::cerr << "warning: person " << id << " holds more than 10 emails (possible common-name over-merge)\n";
  std::printf("selected %zu of %zu, cloned %zu, failed %zu, persons %zu, max on disk %zu\n", stats.selected,
              stats.fetched, stats.cloned, stats.failed, db.size(), stats.on_disk_high_water);
  std::printf("time: total %.1f s, clone %.1f s (summed), shortlog %.1f s, merge %.1f s\n", stats.wall_times.total,
              stats.wall_times.clone, stats.wall_times.shortlog, stats.wall_times.merge);
  return 0;
}

int cmd_stats(const std::string& db_path, const std::string& pipeline_path, bool json) {
  auto db = load_database(db_path);
  auto pipeline = pipeline_path.empty() ? sidecar_or_empty(db_path) : load_pipeline_stats(pipeline_path);
  ExposureReport r;
  r.summary = database_stats(db, pipeline);
  if (json) {
    std::cout << report_to_ndjson(r);
  } else {
    auto text = report_to_text(r);
    std::cout << text.substr(text.find('\n') + 1);  // drop the "entries: 0" line
  }
  return 0;
}

int cmd_graph(const std::string& db_path, const std::string& out, const std::string& format) {
  auto db = load_database(db_path);
  auto g = build_graph(db);
  write_file(out, format == "dot" ? to_dot(g) : to_edge_list(g));
  std::cerr << g.vertices.size() << " repositories, " << g.edges.size() << " edges\n";
  return 0;
}

int cmd_recommend(const std::string& db_path, PersonId id, std::size_t k, const std::string& catalog_path,
                  bool language_bonus) {
  auto db = load_database(db_path);
  const Person* p = db.find(id);
  if (!p) throw UsageError("no person with id " + std::to_string(id));
  RecommendOptions opts;
  if (language_bonus) {
    if (catalog_path.empty()) throw UsageError("--language-bonus needs --catalog");
    for (const auto& r : load_catalog(catalog_path))
      if (r.main_language) opts.repo_languages[r.full_name] = *r.main_language;
  }
  auto g = build_graph(db);
  for (const auto& rec : recommend(g, *p, k, opts)) std::printf("%s\t%.6f\n", rec.full_name.c_str(), rec.score);
  return 0;
}

int cmd_estimate(const std::string& metric_name, std::int64_t num_repos, const std::vector<std::string>& constants) {
  Metric metric;
  try {
    metric = metric_from_string(metric_name);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  FitCurve curve = published_curve(metric);
  if (!constants.empty() && constants[0] == "fit") {
    if (constants.size() != 2) throw UsageError("--constants fit needs a points file");
    std::istringstream in(read_file(constants[1]));
    std::vector<Point> pts;
    double x, y;
    while (in >> x >> y) pts.push_back({x, y});
    curve = fit_curve(pts, family_for(metric));
  } else if (!constants.empty() && (constants[0] != "published" || constants.size() != 1)) {
    throw UsageError("--constants must be 'published' or 'fit FILE'");
  }
  const double value = estimate(metric, num_repos, curve);
  std::visit(
      [](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, PowerCurve>)
          std::fprintf(stderr, "curve: y = %.6g * x^%.6g\n", c.a, c.b);
        else if constexpr (std::is_same_v<T, LogLinearCurve>)
          std::fprintf(stderr, "curve: y = %.6g * log10(x) + %.6g\n", c.m, c.c);
        else
          std::fprintf(stderr, "curve: y = %.6g * x\n", c.m);
      },
      curve);
  switch (metric) {
    case Metric::TotalTime:
      std::printf("%.0f s (%.1f h)\n", value, value / 3600.0);
      break;
    case Metric::CompromisedPct:
      std::printf("%.1f%%\n", value);
      break;
    case Metric::TotalPersons: {
      std::printf("%.0f\n", value);
      auto [lo, hi] = phishing_click_range(static_cast<std::uint64_t>(std::llround(value)));
      std::fprintf(stderr, "phishing click range (8%%..35%%): %.0f .. %.0f\n", lo, hi);
      break;
    }
    case Metric::ShortlogLines:
      std::printf("%.0f\n", value);
      break;
  }
  return 0;
}

struct AuditArgs {
  std::string db;
  bool compromised_only = false;
  std::string domain;
  std::string repo;
  bool json = false;
  bool text = false;
  std::size_t recommend_k = 5;
};

int cmd_audit(const AuditArgs& a) {
  if (a.json && a.text) throw UsageError("--json and --text are exclusive");
  auto db = load_database(a.db);
  AuditFilters f;
  f.compromised_only = a.compromised_only;
  if (!a.domain.empty()) f.domain = a.domain;
  if (!a.repo.empty()) f.repository = a.repo;
  auto graph = build_graph(db);
  AuditOptions opts;
  opts.graph = &graph;
  opts.recommend_k = a.recommend_k;
  opts.pipeline = sidecar_or_empty(a.db);
  auto report = audit(db, f, opts);
  std::cout << (a.json ? report_to_ndjson(report) : report_to_text(report));
  return 0;
}

int cmd_rewrite(const std::string& old_email, const std::string& name, const std::string& email,
                const std::string& out) {
  if (old_email.empty()) throw UsageError("--old-email must not be empty");
  auto script = emit_rewrite_script(old_email, name, email);
  if (out.empty()) {
    std::cout << script;
  } else {
    write_file(out, script);
    fs::permissions(out, fs::perms::owner_exec | fs::perms::group_exec, fs::perm_options::add);
  }
  return 0;
}

struct SynthArgs {
  std::string spec;
  std::string out;
  std::uint64_t seed = 1;
  std::size_t repos = 6;
  std::size_t persons = 20;
};

int cmd_synth(const SynthArgs& a) {
  CorpusSpec spec;
  if (!a.spec.empty()) {
    spec = corpus_spec_from_json(read_file(a.spec));
  } else {
    SynthParams params;
    params.repo_count = a.repos;
    params.person_count = a.persons;
    spec = random_corpus_spec(a.seed, params);
  }
  const fs::path out = a.out;
  fs::create_directories(out);
  write_file(out / "spec.json", corpus_spec_to_json(spec));
  auto paths = generate_corpus(spec, out / "repos");
  auto catalog = corpus_catalog(spec, paths);
  save_catalog(catalog, out / "catalog.ndjson");
  write_search_fixture(catalog, out / "fixtures");
  std::cerr << "generated " << paths.size() << " repositories, " << spec.emitted_lines().size()
            << " shortlog lines, " << spec.expected_partition().size() << " expected persons under " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"git-audit: contributor email exposure auditor"};
  app.require_subcommand(1);

  FetchArgs fetch;
  auto* c_fetch = app.add_subcommand("fetch", "Fetch the top repositories by stars into a catalog");
  c_fetch->add_option("--num-repos", fetch.num_repos, "Number of repositories")->required()->check(CLI::PositiveNumber);
  c_fetch->add_flag("--live", fetch.live, "Query the search API (token in GIT_AUDIT_TOKEN)");
  c_fetch->add_option("--fixtures", fetch.fixtures, "Directory of recorded search pages");
  c_fetch->add_option("--out", fetch.out, "Catalog output (ndjson)")->required();
  c_fetch->add_option("--base-url", fetch.base_url, "Search API base URL");

  RunArgs run;
  auto* c_run = app.add_subcommand("run", "Select, clone and analyze repositories into a person database");
  c_run->add_option("--catalog", run.catalog, "Catalog (ndjson)")->required();
  c_run->add_option("--keep", run.keep, "Fraction of repositories to keep")->check(CLI::Range(0.0, 1.0));
  c_run->add_option("--workers", run.workers, "Concurrent clones")->check(CLI::PositiveNumber);
  c_run->add_option("--max-on-disk", run.max_on_disk, "Maximum clones on disk at once")->check(CLI::PositiveNumber);
  c_run->add_option("--timeout", run.timeout, "Per-repository clone timeout, seconds")->check(CLI::PositiveNumber);
  c_run->add_option("--db", run.db, "Person database output (ndjson)")->required();
  c_run->add_option("--work-dir", run.work_dir, "Clone directory (default: a temporary directory)");
  c_run->add_flag("--live", run.live, "Allow remote clone URLs");
  c_run->add_flag("--i-own-these-repos", run.own_repos, "Confirm you are authorized to audit the catalog");
  c_run->add_flag("-q,--quiet", run.quiet, "No per-repository progress");

  std::string stats_db, stats_pipeline;
  bool stats_json = false;
  auto* c_stats = app.add_subcommand("stats", "Database statistics");
  c_stats->add_option("--db", stats_db)->required();
  c_stats->add_option("--pipeline-stats", stats_pipeline, "Pipeline stats JSON (default: <db>.pipeline.json)");
  c_stats->add_flag("--json", stats_json);

  std::string graph_db, graph_out, graph_format = "edgelist";
  auto* c_graph = app.add_subcommand("graph", "Export the repository coherence graph");
  c_graph->add_option("--db", graph_db)->required();
  c_graph->add_option("--out", graph_out)->required();
  c_graph->add_option("--format", graph_format)->check(CLI::IsMember({"edgelist", "dot"}));

  std::string rec_db, rec_catalog;
  PersonId rec_person = 0;
  std::size_t rec_k = 5;
  bool rec_lang = false;
  auto* c_rec = app.add_subcommand("recommend", "Repositories a person is likely interested in");
  c_rec->add_option("--db", rec_db)->required();
  c_rec->add_option("--person", rec_person)->required();
  c_rec->add_option("-k", rec_k)->check(CLI::PositiveNumber);
  c_rec->add_option("--catalog", rec_catalog, "Catalog with main languages");
  c_rec->add_flag("--language-bonus", rec_lang, "Boost repositories in the person's languages");

  std::string est_metric;
  std::int64_t est_repos = 0;
  std::vector<std::string> est_constants;
  auto* c_est = app.add_subcommand("estimate", "Extrapolate a metric to a corpus size");
  c_est->add_option("--metric", est_metric, "total-persons | shortlog-lines | total-time | compromised-pct")
      ->required();
  c_est->add_option("--num-repos", est_repos)->required()->check(CLI::PositiveNumber);
  c_est->add_option("--constants", est_constants, "published | fit FILE")->expected(1, 2);

  AuditArgs aud;
  auto* c_audit = app.add_subcommand("audit", "Per-person exposure report");
  c_audit->add_option("--db", aud.db)->required();
  c_audit->add_flag("--compromised-only", aud.compromised_only);
  c_audit->add_option("--domain", aud.domain, "Only persons with an email at this domain");
  c_audit->add_option("--repo", aud.repo, "Only contributors of this repository");
  c_audit->add_flag("--json", aud.json, "Newline-delimited JSON");
  c_audit->add_flag("--text", aud.text, "Human-readable text (default)");
  c_audit->add_option("-k", aud.recommend_k, "Recommendations counted per person");

  std::string rw_old, rw_name, rw_email, rw_out;
  auto* c_rw = app.add_subcommand("rewrite-script", "Emit a history rewrite script replacing an email");
  c_rw->add_option("--old-email", rw_old)->required();
  c_rw->add_option("--new-name", rw_name, "Empty keeps the original names");
  c_rw->add_option("--new-email", rw_email)->required();
  c_rw->add_option("--out", rw_out, "Write to file instead of stdout");

  SynthArgs syn;
  auto* c_syn = app.add_subcommand("synth", "Generate a synthetic corpus of local repositories");
  c_syn->add_option("--spec", syn.spec, "Corpus spec JSON (default: random from --seed)");
  c_syn->add_option("--out", syn.out)->required();
  c_syn->add_option("--seed", syn.seed);
  c_syn->add_option("--repos", syn.repos)->check(CLI::PositiveNumber);
  c_syn->add_option("--persons", syn.persons);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kUsageError;
  }

  try {
    if (*c_fetch) return cmd_fetch(fetch);
    if (*c_run) return cmd_run(run);
    if (*c_stats) return cmd_stats(stats_db, stats_pipeline, stats_json);
    if (*c_graph) return cmd_graph(graph_db, graph_out, graph_format);
    if (*c_rec) return cmd_recommend(rec_db, rec_person, rec_k, rec_catalog, rec_lang);
    if (*c_est) return cmd_estimate(est_metric, est_repos, est_constants);
    if (*c_audit) return cmd_audit(aud);
    if (*c_rw) return cmd_rewrite(rw_old, rw_name, rw_email, rw_out);
    if (*c_syn) return cmd_synth(syn);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kUsageError;
}
