#include "covr/cli.h"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "covr/config.h"
#include "covr/corpus.h"
#include "covr/curation.h"
#include "covr/error.h"
#include "covr/evaluation.h"
#include "covr/gallery.h"
#include "covr/reasoner.h"
#include "text_util.h"

namespace covr {
namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitPartial = 2;

// Flags shared by every subcommand; applied over the --config file.
struct CommonFlags {
  std::string config_path;
  std::string backend;
  std::string fixtures;
  std::string scheme;
  std::string strategy;
  std::string granularity;
  std::optional<int> refine;
  std::optional<int> parallelism;
  bool strict = false;

  void attach(CLI::App* app, bool strategy_flag = true) {
    app->add_option("--config", config_path, "JSON engine config file");
    app->add_option("--backend", backend, "mock, mock:<seed> or remote:<url>");
    app->add_option("--fixtures", fixtures, "mock fixture table");
    app->add_option("--scheme", scheme, "lexical category dictionary");
    if (strategy_flag) app->add_option("--strategy", strategy, "pooling strategy");
    app->add_option("--granularity", granularity, "trace budget preset: minimal|compact|standard|verbose");
    app->add_option("--refine", refine, "iterative trace refinement rounds");
    app->add_option("--parallelism", parallelism, "worker / in-flight request limit");
    app->add_flag("--strict", strict, "fail on unparseable traces");
  }

  // True when --strategy or the config file picks the pooling strategy;
  // otherwise commands adopt the strategy recorded in the cache.
  bool strategy_given() const {
    if (!strategy.empty()) return true;
    if (config_path.empty()) return false;
    auto doc = json::parse(detail::read_file(config_path), nullptr, false);
    return doc.is_object() && doc.contains("strategy");
  }

  EngineConfig resolve() const {
    EngineConfig c = config_path.empty() ? EngineConfig{} : load_engine_config(config_path);
    if (!backend.empty()) apply_backend_spec(c, backend);
    if (!fixtures.empty()) c.fixtures_path = fixtures;
    if (!scheme.empty()) c.scheme_path = scheme;
    if (!strategy.empty() && strategy.find(',') == std::string::npos) c.strategy = parse_pooling_kind(strategy);
    if (!granularity.empty()) c.granularity = parse_granularity(granularity);
    if (refine) c.refinement_rounds = *refine;
    if (parallelism) c.parallelism = *parallelism;
    if (strict) c.strict = true;
    c.validate();
    return c;
  }
};

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto t = detail::trim(item);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

// "id [uri]" per line; '#' starts a comment.
std::vector<VideoRef> read_video_list(const std::string& path) {
  std::vector<VideoRef> out;
  std::string text = detail::read_file(path);
  for (auto line : detail::split_lines(text)) {
    auto hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    auto words = detail::split_whitespace(line);
    if (words.empty()) continue;
    VideoRef v{std::string(words[0]), std::string(words.size() > 1 ? words[1] : words[0]), std::nullopt};
    out.push_back(std::move(v));
  }
  return out;
}

std::shared_ptr<const PredicateVocabulary> load_vocabulary(const EngineConfig& c) {
  if (c.vocabulary_path.empty()) return nullptr;
  return std::make_shared<const PredicateVocabulary>(PredicateVocabulary::load(c.vocabulary_path));
}

ReasonerOptions reasoner_options(const EngineConfig& c, const PredicateVocabulary* vocab) {
  ReasonerOptions o;
  o.trace = c.effective_trace();
  o.target = c.target;
  o.strict = c.strict;
  o.vocabulary = vocab;
  return o;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

// ---- encode-gallery --------------------------------------------------------

struct EncodeArgs {
  CommonFlags common;
  std::string videos;
  std::string cache;
  std::string diagnostics;
  bool skip_missing = false;
};

int cmd_encode_gallery(const EncodeArgs& a, std::ostream& out, std::ostream& err) {
  EngineConfig c = a.common.resolve();
  std::vector<VideoRef> videos = read_video_list(a.videos);
  if (videos.empty()) {
    err << "error: video list '" << a.videos << "' is empty\n";
    return kExitError;
  }
  auto scheme = load_scheme(c);
  auto backend = make_backend(c);
  CountingBackend counted(*backend);
  EncodeOptions opts;
  opts.describe = c.describe;
  opts.parallelism = c.parallelism;
  GalleryBuild build = encode_gallery(videos, counted, PoolingStrategy::of(c.strategy, scheme), opts);
  save_cache(build.index, a.cache);

  std::string diag_lines;
  for (const auto& d : build.diagnostics) diag_lines += d.to_json().dump() + "\n";
  if (!a.diagnostics.empty()) {
    detail::write_file(a.diagnostics, diag_lines);
  } else {
    err << diag_lines;
  }
  out << "encoded " << build.index.size() << " of " << videos.size() << " videos\n"
      << "dim " << build.index.dim() << "\n"
      << "strategy " << pooling_kind_name(build.index.strategy()) << "\n"
      << "failures " << build.diagnostics.size() << "\n"
      << "cache " << a.cache << "\n";
  if (!build.diagnostics.empty() && !a.skip_missing) return kExitPartial;
  return kExitOk;
}

// ---- query -----------------------------------------------------------------

struct QueryArgs {
  CommonFlags common;
  std::string cache;
  std::string reference;
  std::string reference_uri;
  std::string edit;
  std::size_t top_k = 10;
  bool no_reasoning = false;
  bool verbose = false;
};

int cmd_query(const QueryArgs& a, std::ostream& out, std::ostream&) {
  EngineConfig c = a.common.resolve();
  auto scheme = load_scheme(c);
  auto vocab = load_vocabulary(c);
  auto backend = make_backend(c);
  CountingBackend counted(*backend);
  GalleryIndex index = load_cache(a.cache);
  if (!a.common.strategy_given()) c.strategy = index.strategy();
  if (index.dim() != pooled_dim(c.strategy, counted.handshake().dim)) {
    throw Error(ErrorCode::kDimensionMismatch, "cache dim " + std::to_string(index.dim()) +
                                                   " does not match the backend's pooled dim");
  }
  if (index.strategy() != c.strategy) {
    throw Error(ErrorCode::kDimensionMismatch, "cache pooled with " + std::string(pooling_kind_name(index.strategy())) +
                                                   ", query strategy is " + std::string(pooling_kind_name(c.strategy)));
  }

  VideoRef ref{a.reference, a.reference_uri.empty() ? a.reference : a.reference_uri, std::nullopt};
  EditText edit(a.edit);
  PoolingStrategy strategy = PoolingStrategy::of(c.strategy, scheme);
  ReasonerOptions ro = reasoner_options(c, vocab.get());
  QueryArtifacts art;
  if (a.no_reasoning) {
    art = encode_query_no_reasoning(ref, edit, counted, strategy, ro);
  } else if (c.refinement_rounds > 0) {
    art = encode_query_refined(ref, edit, counted, strategy, c.refinement_rounds, ro);
  } else {
    art = encode_query(ref, edit, counted, strategy, ro);
  }
  RankedResult ranked = score(art.query_embedding, index, ScoreOptions{c.parallelism});

  out << "rank\tvideo_id\tscore\n";
  std::size_t k = std::min(a.top_k, ranked.ranking.size());
  for (std::size_t i = 0; i < k; ++i) {
    out << (i + 1) << '\t' << ranked.ranking[i].first << '\t' << fixed(ranked.ranking[i].second, 6) << '\n';
  }
  if (a.verbose) {
    out << "\ntrace:\n" << (art.trace_text.empty() ? "(none)" : art.trace_text) << "\n";
    out << "\ntarget description:\n" << art.target_description << "\n";
    json audit = art.to_json();
    audit["config"] = c.to_json();
    audit["backend_calls"] = to_json(counted.counts());
    out << "\naudit: " << audit.dump() << "\n";
  }
  return kExitOk;
}

// ---- evaluate --------------------------------------------------------------

struct EvaluateArgs {
  CommonFlags common;
  std::string cache;
  std::string triplets;
  std::string report;
  std::string strategies;
  std::string variants;
  std::string judge;
  std::string videos;
  bool no_reasoning = false;
  bool skip_missing = false;
};

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out, std::ostream& err) {
  EngineConfig base = a.common.resolve();
  auto scheme = load_scheme(base);
  auto vocab = load_vocabulary(base);
  auto backend = make_backend(base);
  CountingBackend counted(*backend);
  const std::size_t token_dim = counted.handshake().dim;

  CorpusRead corpus = read_triplets(a.triplets);
  for (const auto& e : corpus.errors) err << a.triplets << ":" << e.line_number << ": " << e.message << "\n";
  if (corpus.triplets.empty()) {
    err << "error: no triplets in '" << a.triplets << "'\n";
    return kExitError;
  }

  GalleryIndex cached = load_cache(a.cache);
  std::vector<PoolingKind> kinds;
  if (a.strategies.empty()) {
    kinds.push_back(a.common.strategy_given() ? base.strategy : cached.strategy());
  } else {
    for (const auto& s : split_csv(a.strategies)) kinds.push_back(parse_pooling_kind(s));
  }
  std::vector<bool> variants;
  if (!a.variants.empty()) {
    for (const auto& v : split_csv(a.variants)) {
      if (v == "base") {
        variants.push_back(false);
      } else if (v == "plus_r") {
        variants.push_back(true);
      } else {
        throw Error(ErrorCode::kContract, "unknown variant '" + v + "'");
      }
    }
  } else if (a.no_reasoning) {
    variants = {false};
  } else {
    variants = {false, true};
  }

  std::unique_ptr<JudgeClient> judge;
  if (a.judge == "mock") {
    judge = std::make_unique<MockJudge>();
  } else if (a.judge == "remote") {
    judge = std::make_unique<HttpJudge>(HttpBackendConfig{base.remote_url, base.auth_env, base.model, "final", false, 120});
  } else if (!a.judge.empty()) {
    throw Error(ErrorCode::kContract, "unknown judge '" + a.judge + "'");
  }

  std::vector<VideoRef> gallery_videos;
  if (!a.videos.empty()) {
    gallery_videos = read_video_list(a.videos);
  } else {
    for (const auto& e : cached.entries()) gallery_videos.push_back(e.video);
  }

  json sections = json::array();
  int status = kExitOk;
  out << "variant\tstrategy\tn\tR@1\tR@5\tR@10\tR@50\tR_mean\treasoning\n";
  for (PoolingKind kind : kinds) {
    PoolingStrategy strategy = PoolingStrategy::of(kind, scheme);
    std::optional<GalleryIndex> rebuilt;
    const GalleryIndex* index = &cached;
    if (kind != cached.strategy()) {
      EncodeOptions eo;
      eo.describe = base.describe;
      eo.parallelism = base.parallelism;
      GalleryBuild build = encode_gallery(gallery_videos, counted, strategy, eo);
      for (const auto& d : build.diagnostics) err << d.to_json().dump() << "\n";
      if (!build.diagnostics.empty()) status = std::max(status, kExitPartial);
      rebuilt.emplace(std::move(build.index));
      index = &*rebuilt;
    }
    if (index->dim() != pooled_dim(kind, token_dim)) {
      throw Error(ErrorCode::kDimensionMismatch, "cache dim " + std::to_string(index->dim()) + " does not match backend");
    }
    for (bool reasoning : variants) {
      EngineConfig resolved = base;
      resolved.strategy = kind;
      BenchmarkConfig bc;
      bc.reasoning = reasoning;
      bc.refinement_rounds = reasoning ? base.refinement_rounds : 0;
      bc.reasoner = reasoner_options(base, vocab.get());
      bc.parallelism = base.parallelism;
      bc.skip_missing = a.skip_missing;
      bc.judge = judge.get();
      counted.reset();
      BenchmarkResult r;
      try {
        r = run_benchmark(corpus.triplets, *index, counted, strategy, bc);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kMissingTarget) throw;
        err << "error: targets missing from gallery for triplets: " << e.what() << "\n";
        return kExitError;
      }
      for (const auto& [id, msg] : r.failures) err << "triplet " << id << " failed: " << msg << "\n";
      if (!r.failures.empty() && !a.skip_missing) status = std::max(status, kExitPartial);

      json section = {{"variant", r.variant},
                      {"strategy", pooling_kind_name(kind)},
                      {"config", resolved.to_json()},
                      {"report", r.report.to_json()},
                      {"missing", r.missing},
                      {"backend_calls", to_json(counted.counts())}};
      section["config"]["variant"] = r.variant;
      if (r.reasoning_score) section["reasoning_score"] = r.reasoning_score->to_json();
      sections.push_back(std::move(section));

      out << r.variant << '\t' << pooling_kind_name(kind) << '\t' << r.report.n;
      for (int k : kDefaultRecallKs) {
        auto it = r.report.recall_at.find(k);
        out << '\t' << (it == r.report.recall_at.end() ? std::string("-") : fixed(100.0 * it->second, 2));
      }
      out << '\t' << fixed(100.0 * r.report.mean_recall, 2) << '\t';
      if (r.reasoning_score) {
        out << fixed(r.reasoning_score->mean, 2) << " +- " << fixed(r.reasoning_score->sem, 3);
      } else {
        out << '-';
      }
      out << '\n';
    }
  }
  json report = {{"cache", a.cache}, {"triplets", a.triplets}, {"sections", sections}};
  detail::write_file(a.report, report.dump(2) + "\n");
  return status;
}

// ---- curate ----------------------------------------------------------------

struct CurateArgs {
  CommonFlags common;
  std::string candidates;
  std::string accepted;
  std::string audit;
  std::optional<int> min_criteria;
  std::optional<double> overlap_threshold;
  bool ssv2 = false;
};

int cmd_curate(const CurateArgs& a, std::ostream& out, std::ostream& err) {
  EngineConfig c = a.common.resolve();
  auto scheme = load_scheme(c);
  CurationConfig cc;
  if (a.min_criteria) cc.min_criteria = *a.min_criteria;
  if (a.overlap_threshold) cc.overlap_threshold = *a.overlap_threshold;
  cc.validate();

  CorpusRead corpus = read_triplets(a.candidates);
  for (const auto& e : corpus.errors) err << a.candidates << ":" << e.line_number << ": " << e.message << "\n";
  if (corpus.triplets.empty()) {
    err << "error: no candidates\n";
    return kExitError;
  }

  std::vector<Triplet> accepted;
  std::string audit;
  for (Triplet t : corpus.triplets) {
    json entry = {{"id", t.id}};
    if (t.target_description) {
      t.criteria_flags.lexical_overlap = lexical_overlap(t.edit, *t.target_description, *scheme);
      entry["overlap_source"] = "computed";
    } else {
      entry["overlap_source"] = "supplied";
    }
    AcceptanceDecision d = accept_triplet(t.criteria_flags, cc);
    bool keep = d.accepted;
    if (a.ssv2) {
      try {
        bool pair_ok = ssv2_pair_filter(t, t.criteria_flags, cc, *scheme);
        entry["ssv2_pair"] = pair_ok;
        keep = keep && pair_ok;
      } catch (const Error& e) {
        entry["ssv2_pair"] = nullptr;
        entry["note"] = e.what();
        keep = false;
      }
    }
    entry["lexical_overlap"] = t.criteria_flags.lexical_overlap;
    entry["satisfied"] = d.satisfied;
    entry["criteria_count"] = d.satisfied.size();
    entry["accepted"] = keep;
    audit += entry.dump() + "\n";
    if (keep) accepted.push_back(std::move(t));
  }
  write_triplets(a.accepted, accepted);
  detail::write_file(a.audit, audit);
  out << "candidates " << corpus.triplets.size() << "\n"
      << "accepted " << accepted.size() << "\n"
      << "rejected " << corpus.triplets.size() - accepted.size() << "\n"
      << "parse_errors " << corpus.errors.size() << "\n"
      << "min_criteria " << cc.min_criteria << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reasoning-driven composed video retrieval engine", "covr"};
  app.require_subcommand(1);

  EncodeArgs enc;
  auto* enc_cmd = app.add_subcommand("encode-gallery", "describe, pool and cache a gallery");
  enc.common.attach(enc_cmd);
  enc_cmd->add_option("videos", enc.videos, "video list (id [uri] per line)")->required();
  enc_cmd->add_option("cache", enc.cache, "cache output path")->required();
  enc_cmd->add_option("--diagnostics", enc.diagnostics, "write per-video failures here (JSON lines)");
  enc_cmd->add_flag("--skip-missing", enc.skip_missing, "exit 0 even when some videos fail");

  QueryArgs q;
  auto* q_cmd = app.add_subcommand("query", "rank the gallery for (reference, edit)");
  q.common.attach(q_cmd);
  q_cmd->add_option("cache", q.cache, "gallery cache")->required();
  q_cmd->add_option("--reference", q.reference, "reference video id")->required();
  q_cmd->add_option("--reference-uri", q.reference_uri, "reference video locator (default: id)");
  q_cmd->add_option("--edit", q.edit, "modification text")->required();
  q_cmd->add_option("--top-k", q.top_k, "rows to print");
  q_cmd->add_flag("--no-reasoning", q.no_reasoning, "skip the after-effect reasoning step");
  q_cmd->add_flag("-v,--verbose", q.verbose, "print trace, target description and audit record");

  EvaluateArgs ev;
  auto* ev_cmd = app.add_subcommand("evaluate", "Recall@K (and judge scores) over a triplet file");
  ev.common.attach(ev_cmd, false);
  ev_cmd->add_option("cache", ev.cache, "gallery cache")->required();
  ev_cmd->add_option("triplets", ev.triplets, "triplet corpus (JSON lines)")->required();
  ev_cmd->add_option("report", ev.report, "report output path")->required();
  ev_cmd->add_option("--strategy", ev.strategies, "comma-separated pooling strategies to sweep");
  ev_cmd->add_option("--variants", ev.variants, "comma-separated subset of base,plus_r");
  ev_cmd->add_option("--judge", ev.judge, "mock or remote");
  ev_cmd->add_option("--videos", ev.videos, "video list used when a sweep re-encodes the gallery");
  ev_cmd->add_flag("--no-reasoning", ev.no_reasoning, "evaluate only the base variant");
  ev_cmd->add_flag("--skip-missing", ev.skip_missing, "drop triplets whose target is not in the gallery");

  CurateArgs cu;
  auto* cu_cmd = app.add_subcommand("curate", "apply triplet acceptance predicates");
  cu.common.attach(cu_cmd);
  cu_cmd->add_option("candidates", cu.candidates, "candidate triplets (JSON lines)")->required();
  cu_cmd->add_option("accepted", cu.accepted, "accepted triplets output")->required();
  cu_cmd->add_option("audit", cu.audit, "audit log output")->required();
  cu_cmd->add_option("--min-criteria", cu.min_criteria, "criteria needed for acceptance (default 2)");
  cu_cmd->add_option("--overlap-threshold", cu.overlap_threshold, "criterion (v) threshold (default 0.3)");
  cu_cmd->add_flag("--ssv2", cu.ssv2, "also require the synthetic-pair filter");

  std::vector<const char*> argv;
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (enc_cmd->parsed()) return cmd_encode_gallery(enc, out, err);
    if (q_cmd->parsed()) return cmd_query(q, out, err);
    if (ev_cmd->parsed()) return cmd_evaluate(ev, out, err);
    if (cu_cmd->parsed()) return cmd_curate(cu, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace covr
