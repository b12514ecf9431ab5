// Acceptance runner: one PASS/FAIL/SKIP line per criterion, each checked
// against its runtime budget. Exit status is nonzero iff any criterion
// fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "covr/cli.h"
#include "covr/config.h"
#include "covr/corpus.h"
#include "covr/curation.h"
#include "covr/error.h"
#include "covr/evaluation.h"
#include "covr/gallery.h"
#include "covr/lexicon.h"
#include "covr/reasoner.h"
#include "oracles.h"
#include "text_util.h"

using namespace covr;
using nlohmann::json;

namespace {

enum class Verdict { kPass, kFail, kSkip };

struct Outcome {
  Verdict verdict = Verdict::kPass;
  std::string detail;
};

Outcome pass(std::string d) { return {Verdict::kPass, std::move(d)}; }
Outcome fail(std::string d) { return {Verdict::kFail, std::move(d)}; }

struct Criterion {
  int number;
  std::string title;
  double budget_seconds;
  std::function<Outcome()> run;
};

std::string fmt(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

int run_cli_quiet(std::vector<std::string> args, std::string* out = nullptr, std::string* err = nullptr) {
  args.insert(args.begin(), "covr");
  std::ostringstream o, e;
  int code = run_cli(args, o, e);
  if (out) *out = o.str();
  if (err) *err = e.str();
  return code;
}

const PoolingKind kAllKinds[] = {PoolingKind::kWeighted, PoolingKind::kMean, PoolingKind::kMax,
                                 PoolingKind::kLast, PoolingKind::kMeanConcatLast, PoolingKind::kMeanConcatMax};

// ---- 1 -------------------------------------------------------------------
Outcome pooling_oracle() {
  std::mt19937_64 rng(1);
  auto scheme = std::make_shared<WeightingScheme>();
  scheme->add_token("dog", LexicalCategory::kSalient);
  scheme->add_token("the", LexicalCategory::kGeneric);
  const std::vector<std::pair<std::string, double>> pool_tokens = {
      {"dog", 1.0}, {" the", 0.3}, {",", 0.1}, {"unknown", 0.3}};
  std::uniform_int_distribution<std::size_t> nd(1, 16), dd(1, 8), pick(0, pool_tokens.size() - 1);
  std::uniform_real_distribution<double> val(-2.0, 2.0);
  double worst = 0.0, worst_mean = 0.0;
  auto flat = std::make_shared<WeightingScheme>();  // no dictionary: equal weights
  for (int trial = 0; trial < 500; ++trial) {
    std::size_t n = nd(rng), d = dd(rng);
    std::vector<std::string> tokens, words;
    std::vector<double> alpha;
    oracle::Matrix h;
    for (std::size_t i = 0; i < n; ++i) {
      auto& t = pool_tokens[pick(rng)];
      tokens.push_back(t.first);
      alpha.push_back(t.second);
      words.push_back("w" + std::to_string(i));
      std::vector<double> row(d);
      for (auto& x : row) x = val(rng);
      h.push_back(row);
    }
    TokenEmbeddingSequence seq(tokens, h);
    for (PoolingKind kind : kAllKinds) {
      worst = std::max(worst, oracle::max_abs_diff(pool(seq, PoolingStrategy::of(kind, scheme)).values,
                                                   oracle::naive_pool(h, alpha, kind)));
    }
    TokenEmbeddingSequence eq(words, h);
    worst_mean = std::max(worst_mean, oracle::max_abs_diff(pool(eq, PoolingStrategy::weighted(flat)).values,
                                                           pool(eq, PoolingStrategy::of(PoolingKind::kMean)).values));
  }
  std::string d = "max |pool - naive| = " + fmt(worst) + ", max |weighted_eq - mean| = " + fmt(worst_mean);
  return worst <= 1e-10 && worst_mean <= 1e-12 ? pass(d) : fail(d);
}

// ---- 2 -------------------------------------------------------------------
Outcome worked_example() {
  auto scheme = std::make_shared<WeightingScheme>();
  scheme->add_token("dog", LexicalCategory::kSalient);
  scheme->add_token("a", LexicalCategory::kPunctuation);
  auto v = pool(TokenEmbeddingSequence({"a", "dog"}, {{0, 2}, {4, 0}}), PoolingStrategy::weighted(scheme));
  double e0 = 4.0 / 1.1, e1 = 0.2 / 1.1;
  std::string d = "got [" + fmt(v.values[0], 12) + ", " + fmt(v.values[1], 12) + "]";
  return std::fabs(v.values[0] - e0) <= 1e-9 && std::fabs(v.values[1] - e1) <= 1e-9 ? pass(d) : fail(d);
}

// ---- 3 -------------------------------------------------------------------
Outcome normalization_contract() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> val(-5.0, 5.0), scale(0.01, 100.0);
  double worst = 0.0;
  int argmax_breaks = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::size_t d = 2 + trial % 15;
    std::vector<double> a(d), b(d);
    for (auto& x : a) x = val(rng);
    for (auto& x : b) x = val(rng);
    auto na = l2_normalize({a, false}), nb = l2_normalize({b, false});
    worst = std::max(worst, std::fabs(dot(na.values, nb.values) - oracle::naive_cosine(a, b)));
  }
  // Argmax invariance under positive scaling of the raw query.
  for (int trial = 0; trial < 100; ++trial) {
    GalleryIndex idx(6, PoolingKind::kMean);
    for (int i = 0; i < 20; ++i) {
      std::vector<double> v(6);
      for (auto& x : v) x = val(rng);
      idx.add({{"e" + std::to_string(i), "e", std::nullopt}, l2_normalize({v, false}), PoolingKind::kMean, ""});
    }
    std::vector<double> q(6);
    for (auto& x : q) x = val(rng);
    std::vector<double> qs = q;
    double c = scale(rng);
    for (auto& x : qs) x *= c;
    auto r1 = score(l2_normalize({q, false}), idx);
    auto r2 = score(l2_normalize({qs, false}), idx);
    if (r1.ranking[0].first != r2.ranking[0].first) ++argmax_breaks;
  }
  std::string d = "max |dot - cosine| = " + fmt(worst) + ", argmax changes under scaling: " + std::to_string(argmax_breaks);
  return worst <= 1e-6 && argmax_breaks == 0 ? pass(d) : fail(d);
}

// ---- 4 -------------------------------------------------------------------
Outcome ranking_brute_force() {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  GalleryIndex idx(16, PoolingKind::kMean);
  std::vector<std::pair<std::string, std::vector<double>>> raw;
  for (int i = 0; i < 64; ++i) {
    std::vector<double> v(16);
    for (auto& x : v) x = g(rng);
    std::string id = "vid" + std::to_string(i);
    idx.add({{id, id, std::nullopt}, l2_normalize({v, false}), PoolingKind::kMean, ""});
    raw.emplace_back(id, idx.entries().back().embedding.values);
  }
  std::vector<double> q(16);
  for (auto& x : q) x = g(rng);
  auto nq = l2_normalize({q, false});
  auto want = oracle::brute_force_ranking(nq.values, raw);
  auto got = score(nq, idx).ranking;
  bool same = got.size() == want.size();
  for (std::size_t i = 0; same && i < got.size(); ++i) {
    same = got[i].first == want[i].first && std::fabs(got[i].second - want[i].second) <= 1e-9;
  }
  // Constructed ties.
  GalleryIndex ties(2, PoolingKind::kMean);
  for (const char* id : {"m", "c", "x", "a"}) ties.add({{id, id, std::nullopt}, {{0.6, 0.8}, true}, PoolingKind::kMean, ""});
  auto t = score({{0.6, 0.8}, true}, ties).ranking;
  bool tie_ok = t[0].first == "a" && t[1].first == "c" && t[2].first == "m" && t[3].first == "x";
  return same && tie_ok ? pass("64-entry ranking identical; ties ordered a,c,m,x")
                        : fail(std::string(same ? "" : "ranking differs from brute force; ") + (tie_ok ? "" : "tie order wrong"));
}

// ---- 5 -------------------------------------------------------------------
Outcome cache_round_trip() {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  GalleryIndex idx(32, PoolingKind::kWeighted);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> v(32);
    for (auto& x : v) x = g(rng);
    idx.add({{"id" + std::to_string(i), "u", std::nullopt}, l2_normalize({v, false}), PoolingKind::kWeighted,
             "desc " + std::to_string(i)});
  }
  auto dir = oracle::scratch_dir("acceptance_cache");
  std::string path = (dir / "g.bin").string();
  save_cache(idx, path);
  GalleryIndex back = load_cache(path);
  bool exact = back == idx;
  for (std::size_t i = 0; exact && i < idx.size(); ++i) {
    const auto& a = idx.entries()[i].embedding.values;
    const auto& b = back.entries()[i].embedding.values;
    exact = std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
  }
  std::string bytes = detail::read_file(path);
  int raised = 0, cases = 0;
  auto expect_corrupt = [&](std::string b) {
    ++cases;
    try {
      deserialize_cache(b);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kCorruptCache) ++raised;
    }
  };
  std::string bad = bytes;
  bad[1] = 'Z';
  expect_corrupt(bad);
  bad = bytes;
  bad[4] = 2;
  expect_corrupt(bad);
  bad = bytes;
  bad[12] = 99;
  expect_corrupt(bad);
  for (std::size_t cut : {std::size_t{0}, std::size_t{10}, std::size_t{21}, bytes.size() / 2, bytes.size() - 1}) {
    expect_corrupt(bytes.substr(0, cut));
  }
  std::string d = std::string(exact ? "bit-exact" : "NOT bit-exact") + "; CorruptCache raised " +
                  std::to_string(raised) + "/" + std::to_string(cases);
  return exact && raised == cases ? pass(d) : fail(d);
}

// ---- 6 -------------------------------------------------------------------
Outcome canonicalization_suite() {
  std::mt19937_64 rng(6);
  int violations = 0;
  std::string first;
  auto flag = [&](const std::string& what) {
    if (violations++ == 0) first = what;
  };
  for (int trial = 0; trial < 1200; ++trial) {
    ReasoningRecord raw = oracle::random_record(rng);
    ReasoningRecord c = canonicalize(raw);
    if (!(canonicalize(c) == c)) flag("idempotence");
    std::vector<Assertion> all;
    c.for_each([&](const Assertion& a) { all.push_back(a); });
    for (Slot s : kSlotOrder) {
      if (c.slot(s).size() > kMaxAssertionsPerSlot) flag("slot bound");
      std::set<std::string> texts;
      for (const auto& a : c.slot(s)) {
        if (!texts.insert(a.canonical_text()).second) flag("duplicate");
      }
    }
    for (std::size_t i = 1; i < all.size(); ++i) {
      if (all[i - 1].slot > all[i].slot) flag("slot order");
    }
    for (std::size_t i = 0; i < all.size(); ++i) {
      for (std::size_t j = i + 1; j < all.size(); ++j) {
        if (!all[i].verify_only && !all[j].verify_only && contradicts(all[i], all[j])) flag("active contradiction");
      }
    }
    for (const Assertion& a : all) {
      if (!a.verify_only) continue;
      bool was_active = false;
      raw.for_each([&](const Assertion& r) {
        if (r.canonical_text() == a.canonical_text() && !r.verify_only) was_active = true;
      });
      if (!was_active) continue;
      bool beaten = false;
      for (const Assertion& b : all) {
        if (!b.verify_only && contradicts(a, b) && b.confidence >= a.confidence) beaten = true;
      }
      if (!beaten) flag("demotion without higher-confidence survivor");
    }
    auto reparsed = parse_trace(format_record(c));
    if (!reparsed.diagnostics.empty() || !(reparsed.record == c)) flag("format/parse round-trip");
    std::string rendered = render_effect_query(c).text;
    if (render_effect_query(canonicalize(parse_trace(rendered).record)).text != rendered) flag("render fixpoint");
  }
  // The named example: zoom-in 0.9 beats zoom-out 0.4.
  auto ex = canonicalize(parse_trace("camera: zoom-out conf=0.4\ncamera: zoom-in conf=0.9").record);
  if (render_effect_query(ex).text != "camera: zoom-in") flag("zoom example");
  return violations == 0 ? pass("1200 generated records, all properties hold")
                         : fail(std::to_string(violations) + " violations, first: " + first);
}

// ---- 7 -------------------------------------------------------------------
Outcome planted_benchmark() {
  auto scheme = load_category_dict(default_data_dir() + "/lexicon.json");
  auto shared = std::make_shared<const WeightingScheme>(scheme);
  auto run = [&](std::size_t corrupt_every) {
    auto b = oracle::planted_benchmark(20, corrupt_every);
    MockBackend mock(b.fixtures, 0);
    auto s = PoolingStrategy::weighted(shared);
    GalleryIndex idx = encode_gallery(b.gallery, mock, s).index;
    BenchmarkConfig cfg;
    cfg.parallelism = 4;
    return run_benchmark(b.triplets, idx, mock, s, cfg).report;
  };
  EvalReport clean = run(0);
  EvalReport noisy = run(3);
  const auto& R = noisy.recall_at;
  bool monotone = R.at(1) <= R.at(5) && R.at(5) <= R.at(10) && R.at(10) <= R.at(50);
  std::string d = "clean R@1 = " + fmt(clean.recall_at.at(1)) + " (n=" + std::to_string(clean.n) +
                  "); perturbed R@1/5/10/50 = " + fmt(R.at(1)) + "/" + fmt(R.at(5)) + "/" + fmt(R.at(10)) + "/" +
                  fmt(R.at(50));
  return clean.n == 20 && clean.recall_at.at(1) == 1.0 && monotone && R.at(1) < 1.0 ? pass(d) : fail(d);
}

struct PlantedWorkspace {
  std::filesystem::path dir;
  std::string fixtures, videos, triplets, cache;
};

PlantedWorkspace write_planted(const std::string& name, std::size_t n) {
  PlantedWorkspace w;
  w.dir = oracle::scratch_dir(name);
  auto b = oracle::planted_benchmark(n);
  w.fixtures = (w.dir / "fixtures.json").string();
  w.videos = (w.dir / "videos.txt").string();
  w.triplets = (w.dir / "triplets.jsonl").string();
  w.cache = (w.dir / "gallery.bin").string();
  detail::write_file(w.fixtures, b.fixtures.to_json().dump());
  std::string list;
  for (const auto& v : b.gallery) list += v.id + " " + v.uri + "\n";
  detail::write_file(w.videos, list);
  write_triplets(w.triplets, b.triplets);
  return w;
}

// ---- 8 -------------------------------------------------------------------
Outcome ablation_harness() {
  auto w = write_planted("acceptance_sweep", 20);
  std::string err;
  if (run_cli_quiet({"encode-gallery", w.videos, w.cache, "--fixtures", w.fixtures}, nullptr, &err) != 0) {
    return fail("encode-gallery failed: " + err);
  }
  std::string report = (w.dir / "report.json").string();
  int code = run_cli_quiet({"evaluate", w.cache, w.triplets, report, "--fixtures", w.fixtures, "--strategy",
                            "last,mean,max,weighted"},
                           nullptr, &err);
  if (code != 0) return fail("evaluate exit " + std::to_string(code) + ": " + err);
  auto doc = json::parse(detail::read_file(report));
  const auto& sections = doc["sections"];
  std::set<std::pair<std::string, std::string>> combos;
  bool configs = true;
  for (const auto& s : sections) {
    combos.insert({s["variant"].get<std::string>(), s["strategy"].get<std::string>()});
    configs = configs && s.contains("config") && s["config"]["strategy"] == s["strategy"] &&
              s["config"]["variant"] == s["variant"] && s["config"].contains("sampling") && s.contains("report");
  }
  std::string d = std::to_string(sections.size()) + " sections, " + std::to_string(combos.size()) +
                  " distinct (variant, strategy), configs " + (configs ? "embedded" : "MISSING");
  return sections.size() == 8 && combos.size() == 8 && configs ? pass(d) : fail(d);
}

// ---- 9 -------------------------------------------------------------------
Outcome refinement_accounting() {
  auto w = write_planted("acceptance_refine", 5);
  std::string out, err;
  if (run_cli_quiet({"encode-gallery", w.videos, w.cache, "--fixtures", w.fixtures}, nullptr, &err) != 0) {
    return fail("encode-gallery failed: " + err);
  }
  // Per query through `covr query --refine 5`.
  std::vector<long> per_query;
  for (int i = 0; i < 3; ++i) {
    std::string edit = "turn clip " + std::to_string(i) + " into clip " + std::to_string(5 + i);
    if (run_cli_quiet({"query", w.cache, "--fixtures", w.fixtures, "--reference", "g" + std::to_string(i), "--edit",
                       edit, "--refine", "5", "-v"},
                      &out, &err) != 0) {
      return fail("query failed: " + err);
    }
    auto pos = out.find("audit: ");
    auto audit = json::parse(out.substr(pos + 7, out.find('\n', pos) - pos - 7));
    const auto& calls = audit["backend_calls"];
    if (calls["reason_after_effects"] != 1 || calls["refine_trace"] != 5 || calls["generate_target_description"] != 1) {
      return fail("unexpected call breakdown " + calls.dump());
    }
    per_query.push_back(calls["total"].get<long>());
  }
  // And across a benchmark run.
  std::string report = (w.dir / "report.json").string();
  if (run_cli_quiet({"evaluate", w.cache, w.triplets, report, "--fixtures", w.fixtures, "--refine", "5", "--variants",
                     "plus_r"},
                    nullptr, &err) != 0) {
    return fail("evaluate failed: " + err);
  }
  auto doc = json::parse(detail::read_file(report));
  long total = doc["sections"][0]["backend_calls"]["total"].get<long>();
  bool ok = std::all_of(per_query.begin(), per_query.end(), [](long c) { return c == 7; }) && total == 7 * 5;
  return ok ? pass("7 calls per query (1 trace + 5 refinements + 1 target); benchmark of 5 queries issued " +
                   std::to_string(total))
            : fail("per-query totals off or benchmark issued " + std::to_string(total));
}

// ---- 10 ------------------------------------------------------------------
Outcome curation_enumeration() {
  int checked = 0, wrong = 0;
  for (double threshold : {0.3, 0.1, 0.7}) {
    for (int min_criteria : {1, 2, 3, 4, 5}) {
      CurationConfig cfg{min_criteria, threshold};
      for (unsigned mask = 0; mask < 16; ++mask) {
        for (double overlap : {threshold - 0.05, threshold, threshold + 0.05}) {
          AcceptanceFlags f{bool(mask & 1), bool(mask & 2), bool(mask & 4), bool(mask & 8), overlap};
          auto d = accept_triplet(f, cfg);
          ++checked;
          std::size_t listed = static_cast<std::size_t>(std::popcount(mask)) + (overlap < threshold ? 1u : 0u);
          if (d.accepted != oracle::acceptance_oracle(f, threshold, min_criteria) || d.satisfied.size() != listed) ++wrong;
        }
      }
    }
  }
  // Default configuration: "at least two", strict boundary.
  CurationConfig def;
  bool boundary = !accept_triplet({true, false, false, false, 0.3}, def).accepted &&
                  accept_triplet({true, false, false, false, 0.2999}, def).accepted;
  std::string d = std::to_string(checked) + " combinations, " + std::to_string(wrong) + " mismatches; boundary " +
                  (boundary ? "strict" : "WRONG");
  return wrong == 0 && boundary && def.min_criteria == 2 ? pass(d) : fail(d);
}

// ---- 11 ------------------------------------------------------------------
Outcome metric_arithmetic() {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> rank(1, 500);
  std::vector<std::size_t> ranks(200);
  std::vector<RetrievalOutcome> outcomes;
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    ranks[i] = rank(rng);
    outcomes.push_back({"t" + std::to_string(i), ranks[i], 500});
  }
  auto rep = recall_at_k(outcomes);
  bool recall_ok = true;
  for (int k : kDefaultRecallKs) recall_ok = recall_ok && rep.recall_at.at(k) == oracle::counting_recall(ranks, k);
  std::vector<double> a = {7, 9}, c = {8.31, 8.31, 8.31}, one = {5};
  auto sa = summarize_scores(a), sc = summarize_scores(c), so = summarize_scores(one);
  bool sem_ok = std::fabs(sa.mean - 8.0) < 1e-12 && std::fabs(sa.sem - 1.0) < 1e-12 &&
                std::fabs(sc.mean - 8.31) < 1e-12 && std::fabs(sc.sem) < 1e-12 && so.mean == 5.0 && so.sem == 0.0;
  std::string d = std::string("recall ") + (recall_ok ? "matches" : "DIFFERS from") + " counting oracle; [7,9] -> " +
                  fmt(sa.mean) + " +- " + fmt(sa.sem);
  return recall_ok && sem_ok ? pass(d) : fail(d);
}

// ---- 12 ------------------------------------------------------------------
Outcome live_smoke() {
  const char* url = std::getenv("COVR_REMOTE_URL");
  if (!url || !*url) return {Verdict::kSkip, "COVR_REMOTE_URL not set"};
  const char* videos_env = std::getenv("COVR_SMOKE_VIDEOS");
  if (!videos_env || !*videos_env) return fail("COVR_REMOTE_URL is set but COVR_SMOKE_VIDEOS (id uri list) is not");

  EngineConfig c;
  apply_backend_spec(c, std::string("remote:") + url);
  if (const char* m = std::getenv("COVR_REMOTE_MODEL")) c.model = m;
  if (const char* e = std::getenv("COVR_REMOTE_EMBED_URL")) c.embed_url = e;
  c.parallelism = 2;
  auto backend = make_backend(c);
  auto scheme = load_scheme(c);

  std::vector<VideoRef> videos;
  for (auto line : detail::split_lines(detail::read_file(videos_env))) {
    auto words = detail::split_whitespace(line);
    if (words.empty() || words[0].starts_with("#")) continue;
    videos.push_back({std::string(words[0]), std::string(words.size() > 1 ? words[1] : words[0]), std::nullopt});
    if (videos.size() == 5) break;
  }
  if (videos.size() < 5) return fail("smoke test needs 5 videos, list has " + std::to_string(videos.size()));

  std::size_t token_dim = backend->handshake().dim;
  auto strategy = PoolingStrategy::weighted(scheme);
  EncodeOptions eo;
  eo.parallelism = 2;
  auto build = encode_gallery(videos, *backend, strategy, eo);
  if (build.index.dim() != token_dim) return fail("gallery dim " + std::to_string(build.index.dim()) + " != handshake");

  const char* edits[] = {"make it happen at night", "zoom in on the main subject"};
  for (int i = 0; i < 2; ++i) {
    auto art = encode_query(videos[static_cast<std::size_t>(i)], EditText(edits[i]), *backend, strategy);
    if (art.query_embedding.dim() != token_dim) return fail("query dim mismatch");
    auto parsed = parse_trace(art.trace_text, {false, nullptr});
    if (!art.trace_text.empty() && parsed.record.empty()) return fail("trace did not parse: " + art.trace_text);
    auto r = score(art.query_embedding, build.index);
    std::set<std::string> ids;
    for (std::size_t k = 0; k < r.ranking.size(); ++k) {
      ids.insert(r.ranking[k].first);
      if (k > 0 && r.ranking[k - 1].second < r.ranking[k].second) return fail("ranking not sorted");
    }
    if (ids.size() != build.index.size()) return fail("ranking not total");
  }
  return pass("gallery of " + std::to_string(build.index.size()) + ", dim " + std::to_string(token_dim) +
              ", 2 queries ranked");
}

}  // namespace

int main() {
  std::vector<Criterion> criteria = {
      {1, "pooling strategies match naive reference; equal-weight weighted == mean", 5, pooling_oracle},
      {2, "weighted-pool worked example", 1, worked_example},
      {3, "normalization + dot/cosine contract", 5, normalization_contract},
      {4, "ranking equals brute-force sort, id tie-breaks", 5, ranking_brute_force},
      {5, "cache round-trip bit-exact, corrupt/truncated rejected", 5, cache_round_trip},
      {6, "canonicalization property suite", 10, canonicalization_suite},
      {7, "mock planted benchmark R@1 = 1.0, perturbed recall monotone", 30, planted_benchmark},
      {8, "ablation sweep emits 8 sections with resolved configs", 60, ablation_harness},
      {9, "--refine 5 issues 1 + 5 + 1 backend calls per query", 10, refinement_accounting},
      {10, "curation predicate enumeration oracle", 1, curation_enumeration},
      {11, "metric arithmetic", 1, metric_arithmetic},
      {12, "live backend smoke test", 600, live_smoke},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (o.verdict == Verdict::kPass && secs > c.budget_seconds) {
      o = fail(o.detail + "; runtime over budget");
    }
    const char* tag = o.verdict == Verdict::kPass ? "PASS" : o.verdict == Verdict::kFail ? "FAIL" : "SKIP";
    if (o.verdict == Verdict::kFail) ++failures;
    std::printf("[%s] criterion %2d: %s (%.3fs / %.0fs) - %s\n", tag, c.number, c.title.c_str(), secs,
                c.budget_seconds, o.detail.c_str());
  }
  std::fflush(stdout);
  return failures == 0 ? 0 : 1;
}
