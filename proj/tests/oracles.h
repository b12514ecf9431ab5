#pragma once

// Independent reference computations used by the unit tests and the
// acceptance runner. Nothing here calls the engine's own arithmetic.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <unistd.h>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "covr/backend.h"
#include "covr/curation.h"
#include "covr/model.h"
#include "covr/pooling.h"
#include "covr/reasoning.h"

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

// Straight loops over the textbook definitions of each pooling strategy.
inline std::vector<double> naive_pool(const Matrix& h, const std::vector<double>& alpha, covr::PoolingKind kind) {
  const std::size_t n = h.size();
  const std::size_t d = h[0].size();
  std::vector<double> mean(d, 0.0), mx(d, -INFINITY), last = h[n - 1], weighted(d, 0.0);
  double wsum = 0.0;
  for (std::size_t i = 0; i < n; ++i) wsum += alpha[i];
  for (std::size_t k = 0; k < d; ++k) {
    double s = 0.0, ws = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s += h[i][k];
      ws += alpha[i] * h[i][k];
      if (h[i][k] > mx[k]) mx[k] = h[i][k];
    }
    mean[k] = s / static_cast<double>(n);
    weighted[k] = ws / wsum;
  }
  auto cat = [](std::vector<double> a, const std::vector<double>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };
  switch (kind) {
    case covr::PoolingKind::kWeighted: return weighted;
    case covr::PoolingKind::kMean: return mean;
    case covr::PoolingKind::kMax: return mx;
    case covr::PoolingKind::kLast: return last;
    case covr::PoolingKind::kMeanConcatLast: return cat(mean, last);
    case covr::PoolingKind::kMeanConcatMax: return cat(mean, mx);
  }
  return {};
}

inline double naive_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline double naive_dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double naive_cosine(const std::vector<double>& a, const std::vector<double>& b) {
  return naive_dot(a, b) / (naive_norm(a) * naive_norm(b));
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return INFINITY;
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

// Sort of (id, cosine) pairs by score descending, id ascending.
inline std::vector<std::pair<std::string, double>> brute_force_ranking(
    const std::vector<double>& query, const std::vector<std::pair<std::string, std::vector<double>>>& gallery) {
  std::vector<std::pair<std::string, double>> out;
  for (const auto& [id, v] : gallery) out.emplace_back(id, naive_dot(query, v));
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return out;
}

inline double counting_recall(const std::vector<std::size_t>& ranks, std::size_t k) {
  std::size_t hits = 0;
  for (std::size_t r : ranks) {
    if (r <= k) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(ranks.size());
}

// Counting rule for acceptance: four booleans plus criterion (v).
inline bool acceptance_oracle(const covr::AcceptanceFlags& f, double threshold, int min_criteria) {
  int count = 0;
  for (bool b : {f.temporal_dependency, f.state_transition, f.cinematography, f.implicit_cause_effect}) {
    if (b) ++count;
  }
  if (f.lexical_overlap < threshold) ++count;
  return count >= min_criteria;
}

// ---- reasoning record generator ---------------------------------------------

// Values per slot, chosen so that vocabulary predicates collide often.
inline const std::vector<std::string>& slot_values(covr::Slot s) {
  static const std::vector<std::vector<std::string>> values = {
      {"stirring", "pouring", "running", "sleeping", "slicing"},
      {"zoom-in", "zoom-out", "close-up", "wide-shot", "pan-left", "static"},
      {"full", "empty", "half-full", "browned", "raw", "wet", "dry"},
      {"indoor", "outdoor", "night", "daylight", "rainy"},
      {"faster", "slower", "time-lapse", "longer"},
  };
  return values[static_cast<std::size_t>(s)];
}

// A random record with up to four assertions per slot, predicates drawn
// from the built-in vocabulary so parse_trace reproduces them.
inline covr::ReasoningRecord random_record(std::mt19937_64& rng) {
  const auto& vocab = covr::PredicateVocabulary::builtin();
  std::uniform_int_distribution<int> count(0, 4), coin(0, 3), rel(0, 3), conf(0, 4);
  static const double confidences[] = {1.0, 0.9, 0.75, 0.5, 0.25};
  covr::ReasoningRecord r;
  for (covr::Slot s : covr::kSlotOrder) {
    const auto& vals = slot_values(s);
    std::uniform_int_distribution<std::size_t> pick(0, vals.size() - 1);
    int n = count(rng);
    for (int i = 0; i < n; ++i) {
      covr::Assertion a;
      a.slot = s;
      a.value = vals[pick(rng)];
      a.predicate = vocab.predicate_for(s, a.value);
      int rr = rel(rng);
      if (rr == 1) a.relation = covr::Relation::kGreaterThanRef;
      if (rr == 2) a.relation = covr::Relation::kLessThanRef;
      if (rr == 3 && coin(rng) == 0) a.relation = covr::Relation::kEqualToRef;
      a.confidence = confidences[conf(rng)];
      if (coin(rng) == 0) a.evidence = covr::parse_evidence(coin(rng) < 2 ? "1.5-3s" : "12");
      a.verify_only = coin(rng) == 0 && coin(rng) == 0;
      r.add(std::move(a));
    }
  }
  return r;
}

// ---- planted benchmark ----------------------------------------------------

struct PlantedBenchmark {
  covr::MockFixtures fixtures;
  std::vector<covr::VideoRef> gallery;
  std::vector<covr::Triplet> triplets;
};

// n triplets over a 2n-video gallery. With corrupt_every = 0 each target
// fixture is exactly its target's gallery description; otherwise every
// corrupt_every-th fixture describes a different video plus noise words.
inline PlantedBenchmark planted_benchmark(std::size_t n, std::size_t corrupt_every = 0) {
  static const char* subjects[] = {"dog", "chef", "cyclist", "child", "horse", "woman", "man", "bird"};
  static const char* verbs[] = {"runs", "stirs a pan", "pours water", "jumps", "sleeps", "rides", "falls", "opens a door"};
  static const char* places[] = {"in a park", "in a kitchen", "on a street", "at night", "on a beach"};
  PlantedBenchmark b;
  for (std::size_t i = 0; i < 2 * n; ++i) {
    std::string id = "g" + std::to_string(i);
    std::string desc = std::string("a ") + subjects[i % 8] + " " + verbs[(i / 8 + i) % 8] + " " + places[i % 5] +
                       " clip " + std::to_string(i);
    b.fixtures.descriptions[id] = desc;
    b.gallery.push_back({id, "file://" + id + ".mp4", std::nullopt});
  }
  for (std::size_t i = 0; i < n; ++i) {
    covr::Triplet t;
    t.id = "t" + std::to_string(i);
    t.reference = b.gallery[i];
    t.target = b.gallery[n + i];
    t.edit = covr::EditText("turn clip " + std::to_string(i) + " into clip " + std::to_string(n + i));
    t.reasoning_detailed = "actions: " + std::string(i % 2 ? "running" : "pouring");
    b.fixtures.traces[{t.reference.id, t.edit.text()}] = *t.reasoning_detailed;
    std::string text = b.fixtures.descriptions[t.target.id];
    if (corrupt_every != 0 && i % corrupt_every == 0) {
      text = b.fixtures.descriptions[b.gallery[(n + i + 3) % (2 * n)].id] + " with extra noise words";
    }
    b.fixtures.targets.push_back({t.reference.id, t.edit.text(), std::nullopt, text});
    b.triplets.push_back(std::move(t));
  }
  return b;
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("covr_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace oracle
