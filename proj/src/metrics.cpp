// Copyright 2026 The voxanon Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "voxanon/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <tuple>

#include "text_util.hpp"
#include "voxanon/error.hpp"

namespace voxanon::metrics {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log(t) - log(n - t), with the pure-block limits.
double LogOdds(double t, double n) {
  if (t <= 0.0) return -kInf;
  if (t >= n) return kInf;
  return std::log(t) - std::log(n - t);
}

WerBreakdown Align(std::span<const std::string> ref,
                   std::span<const std::string> hyp) {
  // Lexicographic (cost, insertions, deletions); the order is compatible with
  // addition so the usual recurrence stays optimal.
  using Cost = std::tuple<int64_t, int64_t, int64_t>;
  const std::size_t m = ref.size(), n = hyp.size();
  std::vector<Cost> prev(n + 1), cur(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    prev[j] = {static_cast<int64_t>(j), static_cast<int64_t>(j), 0};
  }
  for (std::size_t i = 1; i <= m; ++i) {
    cur[0] = {static_cast<int64_t>(i), 0, static_cast<int64_t>(i)};
    for (std::size_t j = 1; j <= n; ++j) {
      const auto& [dc, di, dd] = prev[j - 1];
      Cost best{dc + (ref[i - 1] == hyp[j - 1] ? 0 : 1), di, dd};
      const auto& [uc, ui, ud] = prev[j];
      best = std::min(best, Cost{uc + 1, ui, ud + 1});
      const auto& [lc, li, ld] = cur[j - 1];
      best = std::min(best, Cost{lc + 1, li + 1, ld});
      cur[j] = best;
    }
    std::swap(prev, cur);
  }
  const auto& [cost, ins, del] = prev[n];
  WerBreakdown out;
  out.n_ins = ins;
  out.n_del = del;
  out.n_sub = cost - ins - del;
  out.n_ref = static_cast<int64_t>(m);
  return out;
}

}  // namespace

void ScoreSet::Validate() const {
  if (target_scores.empty() || impostor_scores.empty()) {
    Fail(ErrorKind::kContract,
         "score set needs both target and impostor scores (got " +
             std::to_string(target_scores.size()) + " targets, " +
             std::to_string(impostor_scores.size()) + " impostors)");
  }
  for (const auto* list : {&target_scores, &impostor_scores}) {
    for (double s : *list) {
      if (!std::isfinite(s)) Fail(ErrorKind::kContract, "non-finite score");
    }
  }
}

ErrorRates ComputeErrorRates(const ScoreSet& scores, double threshold) {
  scores.Validate();
  const auto fa = std::count_if(scores.impostor_scores.begin(),
                                scores.impostor_scores.end(),
                                [&](double s) { return s > threshold; });
  const auto miss = std::count_if(scores.target_scores.begin(),
                                  scores.target_scores.end(),
                                  [&](double s) { return s <= threshold; });
  ErrorRates r;
  r.threshold = threshold;
  r.p_fa = static_cast<double>(fa) /
           static_cast<double>(scores.impostor_scores.size());
  r.p_miss = static_cast<double>(miss) /
             static_cast<double>(scores.target_scores.size());
  return r;
}

EerResult ComputeEer(const ScoreSet& scores) {
  scores.Validate();
  std::vector<double> tar = scores.target_scores;
  std::vector<double> imp = scores.impostor_scores;
  std::sort(tar.begin(), tar.end());
  std::sort(imp.begin(), imp.end());
  const auto n_tar = static_cast<int64_t>(tar.size());
  const auto n_imp = static_cast<int64_t>(imp.size());

  std::vector<double> thresholds;
  thresholds.reserve(tar.size() + imp.size());
  std::merge(tar.begin(), tar.end(), imp.begin(), imp.end(),
             std::back_inserter(thresholds));
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());

  // Below every score: all impostors accepted, no target missed.
  int64_t best_fa = n_imp, best_miss = 0;
  double best_theta = -kInf;
  int64_t best_gap = n_imp * n_tar;  // |fa/N_imp - miss/N_tar| * N_imp * N_tar
  std::size_t ti = 0, ii = 0;
  for (double theta : thresholds) {
    while (ti < tar.size() && tar[ti] <= theta) ++ti;
    while (ii < imp.size() && imp[ii] <= theta) ++ii;
    const int64_t fa = n_imp - static_cast<int64_t>(ii);
    const int64_t miss = static_cast<int64_t>(ti);
    const int64_t gap = std::llabs(fa * n_tar - miss * n_imp);
    if (gap < best_gap) {
      best_gap = gap;
      best_fa = fa;
      best_miss = miss;
      best_theta = theta;
    }
  }
  const double p_fa = static_cast<double>(best_fa) / static_cast<double>(n_imp);
  const double p_miss =
      static_cast<double>(best_miss) / static_cast<double>(n_tar);
  return {100.0 * 0.5 * (p_fa + p_miss), best_theta};
}

double Log2OnePlusExp(double x) {
  if (x == -kInf) return 0.0;
  if (x == kInf) return kInf;
  const double nat = x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
  return nat / std::numbers::ln2;
}

double ComputeCllr(const ScoreSet& scores) {
  scores.Validate();
  double tar = 0.0, imp = 0.0;
  for (double s : scores.target_scores) tar += Log2OnePlusExp(-s);
  for (double s : scores.impostor_scores) imp += Log2OnePlusExp(s);
  return 0.5 * (tar / static_cast<double>(scores.target_scores.size()) +
                imp / static_cast<double>(scores.impostor_scores.size()));
}

CalibrationMap PavCalibrate(const ScoreSet& scores) {
  scores.Validate();
  std::vector<std::pair<double, bool>> labelled;
  labelled.reserve(scores.target_scores.size() + scores.impostor_scores.size());
  for (double s : scores.target_scores) labelled.emplace_back(s, true);
  for (double s : scores.impostor_scores) labelled.emplace_back(s, false);
  std::sort(labelled.begin(), labelled.end());

  using Block = CalibrationMap::Block;
  const auto mean_ge = [](const Block& a, const Block& b) {
    return a.targets * b.total >= b.targets * a.total;
  };
  std::vector<Block> stack;
  for (std::size_t i = 0; i < labelled.size();) {
    // Tied scores enter as one block.
    Block b;
    b.low = b.high = labelled[i].first;
    while (i < labelled.size() && labelled[i].first == b.low) {
      b.targets += labelled[i].second;
      ++b.total;
      ++i;
    }
    // Merging equal means as well as violators keeps the block structure
    // canonical.
    while (!stack.empty() && mean_ge(stack.back(), b)) {
      Block& top = stack.back();
      b.low = top.low;
      b.targets += top.targets;
      b.total += top.total;
      stack.pop_back();
    }
    stack.push_back(b);
  }

  CalibrationMap map;
  const double n_tar = static_cast<double>(scores.target_scores.size());
  const double n_imp = static_cast<double>(scores.impostor_scores.size());
  map.prior_log_odds = std::log(n_tar) - std::log(n_imp);
  for (Block& b : stack) {
    const double t = static_cast<double>(b.targets);
    const double n = static_cast<double>(b.total);
    b.posterior = t / n;
    b.llr = LogOdds(t, n) - map.prior_log_odds;
  }
  // Only the first block can be all impostors and only the last all
  // targets. Their clipped posteriors are also capped by the neighbouring
  // block so the clipped map stays non-decreasing.
  const auto clipped = [&](double p) {
    return std::log(p) - std::log1p(-p) - map.prior_log_odds;
  };
  for (std::size_t i = 0; i < stack.size(); ++i) {
    Block& b = stack[i];
    const double n = static_cast<double>(b.total);
    b.clipped_llr = b.llr;
    if (b.targets == 0) {
      const double p = 1.0 / (2.0 * n);
      const bool capped = i + 1 < stack.size() && stack[i + 1].posterior <= p;
      b.clipped_llr = capped ? stack[i + 1].llr : clipped(p);
    } else if (b.targets == b.total) {
      const double p = 1.0 - 1.0 / (2.0 * n);
      const bool capped = i > 0 && stack[i - 1].posterior >= p;
      b.clipped_llr = capped ? stack[i - 1].llr : clipped(p);
    }
  }
  map.blocks = std::move(stack);
  return map;
}

namespace {

const CalibrationMap::Block& Lookup(const CalibrationMap& map, double score) {
  if (map.blocks.empty()) {
    Fail(ErrorKind::kContract, "empty calibration map");
  }
  // Last block whose low end is <= score; the first block otherwise.
  auto it = std::upper_bound(
      map.blocks.begin(), map.blocks.end(), score,
      [](double s, const CalibrationMap::Block& b) { return s < b.low; });
  return it == map.blocks.begin() ? map.blocks.front() : *std::prev(it);
}

}  // namespace

double CalibrationMap::Apply(double score) const {
  return Lookup(*this, score).clipped_llr;
}

double CalibrationMap::ApplyExact(double score) const {
  return Lookup(*this, score).llr;
}

double ComputeCllrMin(const ScoreSet& scores) {
  const CalibrationMap map = PavCalibrate(scores);
  double tar = 0.0, imp = 0.0;
  for (const CalibrationMap::Block& b : map.blocks) {
    const std::size_t imps = b.total - b.targets;
    if (b.targets > 0) {
      tar += static_cast<double>(b.targets) * Log2OnePlusExp(-b.llr);
    }
    if (imps > 0) imp += static_cast<double>(imps) * Log2OnePlusExp(b.llr);
  }
  return 0.5 * (tar / static_cast<double>(scores.target_scores.size()) +
                imp / static_cast<double>(scores.impostor_scores.size()));
}

double WerBreakdown::wer() const {
  return n_ref == 0 ? 0.0
                    : static_cast<double>(errors()) / static_cast<double>(n_ref);
}

WerBreakdown& WerBreakdown::operator+=(const WerBreakdown& other) {
  n_sub += other.n_sub;
  n_del += other.n_del;
  n_ins += other.n_ins;
  n_ref += other.n_ref;
  return *this;
}

std::vector<std::string> Tokenize(const std::string& text) {
  std::vector<std::string> tokens = text::SplitWhitespace(text);
  for (std::string& t : tokens) {
    for (char& c : t) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return tokens;
}

WerBreakdown ComputeWer(std::span<const std::string> ref,
                        std::span<const std::string> hyp) {
  if (ref.empty()) Fail(ErrorKind::kContract, "empty reference");
  return Align(ref, hyp);
}

TranscriptTable ReadTranscripts(const std::string& path) {
  TranscriptTable table;
  for (const text::Line& line : text::ReadRecords(path)) {
    std::vector<std::string> words(line.fields.begin() + 1, line.fields.end());
    for (std::string& w : words) {
      for (char& c : w) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    if (!table.emplace(line.fields[0], std::move(words)).second) {
      text::ParseFail(path, line.number,
                      "duplicate utterance id " + line.fields[0]);
    }
  }
  return table;
}

CorpusWer ComputeCorpusWer(const TranscriptTable& ref,
                           const TranscriptTable& hyp) {
  if (ref.empty()) Fail(ErrorKind::kContract, "empty reference table");
  std::vector<std::string> missing;
  for (const auto& [id, words] : hyp) {
    if (!ref.count(id)) missing.push_back(id);
  }
  if (!missing.empty()) {
    std::string msg = "hypothesis utterances missing from the reference:";
    for (const std::string& id : missing) msg += " " + id;
    Fail(ErrorKind::kReconcile, msg);
  }
  CorpusWer out;
  for (const auto& [id, words] : ref) {
    auto it = hyp.find(id);
    if (it == hyp.end()) {
      out.unused_references.push_back(id);
      continue;
    }
    const WerBreakdown w = Align(words, it->second);
    out.per_utterance.emplace(id, w);
    out.total += w;
  }
  if (out.total.n_ref == 0) {
    Fail(ErrorKind::kContract, "no reference words in the scored utterances");
  }
  return out;
}

}  // namespace voxanon::metrics
