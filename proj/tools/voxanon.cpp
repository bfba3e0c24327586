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

// voxanon: command-line front end over the libvoxanon C API.
//
// Subcommands:
//   anonymize   McAdams anonymization of a manifest of WAV files
//   anon-embed  pool-based pseudo-speaker embeddings
//   eval-asv    EER / Cllr_min / Cllr from a score file and trial list
//   eval-asr    corpus WER from reference and hypothesis transcripts
//   validate    pseudo-speaker mapping rule checks
//   report      re-emit a results file as a plain or LaTeX table

#include <cerrno>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "voxanon/voxanon.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;  // per-file failures, reconciliation, rule violations
constexpr int kExitConfig = 2;   // configuration, parse and I/O errors

int ExitFor(vxa_status status) {
  switch (status) {
    case VXA_OK: return kExitOk;
    case VXA_ERR_RECONCILE:
    case VXA_ERR_VALIDATION: return kExitFailure;
    default: return kExitConfig;
  }
}

int Report(const char* cmd, vxa_status status) {
  std::fprintf(stderr, "voxanon %s: %s error: %s\n", cmd,
               vxa_status_name(status), vxa_last_error());
  return ExitFor(status);
}

// Owns a malloc'ed string returned by the library.
struct LibString {
  char* ptr = nullptr;
  ~LibString() { vxa_string_free(ptr); }
  std::string str() const { return ptr ? ptr : ""; }
};

bool WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
  return static_cast<bool>(out);
}

void LogParam(const char* cmd, const std::string& name, const std::string& value,
              bool defaulted) {
  std::fprintf(stderr, "voxanon %s: %s=%s%s\n", cmd, name.c_str(),
               value.c_str(), defaulted ? " (default)" : "");
}

// Shortest decimal that reads back as `v`.
std::string Num(double v) {
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

uint64_t DefaultSeed(bool* from_env) {
  *from_env = false;
  const char* env = std::getenv("VOXANON_SEED");
  if (env == nullptr || *env == '\0') return 0;
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (errno != 0 || *end != '\0') {
    std::fprintf(stderr, "voxanon: ignoring malformed VOXANON_SEED '%s'\n", env);
    return 0;
  }
  *from_env = true;
  return v;
}

// Loads `path` if it exists, otherwise starts an empty table.
vxa_status OpenResults(const std::string& path, vxa_results** out) {
  if (std::filesystem::exists(path)) return vxa_results_load(path.c_str(), out);
  return vxa_results_new(out);
}

vxa_status SaveResults(const vxa_results* results, const std::string& path) {
  LibString text;
  const vxa_status st = vxa_results_emit(results, "plain", &text.ptr);
  if (st != VXA_OK) return st;
  if (!WriteText(path, text.str())) {
    std::fprintf(stderr, "voxanon: cannot write %s\n", path.c_str());
    return VXA_ERR_IO;
  }
  return VXA_OK;
}

// ---------------------------------------------------------------- anonymize

struct AnonymizeArgs {
  std::string manifest, out_dir, report;
  double alpha = 0, frame_ms = 0, hop_ms = 0, clamp = 0, preemphasis = 0;
  int lpc_order = 0, jobs = 1;
  std::string window;
};

int RunAnonymize(const AnonymizeArgs& a, const CLI::App& sub) {
  const char* cmd = "anonymize";
  vxa_mcadams_params p;
  vxa_mcadams_params_default(&p);
  auto given = [&](const char* name) { return sub.count(name) > 0; };
  if (given("--alpha")) p.alpha = a.alpha;
  if (given("--lpc-order")) p.lpc_order = a.lpc_order;
  if (given("--frame-ms")) p.frame_ms = a.frame_ms;
  if (given("--hop-ms")) p.hop_ms = a.hop_ms;
  if (given("--clamp")) p.stability_clamp = a.clamp;
  if (given("--preemphasis")) p.preemphasis = a.preemphasis;
  if (given("--window")) {
    p.window = a.window == "rectangular" ? VXA_WINDOW_RECTANGULAR : VXA_WINDOW_HANN;
  }
  LogParam(cmd, "alpha", Num(p.alpha), !given("--alpha"));
  LogParam(cmd, "lpc_order", std::to_string(p.lpc_order), !given("--lpc-order"));
  LogParam(cmd, "frame_ms", Num(p.frame_ms), !given("--frame-ms"));
  LogParam(cmd, "hop_ms", Num(p.hop_ms), !given("--hop-ms"));
  LogParam(cmd, "window", p.window == VXA_WINDOW_HANN ? "hann" : "rectangular",
           !given("--window"));
  LogParam(cmd, "clamp", Num(p.stability_clamp), !given("--clamp"));
  LogParam(cmd, "preemphasis", Num(p.preemphasis), !given("--preemphasis"));
  LogParam(cmd, "jobs", std::to_string(a.jobs), !given("--jobs"));

  const std::string report_path =
      a.report.empty() ? (std::filesystem::path(a.out_dir) / "report.json").string()
                       : a.report;
  LogParam(cmd, "report", report_path, a.report.empty());

  LibString json;
  size_t failed = 0;
  const vxa_status st = vxa_mcadams_anonymize_corpus(
      a.manifest.c_str(), a.out_dir.c_str(), &p, a.jobs, &json.ptr, &failed);
  if (st != VXA_OK) return Report(cmd, st);
  if (!WriteText(report_path, json.str())) {
    std::fprintf(stderr, "voxanon %s: cannot write %s\n", cmd, report_path.c_str());
    return kExitConfig;
  }
  const nlohmann::json j = nlohmann::json::parse(json.str());
  std::printf("processed %zu files, %zu failed, %zu clipped samples\n",
              j.at("processed").get<size_t>(), failed,
              j.at("clipped").get<size_t>());
  for (const auto& f : j.at("files")) {
    if (f.at("status") != "ok") {
      std::fprintf(stderr, "voxanon %s: %s: %s\n", cmd,
                   f.at("utterance_id").get<std::string>().c_str(),
                   f.value("error", std::string()).c_str());
    }
  }
  return failed == 0 ? kExitOk : kExitFailure;
}

// --------------------------------------------------------------- anon-embed

struct AnonEmbedArgs {
  std::string embeddings, other, pool, out, tag, audit;
  int n_farthest = 0, n_subset = 0;
  uint64_t seed = 0;
  bool length_norm = false;
};

int RunAnonEmbed(const AnonEmbedArgs& a, const CLI::App& sub) {
  const char* cmd = "anon-embed";
  vxa_pool_params p;
  vxa_pool_params_default(&p);
  if (sub.count("--n-farthest")) p.n_farthest = a.n_farthest;
  if (sub.count("--n-subset")) p.n_subset = a.n_subset;
  bool from_env = false;
  p.rng_seed = sub.count("--seed") ? a.seed : DefaultSeed(&from_env);
  p.length_normalize = a.length_norm ? 1 : 0;

  LogParam(cmd, "tag", a.tag, false);
  LogParam(cmd, "n_farthest", std::to_string(p.n_farthest), !sub.count("--n-farthest"));
  LogParam(cmd, "n_subset", std::to_string(p.n_subset), !sub.count("--n-subset"));
  LogParam(cmd, "seed",
           std::to_string(p.rng_seed) + (from_env ? " (VOXANON_SEED)" : ""),
           !sub.count("--seed") && !from_env);
  LogParam(cmd, "length_norm", a.length_norm ? "true" : "false", !a.length_norm);
  const std::string audit_path = a.audit.empty() ? a.out + ".audit.json" : a.audit;
  LogParam(cmd, "audit", audit_path, a.audit.empty());

  LibString audit;
  const vxa_status st = vxa_anon_embed_files(
      a.embeddings.c_str(), a.other.empty() ? nullptr : a.other.c_str(),
      a.pool.c_str(), &p, a.tag.c_str(), a.out.c_str(), &audit.ptr);
  if (st != VXA_OK) return Report(cmd, st);
  if (!WriteText(audit_path, audit.str())) {
    std::fprintf(stderr, "voxanon %s: cannot write %s\n", cmd, audit_path.c_str());
    return kExitConfig;
  }
  return kExitOk;
}

// ----------------------------------------------------------------- eval-asv

struct EvalAsvArgs {
  std::string scores, trials, metadata, gender, expected;
  std::string dataset, enr = "o", trl = "o", emit, results;
};

int RunEvalAsv(const EvalAsvArgs& a) {
  const char* cmd = "eval-asv";
  if (a.metadata.empty() != a.gender.empty()) {
    std::fprintf(stderr, "voxanon %s: --metadata and --gender go together\n", cmd);
    return kExitConfig;
  }
  if (!a.expected.empty()) {
    LibString json;
    size_t issues = 0;
    const vxa_status st = vxa_trials_check_counts(
        a.trials.c_str(), a.metadata.empty() ? nullptr : a.metadata.c_str(),
        a.expected.c_str(), &json.ptr, &issues);
    if (st != VXA_OK) return Report(cmd, st);
    if (issues > 0) {
      for (const auto& d : nlohmann::json::parse(json.str()).at("discrepancies")) {
        std::fprintf(stderr, "voxanon %s: %s\n", cmd, d.get<std::string>().c_str());
      }
      return kExitFailure;
    }
  }

  vxa_scores* scores = nullptr;
  vxa_status st = vxa_scores_from_files(
      a.scores.c_str(), a.trials.c_str(),
      a.metadata.empty() ? nullptr : a.metadata.c_str(),
      a.gender.empty() ? nullptr : a.gender.c_str(), &scores);
  if (st != VXA_OK) return Report(cmd, st);
  double eer = 0, threshold = 0, cllr = 0, cllr_min = 0;
  st = vxa_eer(scores, &eer, &threshold);
  if (st == VXA_OK) st = vxa_cllr_min(scores, &cllr_min);
  if (st == VXA_OK) st = vxa_cllr(scores, &cllr);
  size_t n_tar = 0, n_imp = 0;
  vxa_scores_counts(scores, &n_tar, &n_imp);
  vxa_scores_free(scores);
  if (st != VXA_OK) return Report(cmd, st);

  std::printf("trials    %zu target, %zu nontarget\n", n_tar, n_imp);
  std::printf("EER,%%     %.3f\n", eer);
  std::printf("Cllr_min  %.3f\n", cllr_min);
  std::printf("Cllr      %.3f\n", cllr);

  if (a.emit.empty() && a.results.empty()) return kExitOk;
  if (a.dataset.empty()) {
    std::fprintf(stderr, "voxanon %s: --emit/--append-results need --dataset\n", cmd);
    return kExitConfig;
  }
  const std::string gender = a.gender.empty() ? "all" : a.gender;
  vxa_results* row = nullptr;
  st = vxa_results_new(&row);
  if (st == VXA_OK) {
    st = vxa_results_add_asv(row, a.dataset.c_str(), a.enr[0], a.trl[0],
                             gender.c_str(), eer, cllr_min, cllr, a.scores.c_str());
  }
  if (st == VXA_OK && !a.emit.empty()) {
    LibString text;
    st = vxa_results_emit(row, a.emit.c_str(), &text.ptr);
    if (st == VXA_OK) std::fputs(text.str().c_str(), stdout);
  }
  vxa_results_free(row);
  if (st != VXA_OK) return Report(cmd, st);

  if (!a.results.empty()) {
    vxa_results* table = nullptr;
    st = OpenResults(a.results, &table);
    if (st == VXA_OK) {
      st = vxa_results_add_asv(table, a.dataset.c_str(), a.enr[0], a.trl[0],
                               gender.c_str(), eer, cllr_min, cllr,
                               a.scores.c_str());
    }
    if (st == VXA_OK) st = SaveResults(table, a.results);
    vxa_results_free(table);
    if (st != VXA_OK) return Report(cmd, st);
  }
  return kExitOk;
}

// ----------------------------------------------------------------- eval-asr

struct EvalAsrArgs {
  std::string ref, hyp, json, dataset, condition = "o", results;
  bool per_utt = false;
};

int RunEvalAsr(const EvalAsrArgs& a) {
  const char* cmd = "eval-asr";
  vxa_wer w;
  LibString details;
  vxa_status st = vxa_wer_files(a.ref.c_str(), a.hyp.c_str(), &w, &details.ptr);
  if (st != VXA_OK) return Report(cmd, st);
  const nlohmann::ordered_json j = nlohmann::ordered_json::parse(details.str());
  for (const auto& id : j.at("unused_references")) {
    std::fprintf(stderr, "voxanon %s: warning: reference %s has no hypothesis\n",
                 cmd, id.get<std::string>().c_str());
  }
  if (a.per_utt) {
    for (const auto& [id, b] : j.at("per_utterance").items()) {
      std::printf("%s  %.2f  sub %" PRId64 " del %" PRId64 " ins %" PRId64
                  " ref %" PRId64 "\n",
                  id.c_str(), 100.0 * b.at("wer").get<double>(),
                  b.at("n_sub").get<int64_t>(), b.at("n_del").get<int64_t>(),
                  b.at("n_ins").get<int64_t>(), b.at("n_ref").get<int64_t>());
    }
  }
  std::printf("WER,%%  %.2f  [ %" PRId64 " / %" PRId64 ", %" PRId64 " ins, %" PRId64
              " del, %" PRId64 " sub ]\n",
              100.0 * w.wer, w.n_sub + w.n_del + w.n_ins, w.n_ref, w.n_ins,
              w.n_del, w.n_sub);
  if (!a.json.empty() && !WriteText(a.json, details.str())) {
    std::fprintf(stderr, "voxanon %s: cannot write %s\n", cmd, a.json.c_str());
    return kExitConfig;
  }
  if (!a.results.empty()) {
    if (a.dataset.empty()) {
      std::fprintf(stderr, "voxanon %s: --append-results needs --dataset\n", cmd);
      return kExitConfig;
    }
    vxa_results* table = nullptr;
    st = OpenResults(a.results, &table);
    if (st == VXA_OK) {
      st = vxa_results_add_wer(table, a.dataset.c_str(), a.condition[0],
                               100.0 * w.wer, a.hyp.c_str());
    }
    if (st == VXA_OK) st = SaveResults(table, a.results);
    vxa_results_free(table);
    if (st != VXA_OK) return Report(cmd, st);
  }
  return kExitOk;
}

// ----------------------------------------------------------------- validate

int RunValidate(const std::string& mapping, const std::string& json_path) {
  const char* cmd = "validate";
  LibString json;
  size_t violations = 0;
  const vxa_status st =
      vxa_validate_mapping_file(mapping.c_str(), &json.ptr, &violations);
  if (st != VXA_OK) return Report(cmd, st);
  const nlohmann::json j = nlohmann::json::parse(json.str());
  for (const auto& v : j.at("violations")) {
    std::printf("rule %d: %s\n", v.at("rule").get<int>(),
                v.at("message").get<std::string>().c_str());
  }
  std::printf("%zu records, %zu violations\n", j.at("records").get<size_t>(),
              violations);
  if (!json_path.empty() && !WriteText(json_path, json.str())) {
    std::fprintf(stderr, "voxanon %s: cannot write %s\n", cmd, json_path.c_str());
    return kExitConfig;
  }
  return violations == 0 ? kExitOk : kExitFailure;
}

// ------------------------------------------------------------------- report

int RunReport(const std::string& results, const std::string& format) {
  const char* cmd = "report";
  vxa_results* table = nullptr;
  vxa_status st = vxa_results_load(results.c_str(), &table);
  if (st != VXA_OK) return Report(cmd, st);
  LibString text;
  st = vxa_results_emit(table, format.c_str(), &text.ptr);
  vxa_results_free(table);
  if (st != VXA_OK) return Report(cmd, st);
  std::fputs(text.str().c_str(), stdout);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"voxanon: speaker anonymization and evaluation toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", vxa_version());

  AnonymizeArgs an;
  CLI::App* anonymize = app.add_subcommand(
      "anonymize", "McAdams-coefficient anonymization of a WAV manifest");
  anonymize->add_option("--manifest", an.manifest, "lines of '<utt-id> <wav-path>'")
      ->required();
  anonymize->add_option("--out", an.out_dir, "output directory")->required();
  anonymize->add_option("--alpha", an.alpha, "McAdams coefficient (default 0.8)");
  anonymize->add_option("--lpc-order", an.lpc_order, "LPC order (default 20)")
      ->check(CLI::PositiveNumber);
  anonymize->add_option("--frame-ms", an.frame_ms, "frame length in ms (default 20)");
  anonymize->add_option("--hop-ms", an.hop_ms, "hop in ms (default 10)");
  anonymize->add_option("--window", an.window, "hann or rectangular (default hann)")
      ->check(CLI::IsMember({"hann", "rectangular"}));
  anonymize->add_option("--clamp", an.clamp, "pole modulus clamp (default 0.998)");
  anonymize->add_option("--preemphasis", an.preemphasis,
                        "pre-emphasis coefficient, 0 disables (default 0)");
  anonymize->add_option("--jobs", an.jobs, "parallel files (default 1)")
      ->check(CLI::PositiveNumber);
  anonymize->add_option("--report", an.report,
                        "JSON run report (default <out>/report.json)");

  AnonEmbedArgs ae;
  CLI::App* anon_embed = app.add_subcommand(
      "anon-embed", "replace speaker embeddings by pool-derived pseudo-speakers");
  anon_embed->add_option("--embeddings", ae.embeddings,
                         "lines of '<utt-id> <spk-id> <v1> ... <vD>'")
      ->required();
  anon_embed->add_option("--other", ae.other,
                         "utterances of the opposite tag (default: --embeddings)");
  anon_embed->add_option("--pool", ae.pool, "external speaker pool")->required();
  anon_embed->add_option("--out", ae.out, "pseudo-embedding output file")->required();
  anon_embed->add_option("--tag", ae.tag, "enrollment or trial")
      ->required()
      ->check(CLI::IsMember({"enrollment", "trial"}));
  anon_embed->add_option("--n-farthest", ae.n_farthest, "stage-1 size (default 200)");
  anon_embed->add_option("--n-subset", ae.n_subset, "stage-2 size (default 100)");
  anon_embed->add_option("--seed", ae.seed, "RNG seed (default $VOXANON_SEED or 0)");
  anon_embed->add_flag("--length-norm", ae.length_norm,
                       "scale pseudo vectors to unit norm");
  anon_embed->add_option("--audit", ae.audit,
                         "assignment audit JSON (default <out>.audit.json)");

  EvalAsvArgs ev;
  CLI::App* eval_asv = app.add_subcommand(
      "eval-asv", "EER, Cllr_min and Cllr of a score file");
  eval_asv->add_option("--scores", ev.scores, "lines of '<enroll-id> <test-utt> <score>'")
      ->required();
  eval_asv->add_option("--trials", ev.trials,
                       "lines of '<enroll-id> <test-utt> target|nontarget'")
      ->required();
  eval_asv->add_option("--metadata", ev.metadata, "lines of '<speaker-id> <gender>'");
  eval_asv->add_option("--gender", ev.gender, "evaluate one metadata partition");
  eval_asv->add_option("--expected", ev.expected,
                       "expected trial counts, checked before scoring");
  eval_asv->add_option("--dataset", ev.dataset, "dataset name for table rows");
  eval_asv->add_option("--enr", ev.enr, "enrollment condition o|a (default o)")
      ->check(CLI::IsMember({"o", "a"}));
  eval_asv->add_option("--trl", ev.trl, "trial condition o|a (default o)")
      ->check(CLI::IsMember({"o", "a"}));
  eval_asv->add_option("--emit", ev.emit, "print the table row: plain or latex")
      ->check(CLI::IsMember({"plain", "latex"}));
  eval_asv->add_option("--append-results", ev.results,
                       "results file to append the row to");

  EvalAsrArgs er;
  CLI::App* eval_asr = app.add_subcommand(
      "eval-asr", "corpus word error rate");
  eval_asr->add_option("--ref", er.ref, "reference transcripts '<utt-id> words...'")
      ->required();
  eval_asr->add_option("--hyp", er.hyp, "hypothesis transcripts")->required();
  eval_asr->add_flag("--per-utt", er.per_utt, "print per-utterance breakdown");
  eval_asr->add_option("--json", er.json, "write the breakdown as JSON");
  eval_asr->add_option("--dataset", er.dataset, "dataset name for table rows");
  eval_asr->add_option("--condition", er.condition, "o|a (default o)")
      ->check(CLI::IsMember({"o", "a"}));
  eval_asr->add_option("--append-results", er.results,
                       "results file to append the row to");

  std::string mapping, mapping_json;
  CLI::App* validate = app.add_subcommand(
      "validate", "check a pseudo-speaker mapping against the assignment rules");
  validate->add_option("--mapping", mapping,
                       "lines of '<utt-id> <spk-id> enrollment|trial <pseudo-id>'")
      ->required();
  validate->add_option("--json", mapping_json, "write the report as JSON");

  std::string results, format = "plain";
  CLI::App* report = app.add_subcommand("report", "print a results table");
  report->add_option("--results", results, "results file")->required();
  report->add_option("--format", format, "plain or latex (default plain)")
      ->check(CLI::IsMember({"plain", "latex"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (*anonymize) return RunAnonymize(an, *anonymize);
  if (*anon_embed) return RunAnonEmbed(ae, *anon_embed);
  if (*eval_asv) return RunEvalAsv(ev);
  if (*eval_asr) return RunEvalAsr(er);
  if (*validate) return RunValidate(mapping, mapping_json);
  if (*report) return RunReport(results, format);
  return kExitConfig;
}
