#pragma once

// Prompt-suite evaluation: every (backend, prompt, mode) cell is asked through
// the pipeline, dataset mentions are extracted from the answer with a lexicon,
// and scored against the ?prefix column of the case's reference query.

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <iomanip>
#include <map>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "elkg/kg/fixture.hpp"
#include "elkg/llm/backend.hpp"
#include "elkg/pipeline/pipeline.hpp"
#include "elkg/sparql/eval.hpp"
#include "elkg/sparql/parser.hpp"

namespace elkg::eval {

inline constexpr int kReportVersion = 1;

class SuiteError : public Error {
public:
  using Error::Error;
};

// -- mentions ----------------------------------------------------------------

struct LexiconEntry {
  std::string name;  // canonical dataset prefix
  std::vector<std::string> aliases;
  bool case_sensitive = false;  // for names that are also common words ("NEED", "IDEAL")
};

using Lexicon = std::vector<LexiconEntry>;

/// Maximal runs of ASCII letters and digits.
inline std::vector<std::string> tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      cur += c;
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

inline bool same_token(const std::string& a, const std::string& b, bool case_sensitive) {
  if (a.size() != b.size()) return false;
  if (case_sensitive) return a == b;
  return std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
    return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
  });
}

/// Canonical names of the lexicon entries whose name or an alias occurs in
/// the text as a whole token sequence.
inline std::set<std::string> extract_mentions(std::string_view text, const Lexicon& lexicon) {
  const auto words = tokens(text);
  std::set<std::string> out;
  for (const auto& e : lexicon) {
    std::vector<std::string> forms{e.name};
    forms.insert(forms.end(), e.aliases.begin(), e.aliases.end());
    for (const auto& form : forms) {
      auto needle = tokens(form);
      if (needle.empty() || needle.size() > words.size()) continue;
      bool found = false;
      for (std::size_t i = 0; !found && i + needle.size() <= words.size(); ++i) {
        found = true;
        for (std::size_t k = 0; found && k < needle.size(); ++k)
          found = same_token(words[i + k], needle[k], e.case_sensitive);
      }
      if (found) {
        out.insert(e.name);
        break;
      }
    }
  }
  return out;
}

inline std::size_t overlap(const std::set<std::string>& a, const std::set<std::string>& b) {
  return static_cast<std::size_t>(std::count_if(a.begin(), a.end(), [&](const auto& x) { return b.count(x) > 0; }));
}

// -- suite -------------------------------------------------------------------

struct PromptCase {
  std::string id;
  std::string question;
  std::map<std::string, std::string> variants;  // backend id -> rephrased question
  std::string reference_query;
  std::string notes;

  [[nodiscard]] const std::string& question_for(const std::string& backend_id) const {
    auto it = variants.find(backend_id);
    return it == variants.end() ? question : it->second;
  }
};

struct CannedReply {
  std::string prompt_id;
  llm::Mode mode;
  std::string text;
};

/// Answers copied from published transcripts, replayed by a scripted backend.
struct CannedBackendSpec {
  std::string id;
  std::vector<CannedReply> replies;

  [[nodiscard]] bool covers(const std::string& prompt_id, llm::Mode mode) const {
    return std::any_of(replies.begin(), replies.end(),
                       [&](const CannedReply& r) { return r.prompt_id == prompt_id && r.mode == mode; });
  }
};

struct Suite {
  int version = 0;
  std::string name;
  Lexicon lexicon;
  std::vector<PromptCase> cases;
  std::vector<CannedBackendSpec> canned;

  [[nodiscard]] const PromptCase* find_case(const std::string& id) const {
    for (const auto& c : cases)
      if (c.id == id) return &c;
    return nullptr;
  }

  [[nodiscard]] const CannedBackendSpec* find_canned(const std::string& id) const {
    for (const auto& c : canned)
      if (c.id == id) return &c;
    return nullptr;
  }

  /// Reference query paths are resolved against base_dir.
  static Suite from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
    Suite s;
    try {
      s.version = j.at("version").get<int>();
      s.name = j.value("name", "suite");
      for (const auto& e : j.at("lexicon"))
        s.lexicon.push_back({e.at("name").get<std::string>(), e.value("aliases", std::vector<std::string>{}),
                             e.value("caseSensitive", false)});
      for (const auto& c : j.at("cases")) {
        PromptCase pc;
        pc.id = c.at("id").get<std::string>();
        pc.question = c.at("question").get<std::string>();
        pc.variants = c.value("variants", std::map<std::string, std::string>{});
        pc.notes = c.value("notes", "");
        if (c.contains("referenceQueryText")) {
          pc.reference_query = c["referenceQueryText"].get<std::string>();
        } else {
          auto path = base_dir / c.at("referenceQuery").get<std::string>();
          try {
            pc.reference_query = kg::read_file(path.string());
          } catch (const Error& e) {
            throw SuiteError("case " + pc.id + ": " + e.what());
          }
        }
        s.cases.push_back(std::move(pc));
      }
      const auto canned = j.value("cannedBackends", nlohmann::json::array());
      for (const auto& b : canned) {
        CannedBackendSpec spec{b.at("id").get<std::string>(), {}};
        for (const auto& r : b.at("replies"))
          spec.replies.push_back({r.at("prompt").get<std::string>(), llm::parse_mode(r.at("mode").get<std::string>()),
                                  r.at("text").get<std::string>()});
        s.canned.push_back(std::move(spec));
      }
    } catch (const nlohmann::json::exception& e) {
      throw SuiteError(std::string("malformed suite: ") + e.what());
    } catch (const InvalidArgument& e) {
      throw SuiteError(std::string("malformed suite: ") + e.what());
    }
    s.validate();
    return s;
  }

  static Suite from_file(const std::string& path) {
    std::string text;
    try {
      text = kg::read_file(path);
    } catch (const Error& e) {
      throw SuiteError(e.what());
    }
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw SuiteError("suite is not JSON: " + std::string(e.what()));
    }
    return from_json(j, std::filesystem::path(path).parent_path());
  }

  /// Lexicon non-empty, ids unique, reference queries parse, canned replies
  /// name known prompts.
  void validate() const {
    if (lexicon.empty()) throw SuiteError("lexicon must not be empty");
    std::set<std::string> ids;
    for (const auto& c : cases) {
      if (!ids.insert(c.id).second) throw SuiteError("duplicate case id: " + c.id);
      try {
        (void)sparql::parse(c.reference_query);
      } catch (const Error& e) {
        throw SuiteError("case " + c.id + ": reference query does not parse: " + e.what());
      }
    }
    for (const auto& b : canned)
      for (const auto& r : b.replies)
        if (!ids.count(r.prompt_id)) throw SuiteError("canned backend " + b.id + " names unknown prompt " + r.prompt_id);
  }
};

/// A scripted backend replaying the canned replies for the suite's questions.
inline std::shared_ptr<llm::ScriptedBackend> make_canned_backend(const Suite& suite, const CannedBackendSpec& spec) {
  auto b = std::make_shared<llm::ScriptedBackend>(spec.id);
  for (const auto& r : spec.replies) b->reply(r.mode, suite.find_case(r.prompt_id)->question_for(spec.id), r.text);
  return b;
}

/// Distinct values of the reference query's ?prefix column.
inline std::set<std::string> ground_truth(const rdf::Store& store, const PromptCase& c) {
  auto q = sparql::parse(c.reference_query);
  auto table = sparql::evaluate(store, q);
  auto it = std::find(table.header.begin(), table.header.end(), "prefix");
  if (it == table.header.end()) throw SuiteError("case " + c.id + ": reference query does not project ?prefix");
  auto col = static_cast<std::size_t>(it - table.header.begin());
  std::set<std::string> out;
  for (const auto& row : table.rows)
    if (row[col]) out.insert(row[col]->value());
  return out;
}

// -- running -----------------------------------------------------------------

enum class CellStatus { Ok, Error, Skipped };

inline std::string to_string(CellStatus s) {
  switch (s) {
    case CellStatus::Ok: return "ok";
    case CellStatus::Error: return "error";
    case CellStatus::Skipped: return "skipped";
  }
  return "?";
}

struct EvalRow {
  std::string backend_id;
  std::string prompt_id;
  llm::Mode mode = llm::Mode::NonRag;
  std::string question;
  CellStatus status = CellStatus::Ok;
  std::string error;
  std::string answer;
  std::set<std::string> mentioned;
  std::set<std::string> truth;
  std::optional<std::size_t> overlap_with_other_mode;
  double precision = 0;
  double recall = 0;
  bool precision_defined = false;  // false when nothing was mentioned
  bool recall_defined = false;     // false when the truth set is empty
  double latency_ms = 0;
  std::string notes;
  std::vector<std::string> warnings;
};

struct BackendRef {
  std::string id;
  std::shared_ptr<const llm::Backend> backend;  // null: unknown id, every cell errors
};

struct RunOptions {
  std::vector<llm::Mode> modes{llm::Mode::NonRag, llm::Mode::Rag};
  std::size_t parallelism = 4;
  pipeline::TraceLog* trace_log = nullptr;
  pipeline::AskOptions ask;
};

struct Report {
  std::string suite_name;
  std::size_t triple_count = 0;
  std::vector<std::string> backends;
  std::vector<llm::Mode> modes;
  std::vector<EvalRow> rows;

  [[nodiscard]] std::size_t count(CellStatus s) const {
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [&](const auto& r) { return r.status == s; }));
  }

  [[nodiscard]] const EvalRow* find(const std::string& backend, const std::string& prompt, llm::Mode mode) const {
    for (const auto& r : rows)
      if (r.backend_id == backend && r.prompt_id == prompt && r.mode == mode) return &r;
    return nullptr;
  }
};

inline void score(EvalRow& row) {
  auto hits = static_cast<double>(overlap(row.mentioned, row.truth));
  row.precision_defined = !row.mentioned.empty();
  row.recall_defined = !row.truth.empty();
  row.precision = row.precision_defined ? hits / static_cast<double>(row.mentioned.size()) : 0;
  row.recall = row.recall_defined ? hits / static_cast<double>(row.truth.size()) : 0;
}

inline Report run_suite(const rdf::Store& store, const Suite& suite, const std::vector<BackendRef>& backends,
                        const RunOptions& options = {}) {
  Report report;
  report.suite_name = suite.name;
  report.triple_count = store.size();
  report.modes = options.modes;
  for (const auto& b : backends) report.backends.push_back(b.id);

  std::map<std::string, std::set<std::string>> truth;
  std::map<std::string, std::string> truth_error;
  for (const auto& c : suite.cases) {
    try {
      truth[c.id] = ground_truth(store, c);
    } catch (const Error& e) {
      truth_error[c.id] = e.what();
    }
  }

  for (const auto& b : backends)
    for (const auto& c : suite.cases)
      for (auto mode : options.modes) {
        EvalRow row;
        row.backend_id = b.id;
        row.prompt_id = c.id;
        row.mode = mode;
        row.question = c.question_for(b.id);
        row.notes = c.notes;
        if (auto t = truth.find(c.id); t != truth.end()) row.truth = t->second;
        report.rows.push_back(std::move(row));
      }

  auto run_cell = [&](EvalRow& row) {
    const auto* backend = [&]() -> const BackendRef* {
      for (const auto& b : backends)
        if (b.id == row.backend_id) return &b;
      return nullptr;
    }();
    if (auto te = truth_error.find(row.prompt_id); te != truth_error.end()) {
      row.status = CellStatus::Error;
      row.error = "ground truth failed: " + te->second;
      return;
    }
    if (!backend->backend) {
      row.status = CellStatus::Error;
      row.error = "unknown backend: " + row.backend_id;
      return;
    }
    if (const auto* canned = suite.find_canned(row.backend_id); canned && !canned->covers(row.prompt_id, row.mode)) {
      row.status = CellStatus::Skipped;
      row.error = "no canned answer for this cell";
      return;
    }
    try {
      auto trace = pipeline::ask(store, row.question, row.mode, *backend->backend, options.ask);
      row.answer = trace.answer->text;
      row.latency_ms = trace.answer->latency_ms;
      row.warnings = trace.warnings;
      row.mentioned = extract_mentions(row.answer, suite.lexicon);
      score(row);
      if (options.trace_log) options.trace_log->append(trace);
    } catch (const pipeline::AskFailed& e) {
      row.status = CellStatus::Error;
      row.error = e.what();
      if (options.trace_log) options.trace_log->append(e.trace());
    } catch (const std::exception& e) {
      row.status = CellStatus::Error;
      row.error = e.what();
    }
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < report.rows.size(); i = next++) run_cell(report.rows[i]);
  };
  const auto n = std::max<std::size_t>(1, std::min(options.parallelism, report.rows.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (auto& row : report.rows) {
    if (row.status != CellStatus::Ok) continue;
    auto other_mode = row.mode == llm::Mode::Rag ? llm::Mode::NonRag : llm::Mode::Rag;
    const auto* other = report.find(row.backend_id, row.prompt_id, other_mode);
    if (other && other->status == CellStatus::Ok) row.overlap_with_other_mode = overlap(row.mentioned, other->mentioned);
  }
  return report;
}

// -- rendering ---------------------------------------------------------------

inline nlohmann::json to_json(const EvalRow& r) {
  auto opt_str = [](const std::string& s) { return s.empty() ? nlohmann::json(nullptr) : nlohmann::json(s); };
  return {{"backendId", r.backend_id},
          {"promptId", r.prompt_id},
          {"mode", llm::to_string(r.mode)},
          {"question", r.question},
          {"status", to_string(r.status)},
          {"error", opt_str(r.error)},
          {"answer", r.status == CellStatus::Ok ? nlohmann::json(r.answer) : nlohmann::json(nullptr)},
          {"mentioned", r.mentioned},
          {"truth", r.truth},
          {"overlapWithOtherMode",
           r.overlap_with_other_mode ? nlohmann::json(*r.overlap_with_other_mode) : nlohmann::json(nullptr)},
          {"precision", r.precision},
          {"recall", r.recall},
          {"precisionDefined", r.precision_defined},
          {"recallDefined", r.recall_defined},
          {"latencyMs", r.status == CellStatus::Ok ? nlohmann::json(r.latency_ms) : nlohmann::json(nullptr)},
          {"notes", r.notes},
          {"warnings", r.warnings}};
}

inline nlohmann::json to_json(const Report& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) rows.push_back(to_json(r));
  std::vector<std::string> modes;
  for (auto m : report.modes) modes.push_back(llm::to_string(m));
  return {{"v", kReportVersion},
          {"suite", report.suite_name},
          {"tripleCount", report.triple_count},
          {"backends", report.backends},
          {"modes", modes},
          {"rows", rows},
          {"summary",
           {{"cells", report.rows.size()},
            {"ok", report.count(CellStatus::Ok)},
            {"failed", report.count(CellStatus::Error)},
            {"skipped", report.count(CellStatus::Skipped)}}}};
}

/// One line per (backend, prompt): mention counts per mode, overlap, and
/// precision/recall of the rag answer against the knowledge graph.
inline std::string to_text(const Report& report) {
  auto cell = [](const EvalRow* r) -> std::string {
    if (!r) return "-";
    if (r->status == CellStatus::Error) return "error";
    if (r->status == CellStatus::Skipped) return "-";
    return std::to_string(r->mentioned.size()) + (r->mentioned.size() == 1 ? " dataset" : " datasets");
  };
  auto fraction = [](const EvalRow* r, bool precision) -> std::string {
    if (!r || r->status != CellStatus::Ok) return "-";
    bool defined = precision ? r->precision_defined : r->recall_defined;
    std::ostringstream s;
    s << std::fixed << std::setprecision(2) << (precision ? r->precision : r->recall) << (defined ? "" : "*");
    return s.str();
  };
  std::vector<std::vector<std::string>> lines{
      {"Backend", "Prompt", "non-RAG Answer", "RAG Answer", "Overlap", "RAG P", "RAG R", "Notes"}};
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& r : report.rows) {
    if (!seen.insert({r.backend_id, r.prompt_id}).second) continue;
    const auto* nr = report.find(r.backend_id, r.prompt_id, llm::Mode::NonRag);
    const auto* rg = report.find(r.backend_id, r.prompt_id, llm::Mode::Rag);
    std::string ov = "-";
    if (rg && rg->overlap_with_other_mode) ov = std::to_string(*rg->overlap_with_other_mode);
    std::string notes = r.notes;
    for (const auto* x : {nr, rg})
      if (x && x->status == CellStatus::Error) notes += (notes.empty() ? "" : " ") + ("[" + llm::to_string(x->mode) + ": " + x->error + "]");
    lines.push_back({r.backend_id, r.prompt_id, cell(nr), cell(rg), ov, fraction(rg, true), fraction(rg, false), notes});
  }
  std::vector<std::size_t> width(lines[0].size(), 0);
  for (const auto& l : lines)
    for (std::size_t i = 0; i + 1 < l.size(); ++i) width[i] = std::max(width[i], l[i].size());
  std::string out;
  for (const auto& l : lines) {
    std::string line;
    for (std::size_t i = 0; i < l.size(); ++i) {
      line += l[i];
      if (i + 1 < l.size()) line += std::string(width[i] - l[i].size() + 2, ' ');
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  }
  out += std::to_string(report.rows.size()) + " cells: " + std::to_string(report.count(CellStatus::Ok)) + " ok, " +
         std::to_string(report.count(CellStatus::Error)) + " failed, " +
         std::to_string(report.count(CellStatus::Skipped)) + " skipped (* = undefined, reported as 0)\n";
  return out;
}

}  // namespace elkg::eval
