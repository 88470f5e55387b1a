#include <gtest/gtest.h>

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>

#include "elkg/pipeline/pipeline.hpp"
#include "support/seed.hpp"

using namespace elkg;

namespace {

const char* const kPrompt1Sentence =
    "The electricity consumption datasets collected in the UK include IDEAL, REFIT, and UKDALE.";
const char* const kPrompt4 = "Can you explain the load profile of house 1 in the REFIT dataset?";
const char* const kUnmatched = "What is the favourite colour of the average kettle?";

std::filesystem::path temp_file(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("elkg_pipeline_" + std::to_string(::getpid()) + "_" + name);
  std::filesystem::remove(p);
  return p;
}

}  // namespace

TEST(Ask, Prompt1Rag) {
  llm::ExtractiveMock mock;
  auto t = pipeline::ask(testkit::seed_store(), testkit::kPrompt1, llm::Mode::Rag, mock);
  EXPECT_EQ(t.mode, llm::Mode::Rag);
  EXPECT_EQ(t.intent_id, "DatasetsByCountry");
  EXPECT_EQ(t.slots.at("country"), "United Kingdom");
  ASSERT_TRUE(t.context_table);
  EXPECT_EQ(t.context_table->rows.size(), 3u);
  EXPECT_EQ(*t.context_text,
            "prefix\tcountryName\nIDEAL\tUnited Kingdom\nREFIT\tUnited Kingdom\nUKDALE\tUnited Kingdom");
  ASSERT_TRUE(t.answer);
  EXPECT_EQ(t.answer->text, kPrompt1Sentence);
  EXPECT_TRUE(t.warnings.empty());
  EXPECT_FALSE(t.error);
}

TEST(Ask, Prompt1NonRag) {
  llm::ExtractiveMock mock;
  auto t = pipeline::ask(testkit::seed_store(), testkit::kPrompt1, llm::Mode::NonRag, mock);
  EXPECT_EQ(t.mode, llm::Mode::NonRag);
  EXPECT_FALSE(t.intent_id);
  EXPECT_FALSE(t.query_text);
  EXPECT_FALSE(t.context_table);
  EXPECT_EQ(t.rendered_prompt, testkit::kPrompt1);
  EXPECT_EQ(t.answer->text, llm::kNoContextAnswer);
}

TEST(Ask, UnmatchedQuestionFallsBackToNonRag) {
  llm::ScriptedBackend b;
  b.reply(llm::Mode::NonRag, kUnmatched, "Blue.");
  auto t = pipeline::ask(testkit::seed_store(), kUnmatched, llm::Mode::Rag, b);
  EXPECT_EQ(t.requested_mode, llm::Mode::Rag);
  EXPECT_EQ(t.mode, llm::Mode::NonRag);
  EXPECT_EQ(t.answer->text, "Blue.");
  EXPECT_EQ(t.rendered_prompt, kUnmatched);
  ASSERT_EQ(t.warnings.size(), 2u);
  EXPECT_NE(t.warnings[0].find(transform::kNoIntentMatched), std::string::npos);
  EXPECT_EQ(t.warnings[1], "answered without retrieval (nonRag fallback)");
}

TEST(Ask, EmptyQuestionRejected) {
  llm::ExtractiveMock mock;
  EXPECT_THROW(pipeline::ask(testkit::seed_store(), "", llm::Mode::Rag, mock), InvalidArgument);
}

TEST(Ask, TraceIsReplayable) {
  llm::ExtractiveMock mock;
  const auto& store = testkit::seed_store();
  for (const char* q : {testkit::kPrompt1, kPrompt4}) {
    auto t = pipeline::ask(store, q, llm::Mode::Rag, mock);
    auto table = context::retrieve(store, *t.query_text);
    EXPECT_EQ(table, *t.context_table);
    EXPECT_EQ(context::serialize(table), *t.context_text);
    auto bundle = llm::PromptBundle::rag(q, *t.query_text, *t.context_text);
    bundle.attachment = t.load_profile;
    bundle.intent = llm::IntentHint{*t.intent_id, t.slots};
    EXPECT_EQ(llm::render_prompt(bundle), t.rendered_prompt);
    EXPECT_EQ(llm::generate(mock, bundle).text, t.answer->text);
  }
}

TEST(Ask, StoreIsNotMutated) {
  auto store = kg::build_graph(testkit::seed_bundle());
  auto before = store.triples();
  llm::ExtractiveMock mock;
  for (const char* q : {testkit::kPrompt1, kPrompt4, kUnmatched})
    for (auto m : {llm::Mode::Rag, llm::Mode::NonRag}) (void)pipeline::ask(store, q, m, mock);
  EXPECT_EQ(store.triples(), before);
}

TEST(Ask, TimingsTileTheTotal) {
  llm::ScriptedBackend slow;
  slow.set_default("ok");
  slow.set_delay(std::chrono::milliseconds(15));
  auto t = pipeline::ask(testkit::seed_store(), testkit::kPrompt1, llm::Mode::Rag, slow);
  const auto& s = t.timings;
  for (double v : {s.transform_ms, s.retrieve_ms, s.serialize_ms, s.render_ms, s.generate_ms}) EXPECT_GE(v, 0.0);
  EXPECT_GE(s.generate_ms, 14.0);
  EXPECT_LE(std::abs(s.stage_sum() - s.total_ms), 0.05 * s.total_ms);
}

TEST(Ask, Prompt4AttachesTheProfile) {
  llm::ExtractiveMock mock;
  auto t = pipeline::ask(testkit::seed_store(), kPrompt4, llm::Mode::Rag, mock);
  EXPECT_EQ(t.intent_id, "LoadProfileOfHouse");
  EXPECT_EQ(t.slots.at("house"), "REFIT_1");
  ASSERT_TRUE(t.load_profile);
  EXPECT_EQ(*t.load_profile, kg::get_load_profile(testkit::seed_store(), "REFIT_1"));
  EXPECT_NE(t.rendered_prompt.find("\n\nLoad Profile:\n0,"), std::string::npos);
  EXPECT_NE(t.answer->text.find("REFIT_1"), std::string::npos);
}

TEST(Ask, UnknownHouseWarnsInsteadOfFailing) {
  llm::ExtractiveMock mock;
  auto t = pipeline::ask(testkit::seed_store(), "Can you explain the load profile of house 99 in the REFIT dataset?",
                         llm::Mode::Rag, mock);
  EXPECT_FALSE(t.load_profile);
  ASSERT_EQ(t.warnings.size(), 1u);
  EXPECT_NE(t.warnings[0].find("REFIT_99"), std::string::npos);
  EXPECT_EQ(t.answer->text, llm::kNoRecordsAnswer);
}

TEST(Ask, OptionsCapsAndQuerySection) {
  llm::ExtractiveMock mock;
  pipeline::AskOptions o;
  o.max_rows = 1;
  o.include_query = false;
  auto t = pipeline::ask(testkit::seed_store(), testkit::kPrompt1, llm::Mode::Rag, mock, o);
  EXPECT_EQ(*t.context_text, "prefix\tcountryName\nIDEAL\tUnited Kingdom\n... (2 more rows omitted)");
  EXPECT_TRUE(t.context_table->truncated);
  EXPECT_EQ(t.rendered_prompt.find("Query:"), std::string::npos);
  EXPECT_EQ(t.answer->text, "The electricity consumption datasets collected in the UK include IDEAL.");
}

TEST(Ask, BackendFailureKeepsThePartialTrace) {
  llm::ScriptedBackend b;
  b.set_failure(std::make_exception_ptr(llm::Timeout("scripted")));
  try {
    (void)pipeline::ask(testkit::seed_store(), testkit::kPrompt1, llm::Mode::Rag, b);
    FAIL() << "expected AskFailed";
  } catch (const pipeline::AskFailed& e) {
    const auto& t = e.trace();
    EXPECT_TRUE(t.context_text);
    EXPECT_FALSE(t.rendered_prompt.empty());
    EXPECT_FALSE(t.answer);
    ASSERT_TRUE(t.error);
    EXPECT_NE(t.error->find("timed out"), std::string::npos);
    EXPECT_THROW(e.rethrow_cause(), llm::Timeout);
  }
}

TEST(Ask, BrokenTemplateFallsBackWithDiagnostic) {
  auto j = nlohmann::json::parse(transform::kDefaultCatalogJson);
  for (auto& intent : j["intents"])
    if (intent["id"] == "DatasetsByCountry") intent["query"] = {"SELECT ?x WHERE { ?x ?y \"${country}\" "};
  auto catalog = transform::Catalog::from_json(j);
  pipeline::AskOptions o;
  o.catalog = &catalog;
  llm::ExtractiveMock mock;
  auto t = pipeline::ask(testkit::seed_store(), testkit::kPrompt1, llm::Mode::Rag, mock, o);
  EXPECT_EQ(t.mode, llm::Mode::NonRag);
  EXPECT_EQ(t.intent_id, "DatasetsByCountry");
  EXPECT_FALSE(t.query_text);
  ASSERT_EQ(t.warnings.size(), 2u);
  EXPECT_NE(t.warnings[0].find("does not parse"), std::string::npos) << t.warnings[0];
}

TEST(Ask, LlmQueryWriterFallback) {
  llm::ScriptedBackend writer("writer");
  writer.enqueue("Here you go:\n```sparql\n" + testkit::query_text("prompt1") + "```\n");
  pipeline::AskOptions o;
  o.query_writer = &writer;
  llm::ExtractiveMock mock;
  const char* q = "Which recordings were made in Britain, please?";
  auto t = pipeline::ask(testkit::seed_store(), q, llm::Mode::Rag, mock, o);
  EXPECT_EQ(t.mode, llm::Mode::Rag);
  EXPECT_EQ(t.intent_id, transform::kLlmGeneratedIntent);
  EXPECT_EQ(t.context_table->rows.size(), 3u);

  writer.enqueue("I would rather not write a query.");
  auto r = pipeline::ask(testkit::seed_store(), q, llm::Mode::Rag, mock, o);
  EXPECT_EQ(r.mode, llm::Mode::NonRag);
  ASSERT_FALSE(r.warnings.empty());
  EXPECT_EQ(r.warnings[0].rfind("GeneratedQueryRejected: ", 0), 0u) << r.warnings[0];
}

TEST(TraceJson, ShapeAndVersion) {
  llm::ExtractiveMock mock;
  auto j = pipeline::to_json(pipeline::ask(testkit::seed_store(), kPrompt4, llm::Mode::Rag, mock));
  EXPECT_EQ(j["v"], pipeline::kTraceVersion);
  for (const char* key : {"question", "requestedMode", "mode", "intentId", "slots", "queryText", "contextTable",
                          "contextText", "loadProfile", "renderedPrompt", "answer", "timings", "warnings", "error"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j["mode"], "rag");
  EXPECT_EQ(j["loadProfile"]["household"], "REFIT_1");
  EXPECT_EQ(j["loadProfile"]["hourly"].size(), 24u);
  EXPECT_EQ(j["answer"]["backendId"], "extractive-mock");
  EXPECT_TRUE(j["answer"]["usage"].is_null());
  EXPECT_TRUE(j["error"].is_null());
  auto n = pipeline::to_json(pipeline::ask(testkit::seed_store(), kUnmatched, llm::Mode::NonRag, mock));
  EXPECT_TRUE(n["queryText"].is_null());
  EXPECT_TRUE(n["contextTable"].is_null());
  EXPECT_TRUE(n["loadProfile"].is_null());
}

TEST(TraceLog, AppendsOneLinePerTraceFromManyThreads) {
  auto path = temp_file("trace.ndjson");
  pipeline::TraceLog log(path.string());
  llm::ExtractiveMock mock;
  std::vector<std::future<void>> fs;
  for (int i = 0; i < 16; ++i)
    fs.push_back(std::async(std::launch::async, [&] {
      log.append(pipeline::ask(testkit::seed_store(), testkit::kPrompt1, llm::Mode::Rag, mock));
    }));
  for (auto& f : fs) f.get();
  std::ifstream in(path);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    auto j = nlohmann::json::parse(line);
    EXPECT_EQ(j["answer"]["text"], kPrompt1Sentence);
    ++n;
  }
  EXPECT_EQ(n, 16);
  std::filesystem::remove(path);
}

TEST(Ask, ConcurrentAsksAgreeWithSequential) {
  llm::ExtractiveMock mock;
  const auto& store = testkit::seed_store();
  std::vector<std::string> questions = {testkit::kPrompt1, kPrompt4, kUnmatched};
  std::vector<std::string> expected;
  for (const auto& q : questions) expected.push_back(pipeline::ask(store, q, llm::Mode::Rag, mock).answer->text);
  std::vector<std::future<std::string>> fs;
  for (int i = 0; i < 24; ++i)
    fs.push_back(std::async(std::launch::async, [&, i] {
      return pipeline::ask(store, questions[static_cast<std::size_t>(i) % 3], llm::Mode::Rag, mock).answer->text;
    }));
  for (int i = 0; i < 24; ++i) EXPECT_EQ(fs[static_cast<std::size_t>(i)].get(), expected[static_cast<std::size_t>(i) % 3]);
}
