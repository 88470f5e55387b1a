#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <filesystem>
#include <nlohmann/json.hpp>

#include "elkg/kg/fixture.hpp"
#include "support/seed.hpp"

namespace fs = std::filesystem;
using namespace elkg;

namespace {

struct RunResult {
  int rc = -1;
  std::string out;
  std::string err;
};

/// Scratch directory removed at the end of each test.
class CliTest : public ::testing::Test {
protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("elkg_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  [[nodiscard]] fs::path path(const std::string& name) const { return dir_ / name; }

  static std::string quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) out += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return out + "'";
  }

  /// Runs the CLI with the given arguments (each quoted) and environment prefix.
  RunResult run(const std::vector<std::string>& args, const std::string& env = "") {
    std::string cmd = env + " " + quote(ELKG_CLI_PATH);
    for (const auto& a : args) cmd += " " + quote(a);
    cmd += " >" + quote(path("stdout").string()) + " 2>" + quote(path("stderr").string()) + " </dev/null";
    int status = std::system(cmd.c_str());
    RunResult r;
    r.rc = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = kg::read_file(path("stdout"));
    r.err = kg::read_file(path("stderr"));
    return r;
  }

  fs::path write(const std::string& name, const std::string& content) {
    kg::write_file(path(name), content);
    return path(name);
  }

private:
  fs::path dir_;
};

const char* const kPrompt1Table = "prefix\tcountryName\nIDEAL\tUnited Kingdom\nREFIT\tUnited Kingdom\nUKDALE\tUnited Kingdom\n";

}  // namespace

TEST_F(CliTest, SeedWritesBundleAndTurtle) {
  auto r = run({"seed", "--out", path("seed").string()});
  ASSERT_EQ(r.rc, 0) << r.err;
  for (const char* f : {"households.csv", "appliances.csv", "locations.csv", "profiles.csv", "seed.ttl"})
    EXPECT_TRUE(fs::exists(path("seed") / f)) << f;
  auto l = run({"load", "--kg", (path("seed") / "seed.ttl").string()});
  EXPECT_EQ(l.rc, 0) << l.err;
  EXPECT_NE(l.out.find(std::to_string(testkit::seed_store().size())), std::string::npos) << l.out;
}

TEST_F(CliTest, SeedIsIdempotent) {
  ASSERT_EQ(run({"seed", "--out", path("a").string()}).rc, 0);
  ASSERT_EQ(run({"seed", "--out", path("a").string()}).rc, 0);
  ASSERT_EQ(run({"seed", "--out", path("b").string()}).rc, 0);
  for (const auto& e : fs::directory_iterator(path("a")))
    EXPECT_EQ(kg::read_file(e.path()), kg::read_file(path("b") / e.path().filename())) << e.path();
}

TEST_F(CliTest, SeedFromSpecFile) {
  auto spec = kg::read_file(testkit::data_path("seed/fixture_spec.csv"));
  ASSERT_EQ(run({"seed", "--spec", testkit::data_path("seed/fixture_spec.csv"), "--out", path("s").string()}).rc, 0);
  auto header_only = write("empty.csv", spec.substr(0, spec.find("IDEAL,")));
  auto r = run({"seed", "--spec", header_only.string(), "--out", path("e").string()});
  EXPECT_EQ(r.rc, 0) << r.err;
  auto dup = write("dup.csv", spec + "IDEAL,1,United Kingdom,Europe,Leeds,53.8,-1.5,52426,53985,1000,0.34,238,high,2016-01-01,2016-02-01\n");
  r = run({"seed", "--spec", dup.string(), "--out", path("d").string()});
  EXPECT_EQ(r.rc, 2);
  EXPECT_NE(r.err.find("IDEAL"), std::string::npos) << r.err;
}

TEST_F(CliTest, QueryTableIsExact) {
  auto r = run({"query", "--file", testkit::data_path("queries/prompt1.rq")});
  ASSERT_EQ(r.rc, 0) << r.err;
  EXPECT_EQ(r.out, kPrompt1Table);
}

TEST_F(CliTest, QueryJsonAndInline) {
  auto r = run({"query", "--inline", testkit::query_text("prompt1"), "--format", "json"});
  ASSERT_EQ(r.rc, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["head"]["vars"], (nlohmann::json{"prefix", "countryName"}));
  EXPECT_EQ(j["results"]["bindings"].size(), 3u);
}

TEST_F(CliTest, QueryAgainstSeededFile) {
  ASSERT_EQ(run({"seed", "--out", path("s").string()}).rc, 0);
  auto r = run({"query", "--kg", (path("s") / "seed.ttl").string(), "--file", testkit::data_path("queries/prompt1.rq")});
  EXPECT_EQ(r.rc, 0) << r.err;
  EXPECT_EQ(r.out, kPrompt1Table);
}

TEST_F(CliTest, QueryNoMatchPrintsHeaderOnly) {
  auto r = run({"query", "--inline", "PREFIX schema: <https://schema.org/>\nSELECT ?h WHERE { ?h schema:name \"NOBODY_1\" }"});
  EXPECT_EQ(r.rc, 0);
  EXPECT_EQ(r.out, "h\n");
}

TEST_F(CliTest, QueryErrorsAreRcOne) {
  auto r = run({"query", "--inline", "SELECT ?x WHERE { ?x ?p }"}, "NO_COLOR=1");
  EXPECT_EQ(r.rc, 1);
  EXPECT_NE(r.err.find("line 1, column 25"), std::string::npos) << r.err;
  EXPECT_EQ(r.err.rfind("error: ", 0), 0u) << r.err;
  EXPECT_EQ(r.err.find('\033'), std::string::npos);
}

TEST_F(CliTest, UsageErrorsAreRcTwo) {
  EXPECT_EQ(run({}).rc, 2);
  EXPECT_EQ(run({"query"}).rc, 2);
  EXPECT_EQ(run({"query", "--file", "x.rq", "--inline", "SELECT"}).rc, 2);
  EXPECT_EQ(run({"query", "--file", path("missing.rq").string()}).rc, 2);
  EXPECT_EQ(run({"ask", "--question", "q", "--rag", "--no-rag"}).rc, 2);
  EXPECT_EQ(run({"query", "--inline", "SELECT ?x WHERE { ?x ?p ?o }", "--format", "xml"}).rc, 2);
  auto bad_ttl = write("bad.ttl", "<a> <b> .");
  EXPECT_EQ(run({"load", "--kg", bad_ttl.string()}).rc, 2);
}

TEST_F(CliTest, AskRag) {
  auto r = run({"ask", "--question", testkit::kPrompt1});
  ASSERT_EQ(r.rc, 0) << r.err;
  EXPECT_EQ(r.out, "The electricity consumption datasets collected in the UK include IDEAL, REFIT, and UKDALE.\n");
  EXPECT_TRUE(r.err.empty()) << r.err;
}

TEST_F(CliTest, AskNoRagWithScriptedConfig) {
  auto config = write("c.json", R"({"defaultBackend": "canned",
    "backends": [{"id": "canned", "kind": "scripted", "default": "Canned answer."}]})");
  auto r = run({"--config", config.string(), "ask", "--no-rag", "--question", testkit::kPrompt1});
  ASSERT_EQ(r.rc, 0) << r.err;
  EXPECT_EQ(r.out, "Canned answer.\n");
}

TEST_F(CliTest, AskUnmatchedWarnsAndAnswers) {
  auto r = run({"ask", "--question", "What colour is a kettle?"}, "NO_COLOR=1");
  EXPECT_EQ(r.rc, 0);
  EXPECT_NE(r.err.find("warning: "), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("nonRag fallback"), std::string::npos) << r.err;
  EXPECT_FALSE(r.out.empty());
}

TEST_F(CliTest, AskUnknownBackend) {
  auto r = run({"ask", "--backend", "nobody", "--question", "q"});
  EXPECT_EQ(r.rc, 2);
  EXPECT_NE(r.err.find("nobody"), std::string::npos);
}

TEST_F(CliTest, AskMissingKeyIsBackendError) {
  auto config = write("c.json", R"({"defaultBackend": "remote",
    "backends": [{"id": "remote", "kind": "remote-chat", "endpointUrl": "http://127.0.0.1:1/v1/chat/completions",
                  "model": "m", "apiKeyEnv": "ELKG_CLI_TEST_ABSENT_KEY"}]})");
  auto r = run({"--config", config.string(), "ask", "--question", testkit::kPrompt1}, "env -u ELKG_CLI_TEST_ABSENT_KEY");
  EXPECT_EQ(r.rc, 3);
  EXPECT_NE(r.err.find("ELKG_CLI_TEST_ABSENT_KEY"), std::string::npos) << r.err;
}

TEST_F(CliTest, ConfigWithApiKeyIsRejected) {
  auto config = write("c.json", R"({"backends": [{"id": "r", "kind": "remote-chat",
    "endpointUrl": "http://127.0.0.1:1/x", "model": "m", "apiKey": "sk-inline"}]})");
  auto r = run({"--config", config.string(), "ask", "--question", "q"});
  EXPECT_EQ(r.rc, 2);
  EXPECT_EQ(r.err.find("sk-inline"), std::string::npos);
}

TEST_F(CliTest, AskTraceOut) {
  auto trace = path("t.ndjson");
  ASSERT_EQ(run({"ask", "--question", testkit::kPrompt1, "--trace-out", trace.string()}).rc, 0);
  ASSERT_EQ(run({"ask", "--no-rag", "--question", testkit::kPrompt1, "--trace-out", trace.string()}).rc, 0);
  auto text = kg::read_file(trace);
  auto nl = text.find('\n');
  auto first = nlohmann::json::parse(text.substr(0, nl));
  auto second = nlohmann::json::parse(text.substr(nl + 1));
  EXPECT_EQ(first["v"], 1);
  EXPECT_EQ(first["mode"], "rag");
  EXPECT_EQ(second["mode"], "nonRag");
}

TEST_F(CliTest, AskShowTraceAndNoQuerySection) {
  auto r = run({"ask", "--question", testkit::kPrompt1, "--show-trace", "--no-query-section"});
  ASSERT_EQ(r.rc, 0);
  auto j = nlohmann::json::parse(r.err);
  EXPECT_EQ(j["renderedPrompt"].get<std::string>().find("Query:"), std::string::npos);
}

TEST_F(CliTest, EvalWritesReport) {
  auto report = path("report.json");
  auto r = run({"eval", "--suite", testkit::data_path("suite/prompts.json"), "--backends",
                "extractive-mock,chatgpt-4o-canned,nobody", "--out", report.string()},
               "NO_COLOR=1");
  ASSERT_EQ(r.rc, 0) << r.err;
  EXPECT_NE(r.out.find("Backend"), std::string::npos);
  EXPECT_NE(r.err.find("warning: unknown backend: nobody"), std::string::npos) << r.err;
  auto j = nlohmann::json::parse(kg::read_file(report));
  EXPECT_EQ(j["v"], 1);
  EXPECT_EQ(j["summary"]["cells"], 30);
  EXPECT_EQ(j["summary"]["failed"], 10);
}

TEST_F(CliTest, EvalModesAndBadMode) {
  auto report = path("report.json");
  auto r = run({"eval", "--suite", testkit::data_path("suite/prompts.json"), "--backends", "extractive-mock", "--modes",
                "rag", "--out", report.string()});
  ASSERT_EQ(r.rc, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(kg::read_file(report))["summary"]["cells"], 5);
  EXPECT_EQ(run({"eval", "--suite", testkit::data_path("suite/prompts.json"), "--backends", "extractive-mock",
                 "--modes", "both"})
                .rc,
            2);
}
