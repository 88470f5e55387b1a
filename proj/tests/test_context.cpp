#include <gtest/gtest.h>

#include <algorithm>
#include <cstdio>
#include <random>

#include "elkg/context/context.hpp"
#include "support/seed.hpp"

using namespace elkg;

namespace {

const char* const kPrompt1Block =
    "prefix\tcountryName\nIDEAL\tUnited Kingdom\nREFIT\tUnited Kingdom\nUKDALE\tUnited Kingdom";

/// Store with n houses named H_000..H_{n-1}.
rdf::Store numbered_store(int n) {
  rdf::Store s;
  for (int i = 0; i < n; ++i) {
    char name[16];
    std::snprintf(name, sizeof(name), "H_%03d", i);
    s.insert({kg::vocab::res(name), kg::vocab::schema("name"), rdf::Term::literal(name)});
  }
  return s;
}

const char* const kNamesQuery = "PREFIX schema: <https://schema.org/>\nSELECT ?n WHERE { ?h schema:name ?n }";

context::ContextTable random_table(std::mt19937& rng, std::size_t max_rows) {
  std::uniform_int_distribution<std::size_t> cols(1, 4);
  std::uniform_int_distribution<std::size_t> nrows(0, max_rows);
  std::uniform_int_distribution<int> len(0, 8);
  std::uniform_int_distribution<int> ch(0, 62);
  const std::string alphabet = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 _";
  auto word = [&](bool non_empty) {
    std::string w;
    int n = len(rng) + (non_empty ? 1 : 0);
    for (int i = 0; i < n; ++i) w += alphabet[static_cast<std::size_t>(ch(rng))];
    return w;
  };
  context::ContextTable t;
  auto c = cols(rng);
  for (std::size_t i = 0; i < c; ++i) t.header.push_back("v" + std::to_string(i) + word(false));
  auto r = nrows(rng);
  for (std::size_t i = 0; i < r; ++i) {
    std::vector<std::string> row;
    for (std::size_t k = 0; k < c; ++k) row.push_back(word(true));
    t.rows.push_back(row);
  }
  t.total_rows = r;
  return t;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')) + 1; }

}  // namespace

TEST(Retrieve, Prompt1OnSeedGraph) {
  auto t = context::retrieve(testkit::seed_store(), testkit::query_text("prompt1"));
  EXPECT_EQ(t.header, (std::vector<std::string>{"prefix", "countryName"}));
  ASSERT_EQ(t.rows.size(), 3u);
  EXPECT_EQ(t.rows[0], (std::vector<std::string>{"IDEAL", "United Kingdom"}));
  EXPECT_FALSE(t.truncated);
  EXPECT_EQ(t.total_rows, 3u);
}

TEST(Retrieve, NoMatches) {
  auto t = context::retrieve(testkit::seed_store(),
                             "PREFIX schema: <https://schema.org/>\nSELECT ?h WHERE { ?h schema:name \"NOBODY_1\" }");
  EXPECT_EQ(t.header, (std::vector<std::string>{"h"}));
  EXPECT_TRUE(t.rows.empty());
  EXPECT_FALSE(t.truncated);
  EXPECT_EQ(context::serialize(t), "h");
}

TEST(Retrieve, CapArithmetic) {
  auto t = context::retrieve(numbered_store(100), kNamesQuery, 10);
  EXPECT_EQ(t.rows.size(), 10u);
  EXPECT_EQ(t.total_rows, 100u);
  EXPECT_TRUE(t.truncated);
  EXPECT_EQ(t.rows.front()[0], "H_000");
  EXPECT_EQ(t.rows.back()[0], "H_009");
}

TEST(Retrieve, PropagatesQueryErrors) {
  EXPECT_THROW(context::retrieve(testkit::seed_store(), "SELECT ?x WHERE {"), sparql::SyntaxError);
}

TEST(Serialize, Prompt1Block) {
  auto t = context::retrieve(testkit::seed_store(), testkit::query_text("prompt1"));
  EXPECT_EQ(context::serialize(t), kPrompt1Block);
}

TEST(Serialize, OmissionLine) {
  auto t = context::retrieve(numbered_store(100), kNamesQuery, 1000);
  auto text = context::serialize(t, 3);
  EXPECT_EQ(text, "n\nH_000\nH_001\nH_002\n... (97 more rows omitted)");
}

TEST(Serialize, CharCapDropsRowsFromTheEnd) {
  auto t = context::retrieve(numbered_store(100), kNamesQuery, 1000);
  auto text = context::serialize(t, 50, 60);
  EXPECT_LE(text.size(), 60u);
  EXPECT_NE(text.find("\n... ("), std::string::npos);
  auto back = context::parse_serialized(text);
  EXPECT_EQ(back.total_rows, 100u);
  ASSERT_FALSE(back.rows.empty());
  EXPECT_EQ(back.rows.front()[0], "H_000");
  auto longer = context::serialize(t, 50, 60 + 6);
  EXPECT_GE(context::parse_serialized(longer).rows.size(), back.rows.size());
}

TEST(Serialize, CellsLoseTabsAndNewlines) {
  EXPECT_EQ(context::clean_cell("a\tb\nc\r\nd"), "a b c d");
  rdf::Store s;
  s.insert({kg::vocab::res("X_1"), kg::vocab::schema("name"), rdf::Term::literal("two\tcols\nand lines")});
  auto t = context::retrieve(s, kNamesQuery);
  EXPECT_EQ(context::serialize(t), "n\ntwo cols and lines");
}

TEST(Serialize, Deterministic) {
  auto a = context::serialize(context::retrieve(testkit::seed_store(), testkit::query_text("prompt2")));
  auto seed_copy = kg::build_graph(kg::generate_seed_fixture(kg::default_fixture_spec()));
  auto b = context::serialize(context::retrieve(seed_copy, testkit::query_text("prompt2")));
  EXPECT_EQ(a, b);
}

TEST(SerializeProperty, ParseBackOnUntruncatedTables) {
  std::mt19937 rng(7);
  for (int i = 0; i < 500; ++i) {
    auto t = random_table(rng, 12);
    auto text = context::serialize(t, 100, 100000);
    auto back = context::parse_serialized(text);
    EXPECT_EQ(back, t) << text;
  }
}

TEST(SerializeProperty, RowCountAndCharCap) {
  std::mt19937 rng(11);
  std::uniform_int_distribution<std::size_t> rows_cap(1, 15);
  std::uniform_int_distribution<std::size_t> extra_chars(0, 200);
  for (int i = 0; i < 500; ++i) {
    auto t = random_table(rng, 30);
    auto max_rows = rows_cap(rng);
    auto max_chars = context::join_cells(t.header).size() + extra_chars(rng);
    auto text = context::serialize(t, max_rows, max_chars);
    ASSERT_LE(text.size(), max_chars);
    EXPECT_NE(text.back(), '\n');
    auto lines = count_lines(text);
    auto back = context::parse_serialized(text);
    EXPECT_LE(back.rows.size(), std::min(t.total_rows, max_rows));
    if (back.rows.size() < t.total_rows && lines > 1 + back.rows.size())
      EXPECT_EQ(back.total_rows, t.total_rows);
    // rows are a prefix of the table
    for (std::size_t r = 0; r < back.rows.size(); ++r) EXPECT_EQ(back.rows[r], t.rows[r]);
    // with a generous char cap the row count is exactly min(total, maxRows)
    auto roomy = context::parse_serialized(context::serialize(t, max_rows, 1 << 20));
    EXPECT_EQ(roomy.rows.size(), std::min(t.total_rows, max_rows));
  }
}

TEST(ParseSerialized, RejectsRaggedRows) {
  EXPECT_THROW(context::parse_serialized("a\tb\n1"), context::ContextParseError);
  EXPECT_THROW(context::parse_serialized(""), context::ContextParseError);
  EXPECT_THROW(context::parse_serialized("a\n... (x more rows omitted)"), context::ContextParseError);
}
