#include <gtest/gtest.h>

#include <regex>

#include "elkg/rdf/turtle.hpp"
#include "support/random_instances.hpp"
#include "support/seed.hpp"

using namespace elkg;
using rdf::Term;

namespace {

std::string fixture(const std::string& name) { return kg::read_file(testkit::data_path("turtle/" + name)); }

std::vector<rdf::Triple> sorted(std::vector<rdf::Triple> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// Blank labels carry a per-document suffix; strip it to compare documents.
std::string strip_suffix(std::string nt) { return std::regex_replace(nt, std::regex("-d[0-9]+"), ""); }

}  // namespace

TEST(Turtle, SinglePrefixedStatement) {
  rdf::Store store;
  EXPECT_EQ(rdf::load_turtle(store,
                             "@prefix s: <https://schema.org/> . <https://elkg.ijs.si/resource/REFIT_1> a s:House ."),
            1u);
}

TEST(Turtle, DuplicateStatementsCountOnce) {
  rdf::Store store;
  EXPECT_EQ(rdf::load_turtle(store, "<http://x/a> <http://x/b> \"c\" .\n<http://x/a> <http://x/b> \"c\" .\n"), 1u);
  EXPECT_EQ(rdf::load_turtle(store, "<http://x/a> <http://x/b> \"c\" ."), 0u);
}

class TurtleConformance : public ::testing::TestWithParam<std::string> {};

TEST_P(TurtleConformance, MatchesNTriples) {
  auto ttl = rdf::parse_turtle(fixture(GetParam() + ".ttl"));
  auto nt = rdf::parse_turtle(fixture(GetParam() + ".nt"));
  EXPECT_EQ(sorted(ttl), sorted(nt));
}

INSTANTIATE_TEST_SUITE_P(Fixtures, TurtleConformance,
                         ::testing::Values("ok_prefix_a", "ok_literals", "ok_lists", "ok_blank"));

TEST(Turtle, UnsupportedFeaturesAreNamed) {
  for (const char* f : {"bad_collection.ttl", "bad_anonymous_node.ttl", "bad_quoted_triple.ttl", "bad_base.ttl"}) {
    EXPECT_THROW(rdf::parse_turtle(fixture(f)), rdf::UnsupportedFeature) << f;
  }
}

TEST(Turtle, ParseErrorsCarryPosition) {
  struct Case {
    const char* file;
    std::size_t line;
  };
  for (auto c : {Case{"bad_missing_dot.ttl", 3}, Case{"bad_unbound_prefix.ttl", 2}, Case{"bad_literal_subject.ttl", 1}}) {
    try {
      rdf::parse_turtle(fixture(c.file));
      ADD_FAILURE() << c.file << " parsed";
    } catch (const rdf::TurtleParseError& e) {
      EXPECT_EQ(e.line(), c.line) << c.file << ": " << e.what();
      EXPECT_GE(e.column(), 1u);
    }
  }
}

TEST(Turtle, LoadIsAllOrNothing) {
  rdf::Store store;
  rdf::load_turtle(store, "<http://x/a> <http://x/b> <http://x/c> .");
  EXPECT_THROW(rdf::load_turtle(store, "<http://x/d> <http://x/e> <http://x/f> .\n<http://x/g> <http://x/h> ( ) ."),
               rdf::UnsupportedFeature);
  EXPECT_EQ(store.size(), 1u);
}

TEST(Turtle, BlankLabelsAreScopedPerDocument) {
  rdf::Store store;
  const char* doc = "_:b <http://x/p> \"v\" .";
  EXPECT_EQ(rdf::load_turtle(store, doc), 1u);
  EXPECT_EQ(rdf::load_turtle(store, doc), 1u);
  EXPECT_EQ(store.size(), 2u);
}

TEST(Turtle, SeedGraphLoadCountEqualsGeneratorCount) {
  const auto& bundle = testkit::seed_bundle();
  auto ttl = rdf::write_turtle(kg::build_triples(bundle));
  rdf::Store store;
  EXPECT_EQ(rdf::load_turtle(store, ttl), kg::expected_triple_count(bundle));
}

TEST(Turtle, WriteThenLoadIsFixpoint) {
  const auto& seed = testkit::seed_store();
  rdf::Store once;
  rdf::load_turtle(once, rdf::write_turtle(seed));
  rdf::Store twice;
  rdf::load_turtle(twice, rdf::write_turtle(once));
  EXPECT_EQ(sorted(once.triples()), sorted(seed.triples()));
  EXPECT_EQ(sorted(twice.triples()), sorted(once.triples()));
}

TEST(Turtle, RandomGraphsRoundTripThroughTurtleAndNTriples) {
  testkit::InstanceGenerator gen(77);
  for (int round = 0; round < 200; ++round) {
    auto triples = gen.triples(40);
    if (gen.coin(0.3)) triples.push_back({Term::blank("x"), Term::iri("http://example.org/p0"), Term::lang_literal("hé \"q\"\n", "en")});
    auto expected = sorted(triples);
    rdf::Store a;
    rdf::load_turtle(a, rdf::write_turtle(triples));
    rdf::Store b;
    rdf::load_turtle(b, rdf::write_ntriples(a.triples()));
    EXPECT_EQ(strip_suffix(rdf::write_ntriples(a.triples())), strip_suffix(rdf::write_ntriples(expected)));
    EXPECT_EQ(strip_suffix(rdf::write_ntriples(b.triples())), strip_suffix(rdf::write_ntriples(expected)));
  }
}
