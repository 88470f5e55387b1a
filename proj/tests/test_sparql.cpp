#include <gtest/gtest.h>

#include <chrono>

#include "elkg/sparql/eval.hpp"
#include "elkg/sparql/json_results.hpp"
#include "elkg/sparql/parser.hpp"
#include "elkg/sparql/printer.hpp"
#include "support/bgp_oracle.hpp"
#include "support/random_instances.hpp"
#include "support/seed.hpp"

using namespace elkg;
using rdf::Term;
using sparql::CompareOp;
using sparql::Expr;

namespace {

const std::vector<std::string> kFixtureQueries{"prompt1",          "prompt1_unjoined", "prompt2",
                                               "prompt3_education", "prompt3_price", "prompt4"};

using Rows = std::vector<testkit::Row>;

Rows sorted_rows(const sparql::ResultTable& t) {
  Rows rows = t.rows;
  std::sort(rows.begin(), rows.end());
  return rows;
}

std::set<std::vector<std::string>> lexical_rows(const sparql::ResultTable& t) {
  std::set<std::vector<std::string>> out;
  for (const auto& r : t.rows) {
    std::vector<std::string> cells;
    for (const auto& c : r) cells.push_back(c ? c->value() : "");
    out.insert(cells);
  }
  return out;
}

rdf::Store store_of(const std::vector<rdf::Triple>& ts) {
  rdf::Store s;
  s.insert_all(ts);
  return s;
}

Term str(const std::string& s) { return Term::literal(s); }
Term integer(std::int64_t v) { return Term::integer(v); }

sparql::ExprValue eval(const Expr& e) { return sparql::eval_expr(e, {}); }

std::string value_of(const sparql::ExprValue& v) { return std::get<Term>(v).value(); }

}  // namespace

// -- parse ---------------------------------------------------------------

TEST(SparqlParse, PromptOneQuery) {
  auto q = sparql::parse(testkit::query_text("prompt1"));
  EXPECT_TRUE(q.distinct);
  EXPECT_EQ(q.projection, (std::vector<std::string>{"prefix", "countryName"}));
  EXPECT_EQ(q.patterns.size(), 6u);
  EXPECT_EQ(q.filters.size(), 1u);
  ASSERT_EQ(q.binds.size(), 1u);
  EXPECT_EQ(q.binds[0].target, "prefix");
  EXPECT_EQ(q.binds[0].expr.kind, Expr::Kind::StrBefore);
  EXPECT_EQ(q.prefixes.size(), 4u);
}

TEST(SparqlParse, UnjoinedPromptOneVariant) {
  auto q = sparql::parse(testkit::query_text("prompt1_unjoined"));
  EXPECT_EQ(q.patterns.size(), 4u);
  EXPECT_EQ(q.filters.size(), 1u);
  EXPECT_EQ(q.binds.size(), 1u);
}

TEST(SparqlParse, MinimalQuery) {
  auto q = sparql::parse("SELECT ?x WHERE { ?x ?p ?o }");
  EXPECT_FALSE(q.distinct);
  EXPECT_EQ(q.projection, std::vector<std::string>{"x"});
  EXPECT_EQ(q.patterns.size(), 1u);
  EXPECT_TRUE(q.filters.empty());
  EXPECT_TRUE(q.binds.empty());
}

TEST(SparqlParse, UndeclaredPrefix) {
  EXPECT_THROW(sparql::parse("SELECT ?x WHERE { ?x foo:bar ?o }"), sparql::UnboundPrefix);
}

TEST(SparqlParse, ProjectionMustBeBound) {
  EXPECT_THROW(sparql::parse("SELECT ?y WHERE { ?x ?p ?o }"), sparql::ProjectionOfUnboundVariable);
  EXPECT_NO_THROW(sparql::parse("SELECT ?y WHERE { ?x ?p ?o BIND(STR(?o) AS ?y) }"));
}

TEST(SparqlParse, BindCannotRebindPatternVariable) {
  EXPECT_THROW(sparql::parse("SELECT ?o WHERE { ?x ?p ?o BIND(STR(?x) AS ?o) }"), sparql::BindRebinding);
}

TEST(SparqlParse, KeywordsAreCaseInsensitive) {
  auto a = sparql::parse("select distinct ?x where { ?x a ?o . filter(?o != ?x) }");
  auto b = sparql::parse("SELECT DISTINCT ?x WHERE { ?x a ?o . FILTER(?o != ?x) }");
  EXPECT_EQ(a, b);
}

TEST(SparqlParse, NumericLiteralsFollowSparqlDefaults) {
  auto q = sparql::parse("SELECT ?x WHERE { ?x ?p ?o FILTER(?o > 50000 && ?o < 0.25 && ?o != -3) }");
  const auto& and_outer = q.filters.at(0);
  ASSERT_EQ(and_outer.kind, Expr::Kind::And);
  std::vector<Term> constants;
  std::function<void(const Expr&)> walk = [&](const Expr& e) {
    if (e.kind == Expr::Kind::Const) constants.push_back(e.constant);
    for (const auto& a : e.args) walk(a);
  };
  walk(and_outer);
  ASSERT_EQ(constants.size(), 3u);
  EXPECT_EQ(constants[0], Term::literal("50000", rdf::ns::xsd_integer()));
  EXPECT_EQ(constants[1], Term::literal("0.25", rdf::ns::xsd_decimal()));
  EXPECT_EQ(constants[2], Term::literal("-3", rdf::ns::xsd_integer()));
}

TEST(SparqlParse, SyntaxErrorsCarryPosition) {
  try {
    sparql::parse("SELECT ?x WHERE {\n  ?x ?p \n}");
    FAIL() << "parsed";
  } catch (const sparql::SyntaxError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_GE(e.column(), 1u);
  }
}

TEST(SparqlParse, RejectsConstructsOutsideTheSubset) {
  for (const char* q : {
           "SELECT * WHERE { ?x ?p ?o }",
           "SELECT ?x WHERE { ?x ?p ?o } LIMIT 3",
           "SELECT ?x WHERE { ?x ?p ?o } ORDER BY ?x",
           "SELECT ?x WHERE { OPTIONAL { ?x ?p ?o } }",
           "SELECT ?x WHERE { ?x ?p ?o FILTER(?o = 1 || ?o = 2) }",
           "SELECT ?x WHERE { ?x ?p ?o FILTER(REGEX(?o, \"a\")) }",
           "SELECT ?x WHERE { ?x <http://x/p>/<http://x/q> ?o }",
           "SELECT ?x WHERE { ?x ?p [] }",
           "SELECT ?x ?x WHERE { ?x ?p ?o }",
           "SELECT ?x FROM <http://x/g> WHERE { ?x ?p ?o }",
           "ASK { ?x ?p ?o }",
       }) {
    EXPECT_THROW(sparql::parse(q), sparql::SyntaxError) << q;
  }
}

TEST(SparqlParse, PrintRoundTripOnFixtureQueries) {
  for (const auto& name : kFixtureQueries) {
    auto q = sparql::parse(testkit::query_text(name));
    EXPECT_EQ(sparql::parse(sparql::print(q)), q) << name;
  }
}

TEST(SparqlParse, PrintRoundTripOnRandomQueries) {
  testkit::InstanceGenerator gen(4242);
  for (int i = 0; i < 1000; ++i) {
    auto q = gen.query(true);
    auto text = sparql::print(q);
    ASSERT_EQ(sparql::parse(text), q) << text;
  }
}

// -- eval_expr -----------------------------------------------------------

TEST(SparqlExpr, StrBeforeDerivesDatasetPrefix) {
  EXPECT_EQ(eval(Expr::str_before(Expr::constant_term(str("REFIT_1")), Expr::constant_term(str("_")))),
            sparql::ExprValue(str("REFIT")));
}

// Reference table from the SPARQL 1.1 STRBEFORE definition.
TEST(SparqlExpr, StrBeforeFollowsReferenceTable) {
  auto en = [](const std::string& s) { return Term::lang_literal(s, "en"); };
  auto fr = [](const std::string& s) { return Term::lang_literal(s, "fr"); };
  auto sb = [](Term a, Term b) { return eval(Expr::str_before(Expr::constant_term(a), Expr::constant_term(b))); };
  EXPECT_EQ(sb(str("abc"), str("b")), sparql::ExprValue(str("a")));
  EXPECT_EQ(sb(en("abc"), str("bc")), sparql::ExprValue(en("a")));
  EXPECT_TRUE(sparql::is_error(sb(en("abc"), fr("b"))));
  EXPECT_EQ(sb(en("abc"), en("")), sparql::ExprValue(en("")));
  EXPECT_EQ(sb(en("abc"), str("xyz")), sparql::ExprValue(str("")));
  EXPECT_EQ(sb(en("abc"), str("")), sparql::ExprValue(en("")));
  EXPECT_EQ(sb(str("UKDALE"), str("_")), sparql::ExprValue(str("")));
  EXPECT_TRUE(sparql::is_error(sb(integer(12), str("1"))));
}

TEST(SparqlExpr, StrictInequalityOnEqualIntegers) {
  auto v = eval(Expr::compare(CompareOp::Gt, Expr::constant_term(integer(50000)), Expr::constant_term(integer(50000))));
  EXPECT_EQ(value_of(v), "false");
}

TEST(SparqlExpr, NumericComparisonCoercesTypes) {
  auto dec = Term::literal("52426.0", rdf::ns::xsd_decimal());
  auto dbl = Term::literal("5.0E4", rdf::ns::xsd_double());
  EXPECT_EQ(value_of(eval(Expr::compare(CompareOp::Gt, Expr::constant_term(dec), Expr::constant_term(integer(50000))))), "true");
  EXPECT_EQ(value_of(eval(Expr::compare(CompareOp::Eq, Expr::constant_term(dbl), Expr::constant_term(integer(50000))))), "true");
}

TEST(SparqlExpr, StringComparisonIsCodepointOrder) {
  EXPECT_EQ(value_of(eval(Expr::compare(CompareOp::Lt, Expr::constant_term(str("Z")), Expr::constant_term(str("a"))))), "true");
  EXPECT_EQ(value_of(eval(Expr::compare(CompareOp::Lt, Expr::constant_term(str("z")), Expr::constant_term(str("é"))))), "true");
}

TEST(SparqlExpr, IncompatibleOperandsSignalTypeError) {
  EXPECT_TRUE(sparql::is_error(eval(Expr::compare(CompareOp::Lt, Expr::constant_term(str("1")), Expr::constant_term(integer(1))))));
  EXPECT_TRUE(sparql::is_error(eval(Expr::compare(CompareOp::Eq, Expr::constant_term(str("1")), Expr::constant_term(integer(1))))));
  EXPECT_TRUE(sparql::is_error(sparql::eval_expr(Expr::variable("missing"), {})));
  auto iri = Term::iri("http://x/a");
  EXPECT_EQ(value_of(eval(Expr::compare(CompareOp::Ne, Expr::constant_term(iri), Expr::constant_term(integer(1))))), "true");
}

TEST(SparqlExpr, AndFollowsErrorSemantics) {
  auto err = Expr::variable("unbound");
  auto f = Expr::compare(CompareOp::Eq, Expr::constant_term(integer(1)), Expr::constant_term(integer(2)));
  auto t = Expr::compare(CompareOp::Eq, Expr::constant_term(integer(1)), Expr::constant_term(integer(1)));
  EXPECT_EQ(value_of(eval(Expr::logical_and(err, f))), "false");
  EXPECT_EQ(value_of(eval(Expr::logical_and(f, err))), "false");
  EXPECT_TRUE(sparql::is_error(eval(Expr::logical_and(t, err))));
  EXPECT_EQ(value_of(eval(Expr::logical_and(t, t))), "true");
}

// -- evaluate ------------------------------------------------------------

TEST(SparqlEval, PromptOneOnSeedGraph) {
  auto t = sparql::evaluate(testkit::seed_store(), testkit::query_text("prompt1"));
  EXPECT_EQ(t.header, (std::vector<std::string>{"prefix", "countryName"}));
  std::set<std::vector<std::string>> expected{
      {"IDEAL", "United Kingdom"}, {"REFIT", "United Kingdom"}, {"UKDALE", "United Kingdom"}};
  EXPECT_EQ(lexical_rows(t), expected);
  EXPECT_EQ(t.rows.size(), 3u);
}

TEST(SparqlEval, UnjoinedVariantIsACrossProduct) {
  // Without the containedInPlace joins every house pairs with the UK node.
  auto t = sparql::evaluate(testkit::seed_store(), testkit::query_text("prompt1_unjoined"));
  std::set<std::string> prefixes;
  for (const auto& r : t.rows) prefixes.insert(r[0]->value());
  std::set<std::string> all;
  for (const auto& d : kg::default_fixture_spec().datasets) all.insert(d.prefix);
  EXPECT_EQ(prefixes, all);
}

TEST(SparqlEval, EmptyStoreGivesNoRows) {
  rdf::Store empty;
  EXPECT_TRUE(sparql::evaluate(empty, "SELECT ?x WHERE { ?x ?p ?o }").rows.empty());
}

TEST(SparqlEval, FiltersRunAfterBindsRegardlessOfPosition) {
  rdf::Store store = store_of({{Term::iri("http://x/h"), Term::iri("http://x/name"), str("REFIT_1")}});
  auto t = sparql::evaluate(store, "SELECT ?p WHERE { FILTER(?p = \"REFIT\") ?h <http://x/name> ?n . BIND(STRBEFORE(?n, \"_\") AS ?p) }");
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0][0]->value(), "REFIT");
}

TEST(SparqlEval, MalformedAstIsAnEvaluationError) {
  sparql::Query q;
  q.patterns.push_back({sparql::Var{"x"}, sparql::Var{"p"}, sparql::Var{"o"}});
  q.projection = {"x"};
  Expr broken = Expr::str(Expr::variable("x"));
  broken.args.clear();
  q.filters.push_back(broken);
  rdf::Store store = store_of({{Term::iri("http://x/a"), Term::iri("http://x/b"), str("c")}});
  EXPECT_THROW(sparql::evaluate(store, q), sparql::EvaluationError);
}

TEST(SparqlEval, AgreesWithBruteForceOracle) {
  testkit::InstanceGenerator gen(1);
  std::size_t non_empty = 0;
  for (int i = 0; i < 1500; ++i) {
    auto inst = gen.instance(30, true);
    auto store = store_of(inst.triples);
    auto got = sorted_rows(sparql::evaluate(store, inst.query));
    auto want = testkit::brute_force_rows(testkit::distinct(inst.triples), inst.query);
    ASSERT_EQ(got, want) << "instance " << i << "\n" << sparql::print(inst.query);
    non_empty += got.empty() ? 0 : 1;
  }
  EXPECT_GT(non_empty, 150u);  // guards against a degenerate generator
}

TEST(SparqlEval, DistinctIsIdempotentAndMultiplicityCountsHomomorphisms) {
  testkit::InstanceGenerator gen(2);
  for (int i = 0; i < 300; ++i) {
    auto inst = gen.instance(30, false);
    auto store = store_of(inst.triples);
    auto q = inst.query;
    q.distinct = true;
    auto once = sorted_rows(sparql::evaluate(store, q));
    EXPECT_EQ(once, sorted_rows(sparql::evaluate(store, q)));
    EXPECT_EQ(std::set<testkit::Row>(once.begin(), once.end()).size(), once.size());

    // Project every variable: rows then correspond one-to-one with homomorphisms.
    q.distinct = false;
    q.projection = sparql::pattern_variables(q);
    EXPECT_EQ(sparql::evaluate(store, q).rows.size(), sparql::match_bgp(store, q.patterns).size());
    EXPECT_EQ(sparql::evaluate(store, q).rows.size(), testkit::brute_force_rows(testkit::distinct(inst.triples), q).size());
  }
}

TEST(SparqlEval, AddingAFilterNeverAddsRows) {
  testkit::InstanceGenerator gen(3);
  for (int i = 0; i < 300; ++i) {
    auto inst = gen.instance(30, true);
    auto store = store_of(inst.triples);
    auto base = sparql::evaluate(store, inst.query).rows.size();
    auto extra = gen.query(true);
    if (extra.filters.empty()) continue;
    auto q = inst.query;
    auto vars = sparql::pattern_variables(q);
    // Retarget the extra filter's variables onto this query's variables.
    std::function<void(Expr&)> retarget = [&](Expr& e) {
      if (e.kind == Expr::Kind::Var) e.var = vars[std::hash<std::string>{}(e.var) % vars.size()];
      for (auto& a : e.args) retarget(a);
    };
    auto f = extra.filters[0];
    retarget(f);
    q.filters.push_back(f);
    EXPECT_LE(sparql::evaluate(store, q).rows.size(), base);
  }
}

TEST(SparqlEval, PatternOrderDoesNotChangeResults) {
  testkit::InstanceGenerator gen(5);
  std::mt19937 rng(5);
  for (int i = 0; i < 300; ++i) {
    auto inst = gen.instance(30, true);
    auto store = store_of(inst.triples);
    auto q = inst.query;
    auto before = sorted_rows(sparql::evaluate(store, q));
    std::shuffle(q.patterns.begin(), q.patterns.end(), rng);
    EXPECT_EQ(sorted_rows(sparql::evaluate(store, q)), before);
  }
}

// -- JSON results --------------------------------------------------------

TEST(SparqlJson, W3cFieldNames) {
  sparql::ResultTable t;
  t.header = {"s", "name", "n", "label", "b"};
  t.rows.push_back({Term::iri("http://x/a"), str("REFIT"), integer(3), Term::lang_literal("x", "en"), std::nullopt});
  t.rows.push_back({Term::blank("b0"), std::nullopt, std::nullopt, std::nullopt, std::nullopt});
  auto j = sparql::to_json(t);
  EXPECT_EQ(j["head"]["vars"], nlohmann::json({"s", "name", "n", "label", "b"}));
  const auto& b0 = j["results"]["bindings"][0];
  EXPECT_EQ(b0["s"], nlohmann::json({{"type", "uri"}, {"value", "http://x/a"}}));
  EXPECT_EQ(b0["name"], nlohmann::json({{"type", "literal"}, {"value", "REFIT"}}));
  EXPECT_EQ(b0["n"]["datatype"], rdf::ns::xsd_integer());
  EXPECT_EQ(b0["label"]["xml:lang"], "en");
  EXPECT_FALSE(b0.contains("b"));
  EXPECT_EQ(j["results"]["bindings"][1]["s"]["type"], "bnode");
  EXPECT_EQ(sparql::table_from_json(j), t);
}

TEST(SparqlEval, FixtureQueriesRunQuickly) {
  auto start = std::chrono::steady_clock::now();
  for (const auto& name : kFixtureQueries) sparql::evaluate(testkit::seed_store(), testkit::query_text(name));
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(1));
}
