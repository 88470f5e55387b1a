#pragma once

// Built-in copy of data/catalog/intents.json; a test keeps the two identical.

namespace elkg::transform {

inline constexpr const char* kDefaultCatalogJson = R"json({
  "version": 1,
  "countryAliases": {
    "uk": "United Kingdom",
    "u.k.": "United Kingdom",
    "britain": "United Kingdom",
    "great britain": "United Kingdom",
    "usa": "United States",
    "u.s.": "United States",
    "u.s.a.": "United States",
    "united states of america": "United States",
    "korea": "South Korea"
  },
  "countries": [
    "United Kingdom", "Switzerland", "United States", "India", "South Korea", "Germany", "France",
    "Italy", "Spain", "Netherlands", "Belgium", "Austria", "Denmark", "Sweden", "Norway", "Finland",
    "Ireland", "Portugal", "Poland", "Slovenia", "Canada", "Brazil", "Uruguay", "Mexico", "China",
    "Japan", "Pakistan", "Australia", "New Zealand", "South Africa"
  ],
  "continents": ["Europe", "Asia", "Africa", "North America", "South America", "Oceania"],
  "educationLevels": ["high", "medium", "low"],
  "intents": [
    {
      "id": "LoadProfileOfHouse",
      "keywords": [["load profile", "consumption profile", "daily profile"]],
      "slots": [{"name": "house", "kind": "houseRef"}],
      "query": [
        "PREFIX voc: <https://elkg.ijs.si/ontology/>",
        "PREFIX rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#>",
        "PREFIX schema: <https://schema.org/>",
        "SELECT ?prefix ?houseName ?countryName ?occupancy ?floorArea ?dwellingType WHERE {",
        "  ?house rdf:type schema:House .",
        "  ?house schema:name ?houseName .",
        "  ?house schema:containedInPlace ?place .",
        "  ?place schema:containedInPlace ?country .",
        "  ?country schema:name ?countryName .",
        "  ?house voc:occupancy ?occupancy .",
        "  ?house voc:floorArea ?floorArea .",
        "  ?house voc:dwellingType ?dwellingType .",
        "  FILTER(?houseName = \"${house}\")",
        "  BIND(STRBEFORE(?houseName, \"_\") AS ?prefix)",
        "}"
      ]
    },
    {
      "id": "DatasetsByGdpThreshold",
      "keywords": [["gdp", "gross domestic product"], ["dataset", "datasets"]],
      "slots": [{"name": "amount", "kind": "moneyAmount"}],
      "query": [
        "PREFIX voc: <https://elkg.ijs.si/ontology/>",
        "PREFIX rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#>",
        "PREFIX schema: <https://schema.org/>",
        "SELECT DISTINCT ?prefix ?countryName ?gdpPerCapita WHERE {",
        "  ?house rdf:type schema:House .",
        "  ?house schema:name ?houseName .",
        "  ?house schema:containedInPlace ?place .",
        "  ?place schema:containedInPlace ?country .",
        "  ?country rdf:type schema:Country .",
        "  ?country schema:name ?countryName .",
        "  ?country voc:gdpPerCapita ?gdpPerCapita .",
        "  FILTER(?gdpPerCapita ${amountOp} ${amount})",
        "  BIND(STRBEFORE(?houseName, \"_\") AS ?prefix)",
        "}"
      ]
    },
    {
      "id": "DatasetsByPriceAndRegion",
      "keywords": [["price", "tariff"], ["dataset", "datasets"]],
      "slots": [{"name": "continent", "kind": "continentName"}, {"name": "price", "kind": "priceAmount"}],
      "query": [
        "PREFIX voc: <https://elkg.ijs.si/ontology/>",
        "PREFIX rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#>",
        "PREFIX schema: <https://schema.org/>",
        "SELECT DISTINCT ?prefix ?countryName ?electricityPrice WHERE {",
        "  ?house rdf:type schema:House .",
        "  ?house schema:name ?houseName .",
        "  ?house schema:containedInPlace ?place .",
        "  ?place schema:containedInPlace ?country .",
        "  ?country schema:name ?countryName .",
        "  ?country voc:continent ?continent .",
        "  ?country voc:electricityPrice ?electricityPrice .",
        "  FILTER(?continent ${continentOp} \"${continent}\" && ?electricityPrice ${priceOp} ${price})",
        "  BIND(STRBEFORE(?houseName, \"_\") AS ?prefix)",
        "}"
      ]
    },
    {
      "id": "DatasetsByContinentAndEducation",
      "keywords": [["education", "educated"], ["dataset", "datasets"]],
      "slots": [{"name": "continent", "kind": "continentName"}, {"name": "education", "kind": "educationLevel"}],
      "query": [
        "PREFIX voc: <https://elkg.ijs.si/ontology/>",
        "PREFIX rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#>",
        "PREFIX schema: <https://schema.org/>",
        "SELECT DISTINCT ?prefix ?countryName ?continent ?educationLevel WHERE {",
        "  ?house rdf:type schema:House .",
        "  ?house schema:name ?houseName .",
        "  ?house schema:containedInPlace ?place .",
        "  ?place voc:educationLevel ?educationLevel .",
        "  ?place schema:containedInPlace ?country .",
        "  ?country schema:name ?countryName .",
        "  ?country voc:continent ?continent .",
        "  FILTER(?continent ${continentOp} \"${continent}\" && ?educationLevel = \"${education}\")",
        "  BIND(STRBEFORE(?houseName, \"_\") AS ?prefix)",
        "}"
      ]
    },
    {
      "id": "DatasetsByCountry",
      "keywords": [["dataset", "datasets"]],
      "slots": [{"name": "country", "kind": "countryName"}],
      "query": [
        "PREFIX voc: <https://elkg.ijs.si/ontology/>",
        "PREFIX saref: <https://saref.etsi.org/core/>",
        "PREFIX rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#>",
        "PREFIX schema: <https://schema.org/>",
        "SELECT DISTINCT ?prefix ?countryName  WHERE {",
        " ?house rdf:type schema:House .",
        "?house schema:name ?houseName .",
        "?house schema:containedInPlace ?place .",
        "?place schema:containedInPlace ?country .",
        "?country rdf:type schema:Country .",
        "?country schema:name ?countryName .",
        "FILTER(?countryName = \"${country}\") .",
        "BIND(STRBEFORE(?houseName, \"_\" ) as ?prefix) .",
        "}"
      ]
    }
  ]
}
)json";

}  // namespace elkg::transform
