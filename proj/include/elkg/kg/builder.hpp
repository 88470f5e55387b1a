#pragma once

// Builds the household-electricity knowledge graph from fixture records.
//
// Node layout (res: = https://elkg.ijs.si/resource/):
//   res:{name}            schema:House, schema:name, schema:containedInPlace -> place,
//                         voc:occupancy, voc:floorArea, voc:dwellingType,
//                         voc:measurementStart, voc:measurementEnd,
//                         voc:hasAppliance -> appliance (one per appliance),
//                         voc:hourlyLoad_0 .. voc:hourlyLoad_23 (when profiled),
//                         voc:loadProfileImage (when the profile names an image)
//   res:Appliance_{id}    saref:Device, schema:name, voc:averageDailyConsumption,
//                         voc:averageOnEventConsumption
//   res:Place_{id}        schema:Place, schema:name (city), schema:latitude,
//                         schema:longitude, schema:containedInPlace -> country,
//                         voc:populationDensity, voc:educationLevel
//   res:Country_{slug}    schema:Country, schema:name, voc:continent,
//                         voc:gdpPerCapita, voc:averageWage,
//                         voc:electricityPrice, voc:carbonIntensity
//
// Triple count = 8*H + 5*A + 7*L + 7*C + 24*P + I
// (H households, A appliances, L locations, C distinct countries,
//  P profiles, I profiles carrying an image).

#include <map>
#include <set>
#include <string>

#include "elkg/kg/records.hpp"
#include "elkg/rdf/store.hpp"

namespace elkg::kg {

namespace vocab {
inline rdf::Term res(const std::string& local) { return rdf::iri(rdf::ns::resource, local); }
inline rdf::Term schema(const std::string& local) { return rdf::iri(rdf::ns::schema, local); }
inline rdf::Term voc(const std::string& local) { return rdf::iri(rdf::ns::voc, local); }
inline rdf::Term saref(const std::string& local) { return rdf::iri(rdf::ns::saref, local); }
inline rdf::Term type() { return rdf::Term::iri(rdf::ns::rdf_type()); }
inline rdf::Term hourly_load(std::size_t hour) { return voc("hourlyLoad_" + std::to_string(hour)); }

inline std::string slug(const std::string& s) {
  std::string out;
  for (char c : s) out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  return out;
}

inline rdf::Term household(const std::string& name) { return res(name); }
inline rdf::Term appliance(const std::string& id) { return res("Appliance_" + id); }
inline rdf::Term place(const std::string& id) { return res("Place_" + id); }
inline rdf::Term country(const std::string& name) { return res("Country_" + slug(name)); }

/// Every predicate the builder emits (the allow-list for generated queries).
inline std::vector<rdf::Term> predicates() {
  std::vector<rdf::Term> out{type(),
                             schema("name"),
                             schema("containedInPlace"),
                             schema("latitude"),
                             schema("longitude"),
                             voc("occupancy"),
                             voc("floorArea"),
                             voc("dwellingType"),
                             voc("measurementStart"),
                             voc("measurementEnd"),
                             voc("hasAppliance"),
                             voc("averageDailyConsumption"),
                             voc("averageOnEventConsumption"),
                             voc("populationDensity"),
                             voc("educationLevel"),
                             voc("continent"),
                             voc("gdpPerCapita"),
                             voc("averageWage"),
                             voc("electricityPrice"),
                             voc("carbonIntensity"),
                             voc("loadProfileImage")};
  for (std::size_t h = 0; h < 24; ++h) out.push_back(hourly_load(h));
  return out;
}
}  // namespace vocab

inline std::vector<rdf::Triple> build_triples(const FixtureBundle& b) {
  using namespace vocab;
  using rdf::Term;

  std::map<std::string, const LocationRecord*> locations;
  std::map<std::string, const LocationRecord*> countries;
  for (const auto& l : b.locations) {
    validate(l);
    if (!locations.emplace(l.id, &l).second) throw InvariantViolation("id", "duplicate location " + l.id);
    auto [it, inserted] = countries.emplace(l.country, &l);
    if (!inserted) {
      const auto& o = *it->second;
      if (o.continent != l.continent || o.gdp_per_capita != l.gdp_per_capita || o.average_wage != l.average_wage ||
          o.electricity_price != l.electricity_price || o.carbon_intensity != l.carbon_intensity)
        throw InvariantViolation("country", "locations " + o.id + " and " + l.id + " disagree on " + l.country +
                                                " country-level values");
    }
  }
  std::map<std::string, const HouseholdRecord*> households;
  for (const auto& h : b.households) {
    validate(h);
    if (!households.emplace(h.name, &h).second) throw InvariantViolation("name", "duplicate household " + h.name);
    if (!locations.count(h.location_ref)) throw DanglingReference(h.location_ref);
  }
  std::map<std::string, const ApplianceRecord*> appliances;
  for (const auto& a : b.appliances) {
    validate(a);
    if (!appliances.emplace(a.id, &a).second) throw InvariantViolation("id", "duplicate appliance " + a.id);
    if (!households.count(a.household_ref)) throw DanglingReference(a.household_ref);
  }
  for (const auto& h : b.households) {
    for (const auto& ref : h.appliance_refs) {
      auto it = appliances.find(ref);
      if (it == appliances.end()) throw DanglingReference(ref);
      if (it->second->household_ref != h.name)
        throw InvariantViolation("applianceRefs", ref + " belongs to " + it->second->household_ref);
    }
  }
  std::set<std::string> profiled;
  for (const auto& p : b.profiles) {
    validate(p);
    if (!households.count(p.household_ref)) throw DanglingReference(p.household_ref);
    if (!profiled.insert(p.household_ref).second)
      throw InvariantViolation("householdRef", "duplicate profile for " + p.household_ref);
  }

  std::vector<rdf::Triple> out;
  auto add = [&](Term s, Term p, Term o) { out.emplace_back(std::move(s), std::move(p), std::move(o)); };

  for (const auto& [name, c] : countries) {
    auto node = country(name);
    add(node, type(), schema("Country"));
    add(node, schema("name"), Term::literal(name));
    add(node, voc("continent"), Term::literal(c->continent));
    add(node, voc("gdpPerCapita"), Term::decimal(c->gdp_per_capita));
    add(node, voc("averageWage"), Term::decimal(c->average_wage));
    add(node, voc("electricityPrice"), Term::decimal(c->electricity_price));
    add(node, voc("carbonIntensity"), Term::decimal(c->carbon_intensity));
  }
  for (const auto& l : b.locations) {
    auto node = place(l.id);
    add(node, type(), schema("Place"));
    add(node, schema("name"), Term::literal(l.city));
    add(node, schema("latitude"), Term::decimal(l.latitude));
    add(node, schema("longitude"), Term::decimal(l.longitude));
    add(node, schema("containedInPlace"), country(l.country));
    add(node, voc("populationDensity"), Term::decimal(l.population_density));
    add(node, voc("educationLevel"), Term::literal(to_string(l.education_level)));
  }
  for (const auto& h : b.households) {
    auto node = household(h.name);
    add(node, type(), schema("House"));
    add(node, schema("name"), Term::literal(h.name));
    add(node, schema("containedInPlace"), place(h.location_ref));
    add(node, voc("occupancy"), Term::integer(h.occupancy));
    add(node, voc("floorArea"), Term::decimal(h.floor_area));
    add(node, voc("dwellingType"), Term::literal(to_string(h.dwelling_type)));
    add(node, voc("measurementStart"), Term::literal(h.measurement_start, rdf::ns::xsd_date()));
    add(node, voc("measurementEnd"), Term::literal(h.measurement_end, rdf::ns::xsd_date()));
  }
  for (const auto& a : b.appliances) {
    auto node = appliance(a.id);
    add(household(a.household_ref), voc("hasAppliance"), node);
    add(node, type(), saref("Device"));
    add(node, schema("name"), Term::literal(a.label));
    add(node, voc("averageDailyConsumption"), Term::decimal(a.avg_daily_consumption));
    add(node, voc("averageOnEventConsumption"), Term::decimal(a.avg_on_event_consumption));
  }
  for (const auto& p : b.profiles) {
    auto node = household(p.household_ref);
    for (std::size_t hour = 0; hour < 24; ++hour) add(node, hourly_load(hour), Term::decimal(p.hourly_averages[hour]));
    if (!p.image.empty()) add(node, voc("loadProfileImage"), Term::iri(p.image));
  }
  return out;
}

/// Validates the records and emits them into a fresh store.
inline rdf::Store build_graph(const FixtureBundle& bundle) {
  rdf::Store store;
  store.insert_all(build_triples(bundle));
  return store;
}

inline std::size_t expected_triple_count(const FixtureBundle& b) {
  std::set<std::string> countries;
  for (const auto& l : b.locations) countries.insert(l.country);
  std::size_t images = 0;
  for (const auto& p : b.profiles) images += p.image.empty() ? 0 : 1;
  return 8 * b.households.size() + 5 * b.appliances.size() + 7 * b.locations.size() + 7 * countries.size() +
         24 * b.profiles.size() + images;
}

}  // namespace elkg::kg
