#pragma once

// Seed fixture: a per-dataset spec file expands deterministically into the
// four-file CSV bundle (households, appliances, locations, profiles).

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "elkg/kg/csv.hpp"
#include "elkg/kg/records.hpp"
#include "elkg/rdf/term.hpp"

namespace elkg::kg {

class DuplicatePrefix : public Error {
public:
  explicit DuplicatePrefix(std::string prefix)
      : Error("duplicate dataset prefix in fixture spec: " + prefix), prefix_(std::move(prefix)) {}
  [[nodiscard]] const std::string& prefix() const noexcept { return prefix_; }

private:
  std::string prefix_;
};

/// One measurement campaign and the location it was recorded in.
struct DatasetSpec {
  std::string prefix;
  long long households = 1;
  std::string country;
  std::string continent;
  std::string city;
  double latitude = 0;
  double longitude = 0;
  double gdp_per_capita = 0;
  double average_wage = 0;
  double population_density = 0;
  double electricity_price = 0;
  double carbon_intensity = 0;
  EducationLevel education_level = EducationLevel::Medium;
  std::string measurement_start;
  std::string measurement_end;
};

struct FixtureSpec {
  std::vector<DatasetSpec> datasets;
};

inline const std::vector<std::string>& fixture_spec_columns() {
  static const std::vector<std::string> cols{
      "prefix",          "households",       "country",         "continent",        "city",
      "latitude",        "longitude",        "gdpPerCapita",    "averageWage",      "populationDensity",
      "electricityPrice", "carbonIntensity", "educationLevel",  "measurementStart", "measurementEnd"};
  return cols;
}

/// Default seed spec; identical to data/seed/fixture_spec.csv.
inline constexpr std::string_view kDefaultFixtureSpecCsv =
    R"(# Seed fixture for the household electricity knowledge graph.
#
# One row per dataset (measurement campaign). Households are named
# {prefix}_{1..households}. Enrichment values are configuration, not claims:
# tests only rely on relationships between them (e.g. the UK GDP per capita
# being above 50000 USD), never on their absolute truth.
#
# Units: gdpPerCapita USD, averageWage USD/year, populationDensity persons/km2,
# electricityPrice EUR/kWh, carbonIntensity gCO2/kWh.
prefix,households,country,continent,city,latitude,longitude,gdpPerCapita,averageWage,populationDensity,electricityPrice,carbonIntensity,educationLevel,measurementStart,measurementEnd
IDEAL,2,United Kingdom,Europe,Edinburgh,55.9533,-3.1883,52426,53985,1830,0.34,238,high,2016-08-01,2018-06-30
REFIT,3,United Kingdom,Europe,Loughborough,52.7721,-1.2062,52426,53985,1770,0.34,238,high,2013-10-01,2015-06-30
UKDALE,2,United Kingdom,Europe,London,51.5072,-0.1276,52426,53985,5598,0.34,238,high,2012-11-09,2017-04-26
# ECO was recorded in Switzerland and REDD in the United States (fixture data).
ECO,2,Switzerland,Europe,Zurich,47.3769,8.5417,99995,79200,4700,0.27,46,high,2012-06-01,2013-01-31
REDD,2,United States,North America,Cambridge,42.3736,-71.1097,80035,77463,7200,0.16,369,high,2011-04-18,2011-05-30
IAWE,1,India,Asia,Delhi,28.7041,77.1025,2485,2950,11320,0.08,713,medium,2013-05-24,2013-08-03
ENERTALK,2,South Korea,Asia,Seoul,37.5665,126.978,33121,48922,15600,0.11,436,high,2016-09-01,2017-06-30
)";

inline FixtureSpec parse_fixture_spec(std::string_view csv) {
  auto rows = parse_csv(csv);
  FixtureSpec spec;
  if (rows.empty()) return spec;
  CsvTable t(std::move(rows), fixture_spec_columns(), "fixture spec");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < t.size(); ++i) {
    DatasetSpec d;
    d.prefix = t.get(i, "prefix");
    if (d.prefix.empty() || d.prefix.find('_') != std::string::npos || !is_identifier(d.prefix))
      throw InvariantViolation("prefix", "dataset prefix must be a non-empty identifier without '_': '" + d.prefix + "'");
    if (!seen.insert(d.prefix).second) throw DuplicatePrefix(d.prefix);
    d.households = t.integer(i, "households");
    if (d.households < 1) throw InvariantViolation("households", "must be >= 1 for " + d.prefix);
    d.country = t.get(i, "country");
    d.continent = t.get(i, "continent");
    d.city = t.get(i, "city");
    d.latitude = t.number(i, "latitude");
    d.longitude = t.number(i, "longitude");
    d.gdp_per_capita = t.number(i, "gdpPerCapita");
    d.average_wage = t.number(i, "averageWage");
    d.population_density = t.number(i, "populationDensity");
    d.electricity_price = t.number(i, "electricityPrice");
    d.carbon_intensity = t.number(i, "carbonIntensity");
    d.education_level = parse_education(t.get(i, "educationLevel"));
    d.measurement_start = t.get(i, "measurementStart");
    d.measurement_end = t.get(i, "measurementEnd");
    spec.datasets.push_back(std::move(d));
  }
  return spec;
}

inline FixtureSpec default_fixture_spec() { return parse_fixture_spec(kDefaultFixtureSpecCsv); }

namespace detail {

inline double round3(double v) { return std::round(v * 1000.0) / 1000.0; }

/// Typical-day shape (kW): early-morning peak over hours 0-5, drop over 5-10,
/// evening rise from 16.
inline constexpr std::array<double, 24> kProfileShape{0.92, 1.05, 0.98, 0.90, 0.84, 0.62, 0.41, 0.33,
                                                      0.30, 0.29, 0.31, 0.34, 0.38, 0.36, 0.35, 0.37,
                                                      0.45, 0.58, 0.71, 0.76, 0.74, 0.69, 0.66, 0.78};

struct ApplianceTemplate {
  const char* label;
  double daily;
  double on_event;
};

inline constexpr ApplianceTemplate kAppliances[] = {{"Fridge", 1.10, 0.045},
                                                    {"WashingMachine", 0.85, 0.95},
                                                    {"Kettle", 0.32, 0.11},
                                                    {"Television", 0.48, 0.21},
                                                    {"Dishwasher", 1.05, 1.20}};

}  // namespace detail

/// Expands a spec into records. Deterministic: equal specs give equal bundles.
inline FixtureBundle generate_seed_fixture(const FixtureSpec& spec) {
  FixtureBundle b;
  std::set<std::string> seen;
  for (const auto& d : spec.datasets) {
    if (!seen.insert(d.prefix).second) throw DuplicatePrefix(d.prefix);
    LocationRecord loc;
    loc.id = "LOC_" + d.prefix;
    loc.latitude = d.latitude;
    loc.longitude = d.longitude;
    loc.city = d.city;
    loc.country = d.country;
    loc.continent = d.continent;
    loc.gdp_per_capita = d.gdp_per_capita;
    loc.average_wage = d.average_wage;
    loc.population_density = d.population_density;
    loc.electricity_price = d.electricity_price;
    loc.carbon_intensity = d.carbon_intensity;
    loc.education_level = d.education_level;
    b.locations.push_back(loc);

    const auto plen = static_cast<long long>(d.prefix.size());
    for (long long i = 1; i <= d.households; ++i) {
      HouseholdRecord h;
      h.name = d.prefix + "_" + std::to_string(i);
      h.measurement_start = d.measurement_start;
      h.measurement_end = d.measurement_end;
      h.occupancy = 1 + (i + plen) % 4;
      h.floor_area = 62.5 + 14.0 * static_cast<double>(i) + 3.0 * static_cast<double>(plen % 5);
      h.dwelling_type = i % 3 == 0 ? DwellingType::Apartment : DwellingType::House;
      h.location_ref = loc.id;

      const double scale = 1.0 + 0.05 * static_cast<double>(i);
      const auto n_appliances = static_cast<std::size_t>(2 + i % 3);
      for (std::size_t k = 0; k < n_appliances; ++k) {
        const auto& tpl = detail::kAppliances[k];
        ApplianceRecord a;
        a.id = h.name + "_" + tpl.label;
        a.label = tpl.label;
        a.avg_daily_consumption = detail::round3(tpl.daily * scale);
        a.avg_on_event_consumption = detail::round3(tpl.on_event * scale);
        a.household_ref = h.name;
        h.appliance_refs.push_back(a.id);
        b.appliances.push_back(std::move(a));
      }

      LoadProfile p;
      p.household_ref = h.name;
      const double level = 1.0 + 0.1 * static_cast<double>(i - 1) + 0.03 * static_cast<double>(plen);
      for (std::size_t hour = 0; hour < 24; ++hour)
        p.hourly_averages[hour] = detail::round3(detail::kProfileShape[hour] * level);
      b.profiles.push_back(std::move(p));
      b.households.push_back(std::move(h));
    }
  }
  return b;
}

// -- CSV bundle ----------------------------------------------------------

inline std::string num(double v) {
  auto s = rdf::Term::format_decimal(v);
  if (s.size() > 2 && s.compare(s.size() - 2, 2, ".0") == 0) s.resize(s.size() - 2);
  return s;
}

struct BundleCsv {
  std::string households;
  std::string appliances;
  std::string locations;
  std::string profiles;
};

inline BundleCsv to_csv(const FixtureBundle& b) {
  BundleCsv out;
  std::vector<CsvRow> rows{{"name", "measurementStart", "measurementEnd", "occupancy", "floorArea", "dwellingType",
                            "locationRef", "applianceRefs"}};
  for (const auto& h : b.households) {
    std::string refs;
    for (const auto& r : h.appliance_refs) refs += (refs.empty() ? "" : ";") + r;
    rows.push_back({h.name, h.measurement_start, h.measurement_end, std::to_string(h.occupancy), num(h.floor_area),
                    to_string(h.dwelling_type), h.location_ref, refs});
  }
  out.households = write_csv(rows);

  rows = {{"id", "label", "householdRef", "avgDailyConsumption", "avgOnEventConsumption"}};
  for (const auto& a : b.appliances)
    rows.push_back({a.id, a.label, a.household_ref, num(a.avg_daily_consumption), num(a.avg_on_event_consumption)});
  out.appliances = write_csv(rows);

  rows = {{"id", "latitude", "longitude", "city", "country", "continent", "gdpPerCapita", "averageWage",
           "populationDensity", "electricityPrice", "carbonIntensity", "educationLevel"}};
  for (const auto& l : b.locations)
    rows.push_back({l.id, num(l.latitude), num(l.longitude), l.city, l.country, l.continent, num(l.gdp_per_capita),
                    num(l.average_wage), num(l.population_density), num(l.electricity_price),
                    num(l.carbon_intensity), to_string(l.education_level)});
  out.locations = write_csv(rows);

  CsvRow header{"householdRef"};
  for (int h = 0; h < 24; ++h) header.push_back((h < 10 ? "h0" : "h") + std::to_string(h));
  header.push_back("image");
  rows = {header};
  for (const auto& p : b.profiles) {
    CsvRow r{p.household_ref};
    for (double v : p.hourly_averages) r.push_back(num(v));
    r.push_back(p.image);
    rows.push_back(std::move(r));
  }
  out.profiles = write_csv(rows);
  return out;
}

inline FixtureBundle from_csv(const BundleCsv& csv) {
  FixtureBundle b;
  CsvTable hh(parse_csv(csv.households),
              {"name", "measurementStart", "measurementEnd", "occupancy", "floorArea", "dwellingType", "locationRef",
               "applianceRefs"},
              "households.csv");
  for (std::size_t i = 0; i < hh.size(); ++i) {
    HouseholdRecord h;
    h.name = hh.get(i, "name");
    h.measurement_start = hh.get(i, "measurementStart");
    h.measurement_end = hh.get(i, "measurementEnd");
    h.occupancy = hh.integer(i, "occupancy");
    h.floor_area = hh.number(i, "floorArea");
    h.dwelling_type = parse_dwelling(hh.get(i, "dwellingType"));
    h.location_ref = hh.get(i, "locationRef");
    std::stringstream refs(hh.get(i, "applianceRefs"));
    for (std::string r; std::getline(refs, r, ';');)
      if (!r.empty()) h.appliance_refs.push_back(r);
    b.households.push_back(std::move(h));
  }

  CsvTable ap(parse_csv(csv.appliances), {"id", "label", "householdRef", "avgDailyConsumption", "avgOnEventConsumption"},
              "appliances.csv");
  for (std::size_t i = 0; i < ap.size(); ++i)
    b.appliances.push_back({ap.get(i, "id"), ap.get(i, "label"), ap.number(i, "avgDailyConsumption"),
                            ap.number(i, "avgOnEventConsumption"), ap.get(i, "householdRef")});

  CsvTable lo(parse_csv(csv.locations),
              {"id", "latitude", "longitude", "city", "country", "continent", "gdpPerCapita", "averageWage",
               "populationDensity", "electricityPrice", "carbonIntensity", "educationLevel"},
              "locations.csv");
  for (std::size_t i = 0; i < lo.size(); ++i) {
    LocationRecord l;
    l.id = lo.get(i, "id");
    l.latitude = lo.number(i, "latitude");
    l.longitude = lo.number(i, "longitude");
    l.city = lo.get(i, "city");
    l.country = lo.get(i, "country");
    l.continent = lo.get(i, "continent");
    l.gdp_per_capita = lo.number(i, "gdpPerCapita");
    l.average_wage = lo.number(i, "averageWage");
    l.population_density = lo.number(i, "populationDensity");
    l.electricity_price = lo.number(i, "electricityPrice");
    l.carbon_intensity = lo.number(i, "carbonIntensity");
    l.education_level = parse_education(lo.get(i, "educationLevel"));
    b.locations.push_back(std::move(l));
  }

  std::vector<std::string> cols{"householdRef"};
  for (int h = 0; h < 24; ++h) cols.push_back((h < 10 ? "h0" : "h") + std::to_string(h));
  CsvTable pr(parse_csv(csv.profiles), cols, "profiles.csv");
  for (std::size_t i = 0; i < pr.size(); ++i) {
    LoadProfile p;
    p.household_ref = pr.get(i, "householdRef");
    for (int h = 0; h < 24; ++h) p.hourly_averages[h] = pr.number(i, cols[static_cast<std::size_t>(h) + 1]);
    if (pr.has_column("image")) p.image = pr.get(i, "image");
    b.profiles.push_back(std::move(p));
  }
  return b;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

inline void write_bundle(const std::filesystem::path& dir, const FixtureBundle& b) {
  std::filesystem::create_directories(dir);
  auto csv = to_csv(b);
  write_file(dir / "households.csv", csv.households);
  write_file(dir / "appliances.csv", csv.appliances);
  write_file(dir / "locations.csv", csv.locations);
  write_file(dir / "profiles.csv", csv.profiles);
}

inline FixtureBundle read_bundle(const std::filesystem::path& dir) {
  return from_csv({read_file(dir / "households.csv"), read_file(dir / "appliances.csv"),
                   read_file(dir / "locations.csv"), read_file(dir / "profiles.csv")});
}

}  // namespace elkg::kg
