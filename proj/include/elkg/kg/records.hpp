#pragma once

#include <array>
#include <cctype>
#include <cmath>
#include <string>
#include <vector>

#include "elkg/error.hpp"

namespace elkg::kg {

class DanglingReference : public Error {
public:
  explicit DanglingReference(std::string record_id)
      : Error("dangling reference: " + record_id), record_id_(std::move(record_id)) {}
  [[nodiscard]] const std::string& record_id() const noexcept { return record_id_; }

private:
  std::string record_id_;
};

class InvariantViolation : public Error {
public:
  InvariantViolation(std::string field, const std::string& detail)
      : Error("invariant violated for " + field + ": " + detail), field_(std::move(field)) {}
  [[nodiscard]] const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

enum class DwellingType { House, Apartment };
enum class EducationLevel { Low, Medium, High };

inline std::string to_string(DwellingType d) { return d == DwellingType::House ? "house" : "apartment"; }
inline std::string to_string(EducationLevel e) {
  switch (e) {
    case EducationLevel::Low: return "low";
    case EducationLevel::Medium: return "medium";
    case EducationLevel::High: return "high";
  }
  return {};
}

inline DwellingType parse_dwelling(const std::string& s) {
  if (s == "house") return DwellingType::House;
  if (s == "apartment") return DwellingType::Apartment;
  throw InvariantViolation("dwellingType", "expected house|apartment, got '" + s + "'");
}

inline EducationLevel parse_education(const std::string& s) {
  if (s == "low") return EducationLevel::Low;
  if (s == "medium") return EducationLevel::Medium;
  if (s == "high") return EducationLevel::High;
  throw InvariantViolation("educationLevel", "expected low|medium|high, got '" + s + "'");
}

/// Household named "{DATASET}_{index}"; the part before '_' is the dataset prefix.
struct HouseholdRecord {
  std::string name;
  std::string measurement_start;  // ISO date YYYY-MM-DD
  std::string measurement_end;
  long long occupancy = 1;
  double floor_area = 0;  // square meters
  DwellingType dwelling_type = DwellingType::House;
  std::string location_ref;
  std::vector<std::string> appliance_refs;

  friend bool operator==(const HouseholdRecord&, const HouseholdRecord&) = default;
};

struct ApplianceRecord {
  std::string id;
  std::string label;
  double avg_daily_consumption = 0;     // kWh/day
  double avg_on_event_consumption = 0;  // kWh/event
  std::string household_ref;

  friend bool operator==(const ApplianceRecord&, const ApplianceRecord&) = default;
};

struct LocationRecord {
  std::string id;
  double latitude = 0;
  double longitude = 0;
  std::string city;
  std::string country;
  std::string continent;
  double gdp_per_capita = 0;      // USD
  double average_wage = 0;        // USD/year
  double population_density = 0;  // persons/km2
  double electricity_price = 0;   // EUR/kWh
  double carbon_intensity = 0;    // gCO2/kWh
  EducationLevel education_level = EducationLevel::Medium;

  friend bool operator==(const LocationRecord&, const LocationRecord&) = default;
};

/// Mean demand (kW) per hour of day, hour 0 first.
struct LoadProfile {
  std::string household_ref;
  std::array<double, 24> hourly_averages{};
  std::string image;  // optional IRI of a rendered plot

  friend bool operator==(const LoadProfile&, const LoadProfile&) = default;
};

struct FixtureBundle {
  std::vector<HouseholdRecord> households;
  std::vector<ApplianceRecord> appliances;
  std::vector<LocationRecord> locations;
  std::vector<LoadProfile> profiles;

  friend bool operator==(const FixtureBundle&, const FixtureBundle&) = default;
};

/// Dataset prefix of a household name: the text before its single '_'.
inline std::string dataset_prefix(const std::string& household_name) {
  return household_name.substr(0, household_name.find('_'));
}

inline bool is_iso_date(const std::string& s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9})
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  int month = std::stoi(s.substr(5, 2));
  int day = std::stoi(s.substr(8, 2));
  return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

inline bool is_identifier(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
  return true;
}

namespace detail {
inline void require_finite(const std::string& field, double v, bool strictly_positive) {
  if (!std::isfinite(v)) throw InvariantViolation(field, "must be finite");
  if (strictly_positive ? v <= 0 : v < 0)
    throw InvariantViolation(field, strictly_positive ? "must be > 0" : "must be >= 0");
}
}  // namespace detail

inline void validate(const HouseholdRecord& h) {
  auto underscore = h.name.find('_');
  if (!is_identifier(h.name) || underscore == std::string::npos || underscore == 0 ||
      h.name.find('_', underscore + 1) != std::string::npos || underscore + 1 == h.name.size())
    throw InvariantViolation("name", "household name must be {DATASET}_{index}, got '" + h.name + "'");
  if (!is_iso_date(h.measurement_start)) throw InvariantViolation("measurementStart", "not an ISO date");
  if (!is_iso_date(h.measurement_end)) throw InvariantViolation("measurementEnd", "not an ISO date");
  if (h.measurement_start > h.measurement_end)
    throw InvariantViolation("measurementStart", "must not be after measurementEnd for " + h.name);
  if (h.occupancy <= 0) throw InvariantViolation("occupancy", "must be a positive integer");
  detail::require_finite("floorArea", h.floor_area, true);
  if (!is_identifier(h.location_ref)) throw InvariantViolation("locationRef", "invalid identifier");
}

inline void validate(const ApplianceRecord& a) {
  if (!is_identifier(a.id)) throw InvariantViolation("id", "invalid appliance identifier '" + a.id + "'");
  if (a.label.empty()) throw InvariantViolation("label", "must not be empty");
  detail::require_finite("avgDailyConsumption", a.avg_daily_consumption, false);
  detail::require_finite("avgOnEventConsumption", a.avg_on_event_consumption, false);
}

inline void validate(const LocationRecord& l) {
  if (!is_identifier(l.id)) throw InvariantViolation("id", "invalid location identifier '" + l.id + "'");
  if (!std::isfinite(l.latitude) || l.latitude < -90 || l.latitude > 90)
    throw InvariantViolation("latitude", "must be within [-90, 90]");
  if (!std::isfinite(l.longitude) || l.longitude < -180 || l.longitude > 180)
    throw InvariantViolation("longitude", "must be within [-180, 180]");
  if (l.city.empty()) throw InvariantViolation("city", "must not be empty");
  if (l.country.empty()) throw InvariantViolation("country", "must not be empty");
  if (l.continent.empty()) throw InvariantViolation("continent", "must not be empty");
  detail::require_finite("gdpPerCapita", l.gdp_per_capita, true);
  detail::require_finite("averageWage", l.average_wage, true);
  detail::require_finite("populationDensity", l.population_density, true);
  detail::require_finite("electricityPrice", l.electricity_price, true);
  detail::require_finite("carbonIntensity", l.carbon_intensity, true);
}

inline void validate(const LoadProfile& p) {
  for (std::size_t h = 0; h < 24; ++h)
    detail::require_finite("hourlyAverages[" + std::to_string(h) + "]", p.hourly_averages[h], false);
}

}  // namespace elkg::kg
