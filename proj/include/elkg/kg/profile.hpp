#pragma once

#include <string>

#include "elkg/kg/builder.hpp"
#include "elkg/kg/records.hpp"
#include "elkg/rdf/store.hpp"

namespace elkg::kg {

class NotFound : public Error {
public:
  explicit NotFound(std::string name) : Error("no load profile for household: " + name), name_(std::move(name)) {}
  [[nodiscard]] const std::string& name() const noexcept { return name_; }

private:
  std::string name_;
};

class MalformedProfile : public Error {
public:
  using Error::Error;
};

/// Reads the 24 hourly values stored for a household, hour 0 first.
inline LoadProfile get_load_profile(const rdf::Store& store, const std::string& household_name) {
  auto node = vocab::household(household_name);
  if (store.match(node, rdf::Term::iri(rdf::ns::rdf_type()), vocab::schema("House")).empty())
    throw NotFound(household_name);

  LoadProfile p;
  p.household_ref = household_name;
  std::size_t present = 0;
  for (std::size_t h = 0; h < 24; ++h) {
    auto values = store.match(node, vocab::hourly_load(h), std::nullopt);
    if (values.empty()) continue;
    if (values.size() > 1)
      throw MalformedProfile(household_name + ": " + std::to_string(values.size()) + " values for hour " +
                             std::to_string(h));
    const auto& lit = values.front().object;
    if (!lit.is_literal()) throw MalformedProfile(household_name + ": hour " + std::to_string(h) + " is not a literal");
    try {
      p.hourly_averages[h] = std::stod(lit.value());
    } catch (const std::exception&) {
      throw MalformedProfile(household_name + ": hour " + std::to_string(h) + " is not numeric");
    }
    ++present;
  }
  if (present == 0) throw NotFound(household_name);
  if (present != 24)
    throw MalformedProfile(household_name + ": expected 24 hourly values, found " + std::to_string(present));
  auto images = store.match(node, vocab::voc("loadProfileImage"), std::nullopt);
  if (!images.empty()) p.image = images.front().object.value();
  return p;
}

}  // namespace elkg::kg
