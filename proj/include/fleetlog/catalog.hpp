#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "fleetlog/csv.hpp"

namespace fleetlog {

struct CatalogError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One valid workshop intervention: a three-tier hierarchy position plus the
/// activity performed.
struct ServiceOperation {
  std::string system;
  std::string subsystem;
  std::string component;
  std::string activity;

  bool operator==(const ServiceOperation&) const = default;
  auto operator<=>(const ServiceOperation&) const = default;
};

/// The controlled vocabulary of valid interventions. Immutable after load;
/// every subsystem belongs to exactly one system and every component to
/// exactly one subsystem.
class Catalog {
 public:
  static Catalog from_rows(std::vector<ServiceOperation> rows);
  static Catalog load(const std::filesystem::path& path);
  static Catalog from_csv(const csv::Table& table);

  /// The catalog shipped with the toolkit (10 systems, 26 subsystems,
  /// 34 components, 142 entries).
  static const Catalog& standard();

  const std::vector<ServiceOperation>& rows() const { return rows_; }

  bool contains(const ServiceOperation& op) const;

  const std::set<std::string>& systems() const { return systems_; }
  const std::set<std::string>& subsystems() const { return subsystems_; }
  const std::set<std::string>& components() const { return components_; }
  const std::set<std::string>& activities() const { return activities_; }

  /// Union of all four tiers' tokens.
  const std::set<std::string>& vocabulary() const { return vocabulary_; }

  const std::string& system_of_subsystem(const std::string& subsystem) const;
  const std::string& subsystem_of_component(const std::string& component) const;

  /// Values for `field` (one of system/subsystem/component/activity) that form
  /// a catalog row together with the other three fields of `row`.
  std::vector<std::string> consistent_values(const ServiceOperation& row,
                                             const std::string& field) const;

  std::vector<std::string> field_vocabulary(const std::string& field) const;

 private:
  std::vector<ServiceOperation> rows_;
  std::set<ServiceOperation> row_set_;
  std::set<std::string> systems_, subsystems_, components_, activities_;
  std::set<std::string> vocabulary_;
  std::map<std::string, std::string> subsystem_to_system_;
  std::map<std::string, std::string> component_to_subsystem_;
};

}  // namespace fleetlog
