#include "fleetlog/catalog.hpp"

#include <algorithm>

namespace fleetlog {

Catalog Catalog::from_rows(std::vector<ServiceOperation> rows) {
  if (rows.empty()) {
    throw CatalogError("catalog is empty");
  }
  Catalog c;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& op = rows[i];
    if (op.system.empty() || op.subsystem.empty() || op.component.empty() ||
        op.activity.empty()) {
      throw CatalogError("catalog row " + std::to_string(i) +
                         " has an empty field");
    }
    if (!c.row_set_.insert(op).second) {
      throw CatalogError("duplicate catalog row at index " + std::to_string(i) +
                         ": (" + op.system + ", " + op.subsystem + ", " +
                         op.component + ", " + op.activity + ")");
    }
    auto [sys_it, sys_new] =
        c.subsystem_to_system_.try_emplace(op.subsystem, op.system);
    if (!sys_new && sys_it->second != op.system) {
      throw CatalogError("hierarchy violation: subsystem '" + op.subsystem +
                         "' appears under systems '" + sys_it->second +
                         "' and '" + op.system + "'");
    }
    auto [comp_it, comp_new] =
        c.component_to_subsystem_.try_emplace(op.component, op.subsystem);
    if (!comp_new && comp_it->second != op.subsystem) {
      throw CatalogError("hierarchy violation: component '" + op.component +
                         "' appears under subsystems '" + comp_it->second +
                         "' and '" + op.subsystem + "'");
    }
    c.systems_.insert(op.system);
    c.subsystems_.insert(op.subsystem);
    c.components_.insert(op.component);
    c.activities_.insert(op.activity);
  }
  for (const auto* tier : {&c.systems_, &c.subsystems_, &c.components_,
                           &c.activities_}) {
    c.vocabulary_.insert(tier->begin(), tier->end());
  }
  c.rows_ = std::move(rows);
  return c;
}

Catalog Catalog::from_csv(const csv::Table& table) {
  for (const char* col : {"System", "Subsystem", "Component", "Activity"}) {
    if (table.column_index(col) < 0) {
      throw CatalogError(std::string("catalog file is missing column '") + col +
                         "'");
    }
  }
  int si = table.column_index("System");
  int ui = table.column_index("Subsystem");
  int ci = table.column_index("Component");
  int ai = table.column_index("Activity");
  std::vector<ServiceOperation> rows;
  rows.reserve(table.rows.size());
  for (const auto& r : table.rows) {
    rows.push_back({r[si], r[ui], r[ci], r[ai]});
  }
  return from_rows(std::move(rows));
}

Catalog Catalog::load(const std::filesystem::path& path) {
  return from_csv(csv::read_file(path));
}

bool Catalog::contains(const ServiceOperation& op) const {
  return row_set_.contains(op);
}

const std::string& Catalog::system_of_subsystem(
    const std::string& subsystem) const {
  auto it = subsystem_to_system_.find(subsystem);
  if (it == subsystem_to_system_.end()) {
    throw CatalogError("unknown subsystem: '" + subsystem + "'");
  }
  return it->second;
}

const std::string& Catalog::subsystem_of_component(
    const std::string& component) const {
  auto it = component_to_subsystem_.find(component);
  if (it == component_to_subsystem_.end()) {
    throw CatalogError("unknown component: '" + component + "'");
  }
  return it->second;
}

std::vector<std::string> Catalog::consistent_values(
    const ServiceOperation& row, const std::string& field) const {
  std::set<std::string> values;
  for (const auto& op : rows_) {
    ServiceOperation candidate = row;
    std::string* slot = nullptr;
    const std::string* value = nullptr;
    if (field == "system") {
      slot = &candidate.system;
      value = &op.system;
    } else if (field == "subsystem") {
      slot = &candidate.subsystem;
      value = &op.subsystem;
    } else if (field == "component") {
      slot = &candidate.component;
      value = &op.component;
    } else if (field == "activity") {
      slot = &candidate.activity;
      value = &op.activity;
    } else {
      throw CatalogError("not a catalog field: '" + field + "'");
    }
    *slot = *value;
    if (candidate == op) values.insert(*value);
  }
  return {values.begin(), values.end()};
}

std::vector<std::string> Catalog::field_vocabulary(
    const std::string& field) const {
  const std::set<std::string>* tier = nullptr;
  if (field == "system") tier = &systems_;
  else if (field == "subsystem") tier = &subsystems_;
  else if (field == "component") tier = &components_;
  else if (field == "activity") tier = &activities_;
  else throw CatalogError("not a catalog field: '" + field + "'");
  return {tier->begin(), tier->end()};
}

}  // namespace fleetlog
