#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace stopcost {

inline constexpr const char* kToolVersion = "1.0.0";

struct Table {
  std::string name;
  std::vector<std::string> columns;  // units go in the header, e.g. "e_cut_eV"
  std::vector<std::vector<nlohmann::json>> rows;

  void add_row(std::vector<nlohmann::json> row) { rows.push_back(std::move(row)); }
};

struct Report {
  std::map<std::string, std::string> metadata;
  std::vector<Table> tables;
  std::vector<std::string> warnings;

  Table& add_table(std::string name, std::vector<std::string> columns);
  const Table* find(const std::string& name) const;
};

enum class Format { kCsv, kJson, kPretty };
Format format_from_string(const std::string& name);

std::string to_csv(const Report& report);
std::string to_json(const Report& report);
std::string to_pretty(const Report& report);
std::string render(const Report& report, Format format);

// FNV-1a over the config bytes, hex encoded.
std::string config_hash(const std::string& text);

// Shortest decimal that round-trips, so repeated runs emit identical bytes.
std::string format_number(double v);

}  // namespace stopcost
