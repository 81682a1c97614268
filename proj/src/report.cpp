#include "stopcost/report.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace stopcost {

Table& Report::add_table(std::string name, std::vector<std::string> columns) {
  tables.push_back(Table{std::move(name), std::move(columns), {}});
  return tables.back();
}

const Table* Report::find(const std::string& name) const {
  for (const auto& t : tables)
    if (t.name == name) return &t;
  return nullptr;
}

Format format_from_string(const std::string& name) {
  if (name == "csv") return Format::kCsv;
  if (name == "json") return Format::kJson;
  if (name == "pretty") return Format::kPretty;
  throw std::invalid_argument("unknown format '" + name + "' (expected csv, json or pretty)");
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, res.ptr);
}

namespace {

std::string cell_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) return format_number(v.get<double>());
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_null()) return "";
  return v.dump();
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string to_csv(const Report& report) {
  std::ostringstream out;
  for (const auto& [k, v] : report.metadata) out << "# " << k << ": " << v << "\n";
  for (const auto& w : report.warnings) out << "# warning: " << w << "\n";
  bool first = true;
  for (const auto& t : report.tables) {
    if (!first) out << "\n";
    first = false;
    out << "# table: " << t.name << "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << csv_escape(t.columns[i]);
    out << "\n";
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_escape(cell_text(row[i]));
      out << "\n";
    }
  }
  return out.str();
}

std::string to_json(const Report& report) {
  nlohmann::json j;
  j["metadata"] = nlohmann::json::object();
  for (const auto& [k, v] : report.metadata) j["metadata"][k] = v;
  j["warnings"] = report.warnings;
  j["tables"] = nlohmann::json::object();
  for (const auto& t : report.tables) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : t.rows) {
      nlohmann::json obj = nlohmann::json::object();
      for (std::size_t i = 0; i < row.size() && i < t.columns.size(); ++i) obj[t.columns[i]] = row[i];
      rows.push_back(obj);
    }
    j["tables"][t.name] = {{"columns", t.columns}, {"rows", rows}};
  }
  return j.dump(2) + "\n";
}

std::string to_pretty(const Report& report) {
  std::ostringstream out;
  for (const auto& [k, v] : report.metadata) out << k << ": " << v << "\n";
  for (const auto& w : report.warnings) out << "warning: " << w << "\n";
  for (const auto& t : report.tables) {
    out << "\n[" << t.name << "]\n";
    std::vector<std::vector<std::string>> cells;
    cells.push_back(t.columns);
    for (const auto& row : t.rows) {
      std::vector<std::string> r;
      for (const auto& v : row) {
        if (v.is_number_float()) {
          char buf[32];
          std::snprintf(buf, sizeof buf, "%.6g", v.get<double>());
          r.emplace_back(buf);
        } else {
          r.push_back(cell_text(v));
        }
      }
      cells.push_back(std::move(r));
    }
    std::vector<std::size_t> width(t.columns.size(), 0);
    for (const auto& r : cells)
      for (std::size_t i = 0; i < r.size() && i < width.size(); ++i) width[i] = std::max(width[i], r[i].size());
    for (std::size_t ri = 0; ri < cells.size(); ++ri) {
      const auto& r = cells[ri];
      for (std::size_t i = 0; i < r.size() && i < width.size(); ++i) {
        out << (i ? "  " : "") << r[i];
        if (i + 1 < r.size()) out << std::string(width[i] - r[i].size(), ' ');
      }
      out << "\n";
      if (ri == 0) {
        std::size_t total = 0;
        for (auto w : width) total += w + 2;
        out << std::string(total > 2 ? total - 2 : 0, '-') << "\n";
      }
    }
  }
  return out.str();
}

std::string render(const Report& report, Format format) {
  switch (format) {
    case Format::kCsv: return to_csv(report);
    case Format::kJson: return to_json(report);
    case Format::kPretty: return to_pretty(report);
  }
  return {};
}

std::string config_hash(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace stopcost
