#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include <openssl/evp.h>

#include "lacunary/experiment.hpp"

namespace lacunary {

namespace {

double as_number(const Cell& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&c)) return *d;
  throw DomainError("plot data: non-numeric cell '" + std::get<std::string>(c) + "'");
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

}  // namespace

std::size_t ResultTable::column(std::string_view name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw DomainError("result table: no column '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

void ResultTable::add(std::vector<Cell> row) {
  if (row.size() != columns.size()) {
    throw DomainError("result table: row has " + std::to_string(row.size()) + " cells, expected " +
                      std::to_string(columns.size()));
  }
  rows.push_back(std::move(row));
}

std::string format_cell(const Cell& cell) {
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
  if (const auto* s = std::get_if<std::string>(&cell)) return *s;
  const double d = std::get<double>(cell);
  if (std::isnan(d)) return "nan";
  if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  return buf;
}

std::string to_csv(const ResultTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i > 0) out += ',';
    out += csv_field(table.columns[i]);
  }
  out += "\r\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out += ',';
      out += csv_field(format_cell(row[i]));
    }
    out += "\r\n";
  }
  return out;
}

void emit_plot_data(const ResultTable& table, const PlotSpec& spec,
                    const std::filesystem::path& path) {
  if (spec.columns.size() < 2 || spec.columns.size() > 3) {
    throw DomainError("plot data: expected two or three columns");
  }
  std::vector<std::size_t> idx;
  for (const std::string& name : spec.columns) idx.push_back(table.column(name));
  const std::size_t key = table.column(spec.sort_by.value_or(spec.columns.front()));
  if (table.rows.empty()) throw DomainError("plot data: empty table");

  std::vector<std::size_t> order(table.rows.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return as_number(table.rows[a][key]) < as_number(table.rows[b][key]);
  });
  std::string out = "#";
  for (const std::string& name : spec.columns) out += " " + name;
  out += '\n';
  for (std::size_t r : order) {
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (i > 0) out += ' ';
      out += format_cell(Cell(as_number(table.rows[r][idx[i]])));
    }
    out += '\n';
  }
  write_atomic(path, out);
}

void write_atomic(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DomainError("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw DomainError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw NumericalError("sha256: digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 15];
  }
  return out;
}

nlohmann::json to_json(const RunManifest& m) {
  nlohmann::json files = nlohmann::json::array();
  for (const ManifestEntry& e : m.files) {
    files.push_back({{"file", e.file}, {"sha256", e.sha256}, {"bytes", e.bytes}});
  }
  return {{"config_sha256", m.config_sha256},
          {"tool_version", m.tool_version},
          {"rng", m.rng},
          {"kind", m.kind},
          {"seed", m.seed},
          {"started_at", m.started_at},
          {"finished_at", m.finished_at},
          {"files", files}};
}

}  // namespace lacunary
