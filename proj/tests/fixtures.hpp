#pragma once

// Readers for the tab-separated published-value fixtures.

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

namespace fixture {

using Row = std::map<std::string, std::string>;

inline std::filesystem::path dir() { return RINGS_FIXTURE_DIR; }

inline std::vector<Row> read_tsv(const std::string& name) {
  std::ifstream in(dir() / name);
  if (!in) throw std::runtime_error("missing fixture " + name);
  auto split = [](const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
      const auto pos = line.find('\t', start);
      out.push_back(line.substr(start, pos == std::string::npos ? pos : pos - start));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    return out;
  };
  std::string line;
  std::getline(in, line);
  const auto header = split(line);
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    Row r;
    for (std::size_t i = 0; i < header.size() && i < cells.size(); ++i) r[header[i]] = cells[i];
    rows.push_back(std::move(r));
  }
  return rows;
}

inline std::vector<Row> separability_rows(const std::string& table) {
  std::vector<Row> out;
  for (auto& r : read_tsv("separability_tables.tsv")) {
    if (r["table"] == table) out.push_back(r);
  }
  return out;
}

}  // namespace fixture
