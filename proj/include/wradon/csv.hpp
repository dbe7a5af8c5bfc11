#pragma once

// Minimal CSV table: fixed header, rows of doubles printed with %.17g.

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "wradon/errors.hpp"

namespace wradon {

struct CsvTable {
  std::string name;  ///< file stem
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  void add(std::vector<double> row) {
    if (row.size() != header.size()) throw FormatError("csv " + name + ": row width does not match header");
    rows.push_back(std::move(row));
  }

  std::string str() const {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
    out += '\n';
    char buf[40];
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", r[i]);
        if (i) out += ',';
        out += buf;
      }
      out += '\n';
    }
    return out;
  }

  void write(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw FormatError("csv: cannot write " + path);
    f << str();
  }
};

}  // namespace wradon
