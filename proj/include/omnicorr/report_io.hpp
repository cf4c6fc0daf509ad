#pragma once

#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "omnicorr/harness.hpp"

namespace omnicorr {

inline void emit_report(const MonteCarloReport& report, const std::string& path,
                        const std::string& format) {
  require(format == "csv" || format == "json", "emit_report: format must be csv or json");
  {
    std::ofstream out(path);
    require(out.good(), "emit_report: cannot open " + path);
    if (format == "csv") {
      for (std::size_t i = 0; i < report.columns.size(); ++i) {
        out << (i ? "," : "") << report.columns[i];
      }
      out << '\n';
      for (const auto& row : report.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
          out << (i ? "," : "") << row[i];
        }
        out << '\n';
      }
    } else {
      nlohmann::json j;
      j["columns"] = report.columns;
      j["rows"] = report.rows;
      j["all_pass"] = report.all_pass;
      out << j.dump(2) << '\n';
    }
  }
  {
    std::ofstream out(path + ".summary");
    require(out.good(), "emit_report: cannot open " + path + ".summary");
    out << "[config]\n";
    for (const auto& line : report.summary) out << line << '\n';
  }
}

}  // namespace omnicorr
