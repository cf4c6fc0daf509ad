#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "omnicorr/types.hpp"

namespace omnicorr {

// Structured-text config: [section] headers, "key = value" lines,
// '#' comments. Matrix values separate rows with ';'.
class Config {
 public:
  static Config parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str());
  }

  static Config parse_string(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') {
          throw std::runtime_error("config line " + std::to_string(lineno) +
                                   ": unterminated section header");
        }
        section = trim(line.substr(1, line.size() - 2));
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw std::runtime_error("config line " + std::to_string(lineno) +
                                 ": expected key = value");
      }
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      cfg.values_[section + "." + key] = value;
    }
    return cfg;
  }

  bool has(const std::string& section, const std::string& key) const {
    return values_.count(section + "." + key) > 0;
  }

  std::string get_string(const std::string& section, const std::string& key) const {
    return raw(section, key);
  }

  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const {
    return has(section, key) ? raw(section, key) : fallback;
  }

  double get_double(const std::string& section, const std::string& key) const {
    return std::stod(raw(section, key));
  }

  double get_double(const std::string& section, const std::string& key,
                    double fallback) const {
    return has(section, key) ? std::stod(raw(section, key)) : fallback;
  }

  std::int64_t get_int(const std::string& section, const std::string& key) const {
    return std::stoll(raw(section, key));
  }

  std::int64_t get_int(const std::string& section, const std::string& key,
                       std::int64_t fallback) const {
    return has(section, key) ? std::stoll(raw(section, key)) : fallback;
  }

  Vector get_vector(const std::string& section, const std::string& key) const {
    const std::string text = raw(section, key);
    std::istringstream in(text);
    std::vector<double> entries;
    double v = 0.0;
    while (in >> v) entries.push_back(v);
    Vector out(static_cast<Eigen::Index>(entries.size()));
    for (std::size_t i = 0; i < entries.size(); ++i) {
      out[static_cast<Eigen::Index>(i)] = entries[i];
    }
    return out;
  }

  Vector get_vector(const std::string& section, const std::string& key,
                    const Vector& fallback) const {
    return has(section, key) ? get_vector(section, key) : fallback;
  }

  /// Rows separated by ';', entries by whitespace.
  Matrix get_matrix(const std::string& section, const std::string& key) const {
    const std::string text = raw(section, key);
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string row_text;
    while (std::getline(in, row_text, ';')) {
      std::istringstream row_in(row_text);
      std::vector<double> row;
      double v = 0.0;
      while (row_in >> v) row.push_back(v);
      if (!row.empty()) rows.push_back(std::move(row));
    }
    require(!rows.empty(), "config matrix is empty: " + key);
    Matrix out(static_cast<Eigen::Index>(rows.size()),
               static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      require(rows[i].size() == rows[0].size(), "config matrix is ragged: " + key);
      for (std::size_t j = 0; j < rows[i].size(); ++j) {
        out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
      }
    }
    return out;
  }

  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  static std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
  }

  const std::string& raw(const std::string& section, const std::string& key) const {
    const auto it = values_.find(section + "." + key);
    if (it == values_.end()) {
      throw std::runtime_error("missing config key [" + section + "] " + key);
    }
    return it->second;
  }

  std::map<std::string, std::string> values_;
};

}  // namespace omnicorr
