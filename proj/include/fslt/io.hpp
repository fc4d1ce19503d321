#pragma once

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fslt/config.hpp"
#include "json.hpp"

namespace fslt {

inline constexpr const char* kVersion = "0.1.0";

class OutputCollision : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Comma-separated table with optional leading "# key: value" rows.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void comment(const std::string& key, const std::string& value) { comments_.push_back("# " + key + ": " + value); }

  void add_row(const std::vector<double>& values) {
    require(values.size() == header_.size(), "CsvTable: row width does not match header");
    std::string line;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) line += ',';
      line += format_double(values[i]);
    }
    rows_.push_back(std::move(line));
  }

  std::string str() const {
    std::string out;
    for (const auto& c : comments_) out += c + '\n';
    for (std::size_t i = 0; i < header_.size(); ++i) out += (i ? "," : "") + header_[i];
    out += '\n';
    for (const auto& r : rows_) out += r + '\n';
    return out;
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::string> comments_;
  std::vector<std::string> rows_;
};

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Collects the files of one run and writes them together, refusing to
// replace existing files unless `force` is set.
class OutputSet {
 public:
  OutputSet(std::filesystem::path directory, bool force) : dir_(std::move(directory)), force_(force) {}

  void add(const std::string& name, std::string content) { files_.emplace_back(name, std::move(content)); }
  void add(const std::string& name, const CsvTable& t) { add(name, t.str()); }
  void add(const std::string& name, const nlohmann::json& j) { add(name, j.dump(2) + "\n"); }

  std::vector<std::string> names() const {
    std::vector<std::string> n;
    for (const auto& [name, _] : files_) n.push_back(name);
    return n;
  }

  void check_collisions() const {
    if (force_) return;
    for (const auto& [name, _] : files_)
      if (std::filesystem::exists(dir_ / name))
        throw OutputCollision("output file '" + (dir_ / name).string() + "' exists (use --force to overwrite)");
  }

  void write() const {
    check_collisions();
    std::filesystem::create_directories(dir_);
    for (const auto& [name, content] : files_) {
      std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
      if (!out) throw std::runtime_error("cannot write '" + (dir_ / name).string() + "'");
      out << content;
    }
  }

  const std::filesystem::path& directory() const { return dir_; }

 private:
  std::filesystem::path dir_;
  bool force_;
  std::vector<std::pair<std::string, std::string>> files_;
};

inline nlohmann::json descriptor_json(const BasisDescriptor& d) {
  nlohmann::json j = d;
  return j;
}

}  // namespace fslt
