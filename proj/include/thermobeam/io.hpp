#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "json.hpp"

namespace thermobeam {

/// Shortest decimal string that round-trips the value.
std::string format_double(double value);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add_row(const std::vector<double>& values);
  /// Row with a leading text column.
  void add_row(const std::string& label, const std::vector<double>& values);
  std::size_t rows() const { return rows_.size(); }
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::string> rows_;
};

struct CsvData {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Throws DomainError when the column is absent.
  std::size_t column(const std::string& name) const;
};

/// Throws DomainError when the file cannot be read.
CsvData read_csv(const std::filesystem::path& path);

std::string dump_json(const nlohmann::json& j);

/// Collects artifacts from any thread and writes them from one place, in name order.
class ResultWriter {
 public:
  explicit ResultWriter(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void put(const std::string& name, std::string content);
  void put_json(const std::string& name, const nlohmann::json& j) { put(name, dump_json(j)); }
  /// Writes everything collected so far; returns the file names written.
  std::vector<std::string> flush();
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::mutex mutex_;
  std::map<std::string, std::string> pending_;
  std::vector<std::string> written_;
};

void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace thermobeam
