#include "thermobeam/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "thermobeam/error.hpp"

namespace thermobeam {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(const std::vector<double>& values) {
  if (values.size() != header_.size()) throw ShapeError("csv row width differs from the header");
  std::string row;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) row += ',';
    row += format_double(values[i]);
  }
  rows_.push_back(std::move(row));
}

void CsvTable::add_row(const std::string& label, const std::vector<double>& values) {
  if (values.size() + 1 != header_.size()) throw ShapeError("csv row width differs from the header");
  std::string row = label;
  for (double v : values) row += ',' + format_double(v);
  rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::string out;
  for (std::size_t i = 0; i < header_.size(); ++i) out += (i ? "," : "") + header_[i];
  out += '\n';
  for (const auto& r : rows_) out += r + '\n';
  return out;
}

std::size_t CsvData::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw DomainError("csv has no column '" + name + "'");
}

namespace {
std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}
}  // namespace

CsvData read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot read '" + path.string() + "'");
  CsvData data;
  std::string line;
  if (!std::getline(in, line)) throw DomainError("'" + path.string() + "' is empty");
  data.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    data.rows.push_back(split(line));
  }
  return data;
}

std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

void ResultWriter::put(const std::string& name, std::string content) {
  std::lock_guard<std::mutex> lock(mutex_);
  pending_[name] = std::move(content);
}

std::vector<std::string> ResultWriter::flush() {
  std::lock_guard<std::mutex> lock(mutex_);
  std::filesystem::create_directories(dir_);
  for (const auto& [name, content] : pending_) {
    write_text_file(dir_ / name, content);
    written_.push_back(name);
  }
  pending_.clear();
  return written_;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

}  // namespace thermobeam
