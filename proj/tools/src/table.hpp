#pragma once

// Locale-independent CSV emission and parsing, plus an output staging area
// that writes nothing until every file of a command has been rendered.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "config.hpp"
#include "qladder/random.hpp"

namespace qladder::cli {

/// Shortest round-trip decimal form; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double x);
std::string format_integer(std::int64_t x);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  CsvWriter& field(double x);
  CsvWriter& field(std::int64_t x);
  CsvWriter& field(int x) { return field(static_cast<std::int64_t>(x)); }
  CsvWriter& field(std::size_t x) { return field(static_cast<std::int64_t>(x)); }
  CsvWriter& count(Count x);
  CsvWriter& text(std::string_view x);
  /// Ends the current row; throws if the field count does not match the header.
  void end_row();

  const std::string& str() const noexcept { return out_; }

 private:
  void separator();

  std::size_t columns_;
  std::size_t in_row_ = 0;
  std::string out_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Reads a CSV file whose header must equal `expected_header`. Any defect is
/// an I/O-class error (exit code 3).
CsvTable read_csv(const std::filesystem::path& path, const std::vector<std::string>& expected_header);

double parse_double_field(std::string_view text, const std::string& where);
std::int64_t parse_integer_field(std::string_view text, const std::string& where);
Count parse_count_field(std::string_view text, const std::string& where);

/// Files rendered in memory and written in one go under a root directory.
class OutputBundle {
 public:
  explicit OutputBundle(std::filesystem::path root) : root_(std::move(root)) {}

  void add(const std::filesystem::path& relative, std::string contents);
  void add_json(const std::filesystem::path& relative, const Json& doc);

  /// Creates directories and writes every file. I/O failures are exit code 3.
  void commit() const;

  const std::filesystem::path& root() const noexcept { return root_; }

 private:
  std::filesystem::path root_;
  std::map<std::filesystem::path, std::string> files_;
};

}  // namespace qladder::cli
