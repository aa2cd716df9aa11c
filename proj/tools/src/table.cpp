#include "table.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qladder/errors.hpp"

namespace qladder::cli {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

std::string format_integer(std::int64_t x) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  for (const auto& h : header) text(h);
  end_row();
}

void CsvWriter::separator() {
  if (in_row_ > 0) out_.push_back(',');
  ++in_row_;
}

CsvWriter& CsvWriter::field(double x) {
  separator();
  out_ += format_double(x);
  return *this;
}

CsvWriter& CsvWriter::field(std::int64_t x) {
  separator();
  out_ += format_integer(x);
  return *this;
}

CsvWriter& CsvWriter::count(Count x) {
  separator();
  out_ += to_string(x);
  return *this;
}

CsvWriter& CsvWriter::text(std::string_view x) {
  separator();
  out_ += x;
  return *this;
}

void CsvWriter::end_row() {
  if (in_row_ != columns_) {
    throw std::logic_error("CSV row has " + std::to_string(in_row_) + " fields, header has " +
                           std::to_string(columns_));
  }
  out_.push_back('\n');
  in_row_ = 0;
}

namespace {

std::vector<std::string> split_row(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      return out;
    }
    out.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path, const std::vector<std::string>& expected_header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError(ExitCode::kIo, "cannot read " + path.string());
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw CliError(ExitCode::kIo, path.string() + ": empty file");
  table.header = split_row(line);
  if (table.header != expected_header) {
    throw CliError(ExitCode::kIo, path.string() + ": unexpected header '" + line + "'");
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto row = split_row(line);
    if (row.size() != expected_header.size()) {
      throw CliError(ExitCode::kIo, path.string() + ":" + std::to_string(line_no) + ": expected " +
                                        std::to_string(expected_header.size()) + " fields");
    }
    table.rows.push_back(std::move(row));
  }
  if (in.bad()) throw CliError(ExitCode::kIo, "error while reading " + path.string());
  return table;
}

double parse_double_field(std::string_view text, const std::string& where) {
  if (text == "nan") return std::nan("");
  double x = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), x);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw CliError(ExitCode::kIo, where + ": not a number: '" + std::string(text) + "'");
  }
  return x;
}

std::int64_t parse_integer_field(std::string_view text, const std::string& where) {
  std::int64_t x = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), x);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw CliError(ExitCode::kIo, where + ": not an integer: '" + std::string(text) + "'");
  }
  return x;
}

Count parse_count_field(std::string_view text, const std::string& where) {
  try {
    return parse_count(text);
  } catch (const ParameterError& e) {
    throw CliError(ExitCode::kIo, where + ": " + e.what());
  }
}

void OutputBundle::add(const std::filesystem::path& relative, std::string contents) {
  files_[relative] = std::move(contents);
}

void OutputBundle::add_json(const std::filesystem::path& relative, const Json& doc) {
  add(relative, doc.dump(2) + "\n");
}

void OutputBundle::commit() const {
  std::error_code ec;
  std::filesystem::create_directories(root_, ec);
  if (ec) throw CliError(ExitCode::kIo, "cannot create " + root_.string() + ": " + ec.message());
  for (const auto& [relative, contents] : files_) {
    const auto path = root_ / relative;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw CliError(ExitCode::kIo, "cannot create " + path.parent_path().string() + ": " + ec.message());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << contents;
    out.close();
    if (!out) throw CliError(ExitCode::kIo, "cannot write " + path.string());
  }
}

}  // namespace qladder::cli
