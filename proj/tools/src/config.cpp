#include "config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "qladder/errors.hpp"

namespace qladder::cli {

Json read_json_file(const std::filesystem::path& path, ExitCode malformed) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError(ExitCode::kIo, "cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw CliError(ExitCode::kIo, "error while reading " + path.string());
  try {
    return Json::parse(buffer.str());
  } catch (const Json::parse_error& e) {
    throw CliError(malformed, path.string() + ": malformed JSON: " + e.what());
  }
}

Block::Block(const Json& object, std::string where, ExitCode on_error)
    : object_(&object), where_(std::move(where)), on_error_(on_error) {
  if (!object.is_object()) throw CliError(on_error_, where_ + " must be a JSON object");
}

void Block::fail(std::string_view key, std::string_view message) const {
  throw CliError(on_error_, where_ + "." + std::string(key) + ": " + std::string(message));
}

bool Block::has(std::string_view key) const { return object_->contains(key); }

const Json& Block::raw(std::string_view key) const {
  const auto it = object_->find(key);
  if (it == object_->end()) fail(key, "missing required parameter");
  return *it;
}

Block Block::child(std::string_view key) const {
  const Json& v = raw(key);
  if (!v.is_object()) fail(key, "must be a JSON object");
  return Block(v, where_ + "." + std::string(key), on_error_);
}

double Block::number(std::string_view key) const {
  const Json& v = raw(key);
  if (!v.is_number()) fail(key, "must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(key, "must be finite");
  return x;
}

std::int64_t Block::integer(std::string_view key) const {
  const Json& v = raw(key);
  if (v.is_number_integer()) {
    if (v.is_number_unsigned() && v.get<std::uint64_t>() > std::numeric_limits<std::int64_t>::max()) {
      fail(key, "integer out of range");
    }
    return v.get<std::int64_t>();
  }
  fail(key, "must be an integer");
}

std::uint64_t Block::unsigned_integer(std::string_view key) const {
  const Json& v = raw(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) fail(key, "must be non-negative");
  fail(key, "must be a non-negative integer");
}

Count Block::count(std::string_view key) const {
  const Json& v = raw(key);
  if (v.is_number_unsigned()) return static_cast<Count>(v.get<std::uint64_t>());
  if (v.is_string()) {
    try {
      return parse_count(v.get<std::string>());
    } catch (const ParameterError& e) {
      fail(key, e.what());
    }
  }
  fail(key, "must be a non-negative integer or a decimal string");
}

std::string Block::string(std::string_view key) const {
  const Json& v = raw(key);
  if (!v.is_string()) fail(key, "must be a string");
  return v.get<std::string>();
}

bool Block::boolean(std::string_view key) const {
  const Json& v = raw(key);
  if (!v.is_boolean()) fail(key, "must be true or false");
  return v.get<bool>();
}

std::vector<double> Block::numbers(std::string_view key) const {
  const Json& v = raw(key);
  if (!v.is_array() || v.empty()) fail(key, "must be a non-empty array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) {
    if (!x.is_number() || !std::isfinite(x.get<double>())) fail(key, "must contain only finite numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::optional<double> Block::optional_number(std::string_view key) const {
  if (!has(key)) return std::nullopt;
  return number(key);
}

std::optional<std::int64_t> Block::optional_integer(std::string_view key) const {
  if (!has(key)) return std::nullopt;
  return integer(key);
}

Json count_to_json(Count value) {
  if (value <= std::numeric_limits<std::uint64_t>::max()) return static_cast<std::uint64_t>(value);
  return to_string(value);
}

}  // namespace qladder::cli
