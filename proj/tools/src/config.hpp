#pragma once

// JSON config access with typed, path-qualified validation errors, and the
// exit-code contract shared by every subcommand.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qladder/random.hpp"

namespace qladder::cli {

using Json = nlohmann::ordered_json;

enum class ExitCode : int {
  kOk = 0,
  kValidation = 2,
  kIo = 3,
  kNumeric = 4,
};

class CliError : public std::runtime_error {
 public:
  CliError(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

/// Reads and parses a JSON file. Unreadable files are I/O errors; malformed
/// JSON is reported with `malformed` (validation for configs, I/O for manifests).
Json read_json_file(const std::filesystem::path& path, ExitCode malformed);

/// Typed accessors on an object block; `where` names the block in messages
/// ("bellman", "brw.policy", ...). Missing keys and wrong types are
/// validation errors.
class Block {
 public:
  Block(const Json& object, std::string where, ExitCode on_error = ExitCode::kValidation);

  bool has(std::string_view key) const;
  const Json& raw(std::string_view key) const;
  Block child(std::string_view key) const;

  double number(std::string_view key) const;
  std::int64_t integer(std::string_view key) const;
  std::uint64_t unsigned_integer(std::string_view key) const;
  /// Non-negative integer given as a JSON number or a decimal string.
  Count count(std::string_view key) const;
  std::string string(std::string_view key) const;
  bool boolean(std::string_view key) const;
  std::vector<double> numbers(std::string_view key) const;

  std::optional<double> optional_number(std::string_view key) const;
  std::optional<std::int64_t> optional_integer(std::string_view key) const;

  [[noreturn]] void fail(std::string_view key, std::string_view message) const;

  const std::string& where() const noexcept { return where_; }

 private:
  const Json* object_;
  std::string where_;
  ExitCode on_error_;
};

/// Counts that fit in 64 bits are emitted as JSON numbers, larger ones as
/// decimal strings.
Json count_to_json(Count value);

}  // namespace qladder::cli
