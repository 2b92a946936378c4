#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include <json.hpp>

#include "gom/matrix.hpp"

namespace gom::io {

enum class ValueDomain { kFloat, kUnitInterval, kBinary };

struct CsvOptions {
  char delimiter = ',';
  /// Skip one leading line.
  bool header = false;
  ValueDomain domain = ValueDomain::kFloat;
};

/// Reads a rectangular numeric matrix. Throws ParseError naming the 1-based
/// line and field for malformed, ragged, non-finite or out-of-domain values.
DenseMatrix read_matrix_csv(const std::filesystem::path& path, const CsvOptions& opts = {});

/// Writes every value with 17 significant digits, so reading it back gives
/// the same doubles.
void write_matrix_csv(const std::filesystem::path& path, const DenseMatrix& m, char delimiter = ',');

std::string format_double(double v);

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Current UTC time, ISO 8601 with a trailing Z.
std::string utc_timestamp();

struct RunManifest {
  std::string tool_version;
  std::string command;
  nlohmann::json config;  // every option, defaults filled in
  std::uint64_t seed = 0;
  std::string started_at;
  std::string finished_at;
  std::map<std::string, std::string> input_sha256;  // path -> digest

  nlohmann::json to_json() const;
};

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

/// Creates `dir` (and parents) if needed; ConfigError if that fails.
void ensure_directory(const std::filesystem::path& dir);

}  // namespace gom::io
