#include "gom/io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "gom/errors.hpp"

namespace gom::io {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void fail_at(const std::filesystem::path& path, std::size_t line, std::size_t field,
                          const std::string& why) {
  std::ostringstream msg;
  msg << path.string() << ": line " << line;
  if (field > 0) msg << ", field " << field;
  msg << ": " << why;
  throw ParseError(msg.str());
}

const char* domain_name(ValueDomain d) {
  switch (d) {
    case ValueDomain::kBinary:
      return "binary (0 or 1)";
    case ValueDomain::kUnitInterval:
      return "within [0, 1]";
    case ValueDomain::kFloat:
      break;
  }
  return "finite";
}

bool in_domain(double v, ValueDomain d) {
  switch (d) {
    case ValueDomain::kBinary:
      return v == 0.0 || v == 1.0;
    case ValueDomain::kUnitInterval:
      return v >= 0.0 && v <= 1.0;
    case ValueDomain::kFloat:
      break;
  }
  return true;
}

}  // namespace

DenseMatrix read_matrix_csv(const std::filesystem::path& path, const CsvOptions& opts) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());

  std::vector<double> values;
  std::size_t cols = 0, rows = 0, line_no = 0;
  bool saw_blank = false;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (opts.header && line_no == 1) continue;
    const std::string_view body = trim(line);
    if (body.empty()) {
      saw_blank = true;
      continue;
    }
    if (saw_blank) fail_at(path, line_no, 0, "data after a blank line");

    std::size_t field = 0, start = 0;
    while (true) {
      const std::size_t end = body.find(opts.delimiter, start);
      const std::string_view tok =
          trim(body.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
      ++field;
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size()) {
        fail_at(path, line_no, field, "cannot parse '" + std::string(tok) + "' as a number");
      }
      if (!std::isfinite(v)) fail_at(path, line_no, field, "value is not finite");
      if (!in_domain(v, opts.domain)) {
        fail_at(path, line_no, field,
                "value " + std::string(tok) + " is not " + domain_name(opts.domain));
      }
      values.push_back(v);
      if (end == std::string_view::npos) break;
      start = end + 1;
    }
    if (rows == 0) {
      cols = field;
    } else if (field != cols) {
      fail_at(path, line_no, 0,
              "has " + std::to_string(field) + " fields, expected " + std::to_string(cols));
    }
    ++rows;
  }
  if (rows == 0) throw ParseError(path.string() + ": no data rows");
  return DenseMatrix(rows, cols, std::move(values));
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_matrix_csv(const std::filesystem::path& path, const DenseMatrix& m, char delimiter) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out << delimiter;
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  if (!out) throw ConfigError("write failed for " + path.string());
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 15];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::json RunManifest::to_json() const {
  return {{"tool_version", tool_version}, {"command", command},       {"config", config},
          {"seed", seed},                 {"started_at", started_at}, {"finished_at", finished_at},
          {"input_sha256", input_sha256}};
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
}

}  // namespace gom::io
