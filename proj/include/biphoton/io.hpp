#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "biphoton/grid.hpp"

// Bit-stable data emission: CSV cells use the shortest round-trip decimal
// representation, JSON numbers carry 17 significant digits, and files are
// written atomically (temp file + rename). Every run directory gets a
// manifest listing the emitted files with their checksums.

namespace biphoton {

/// Shortest decimal representation that round-trips to the same double.
std::string format_shortest(double v);

/// 17-significant-digit representation (for JSON payloads).
std::string format_g17(double v);

/// FNV-1a 64-bit checksum, as 16 hex digits.
std::string fnv1a64_hex(const std::string& data);

/// Minimal ordered JSON document builder. Keeps insertion order so output is
/// deterministic.
class Json {
 public:
  static Json object();
  static Json array();
  static Json number(double v);
  static Json integer(long long v);
  static Json string(std::string v);
  static Json boolean(bool v);

  Json& set(const std::string& key, Json v);  // object only
  Json& push(Json v);                         // array only

  std::string dump(int indent = 2) const;

 private:
  enum class Kind { Object, Array, Number, Integer, String, Bool };
  Kind kind_ = Kind::Object;
  std::vector<std::pair<std::string, Json>> members_;
  std::vector<Json> items_;
  std::string scalar_;
  void dump_into(std::string& out, int indent, int depth) const;
};

/// Writes artifacts into a run directory atomically and accumulates the
/// manifest (name, size, checksum per file). `finalize` writes manifest.json.
class ArtifactWriter {
 public:
  ArtifactWriter(std::string directory, std::string config_text, std::string tool_version);

  void write(const std::string& name, const std::string& content);
  /// Writes manifest.json and returns the manifest document.
  Json finalize();

  struct FileRecord {
    std::string name;
    std::uint64_t bytes = 0;
    std::string checksum;
  };
  const std::vector<FileRecord>& files() const { return files_; }
  const std::string& directory() const { return directory_; }

 private:
  std::string directory_;
  std::string config_hash_;
  std::string version_;
  std::vector<FileRecord> files_;
};

// CSV assembly for the artifact formats.
std::string csv_vcurve(const std::vector<struct VCurve>& curves);
std::string csv_grid(const Grid& grid);
std::string csv_curve(const Curve& curve, const std::string& x_name, const std::string& y_name);

}  // namespace biphoton
