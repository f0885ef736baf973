#include "biphoton/io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "biphoton/errors.hpp"
#include "biphoton/overlap.hpp"

namespace biphoton {

std::string format_shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fnv1a64_hex(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json Json::object() { Json j; j.kind_ = Kind::Object; return j; }
Json Json::array() { Json j; j.kind_ = Kind::Array; return j; }
Json Json::number(double v) { Json j; j.kind_ = Kind::Number; j.scalar_ = format_g17(v); return j; }
Json Json::integer(long long v) { Json j; j.kind_ = Kind::Integer; j.scalar_ = std::to_string(v); return j; }
Json Json::string(std::string v) { Json j; j.kind_ = Kind::String; j.scalar_ = std::move(v); return j; }
Json Json::boolean(bool v) { Json j; j.kind_ = Kind::Bool; j.scalar_ = v ? "true" : "false"; return j; }

Json& Json::set(const std::string& key, Json v) {
  members_.emplace_back(key, std::move(v));
  return *this;
}

Json& Json::push(Json v) {
  items_.push_back(std::move(v));
  return *this;
}

namespace {
void escape_into(std::string& out, const std::string& s) {
  out += '"';
  for (const char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}
}  // namespace

void Json::dump_into(std::string& out, int indent, int depth) const {
  const std::string pad(std::size_t(indent) * std::size_t(depth + 1), ' ');
  const std::string closepad(std::size_t(indent) * std::size_t(depth), ' ');
  switch (kind_) {
    case Kind::Object: {
      if (members_.empty()) { out += "{}"; return; }
      out += "{\n";
      for (std::size_t i = 0; i < members_.size(); ++i) {
        out += pad;
        escape_into(out, members_[i].first);
        out += ": ";
        members_[i].second.dump_into(out, indent, depth + 1);
        if (i + 1 < members_.size()) out += ',';
        out += '\n';
      }
      out += closepad + "}";
      break;
    }
    case Kind::Array: {
      if (items_.empty()) { out += "[]"; return; }
      out += "[\n";
      for (std::size_t i = 0; i < items_.size(); ++i) {
        out += pad;
        items_[i].dump_into(out, indent, depth + 1);
        if (i + 1 < items_.size()) out += ',';
        out += '\n';
      }
      out += closepad + "]";
      break;
    }
    case Kind::String:
      escape_into(out, scalar_);
      break;
    default:
      out += scalar_;
  }
}

std::string Json::dump(int indent) const {
  std::string out;
  dump_into(out, indent, 0);
  out += '\n';
  return out;
}

namespace {

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + tmp.string());
    out.write(content.data(), std::streamsize(content.size()));
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("rename failed: " + path.string() + " (" + ec.message() + ")");
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

ArtifactWriter::ArtifactWriter(std::string directory, std::string config_text,
                               std::string tool_version)
    : directory_(std::move(directory)),
      config_hash_(fnv1a64_hex(config_text)),
      version_(std::move(tool_version)) {
  std::error_code ec;
  std::filesystem::create_directories(directory_, ec);
  if (ec) throw IoError("cannot create output directory: " + directory_);
}

void ArtifactWriter::write(const std::string& name, const std::string& content) {
  write_atomic(std::filesystem::path(directory_) / name, content);
  files_.push_back({name, content.size(), fnv1a64_hex(content)});
}

Json ArtifactWriter::finalize() {
  Json manifest = Json::object();
  manifest.set("config_hash", Json::string("fnv1a64:" + config_hash_));
  manifest.set("tool_version", Json::string(version_));
  manifest.set("timestamp_utc", Json::string(utc_timestamp()));
  Json files = Json::array();
  for (const auto& f : files_) {
    Json rec = Json::object();
    rec.set("name", Json::string(f.name));
    rec.set("bytes", Json::integer((long long)f.bytes));
    rec.set("fnv1a64", Json::string(f.checksum));
    files.push(std::move(rec));
  }
  manifest.set("files", std::move(files));
  write_atomic(std::filesystem::path(directory_) / "manifest.json", manifest.dump());
  return manifest;
}

std::string csv_vcurve(const std::vector<VCurve>& curves) {
  std::string out = "T_fs,v_mag,provenance\n";
  for (const auto& c : curves)
    for (std::size_t i = 0; i < c.delay_fs.size(); ++i)
      out += format_shortest(c.delay_fs[i]) + "," + format_shortest(c.v_mag[i]) + "," +
             c.provenance + "\n";
  return out;
}

std::string csv_grid(const Grid& grid) {
  std::string out = (grid.domain == GridDomain::Frequency)
                        ? "nu_plus_rad_fs,nu_minus_rad_fs,re,im\n"
                        : "t_plus_fs,t_minus_fs,re,im\n";
  for (Eigen::Index i = 0; i < grid.n_plus(); ++i)
    for (Eigen::Index j = 0; j < grid.n_minus(); ++j) {
      out += format_shortest(grid.axis_plus.value(i)) + "," +
             format_shortest(grid.axis_minus.value(j)) + "," +
             format_shortest(grid.values(i, j).real()) + "," +
             format_shortest(grid.values(i, j).imag()) + "\n";
    }
  return out;
}

std::string csv_curve(const Curve& curve, const std::string& x_name, const std::string& y_name) {
  std::string out = x_name + "," + y_name + "\n";
  for (Eigen::Index i = 0; i < curve.x.size(); ++i)
    out += format_shortest(curve.x[i]) + "," + format_shortest(curve.y[i]) + "\n";
  return out;
}

}  // namespace biphoton
