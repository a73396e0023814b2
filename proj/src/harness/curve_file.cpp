#include "paprlab/harness/curve_file.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "paprlab/error.hpp"

#ifndef PAPRLAB_BUILD_ID
#define PAPRLAB_BUILD_ID "unknown"
#endif

namespace paprlab::harness {

const char* build_id() { return PAPRLAB_BUILD_ID; }

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void CurveFile::add(double x, double y, std::string method, std::vector<std::string> extras) {
  if (extras.size() != extra_columns.size()) throw InputShapeError("curve row has the wrong number of extra columns");
  rows.push_back({x, y, std::move(method), std::move(extras)});
}

void CurveFile::sort() {
  std::stable_sort(rows.begin(), rows.end(), [](const CurveRow& a, const CurveRow& b) {
    if (a.x != b.x) return a.x < b.x;
    return a.method < b.method;
  });
}

std::string CurveFile::to_text() const {
  std::string s;
  s += "# paprlab " + kind + "\n";
  s += std::string("# build: ") + build_id() + "\n";
  s += "# config_hash: " + config_hash + "\n";
  s += x_name + "," + y_name + ",method";
  for (const auto& c : extra_columns) s += "," + c;
  s += "\n";
  for (const auto& r : rows) {
    s += format_number(r.x) + "," + format_number(r.y) + "," + r.method;
    for (const auto& e : r.extras) s += "," + e;
    s += "\n";
  }
  return s;
}

void CurveFile::write(const std::filesystem::path& path) const { write_text(path, to_text()); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace paprlab::harness
