#pragma once

// Delimited curve output:
//
//   # paprlab <kind>
//   # build: <id>
//   # config_hash: <hex>
//   x,y,method[,extra...]
//   <rows sorted by x, then method>

#include <filesystem>
#include <string>
#include <vector>

namespace paprlab::harness {

/// Identifier of the source tree this binary was built from.
const char* build_id();

/// Shortest decimal text that reads back to exactly `v`.
std::string format_number(double v);

struct CurveRow {
  double x = 0.0;
  double y = 0.0;
  std::string method;
  std::vector<std::string> extras;
};

struct CurveFile {
  std::string kind;
  std::string x_name = "x";
  std::string y_name = "y";
  std::vector<std::string> extra_columns;
  std::vector<CurveRow> rows;
  std::string config_hash;

  void add(double x, double y, std::string method, std::vector<std::string> extras = {});
  /// Stable sort by (x, method).
  void sort();
  std::string to_text() const;
  void write(const std::filesystem::path& path) const;
};

/// Writes `text` to `path`, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace paprlab::harness
