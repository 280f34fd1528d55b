#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "gvb/bundle.hpp"
#include "gvb/graph.hpp"

namespace gvb {

using Json = nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

/// {"d", "vertices", "oriented_edges": [[head, tail, id, reversal], ...]}
Json graph_to_json(const RegularGraph& g);
RegularGraph graph_from_json(const Json& j);

/// {"graph", "fiber_dim", "transports": {id: [[re, im], ...] row-major}, "metadata"};
/// only orientations with id < reversal are stored.
Json bundle_to_json(const FlatBundle& F, const Json& metadata = Json::object());
FlatBundle bundle_from_json(const Json& j);

std::string dump_json(const Json& j);
void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);
Json read_json(const std::string& path);

void write_bundle(const std::string& path, const FlatBundle& F, const Json& metadata = Json::object());
struct LoadedBundle {
  FlatBundle bundle;
  Json metadata;
};
LoadedBundle read_bundle(const std::string& path);

/// Shortest decimal that round-trips.
std::string format_double(double x);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
  std::string to_csv() const;
  static Table parse_csv(const std::string& text);
  int column(const std::string& name) const;
};
void write_csv(const std::string& path, const Table& t);
Table read_csv(const std::string& path);

struct PlotSpec {
  std::string title;
  std::string x;               ///< column name for the x axis
  std::vector<std::string> y;  ///< one polyline per column
  bool histogram = false;      ///< bars between x and `x_right` columns
  std::string x_right;
  bool log_y = false;
};
/// Standalone SVG rendered from a CSV table.
std::string svg_plot(const Table& t, const PlotSpec& spec);
void csv_to_svg(const std::string& csv_path, const std::string& svg_path, const PlotSpec& spec);

}  // namespace gvb
