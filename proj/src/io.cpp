#include "gvb/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace gvb {

Json graph_to_json(const RegularGraph& g) {
  Json edges = Json::array();
  for (const auto& e : g.edges()) edges.push_back({e.head, e.tail, e.id, e.reversal});
  return {{"d", g.degree()}, {"vertices", g.vertex_count()}, {"oriented_edges", edges}};
}

RegularGraph graph_from_json(const Json& j) {
  try {
    const int d = j.at("d").get<int>();
    const int nv = j.at("vertices").get<int>();
    std::vector<OrientedEdge> edges;
    for (const auto& e : j.at("oriented_edges")) {
      if (!e.is_array() || e.size() != 4) throw InvalidInput("oriented edge must be [head, tail, id, reversal]");
      edges.push_back({e[0].get<int>(), e[1].get<int>(), e[2].get<int>(), e[3].get<int>()});
    }
    RegularGraph g = build_graph(d, std::move(edges));
    if (g.vertex_count() != nv)
      throw InvalidInput("graph declares " + std::to_string(nv) + " vertices but edges span " +
                         std::to_string(g.vertex_count()));
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed graph JSON: ") + e.what());
  }
}

Json bundle_to_json(const FlatBundle& F, const Json& metadata) {
  Json tr = Json::object();
  const int l = F.fiber_dim;
  for (const auto& e : F.graph.edges()) {
    if (e.id > e.reversal) continue;
    Json entries = Json::array();
    const CMat& phi = F.phi(e.id);
    for (int r = 0; r < l; ++r)
      for (int c = 0; c < l; ++c) entries.push_back({phi(r, c).real(), phi(r, c).imag()});
    tr[std::to_string(e.id)] = std::move(entries);
  }
  return {{"graph", graph_to_json(F.graph)}, {"fiber_dim", l}, {"transports", tr}, {"metadata", metadata}};
}

FlatBundle bundle_from_json(const Json& j) {
  try {
    const RegularGraph g = graph_from_json(j.at("graph"));
    const int l = j.at("fiber_dim").get<int>();
    if (l < 1) throw InvalidInput("fiber_dim must be positive");
    std::map<int, CMat> tr;
    for (const auto& [key, entries] : j.at("transports").items()) {
      int id = -1;
      const auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), id);
      if (ec != std::errc() || ptr != key.data() + key.size() || id < 0 || id >= g.oriented_edge_count())
        throw InvalidInput("bad transport key '" + key + "'");
      if (entries.size() != static_cast<size_t>(l) * l)
        throw InvalidInput("transport " + key + " has " + std::to_string(entries.size()) + " entries, expected " +
                           std::to_string(l * l));
      CMat phi(l, l);
      for (int r = 0; r < l; ++r)
        for (int c = 0; c < l; ++c) {
          const auto& z = entries[static_cast<size_t>(r * l + c)];
          phi(r, c) = cplx(z.at(0).get<double>(), z.at(1).get<double>());
        }
      tr.emplace(id, std::move(phi));
    }
    return make_bundle(g, tr);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed bundle JSON: ") + e.what());
  }
}

std::string dump_json(const Json& j) { return j.dump(1) + "\n"; }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw InvalidInput("write to '" + path + "' failed");
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json(const std::string& path) {
  try {
    return Json::parse(read_text(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInput("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_bundle(const std::string& path, const FlatBundle& F, const Json& metadata) {
  write_text(path, dump_json(bundle_to_json(F, metadata)));
}

LoadedBundle read_bundle(const std::string& path) {
  const Json j = read_json(path);
  LoadedBundle lb{bundle_from_json(j), j.value("metadata", Json::object())};
  return lb;
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string Table::to_csv() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

Table Table::parse_csv(const std::string& text) {
  Table t;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (first) {
      t.header = std::move(cells);
      first = false;
    } else {
      t.rows.push_back(std::move(cells));
    }
  }
  return t;
}

int Table::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw InvalidInput("no column '" + name + "'");
  return static_cast<int>(it - header.begin());
}

void write_csv(const std::string& path, const Table& t) { write_text(path, t.to_csv()); }

Table read_csv(const std::string& path) { return Table::parse_csv(read_text(path)); }

namespace {

constexpr double kW = 640, kH = 420, kL = 70, kR = 20, kT = 40, kB = 50;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt_tick(double v) {
  std::ostringstream ss;
  ss.precision(4);
  ss << v;
  return ss.str();
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

double to_num(const std::string& s) {
  double v = std::numeric_limits<double>::quiet_NaN();
  std::from_chars(s.data(), s.data() + s.size(), v);
  return v;
}

}  // namespace

std::string svg_plot(const Table& t, const PlotSpec& spec) {
  const int xc = t.column(spec.x);
  const int xr = spec.histogram ? t.column(spec.x_right) : -1;
  std::vector<int> ycols;
  for (const auto& y : spec.y) ycols.push_back(t.column(y));
  auto ty = [&spec](double v) { return spec.log_y ? std::log10(std::max(v, 1e-300)) : v; };

  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& r : t.rows) {
    x0 = std::min(x0, to_num(r[static_cast<size_t>(xc)]));
    x1 = std::max(x1, to_num(r[static_cast<size_t>(xr >= 0 ? xr : xc)]));
    for (int c : ycols) {
      const double v = ty(to_num(r[static_cast<size_t>(c)]));
      if (std::isfinite(v)) {
        y0 = std::min(y0, v);
        y1 = std::max(y1, v);
      }
    }
  }
  if (spec.histogram) y0 = std::min(y0, 0.0);
  if (!std::isfinite(x0) || !std::isfinite(y0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 <= x0) x1 = x0 + 1;
  if (y1 <= y0) y1 = y0 + 1;
  const double pw = kW - kL - kR, ph = kH - kT - kB;
  auto sx = [&](double x) { return kL + (x - x0) / (x1 - x0) * pw; };
  auto sy = [&](double y) { return kT + (1 - (y - y0) / (y1 - y0)) * ph; };

  std::ostringstream o;
  o.precision(6);
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << kW / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape_xml(spec.title) << "</text>\n";
  o << "<rect x=\"" << kL << "\" y=\"" << kT << "\" width=\"" << pw << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4, yv = y0 + (y1 - y0) * i / 4;
    o << "<text x=\"" << sx(xv) << "\" y=\"" << kH - kB + 16 << "\" text-anchor=\"middle\">" << fmt_tick(xv) << "</text>\n";
    o << "<text x=\"" << kL - 6 << "\" y=\"" << sy(yv) + 4 << "\" text-anchor=\"end\">"
      << (spec.log_y ? "1e" + fmt_tick(yv) : fmt_tick(yv)) << "</text>\n";
  }
  o << "<text x=\"" << kL + pw / 2 << "\" y=\"" << kH - 12 << "\" text-anchor=\"middle\">" << escape_xml(spec.x) << "</text>\n";

  for (size_t k = 0; k < ycols.size(); ++k) {
    const char* color = kColors[k % std::size(kColors)];
    const auto c = static_cast<size_t>(ycols[k]);
    if (spec.histogram) {
      for (const auto& r : t.rows) {
        const double a = to_num(r[static_cast<size_t>(xc)]), b = to_num(r[static_cast<size_t>(xr)]);
        const double v = ty(to_num(r[c]));
        if (!std::isfinite(v)) continue;
        const double top = sy(std::max(v, 0.0)), bottom = sy(std::min(v, 0.0));
        o << "<rect x=\"" << sx(a) << "\" y=\"" << top << "\" width=\"" << std::max(0.0, sx(b) - sx(a))
          << "\" height=\"" << bottom - top << "\" fill=\"" << color << "\" fill-opacity=\"0.35\" stroke=\"" << color
          << "\"/>\n";
      }
    } else {
      o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (const auto& r : t.rows) {
        const double v = ty(to_num(r[c]));
        if (std::isfinite(v)) o << sx(to_num(r[static_cast<size_t>(xc)])) << ',' << sy(v) << ' ';
      }
      o << "\"/>\n";
    }
    o << "<text x=\"" << kL + 8 << "\" y=\"" << kT + 14 + 14 * k << "\" fill=\"" << color << "\">"
      << escape_xml(spec.y[k]) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

void csv_to_svg(const std::string& csv_path, const std::string& svg_path, const PlotSpec& spec) {
  write_text(svg_path, svg_plot(read_csv(csv_path), spec));
}

}  // namespace gvb
