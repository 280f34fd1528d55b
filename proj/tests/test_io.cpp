#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "gvb/io.hpp"
#include "gvb/lps.hpp"

using namespace gvb;

namespace {

std::string tmp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("gvb_io_" + name)).string();
}

}  // namespace

TEST_CASE("graph round trip") {
  const RegularGraph g = cayley_graph(13, 5).graph;
  const RegularGraph h = graph_from_json(graph_to_json(g));
  CHECK(h.vertex_count() == g.vertex_count());
  CHECK(h.degree() == g.degree());
  CHECK(graph_to_json(h) == graph_to_json(g));
}

TEST_CASE("bundle round trip is byte identical") {
  const FlatBundle F = random_bundle(petersen_graph(), 3, 11);
  const std::string a = tmp_path("a.json"), b = tmp_path("b.json");
  write_bundle(a, F, {{"seed", 11}});
  const LoadedBundle L = read_bundle(a);
  CHECK(L.metadata.at("seed") == 11);
  for (int e = 0; e < F.graph.oriented_edge_count(); ++e) CHECK((L.bundle.phi(e) - F.phi(e)).norm() == 0.0);
  write_bundle(b, L.bundle, L.metadata);
  CHECK(read_text(a) == read_text(b));
  std::remove(a.c_str());
  std::remove(b.c_str());
}

TEST_CASE("malformed input") {
  Json j = bundle_to_json(trivial_bundle(cycle_graph(5), 2));
  Json bad = j;
  bad["fiber_dim"] = 3;
  CHECK_THROWS_AS(bundle_from_json(bad), InvalidInput);
  bad = j;
  bad["transports"]["x"] = Json::array();
  CHECK_THROWS_AS(bundle_from_json(bad), InvalidInput);
  bad = j;
  bad["transports"]["0"] = {{2, 0}, {0, 0}, {0, 0}, {1, 0}};  // not unitary
  CHECK_THROWS_AS(bundle_from_json(bad), InvalidInput);
  bad = j;
  bad["graph"]["vertices"] = 7;
  CHECK_THROWS_AS(bundle_from_json(bad), InvalidInput);
  bad = j;
  bad.erase("graph");
  CHECK_THROWS_AS(bundle_from_json(bad), InvalidInput);
  const std::string p = tmp_path("broken.json");
  write_text(p, "{\"graph\": ");
  CHECK_THROWS_AS(read_bundle(p), InvalidInput);
  std::remove(p.c_str());
  CHECK_THROWS_AS(read_text(tmp_path("does_not_exist.json")), InvalidInput);
}

TEST_CASE("numbers and tables") {
  for (double x : {0.1, 1.0 / 3, -2.5e-300, 6.02214076e23})
    CHECK(std::stod(format_double(x)) == x);
  Table t;
  t.header = {"x", "y"};
  t.add({"1", "2.5"});
  t.add({"2", "-1"});
  const std::string csv = t.to_csv();
  CHECK(csv == "x,y\n1,2.5\n2,-1\n");
  const Table u = Table::parse_csv("x,y\r\n1,2.5\r\n\r\n2,-1\r\n");
  CHECK(u.header == t.header);
  CHECK(u.rows == t.rows);
  CHECK(u.column("y") == 1);
  CHECK_THROWS_AS(u.column("z"), InvalidInput);
}

TEST_CASE("svg output") {
  Table t;
  t.header = {"lo", "hi", "mass"};
  t.add({"0", "1", "0.25"});
  t.add({"1", "2", "0.75"});
  const std::string bars = svg_plot(t, {"hist", "lo", {"mass"}, true, "hi", false});
  CHECK(bars.rfind("<svg", 0) == 0);
  CHECK(bars.find("<rect x=") != std::string::npos);
  CHECK(bars.find("</svg>") != std::string::npos);
  const std::string line = svg_plot(t, {"a < b", "lo", {"mass", "hi"}, false, "", true});
  CHECK(line.find("a &lt; b") != std::string::npos);
  CHECK(line.find("<polyline") != std::string::npos);
  CHECK_THROWS_AS(svg_plot(t, {"", "nope", {"mass"}}), InvalidInput);
}
