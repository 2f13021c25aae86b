#include "catch_amalgamated.hpp"

#include <filesystem>
#include <fstream>
#include <queue>
#include <sstream>

#include "support.hpp"

using namespace citesim;
using namespace testing;
namespace fs = std::filesystem;

namespace {

bool connected(const CoauthorGraph& g) {
  std::vector<bool> seen(g.n_authors(), false);
  std::queue<AuthorId> q;
  q.push(0);
  seen[0] = true;
  std::size_t count = 1;
  while (!q.empty()) {
    auto u = q.front();
    q.pop();
    for (auto v : g.neighbors(u))
      if (!seen[v]) {
        seen[v] = true;
        ++count;
        q.push(v);
      }
  }
  return count == g.n_authors();
}

fs::path temp_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("citesim_graph_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

}  // namespace

TEST_CASE("construction symmetrizes, deduplicates and drops self-loops") {
  std::vector<Edge> edges{{0, 1}, {1, 0}, {1, 2}, {2, 2}, {2, 1}};
  CoauthorGraph g(genders_from("WMW"), edges);
  CHECK(g.n_edges() == 2);
  CHECK(g.degree(1) == 2);
  CHECK(g.has_edge(1, 0));
  CHECK_FALSE(g.has_edge(0, 2));
  CHECK(g.edges() == std::vector<Edge>{{0, 1}, {1, 2}});
}

TEST_CASE("an isolated node is rejected") {
  std::vector<Edge> edges{{0, 1}};
  CHECK_THROWS_AS(CoauthorGraph(genders_from("WMW"), edges), StateError);
}

TEST_CASE("generated graphs are connected and simple") {
  const auto g = small_graph();
  CHECK(g.n_authors() > 1400);
  CHECK(connected(g));
  for (AuthorId u = 0; u < g.n_authors(); ++u) {
    auto row = g.neighbors(u);
    REQUIRE(std::is_sorted(row.begin(), row.end()));
    REQUIRE(std::adjacent_find(row.begin(), row.end()) == row.end());
    for (auto v : row) REQUIRE(v != u);
  }
  const double mean_degree = 2.0 * static_cast<double>(g.n_edges()) / static_cast<double>(g.n_authors());
  CHECK(mean_degree == Catch::Approx(10.0).margin(0.5));
}

TEST_CASE("generator hits the requested woman fraction") {
  for (double wf : {0.1, 0.36, 0.5, 0.8}) {
    GeneratorParams p;
    p.n_authors = 2000;
    p.woman_fraction = wf;
    p.seed = 9;
    const auto g = generate_synthetic(p);
    CHECK(gender_fraction(g, Gender::Woman) == Catch::Approx(wf).margin(0.02));
  }
}

TEST_CASE("random mixing gives the census same-gender fraction") {
  GeneratorParams p;
  p.n_authors = 5000;
  p.woman_fraction = 0.36;
  p.gender_assortativity = 0.0;
  const auto g = generate_synthetic(p);
  // f^2 + (1-f)^2 for independent endpoint genders.
  CHECK(same_gender_edge_fraction(g) == Catch::Approx(0.36 * 0.36 + 0.64 * 0.64).margin(0.02));
}

TEST_CASE("same-gender edge fraction is non-decreasing in assortativity") {
  double prev = -1.0;
  for (double a : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    GeneratorParams p;
    p.n_authors = 1500;
    p.gender_assortativity = a;
    p.seed = 4;
    const double f = same_gender_edge_fraction(generate_synthetic(p));
    CHECK(f >= prev);
    prev = f;
  }
  CHECK(prev > 0.9);
}

TEST_CASE("generator is deterministic under a fixed seed") {
  CHECK(small_graph(5) == small_graph(5));
  CHECK_FALSE(small_graph(5) == small_graph(6));
}

TEST_CASE("generator rejects bad parameters") {
  GeneratorParams p;
  p.woman_fraction = 1.5;
  CHECK_THROWS_AS(generate_synthetic(p), ConfigError);
  p = {};
  p.gender_assortativity = -0.1;
  CHECK_THROWS_AS(generate_synthetic(p), ConfigError);
  p = {};
  p.mean_degree = 0;
  CHECK_THROWS_AS(generate_synthetic(p), ConfigError);
}

TEST_CASE("edge lists round-trip through files") {
  const auto g = small_graph(2, 300);
  const auto dir = temp_dir("roundtrip");
  write_graph(g, dir);
  const auto loaded = read_graph(dir);
  CHECK(loaded.graph == g);
  for (std::size_t i = 0; i < loaded.original_ids.size(); ++i) CHECK(loaded.original_ids[i] == i);
}

TEST_CASE("loader compacts sparse ids in ascending order and drops self-loop-only nodes") {
  const auto dir = temp_dir("compact");
  write_file(dir / "e.txt", "# comment\n50 10\n\n10 30  # trailing\n7 7\n");
  write_file(dir / "g.txt", "10 W\n30 M\n50 M\n7 W\n");
  const auto loaded = load_edge_list(dir / "e.txt", dir / "g.txt");
  CHECK(loaded.original_ids == std::vector<std::uint64_t>{10, 30, 50});
  CHECK(loaded.graph.n_edges() == 2);
  CHECK(loaded.graph.gender(0) == Gender::Woman);
  CHECK(loaded.graph.has_edge(0, 2));
}

TEST_CASE("loader errors name the file and line") {
  const auto dir = temp_dir("errors");
  auto message = [&](const std::string& edges, const std::string& genders) {
    write_file(dir / "e.txt", edges);
    write_file(dir / "g.txt", genders);
    try {
      load_edge_list(dir / "e.txt", dir / "g.txt");
    } catch (const IngestError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK_THAT(message("0 1\n1 x\n", "0 W\n1 M\n"), Catch::Matchers::ContainsSubstring("e.txt:2"));
  CHECK_THAT(message("0 1\n", "0 W\n1 Q\n"), Catch::Matchers::ContainsSubstring("g.txt:2"));
  CHECK_THAT(message("0 1\n", "0 W\n0 M\n1 M\n"), Catch::Matchers::ContainsSubstring("duplicate"));
  CHECK_THAT(message("0 1\n", "0 W\n1 M\n9 W\n"), Catch::Matchers::ContainsSubstring("unknown author id 9"));
  CHECK_THAT(message("0 1\n1 2\n", "0 W\n1 M\n"), Catch::Matchers::ContainsSubstring("e.txt:2: author 2 has no gender"));
  CHECK_THAT(message("3 3\n", "3 W\n"), Catch::Matchers::ContainsSubstring("isolated"));
  CHECK_THROWS_AS(load_edge_list(dir / "missing.txt", dir / "g.txt"), IngestError);
}

TEST_CASE("edge-list output is deterministic") {
  const auto g = small_graph(8, 200);
  std::ostringstream e1, g1, e2, g2;
  write_edge_list(g, e1, g1);
  write_edge_list(g, e2, g2);
  CHECK(e1.str() == e2.str());
  CHECK(g1.str() == g2.str());
}
