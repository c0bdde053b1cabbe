#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "gluedtrees/column.hpp"
#include "gluedtrees/graph.hpp"
#include "gluedtrees/util.hpp"

using namespace gluedtrees;

namespace {

// Lift a column-basis vector to the vertex basis: amplitude v_j / sqrt(N_j)
// on every vertex of column j. Inverse of project_to_columns on the
// column-symmetric subspace.
std::vector<double> lift_to_vertices(const GluedTreesInstance& g,
                                     const std::vector<double>& col) {
  std::vector<double> full(g.vertex_count(), 0.0);
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    int j = g.column[v];
    full[v] = col[static_cast<std::size_t>(j)] /
              std::sqrt(static_cast<double>(column_size(g.n, j)));
  }
  return full;
}

std::string serialized(const GluedTreesInstance& g) {
  std::ostringstream os;
  serialize_instance(os, g);
  return os.str();
}

}  // namespace

TEST_CASE("column sizes double toward the middle and mirror") {
  CHECK(column_size(2, 0) == 1);
  CHECK(column_size(2, 1) == 2);
  CHECK(column_size(2, 2) == 4);
  CHECK(column_size(2, 3) == 4);
  CHECK(column_size(2, 4) == 2);
  CHECK(column_size(2, 5) == 1);
  for (int n = 2; n <= 12; ++n) {
    std::uint64_t total = 0;
    for (int j = 0; j <= 2 * n + 1; ++j) {
      CHECK(column_size(n, j) == column_size(n, 2 * n + 1 - j));
      total += column_size(n, j);
    }
    CHECK(total == (std::uint64_t{1} << (n + 2)) - 2);
  }
}

TEST_CASE("generated instances have the forced shape") {
  auto g = generate_instance(4, 123);
  CHECK(g.vertex_count() == 62);
  CHECK(g.columns() == 10);
  validate_instance(g);

  auto g2 = generate_instance(2, 1);
  CHECK(g2.vertex_count() == 14);
  int degree2 = 0;
  for (std::size_t v = 0; v < g2.vertex_count(); ++v)
    if (g2.degree(static_cast<std::int32_t>(v)) == 2) ++degree2;
  CHECK(degree2 == 2);
  CHECK(g2.degree(g2.entrance) == 2);
  CHECK(g2.degree(g2.exit) == 2);
}

TEST_CASE("degree census holds across n and seeds") {
  for (int n = 2; n <= 8; ++n)
    for (std::uint64_t seed : {1ull, 42ull, 987654321ull}) {
      auto g = generate_instance(n, seed);
      validate_instance(g);
      std::size_t degree2 = 0, degree3 = 0;
      for (std::size_t v = 0; v < g.vertex_count(); ++v) {
        int d = g.degree(static_cast<std::int32_t>(v));
        if (d == 2) ++degree2;
        else if (d == 3) ++degree3;
      }
      CHECK(degree2 == 2);
      CHECK(degree3 == g.vertex_count() - 2);
    }
}

TEST_CASE("names are distinct 2n-bit strings") {
  auto g = generate_instance(5, 99);
  std::vector<std::uint64_t> names = g.names;
  std::sort(names.begin(), names.end());
  CHECK(std::adjacent_find(names.begin(), names.end()) == names.end());
  for (auto name : names) CHECK(name < (std::uint64_t{1} << 10));
}

TEST_CASE("generation is deterministic in (n, seed) and seed-sensitive") {
  auto a = serialized(generate_instance(3, 7));
  auto b = serialized(generate_instance(3, 7));
  auto c = serialized(generate_instance(3, 8));
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("instance generation rejects out-of-range n") {
  CHECK_THROWS_AS(generate_instance(1, 1), std::invalid_argument);
  CHECK_THROWS_AS(generate_instance(15, 1), std::invalid_argument);
  InstanceLimits wide;
  wide.max_n = 15;
  CHECK_NOTHROW(generate_instance(15, 1, wide));
}

TEST_CASE("serialization round-trips and matches the golden file") {
  auto g = generate_instance(2, 1);
  std::string text = serialized(g);

  std::ifstream golden(std::string(GOLDEN_DIR) + "/instance_n2_seed1.txt",
                       std::ios::binary);
  REQUIRE(golden.good());
  std::stringstream want;
  want << golden.rdbuf();
  CHECK(text == want.str());

  std::istringstream in(text);
  auto parsed = parse_instance(in);
  validate_instance(parsed);
  CHECK(parsed.n == g.n);
  CHECK(parsed.entrance >= 0);
  CHECK(serialized(parsed) == text);
}

TEST_CASE("parse rejects corrupted text") {
  auto g = generate_instance(2, 5);
  std::string text = serialized(g);
  {
    std::istringstream in(std::string("junk\n") + text);
    CHECK_THROWS_AS(parse_instance(in), std::runtime_error);
  }
  {
    // drop the last adjacency line
    std::string cut = text.substr(0, text.find_last_of('\n', text.size() - 2) + 1);
    std::istringstream in(cut);
    CHECK_THROWS_AS(parse_instance(in), std::runtime_error);
  }
}

TEST_CASE("oracle answers by name and counts every query") {
  auto g = generate_instance(2, 11);
  OracleSession oracle(g);

  auto entrance_nbrs = oracle.neighbors(g.names[g.entrance]);
  CHECK(entrance_nbrs.size() == 2);
  CHECK(oracle.query_count() == 1);

  // any column-1 vertex: entrance plus two column-2 vertices
  for (std::size_t v = 0; v < g.vertex_count(); ++v)
    if (g.column[v] == 1) {
      auto nbrs = oracle.neighbors(g.names[v]);
      CHECK(nbrs.size() == 3);
      int entrance_hits = 0, col2 = 0;
      for (auto name : nbrs) {
        auto id = g.id_by_name.at(name);
        if (id == g.entrance) ++entrance_hits;
        if (g.column[id] == 2) ++col2;
      }
      CHECK(entrance_hits == 1);
      CHECK(col2 == 2);
      CHECK(std::is_sorted(nbrs.begin(), nbrs.end()));
    }

  std::uint64_t before = oracle.query_count();
  std::uint64_t absent = 0;
  while (g.id_by_name.count(absent)) ++absent;
  CHECK(oracle.neighbors(absent).empty());
  CHECK(oracle.query_count() == before + 1);
}

TEST_CASE("random walk hits on small graphs and respects the cap") {
  auto g = generate_instance(2, 3);
  auto r = classical_random_walk(g, 17, 1000000);
  CHECK(r.hit);
  CHECK(r.queries_used < 10000);
  CHECK(r.queries_used >= 1);

  auto capped = classical_random_walk(generate_instance(4, 3), 17, 1);
  CHECK_FALSE(capped.hit);
  CHECK(capped.queries_used == 1);

  auto again = classical_random_walk(g, 17, 1000000);
  CHECK(again.hit == r.hit);
  CHECK(again.queries_used == r.queries_used);
  CHECK(again.steps == r.steps);
}

TEST_CASE("full hamiltonian at s=0 is the entrance corner alone") {
  auto g = generate_instance(3, 2);
  double alpha = 0.35355339059327373;
  auto h = build_full_hamiltonian(g, alpha, 0.0);
  for (std::size_t row = 0; row < h.dim; ++row)
    for (auto k = h.row_ptr[row]; k < h.row_ptr[row + 1]; ++k) {
      if (row == static_cast<std::size_t>(g.entrance) &&
          h.col_idx[k] == g.entrance)
        CHECK(h.value[k] == doctest::Approx(-alpha).epsilon(1e-14));
      else
        CHECK(std::abs(h.value[k]) <= 1e-15);
    }
}

TEST_CASE("full hamiltonian is stoquastic on an s grid, every seed") {
  for (std::uint64_t seed : {1ull, 2ull}) {
    auto g = generate_instance(3, seed);
    for (int i = 0; i <= 20; ++i) {
      double s = i / 20.0;
      auto rep = check_stoquastic(build_full_hamiltonian(g, 0.3535, s));
      CHECK(rep.stoquastic);
      CHECK(rep.violations.empty());
    }
  }
}

TEST_CASE("stoquastic checker flags a planted positive entry") {
  SparseSymmetric m;
  m.dim = 2;
  m.row_ptr = {0, 2, 4};
  m.col_idx = {0, 1, 0, 1};
  m.value = {1.0, 0.1, 0.1, 1.0};
  auto rep = check_stoquastic(m);
  CHECK_FALSE(rep.stoquastic);
  REQUIRE(rep.violations.size() == 2);  // both triangles stored
  CHECK(rep.violations[0][2] == doctest::Approx(0.1));

  SparseSymmetric id;
  id.dim = 3;
  id.row_ptr = {0, 1, 2, 3};
  id.col_idx = {0, 1, 2};
  id.value = {1.0, 1.0, 1.0};
  CHECK(check_stoquastic(id).stoquastic);
}

TEST_CASE("column projection maps the named states correctly") {
  auto g = generate_instance(3, 14);
  std::vector<double> e_entrance(g.vertex_count(), 0.0);
  e_entrance[static_cast<std::size_t>(g.entrance)] = 1.0;
  auto col = project_to_columns(g, e_entrance);
  REQUIRE(col.size() == static_cast<std::size_t>(g.columns()));
  CHECK(col[0] == doctest::Approx(1.0).epsilon(1e-14));
  for (std::size_t j = 1; j < col.size(); ++j) CHECK(std::abs(col[j]) <= 1e-15);

  double n_total = static_cast<double>(g.vertex_count());
  std::vector<double> uniform(g.vertex_count(), 1.0 / std::sqrt(n_total));
  auto ucol = project_to_columns(g, uniform);
  auto want = uniform_state(g.n);
  for (std::size_t j = 0; j < ucol.size(); ++j)
    CHECK(ucol[j] == doctest::Approx(want[j]).epsilon(1e-12));

  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss;
  std::vector<double> random_vec(g.vertex_count());
  double norm2 = 0;
  for (auto& x : random_vec) {
    x = gauss(rng);
    norm2 += x * x;
  }
  auto pr = project_to_columns(g, random_vec);
  double pnorm2 = 0;
  for (auto x : pr) pnorm2 += x * x;
  CHECK(pnorm2 <= norm2 * (1 + 1e-12));
}

TEST_CASE("column subspace is invariant: project(H_full lift(v)) = H_col v") {
  for (int n : {2, 3, 4}) {
    auto g = generate_instance(n, 21);
    for (double s : {0.0, 0.1, 0.25, 0.5, 0.77, 1.0}) {
      auto h_full = build_full_hamiltonian(g, 0.3535, s);
      auto h_col = column_hamiltonian(n, 0.3535, s);
      for (int j = 0; j <= 2 * n + 1; ++j) {
        auto base = basis_state(n, j);
        auto lifted = lift_to_vertices(g, base);
        std::vector<double> h_lifted(lifted.size());
        h_full.apply(lifted, h_lifted);
        auto projected = project_to_columns(g, h_lifted);
        std::vector<double> direct(base.size());
        h_col.apply(base, direct);
        for (std::size_t i = 0; i < direct.size(); ++i)
          CHECK(std::abs(projected[i] - direct[i]) <= 1e-12);
      }
    }
  }
}

TEST_CASE("full sparse apply agrees on real and complex inputs") {
  auto g = generate_instance(2, 9);
  auto h = build_full_hamiltonian(g, 0.3, 0.4);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> gauss;
  std::vector<double> x(h.dim);
  for (auto& v : x) v = gauss(rng);
  std::vector<double> y(h.dim);
  h.apply(x, y);
  std::vector<std::complex<double>> xc(x.begin(), x.end()), yc(h.dim);
  h.apply(xc, yc);
  for (std::size_t i = 0; i < h.dim; ++i) {
    CHECK(yc[i].real() == doctest::Approx(y[i]).epsilon(1e-14));
    CHECK(yc[i].imag() == 0.0);
  }
}
