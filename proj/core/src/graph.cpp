#include "gluedtrees/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "gluedtrees/util.hpp"

namespace gluedtrees {

namespace {

std::string to_hex(std::uint64_t name, int width) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%0*llx", width,
                static_cast<unsigned long long>(name));
  return buf;
}

void fail(const std::string& what) { throw std::runtime_error(what); }

// Uniform distinct draws from [0, space) via Fisher-Yates on a lazily
// materialized permutation; O(count) memory regardless of space.
std::vector<std::uint64_t> sample_distinct(std::mt19937_64& rng, std::uint64_t space,
                                           std::uint64_t count) {
  std::unordered_map<std::uint64_t, std::uint64_t> perm;
  perm.reserve(2 * count);
  auto at = [&](std::uint64_t i) {
    auto it = perm.find(i);
    return it == perm.end() ? i : it->second;
  };
  std::vector<std::uint64_t> out(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint64_t j = i + uniform_below(rng, space - i);
    out[i] = at(j);
    perm[j] = at(i);
  }
  return out;
}

std::vector<std::uint32_t> random_permutation(std::mt19937_64& rng, std::uint32_t m) {
  std::vector<std::uint32_t> p(m);
  for (std::uint32_t i = 0; i < m; ++i) p[i] = i;
  for (std::uint32_t i = m - 1; i > 0; --i) {
    const auto j = static_cast<std::uint32_t>(uniform_below(rng, i + 1));
    std::swap(p[i], p[j]);
  }
  return p;
}

struct EdgeList {
  std::vector<std::vector<std::int32_t>> nbr;
  void add(std::int32_t a, std::int32_t b) {
    nbr[a].push_back(b);
    nbr[b].push_back(a);
  }
};

void finalize_adjacency(GluedTreesInstance& g, EdgeList& edges) {
  const auto n_vertices = g.names.size();
  g.adjacency.assign(n_vertices, {-1, -1, -1});
  for (std::size_t v = 0; v < n_vertices; ++v) {
    auto& list = edges.nbr[v];
    std::sort(list.begin(), list.end(), [&](std::int32_t a, std::int32_t b) {
      return g.names[a] < g.names[b];
    });
    if (list.size() > 3) fail("vertex degree exceeds 3");
    for (std::size_t k = 0; k < list.size(); ++k) g.adjacency[v][k] = list[k];
  }
  g.id_by_name.clear();
  g.id_by_name.reserve(2 * n_vertices);
  for (std::size_t v = 0; v < n_vertices; ++v)
    g.id_by_name.emplace(g.names[v], static_cast<std::int32_t>(v));
}

}  // namespace

int GluedTreesInstance::degree(std::int32_t id) const {
  const auto& row = adjacency[id];
  return static_cast<int>((row[0] >= 0) + (row[1] >= 0) + (row[2] >= 0));
}

std::string GluedTreesInstance::hex_name(std::int32_t id) const {
  return to_hex(names[id], hex_width());
}

std::uint64_t column_size(int n, int j) {
  if (j < 0 || j > 2 * n + 1) throw std::invalid_argument("column index out of range");
  return j <= n ? (std::uint64_t{1} << j) : (std::uint64_t{1} << (2 * n + 1 - j));
}

GluedTreesInstance generate_instance(int n, std::uint64_t seed,
                                     const InstanceLimits& limits) {
  if (n < 2 || n > limits.max_n)
    throw std::invalid_argument("tree depth must satisfy 2 <= n <= max_n");

  GluedTreesInstance g;
  g.n = n;
  g.seed = seed;
  const std::uint64_t n_vertices = (std::uint64_t{1} << (n + 2)) - 2;

  g.column_offset.resize(2 * n + 3);
  g.column_offset[0] = 0;
  for (int j = 0; j <= 2 * n + 1; ++j)
    g.column_offset[j + 1] =
        g.column_offset[j] + static_cast<std::int32_t>(column_size(n, j));

  g.column.resize(n_vertices);
  for (int j = 0; j <= 2 * n + 1; ++j)
    for (std::int32_t v = g.column_offset[j]; v < g.column_offset[j + 1]; ++v)
      g.column[v] = j;

  std::mt19937_64 rng(seed);
  g.names = sample_distinct(rng, std::uint64_t{1} << (2 * n), n_vertices);

  const auto vertex_at = [&](int j, std::uint32_t i) {
    return g.column_offset[j] + static_cast<std::int32_t>(i);
  };

  EdgeList edges;
  edges.nbr.resize(n_vertices);
  // left tree: (j, i) -> (j+1, 2i), (j+1, 2i+1)
  for (int j = 0; j < n; ++j)
    for (std::uint32_t i = 0; i < (std::uint32_t{1} << j); ++i) {
      edges.add(vertex_at(j, i), vertex_at(j + 1, 2 * i));
      edges.add(vertex_at(j, i), vertex_at(j + 1, 2 * i + 1));
    }
  // right tree: (j, i) -> (j+1, i/2), sizes halving toward EXIT
  for (int j = n + 1; j <= 2 * n; ++j)
    for (std::uint32_t i = 0; i < (std::uint32_t{1} << (2 * n + 1 - j)); ++i)
      edges.add(vertex_at(j, i), vertex_at(j + 1, i >> 1));
  // gluing cycle L[sigma(0)] R[tau(0)] L[sigma(1)] ... back to L[sigma(0)];
  // every alternating cycle arises from exactly 2m (sigma, tau) pairs, so
  // this is uniform over alternating cycles.
  const auto m = std::uint32_t{1} << n;
  const auto sigma = random_permutation(rng, m);
  const auto tau = random_permutation(rng, m);
  for (std::uint32_t i = 0; i < m; ++i) {
    edges.add(vertex_at(n, sigma[i]), vertex_at(n + 1, tau[i]));
    edges.add(vertex_at(n + 1, tau[i]), vertex_at(n, sigma[(i + 1) % m]));
  }

  finalize_adjacency(g, edges);
  g.entrance = 0;
  g.exit = g.column_offset[2 * n + 1];
  validate_instance(g);
  return g;
}

void validate_instance(const GluedTreesInstance& g) {
  const int n = g.n;
  const std::uint64_t n_vertices = (std::uint64_t{1} << (n + 2)) - 2;
  if (g.vertex_count() != n_vertices) fail("wrong vertex count");
  if (g.column_offset.size() != static_cast<std::size_t>(2 * n + 3))
    fail("wrong column offset table");
  for (int j = 0; j <= 2 * n + 1; ++j)
    if (g.column_offset[j + 1] - g.column_offset[j] !=
        static_cast<std::int32_t>(column_size(n, j)))
      fail("wrong column size");
  for (std::size_t v = 0; v < n_vertices; ++v) {
    const int j = g.column[v];
    if (j < 0 || j > 2 * n + 1 || static_cast<std::int32_t>(v) < g.column_offset[j] ||
        static_cast<std::int32_t>(v) >= g.column_offset[j + 1])
      fail("column assignment inconsistent with offsets");
  }

  if (g.id_by_name.size() != n_vertices) fail("names not distinct");
  const std::uint64_t name_space = std::uint64_t{1} << (2 * n);
  for (std::size_t v = 0; v < n_vertices; ++v) {
    if (g.names[v] >= name_space) fail("name wider than 2n bits");
    auto it = g.id_by_name.find(g.names[v]);
    if (it == g.id_by_name.end() || it->second != static_cast<std::int32_t>(v))
      fail("name lookup table inconsistent");
  }

  if (g.entrance != 0 || g.exit != g.column_offset[2 * n + 1])
    fail("entrance/exit ids out of place");
  for (std::size_t v = 0; v < n_vertices; ++v) {
    const int deg = g.degree(static_cast<std::int32_t>(v));
    const bool endpoint =
        static_cast<std::int32_t>(v) == g.entrance || static_cast<std::int32_t>(v) == g.exit;
    if (deg != (endpoint ? 2 : 3))
      fail(endpoint ? "endpoint degree is not 2" : "interior degree is not 3");
    const auto& row = g.adjacency[v];
    for (int k = 0; k < deg; ++k) {
      const auto w = row[k];
      if (w < 0 || w >= static_cast<std::int32_t>(n_vertices)) fail("neighbor id out of range");
      if (w == static_cast<std::int32_t>(v)) fail("self loop");
      if (k > 0 && g.names[row[k - 1]] >= g.names[w]) fail("neighbors not name-sorted");
      if (std::abs(g.column[w] - g.column[v]) != 1) fail("edge not between adjacent columns");
      const auto& back = g.adjacency[w];
      if (std::find(back.begin(), back.end(), static_cast<std::int32_t>(v)) == back.end())
        fail("adjacency not symmetric");
    }
  }

  // tree wiring: unique parent relations on both halves
  for (int j = 1; j <= n; ++j)
    for (std::int32_t v = g.column_offset[j]; v < g.column_offset[j + 1]; ++v) {
      const std::uint32_t i = static_cast<std::uint32_t>(v - g.column_offset[j]);
      const std::int32_t parent = g.column_offset[j - 1] + static_cast<std::int32_t>(i >> 1);
      const auto& row = g.adjacency[v];
      int up = 0;
      for (int k = 0; k < 3; ++k)
        if (row[k] >= 0 && g.column[row[k]] == j - 1) {
          ++up;
          if (row[k] != parent) fail("left tree edge misrouted");
        }
      if (up != 1) fail("left tree vertex without unique parent");
    }
  for (int j = n + 1; j <= 2 * n; ++j)
    for (std::int32_t v = g.column_offset[j]; v < g.column_offset[j + 1]; ++v) {
      const std::uint32_t i = static_cast<std::uint32_t>(v - g.column_offset[j]);
      const std::int32_t parent = g.column_offset[j + 1] + static_cast<std::int32_t>(i >> 1);
      const auto& row = g.adjacency[v];
      int down = 0;
      for (int k = 0; k < 3; ++k)
        if (row[k] >= 0 && g.column[row[k]] == j + 1) {
          ++down;
          if (row[k] != parent) fail("right tree edge misrouted");
        }
      if (down != 1) fail("right tree vertex without unique parent");
    }

  // middle edges form one cycle alternating between columns n and n+1
  const auto m = std::uint32_t{1} << n;
  std::vector<char> seen(2 * m, 0);
  std::int32_t cur = g.column_offset[n];
  std::int32_t prev = -1;
  std::uint64_t length = 0;
  do {
    const int side = g.column[cur] == n ? 0 : 1;
    const std::uint32_t slot =
        static_cast<std::uint32_t>(cur - g.column_offset[g.column[cur]]) + side * m;
    if (seen[slot]) fail("middle cycle revisits a vertex");
    seen[slot] = 1;
    ++length;
    const int other_column = g.column[cur] == n ? n + 1 : n;
    std::int32_t next = -1;
    for (int k = 0; k < 3; ++k) {
      const auto w = g.adjacency[cur][k];
      if (w >= 0 && g.column[w] == other_column && w != prev) next = w;
    }
    if (next < 0) fail("middle cycle dead end");
    prev = cur;
    cur = next;
  } while (cur != g.column_offset[n]);
  if (length != 2 * static_cast<std::uint64_t>(m)) fail("middle edges split into several cycles");
}

std::vector<std::uint64_t> OracleSession::neighbors(std::uint64_t name) {
  ++count_;
  const auto it = graph_->id_by_name.find(name);
  if (it == graph_->id_by_name.end()) return {};
  std::vector<std::uint64_t> out;
  for (const auto w : graph_->adjacency[it->second])
    if (w >= 0) out.push_back(graph_->names[w]);
  return out;
}

WalkResult classical_random_walk(const GluedTreesInstance& g, std::uint64_t walk_seed,
                                 std::uint64_t max_queries) {
  std::mt19937_64 rng(walk_seed);
  OracleSession oracle(g);
  WalkResult r;
  std::uint64_t cur = g.names[g.entrance];
  const std::uint64_t exit_name = g.names[g.exit];
  while (oracle.query_count() < max_queries) {
    const auto nbrs = oracle.neighbors(cur);
    cur = nbrs[uniform_below(rng, nbrs.size())];
    ++r.steps;
    if (cur == exit_name) {
      r.hit = true;
      break;
    }
  }
  r.queries_used = oracle.query_count();
  return r;
}

void SparseSymmetric::apply(std::span<const double> x, std::span<double> y) const {
  for (std::size_t i = 0; i < dim; ++i) {
    double acc = 0;
    for (auto k = row_ptr[i]; k < row_ptr[i + 1]; ++k) acc += value[k] * x[col_idx[k]];
    y[i] = acc;
  }
}

void SparseSymmetric::apply(std::span<const std::complex<double>> x,
                            std::span<std::complex<double>> y) const {
  for (std::size_t i = 0; i < dim; ++i) {
    std::complex<double> acc = 0;
    for (auto k = row_ptr[i]; k < row_ptr[i + 1]; ++k) acc += value[k] * x[col_idx[k]];
    y[i] = acc;
  }
}

SparseSymmetric build_full_hamiltonian(const GluedTreesInstance& g, double alpha,
                                       double s) {
  if (g.n > kMaxFullBasisN)
    throw std::invalid_argument("full-basis Hamiltonian capped at n <= 12");
  const auto n_vertices = g.vertex_count();
  const double hop = -s * (1 - s) / std::sqrt(2.0);

  SparseSymmetric h;
  h.dim = n_vertices;
  h.row_ptr.resize(n_vertices + 1, 0);
  for (std::size_t v = 0; v < n_vertices; ++v) {
    const bool endpoint =
        static_cast<std::int32_t>(v) == g.entrance || static_cast<std::int32_t>(v) == g.exit;
    h.row_ptr[v + 1] =
        h.row_ptr[v] + g.degree(static_cast<std::int32_t>(v)) + (endpoint ? 1 : 0);
  }
  h.col_idx.resize(h.row_ptr.back());
  h.value.resize(h.row_ptr.back());
  for (std::size_t v = 0; v < n_vertices; ++v) {
    std::int32_t entries[4];
    double values[4];
    int cnt = 0;
    for (const auto w : g.adjacency[v])
      if (w >= 0) {
        entries[cnt] = w;
        values[cnt++] = hop;
      }
    if (static_cast<std::int32_t>(v) == g.entrance) {
      entries[cnt] = g.entrance;
      values[cnt++] = -(1 - s) * alpha;
    }
    if (static_cast<std::int32_t>(v) == g.exit) {
      entries[cnt] = g.exit;
      values[cnt++] = -s * alpha;
    }
    int order[4] = {0, 1, 2, 3};
    std::sort(order, order + cnt, [&](int a, int b) { return entries[a] < entries[b]; });
    for (int k = 0; k < cnt; ++k) {
      h.col_idx[h.row_ptr[v] + k] = entries[order[k]];
      h.value[h.row_ptr[v] + k] = values[order[k]];
    }
  }
  return h;
}

StoquasticReport check_stoquastic(const SparseSymmetric& h) {
  StoquasticReport report;
  for (std::size_t i = 0; i < h.dim; ++i)
    for (auto k = h.row_ptr[i]; k < h.row_ptr[i + 1]; ++k)
      if (h.col_idx[k] != static_cast<std::int32_t>(i) && h.value[k] > 0) {
        report.stoquastic = false;
        report.violations.push_back(
            {static_cast<double>(i), static_cast<double>(h.col_idx[k]), h.value[k]});
      }
  return report;
}

namespace {
template <typename Scalar>
std::vector<Scalar> project_impl(const GluedTreesInstance& g, std::span<const Scalar> psi) {
  if (psi.size() != g.vertex_count())
    throw std::invalid_argument("state dimension does not match instance");
  std::vector<Scalar> out(g.columns());
  for (int j = 0; j <= 2 * g.n + 1; ++j) {
    Scalar acc{};
    for (std::int32_t v = g.column_offset[j]; v < g.column_offset[j + 1]; ++v)
      acc += psi[v];
    out[j] = acc / std::sqrt(static_cast<double>(column_size(g.n, j)));
  }
  return out;
}
}  // namespace

std::vector<double> project_to_columns(const GluedTreesInstance& g,
                                       std::span<const double> psi) {
  return project_impl(g, psi);
}
std::vector<std::complex<double>> project_to_columns(
    const GluedTreesInstance& g, std::span<const std::complex<double>> psi) {
  return project_impl(g, psi);
}

void serialize_instance(std::ostream& out, const GluedTreesInstance& g) {
  out << "gluedtrees-instance v1\n";
  out << "n " << g.n << "\n";
  out << "seed " << g.seed << "\n";
  out << "entrance " << g.hex_name(g.entrance) << "\n";
  out << "exit " << g.hex_name(g.exit) << "\n";
  std::vector<std::int32_t> order(g.vertex_count());
  for (std::size_t v = 0; v < g.vertex_count(); ++v) order[v] = static_cast<std::int32_t>(v);
  std::sort(order.begin(), order.end(),
            [&](std::int32_t a, std::int32_t b) { return g.names[a] < g.names[b]; });
  for (const auto v : order) {
    out << g.hex_name(v) << ":";
    for (const auto w : g.adjacency[v])
      if (w >= 0) out << " " << g.hex_name(w);
    out << "\n";
  }
}

namespace {
std::uint64_t parse_hex(const std::string& token, int width) {
  if (token.size() != static_cast<std::size_t>(width))
    fail("name '" + token + "' has wrong width");
  std::size_t used = 0;
  std::uint64_t value = 0;
  try {
    value = std::stoull(token, &used, 16);
  } catch (const std::exception&) {
    fail("name '" + token + "' is not hex");
  }
  if (used != token.size()) fail("name '" + token + "' is not hex");
  return value;
}
}  // namespace

GluedTreesInstance parse_instance(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "gluedtrees-instance v1")
    fail("missing format header");

  int n = -1;
  std::uint64_t seed = 0;
  std::string entrance_hex, exit_hex;
  for (const char* key : {"n", "seed", "entrance", "exit"}) {
    if (!std::getline(in, line)) fail("truncated header");
    std::istringstream ls(line);
    std::string got, value;
    if (!(ls >> got >> value) || got != key) fail(std::string("expected header line ") + key);
    if (got == "n") n = std::stoi(value);
    else if (got == "seed") seed = std::stoull(value);
    else if (got == "entrance") entrance_hex = value;
    else exit_hex = value;
  }
  if (n < 2 || n > 30) fail("unreasonable n in header");
  const int width = (2 * n + 3) / 4;
  const std::uint64_t n_vertices = (std::uint64_t{1} << (n + 2)) - 2;
  const std::uint64_t entrance_name = parse_hex(entrance_hex, width);
  const std::uint64_t exit_name = parse_hex(exit_hex, width);

  // adjacency by name
  std::unordered_map<std::uint64_t, std::vector<std::uint64_t>> nbrs_of;
  nbrs_of.reserve(2 * n_vertices);
  for (std::uint64_t row = 0; row < n_vertices; ++row) {
    if (!std::getline(in, line)) fail("truncated vertex list");
    std::istringstream ls(line);
    std::string head;
    ls >> head;
    if (head.size() != static_cast<std::size_t>(width) + 1 || head.back() != ':')
      fail("malformed vertex line");
    const std::uint64_t name = parse_hex(head.substr(0, width), width);
    if (!nbrs_of.emplace(name, std::vector<std::uint64_t>{}).second)
      fail("duplicate vertex line");
    auto& list = nbrs_of[name];
    std::string token;
    while (ls >> token) list.push_back(parse_hex(token, width));
    if (list.size() < 2 || list.size() > 3) fail("vertex degree outside 2..3");
  }

  auto neighbors_checked = [&](std::uint64_t name) -> const std::vector<std::uint64_t>& {
    const auto it = nbrs_of.find(name);
    if (it == nbrs_of.end()) fail("edge to unknown vertex");
    return it->second;
  };

  // BFS from ENTRANCE assigns columns
  std::unordered_map<std::uint64_t, int> column_of;
  column_of.reserve(2 * n_vertices);
  std::vector<std::uint64_t> frontier{entrance_name};
  column_of[entrance_name] = 0;
  for (int j = 0; !frontier.empty(); ++j) {
    std::vector<std::uint64_t> next;
    for (const auto name : frontier)
      for (const auto w : neighbors_checked(name))
        if (column_of.emplace(w, j + 1).second) next.push_back(w);
    frontier = std::move(next);
  }
  if (column_of.size() != n_vertices) fail("graph is not connected");

  GluedTreesInstance g;
  g.n = n;
  g.seed = seed;
  g.column_offset.resize(2 * n + 3);
  g.column_offset[0] = 0;
  for (int j = 0; j <= 2 * n + 1; ++j) {
    const auto size = column_size(n, j);
    g.column_offset[j + 1] = g.column_offset[j] + static_cast<std::int32_t>(size);
  }
  g.names.assign(n_vertices, 0);
  g.column.assign(n_vertices, -1);

  // assign ids: children of (j, i) get indices 2i and 2i+1 in name order, so
  // the rebuilt instance satisfies the same wiring invariants
  auto place = [&](std::uint64_t name, int j, std::uint32_t i) {
    const std::int32_t id = g.column_offset[j] + static_cast<std::int32_t>(i);
    g.names[id] = name;
    g.column[id] = j;
    return id;
  };
  {
    const auto it = column_of.find(entrance_name);
    if (it == column_of.end() || it->second != 0) fail("entrance not at column 0");
  }
  std::vector<std::uint64_t> level{entrance_name};
  place(entrance_name, 0, 0);
  for (int j = 0; j < n; ++j) {
    std::vector<std::uint64_t> next(std::size_t{2} * level.size());
    for (std::size_t i = 0; i < level.size(); ++i) {
      std::vector<std::uint64_t> kids;
      for (const auto w : neighbors_checked(level[i]))
        if (column_of[w] == j + 1) kids.push_back(w);
      if (kids.size() != 2) fail("left tree vertex without two children");
      std::sort(kids.begin(), kids.end());
      next[2 * i] = kids[0];
      next[2 * i + 1] = kids[1];
      place(kids[0], j + 1, static_cast<std::uint32_t>(2 * i));
      place(kids[1], j + 1, static_cast<std::uint32_t>(2 * i + 1));
    }
    level = std::move(next);
  }
  {
    const auto it = column_of.find(exit_name);
    if (it == column_of.end() || it->second != 2 * n + 1) fail("exit not at column 2n+1");
  }
  level = {exit_name};
  place(exit_name, 2 * n + 1, 0);
  for (int j = 2 * n + 1; j > n + 1; --j) {
    std::vector<std::uint64_t> next(std::size_t{2} * level.size());
    for (std::size_t i = 0; i < level.size(); ++i) {
      std::vector<std::uint64_t> kids;
      for (const auto w : neighbors_checked(level[i]))
        if (column_of[w] == j - 1) kids.push_back(w);
      if (kids.size() != 2) fail("right tree vertex without two children");
      std::sort(kids.begin(), kids.end());
      next[2 * i] = kids[0];
      next[2 * i + 1] = kids[1];
      place(kids[0], j - 1, static_cast<std::uint32_t>(2 * i));
      place(kids[1], j - 1, static_cast<std::uint32_t>(2 * i + 1));
    }
    level = std::move(next);
  }

  std::unordered_map<std::uint64_t, std::int32_t> id_of;
  id_of.reserve(2 * n_vertices);
  for (std::size_t v = 0; v < n_vertices; ++v) {
    if (g.column[v] < 0) fail("column sizes inconsistent with BFS");
    id_of.emplace(g.names[v], static_cast<std::int32_t>(v));
  }
  if (id_of.size() != n_vertices) fail("names not distinct");

  EdgeList edges;
  edges.nbr.resize(n_vertices);
  for (std::size_t v = 0; v < n_vertices; ++v)
    for (const auto w : neighbors_checked(g.names[v])) {
      const auto wit = id_of.find(w);
      if (wit == id_of.end()) fail("edge to unknown vertex");
      if (wit->second > static_cast<std::int32_t>(v))
        edges.add(static_cast<std::int32_t>(v), wit->second);
      else {
        // symmetry is checked here, insertion happens from the smaller id
        const auto& back = nbrs_of[w];
        if (std::find(back.begin(), back.end(), g.names[v]) == back.end())
          fail("adjacency lists not symmetric");
      }
    }
  finalize_adjacency(g, edges);
  g.entrance = 0;
  g.exit = g.column_offset[2 * n + 1];
  validate_instance(g);
  return g;
}

}  // namespace gluedtrees
