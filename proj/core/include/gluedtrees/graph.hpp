#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace gluedtrees {

// Two depth-n binary trees whose leaf layers are joined by a uniformly random
// alternating cycle, giving 2^{n+2} - 2 vertices. Vertex names are distinct
// random 2n-bit strings; ENTRANCE and EXIT are the only degree-2 vertices.
// Column j holds the vertices at distance j from ENTRANCE (0 <= j <= 2n+1).
struct GluedTreesInstance {
  int n = 0;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> names;                    // vertex id -> name
  std::vector<std::array<std::int32_t, 3>> adjacency;  // ids, name-sorted, -1 padded
  std::vector<std::int32_t> column;                    // vertex id -> column
  std::vector<std::int32_t> column_offset;             // column -> first vertex id
  std::int32_t entrance = -1;
  std::int32_t exit = -1;
  std::unordered_map<std::uint64_t, std::int32_t> id_by_name;

  std::size_t vertex_count() const { return names.size(); }
  int columns() const { return 2 * n + 2; }
  int name_bits() const { return 2 * n; }
  int hex_width() const { return (name_bits() + 3) / 4; }
  int degree(std::int32_t id) const;
  std::string hex_name(std::int32_t id) const;
};

struct InstanceLimits {
  int max_n = 14;  // 2^{n+2} - 2 vertices; 14 keeps generation under a second
};

// Vertices in column j: 2^j on the left half, mirrored on the right.
std::uint64_t column_size(int n, int j);

// Deterministic in (n, seed): names are drawn first (sparse Fisher-Yates over
// the 2n-bit name space), then the two leaf permutations defining the gluing
// cycle. Throws std::invalid_argument outside 2 <= n <= limits.max_n (below
// n = 2 the name space is smaller than the graph).
GluedTreesInstance generate_instance(int n, std::uint64_t seed,
                                     const InstanceLimits& limits = {});

// Checks every structural invariant (degree census, column sizes, tree wiring
// on both halves, alternating middle cycle, name table consistency). Throws
// std::runtime_error naming the first violation.
void validate_instance(const GluedTreesInstance& g);

// Adjacency-list oracle with a query counter. Unknown names return an empty
// list and still count: the counter tracks oracle calls, not successes.
class OracleSession {
 public:
  explicit OracleSession(const GluedTreesInstance& g) : graph_(&g) {}
  std::vector<std::uint64_t> neighbors(std::uint64_t name);
  std::uint64_t query_count() const { return count_; }

 private:
  const GluedTreesInstance* graph_;
  std::uint64_t count_ = 0;
};

struct WalkResult {
  bool hit = false;              // reached EXIT within the query budget
  std::uint64_t queries_used = 0;
  std::uint64_t steps = 0;
};

// Uniform random walk from ENTRANCE through the oracle. One query per move;
// stops on EXIT or when max_queries is exhausted.
WalkResult classical_random_walk(const GluedTreesInstance& g, std::uint64_t walk_seed,
                                 std::uint64_t max_queries);

// CSR with both triangles stored; dim x dim, symmetric.
struct SparseSymmetric {
  std::size_t dim = 0;
  std::vector<std::int32_t> row_ptr;
  std::vector<std::int32_t> col_idx;
  std::vector<double> value;
  void apply(std::span<const double> x, std::span<double> y) const;
  void apply(std::span<const std::complex<double>> x,
             std::span<std::complex<double>> y) const;
};

// Full-basis cap: crosscheck runs are quadratic in 2^n, so anything larger
// belongs in the column picture.
inline constexpr int kMaxFullBasisN = 12;

// H(s) = (1-s) alpha H0 - s(1-s) Abar + s alpha H1 on the vertex basis, where
// Abar is the 0/1 adjacency divided by sqrt(2), H0 = -|ENTRANCE><ENTRANCE| and
// H1 = -|EXIT><EXIT|. All off-diagonal entries are nonpositive on [0, 1].
SparseSymmetric build_full_hamiltonian(const GluedTreesInstance& g, double alpha,
                                       double s);

struct StoquasticReport {
  bool stoquastic = true;
  // (row, col, value) of positive off-diagonal entries, if any
  std::vector<std::array<double, 3>> violations;
};
StoquasticReport check_stoquastic(const SparseSymmetric& h);

// Per-column amplitudes of a full-basis vector: out[j] = sum over column j of
// psi_v / sqrt(N_j), so column-symmetric states keep unit norm.
std::vector<double> project_to_columns(const GluedTreesInstance& g,
                                       std::span<const double> psi);
std::vector<std::complex<double>> project_to_columns(
    const GluedTreesInstance& g, std::span<const std::complex<double>> psi);

// Text round-trip. Format: header with n and seed, entrance/exit names, then
// one name-sorted line per vertex listing its name-sorted neighbors in hex.
void serialize_instance(std::ostream& out, const GluedTreesInstance& g);
GluedTreesInstance parse_instance(std::istream& in);

}  // namespace gluedtrees
