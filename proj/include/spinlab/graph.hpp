// Random regular graphs plus the structural audits the dynamics relies on:
// local tree-likeness, spectral gap, and three expansion counts.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace spinlab {

// Undirected simple graph in CSR form. Generated graphs are d-regular; the
// relaxed from_adjacency path admits non-regular graphs for small exact
// fixtures only (oracle_only must be set, and such graphs cannot be written
// to the on-disk format).
struct Graph {
  int n = 0;
  int d = 0;  // declared degree (max degree for oracle-only graphs)
  std::uint64_t seed = 0;
  bool regular = true;
  std::vector<std::int32_t> xadj;  // n+1 offsets
  std::vector<std::int32_t> adj;

  std::span<const std::int32_t> neighbors(int v) const {
    return {adj.data() + xadj[v], adj.data() + xadj[v + 1]};
  }
  int degree(int v) const { return xadj[v + 1] - xadj[v]; }
  bool has_edge(int u, int v) const;
  std::int64_t edge_count() const { return static_cast<std::int64_t>(adj.size()) / 2; }
};

// Uniform-ish random simple d-regular graph by sequential constrained pairing
// of half-edges (restart on dead end). Throws on odd n*d, on n <= d, and when
// the restart budget is exhausted.
Graph generate_random_regular(int n, int d, std::uint64_t seed,
                              int max_restarts = 10000);

Graph from_adjacency(std::vector<std::vector<std::int32_t>> lists,
                     bool oracle_only = false);

// Handy fixtures.
Graph complete_graph(int n);             // K_n, regular
Graph cycle_graph(int n);                // C_n, 2-regular
Graph petersen_graph();                  // 3-regular, n=10
Graph regular_tree(int d, int depth);    // oracle-only (leaves are deficient)
Graph path_graph(int n);                 // oracle-only
Graph random_tree(int n, std::uint64_t seed);  // oracle-only, uniform attachment

// Text format: line 1 "n d seed", then n lines, line i holding the d
// neighbors of vertex i (0-based).
void write_graph(const std::string& path, const Graph& g);
Graph read_graph(const std::string& path);

std::vector<std::int64_t> degree_histogram(const Graph& g);

// Trifurcation radius used by the rigid dynamics.
int dynamics_radius(int n, int d);  // max(1, floor(ln n / (4 ln d)))
int audit_radius(int n, int d);     // floor(ln n / (4 ln d)), may be 0

struct BallReport {
  std::vector<std::int32_t> vertices;  // BFS order from the center
  std::vector<std::int32_t> dist;      // parallel to vertices
  std::int64_t edges = 0;              // induced edge count
  int components = 1;                  // of the induced subgraph (always 1)
  std::int64_t tree_excess = 0;        // edges - vertices + components
};

BallReport ball(const Graph& g, int v, int r);

// Every radius-R ball has tree excess <= 1. Violating centers (sorted) are
// appended to *violators when given.
bool is_one_locally_treelike(const Graph& g, int R,
                             std::vector<std::int32_t>* violators = nullptr);

struct ExpansionReport {
  std::string check;
  std::int64_t set_size = 0;
  std::int64_t count = 0;   // vertices violating the sparsity condition
  double bound = 0;
  bool pass = false;
  std::vector<std::int32_t> witnesses;  // sorted, capped
};

// |{u : deg_S(u) >= eta*d}| <= 4|S| / (d (eta-delta)^2), valid for
// |S| <= delta*n and 0 < delta < eta < 1/2.
ExpansionReport check_degree_expansion(const Graph& g,
                                       const std::vector<std::int32_t>& S,
                                       double delta, double eta);

// |{v : deg_S(v) > 3d/7}| <= |S|/3, valid for |S| <= 10*gamma0*n, d >= 7.
ExpansionReport check_majority_expansion(const Graph& g,
                                         const std::vector<std::int32_t>& S,
                                         double gamma0 = 0.01);

// For a q-part partition with |S_1| >= max_{k>=2} |S_k| + delta*n:
// |{v : deg_{S1}(v) <= max_{k>=2} deg_{Sk}(v) + eta*d}| <=
//   8 (q-1) |S_1| / (d (delta-eta)^2), valid for 0 < eta < delta < 1.
ExpansionReport check_partition_expansion(
    const Graph& g, const std::vector<std::vector<std::int32_t>>& parts,
    double eta, double delta);

// Exhaustive counterparts for tiny graphs (hard cap n <= 20): scan all
// admissible sets / bipartitions and return the worst report.
ExpansionReport exhaustive_majority_expansion(const Graph& g, double gamma0 = 0.01);
ExpansionReport exhaustive_partition_expansion(const Graph& g, double eta, double delta);

struct Lambda2Report {
  double estimate = 0;  // largest-magnitude eigenvalue of A - (d/n) 11^T
  int iterations = 0;
  bool converged = false;
};

// Power iteration with explicit deflation of the all-ones direction.
// Deterministic start vector derived from seed.
Lambda2Report estimate_lambda2(const Graph& g, int iters = 1000,
                               double tol = 1e-9, std::uint64_t seed = 1);

}  // namespace spinlab
