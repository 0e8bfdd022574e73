#include "spinlab/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "spinlab/kernels.hpp"
#include "spinlab/rng.hpp"

namespace spinlab {

namespace {

constexpr int kWitnessCap = 32;

void validate_vertex(const Graph& g, int v) {
  if (v < 0 || v >= g.n) throw std::out_of_range("vertex id out of range");
}

Graph csr_from_lists(std::vector<std::vector<std::int32_t>>& lists,
                     bool oracle_only) {
  const int n = static_cast<int>(lists.size());
  if (n <= 0) throw std::invalid_argument("graph: empty vertex set");
  Graph g;
  g.n = n;
  g.xadj.assign(n + 1, 0);
  int maxdeg = 0, mindeg = 1 << 30;
  for (int v = 0; v < n; ++v) {
    auto& row = lists[v];
    std::sort(row.begin(), row.end());
    if (std::adjacent_find(row.begin(), row.end()) != row.end())
      throw std::invalid_argument("graph: duplicate edge");
    for (int w : row) {
      if (w < 0 || w >= n) throw std::invalid_argument("graph: neighbor out of range");
      if (w == v) throw std::invalid_argument("graph: self loop");
    }
    maxdeg = std::max<int>(maxdeg, static_cast<int>(row.size()));
    mindeg = std::min<int>(mindeg, static_cast<int>(row.size()));
    g.xadj[v + 1] = g.xadj[v] + static_cast<std::int32_t>(row.size());
  }
  g.adj.reserve(g.xadj[n]);
  for (auto& row : lists)
    g.adj.insert(g.adj.end(), row.begin(), row.end());
  // symmetry
  for (int v = 0; v < n; ++v)
    for (int w : lists[v]) {
      const auto& back = lists[w];
      if (!std::binary_search(back.begin(), back.end(), v))
        throw std::invalid_argument("graph: adjacency not symmetric");
    }
  g.d = maxdeg;
  g.regular = (maxdeg == mindeg);
  if (!g.regular && !oracle_only)
    throw std::invalid_argument(
        "graph: non-regular adjacency requires the oracle_only flag");
  return g;
}

}  // namespace

bool Graph::has_edge(int u, int v) const {
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

Graph generate_random_regular(int n, int d, std::uint64_t seed,
                              int max_restarts) {
  if (d < 1) throw std::invalid_argument("generate: d must be >= 1");
  if (n <= d) throw std::invalid_argument("generate: degenerate, need n > d");
  if ((static_cast<std::int64_t>(n) * d) % 2 != 0)
    throw std::invalid_argument("generate: invalid parity, n*d must be even");

  Rng rng(mix_seed(seed, 0x67726170));
  std::vector<std::vector<std::int32_t>> lists;

  auto adjacent = [&](int u, int v) {
    const auto& row = lists[u];
    return std::find(row.begin(), row.end(), v) != row.end();
  };

  for (int attempt = 0; attempt <= max_restarts; ++attempt) {
    lists.assign(n, {});
    for (auto& row : lists) row.reserve(d);
    // one entry per unmatched half-edge
    std::vector<std::int32_t> stubs;
    stubs.reserve(static_cast<std::size_t>(n) * d);
    for (int v = 0; v < n; ++v)
      for (int k = 0; k < d; ++k) stubs.push_back(v);

    bool dead_end = false;
    int rejects = 0;
    while (!stubs.empty()) {
      const std::size_t m = stubs.size();
      std::size_t i = rng.below(m);
      std::size_t j = rng.below(m);
      if (i == j) continue;
      int u = stubs[i], v = stubs[j];
      if (u == v || adjacent(u, v)) {
        // After a long reject streak, verify a legal pair still exists;
        // otherwise the attempt is stuck and we restart wholesale.
        if (++rejects > 64) {
          rejects = 0;
          bool legal = false;
          for (std::size_t a = 0; a < m && !legal; ++a)
            for (std::size_t b = a + 1; b < m && !legal; ++b)
              legal = stubs[a] != stubs[b] && !adjacent(stubs[a], stubs[b]);
          if (!legal) {
            dead_end = true;
            break;
          }
        }
        continue;
      }
      rejects = 0;
      lists[u].push_back(v);
      lists[v].push_back(u);
      if (i < j) std::swap(i, j);
      stubs[i] = stubs.back();
      stubs.pop_back();
      stubs[j] = stubs.back();
      stubs.pop_back();
    }
    if (dead_end) continue;

    Graph g = csr_from_lists(lists, false);
    g.d = d;
    g.seed = seed;
    return g;
  }
  throw std::runtime_error("generate: restart budget exceeded");
}

Graph from_adjacency(std::vector<std::vector<std::int32_t>> lists,
                     bool oracle_only) {
  return csr_from_lists(lists, oracle_only);
}

Graph complete_graph(int n) {
  std::vector<std::vector<std::int32_t>> lists(n);
  for (int v = 0; v < n; ++v)
    for (int w = 0; w < n; ++w)
      if (w != v) lists[v].push_back(w);
  return csr_from_lists(lists, false);
}

Graph cycle_graph(int n) {
  if (n < 3) throw std::invalid_argument("cycle: need n >= 3");
  std::vector<std::vector<std::int32_t>> lists(n);
  for (int v = 0; v < n; ++v) {
    lists[v].push_back((v + 1) % n);
    lists[v].push_back((v + n - 1) % n);
  }
  return csr_from_lists(lists, false);
}

Graph petersen_graph() {
  // outer 5-cycle 0..4, inner pentagram 5..9, spokes i -- i+5
  std::vector<std::vector<std::int32_t>> lists(10);
  for (int i = 0; i < 5; ++i) {
    lists[i] = {static_cast<std::int32_t>((i + 1) % 5),
                static_cast<std::int32_t>((i + 4) % 5),
                static_cast<std::int32_t>(i + 5)};
    lists[i + 5] = {static_cast<std::int32_t>(5 + (i + 2) % 5),
                    static_cast<std::int32_t>(5 + (i + 3) % 5),
                    static_cast<std::int32_t>(i)};
  }
  return csr_from_lists(lists, false);
}

Graph regular_tree(int d, int depth) {
  if (d < 2 || depth < 1) throw std::invalid_argument("tree: need d >= 2, depth >= 1");
  std::vector<std::vector<std::int32_t>> lists(1);
  std::vector<std::int32_t> frontier = {0};
  for (int level = 0; level < depth; ++level) {
    std::vector<std::int32_t> next;
    for (int v : frontier) {
      const int want = (v == 0) ? d : d - 1;
      for (int c = 0; c < want; ++c) {
        const auto w = static_cast<std::int32_t>(lists.size());
        lists.emplace_back();
        lists[v].push_back(w);
        lists[w].push_back(v);
        next.push_back(w);
      }
    }
    frontier = std::move(next);
  }
  return csr_from_lists(lists, true);
}

Graph path_graph(int n) {
  if (n < 2) throw std::invalid_argument("path: need n >= 2");
  std::vector<std::vector<std::int32_t>> lists(n);
  for (int v = 0; v + 1 < n; ++v) {
    lists[v].push_back(v + 1);
    lists[v + 1].push_back(v);
  }
  return csr_from_lists(lists, true);
}

Graph random_tree(int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("random_tree: need n >= 1");
  std::vector<std::vector<std::int32_t>> lists(n);
  Rng rng(seed);
  for (int v = 1; v < n; ++v) {
    const auto u = static_cast<std::int32_t>(rng.below(v));
    lists[v].push_back(u);
    lists[u].push_back(v);
  }
  return csr_from_lists(lists, true);
}

void write_graph(const std::string& path, const Graph& g) {
  if (!g.regular)
    throw std::invalid_argument("write_graph: only regular graphs are serializable");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_graph: cannot open " + path);
  out << g.n << ' ' << g.d << ' ' << g.seed << '\n';
  for (int v = 0; v < g.n; ++v) {
    auto nb = g.neighbors(v);
    for (std::size_t k = 0; k < nb.size(); ++k)
      out << nb[k] << (k + 1 == nb.size() ? '\n' : ' ');
  }
  if (!out) throw std::runtime_error("write_graph: write failed for " + path);
}

Graph read_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_graph: cannot open " + path);
  int n = 0, d = 0;
  std::uint64_t seed = 0;
  if (!(in >> n >> d >> seed))
    throw std::runtime_error("read_graph: bad header in " + path);
  if (n <= 0 || d <= 0) throw std::runtime_error("read_graph: bad dimensions");
  std::vector<std::vector<std::int32_t>> lists(n);
  for (int v = 0; v < n; ++v) {
    lists[v].resize(d);
    for (int k = 0; k < d; ++k)
      if (!(in >> lists[v][k]))
        throw std::runtime_error("read_graph: truncated adjacency");
  }
  Graph g = csr_from_lists(lists, false);
  g.seed = seed;
  if (g.d != d) throw std::runtime_error("read_graph: degree mismatch");
  return g;
}

std::vector<std::int64_t> degree_histogram(const Graph& g) {
  std::vector<std::int64_t> hist(g.d + 1, 0);
  for (int v = 0; v < g.n; ++v) ++hist[g.degree(v)];
  return hist;
}

int audit_radius(int n, int d) {
  return static_cast<int>(std::floor(std::log(static_cast<double>(n)) /
                                     (4.0 * std::log(static_cast<double>(d)))));
}

int dynamics_radius(int n, int d) { return std::max(1, audit_radius(n, d)); }

BallReport ball(const Graph& g, int v, int r) {
  validate_vertex(g, v);
  if (r < 0) throw std::invalid_argument("ball: negative radius");
  BallReport rep;
  std::vector<std::int32_t> dist(g.n, -1);
  std::queue<std::int32_t> bfs;
  dist[v] = 0;
  bfs.push(v);
  while (!bfs.empty()) {
    const int u = bfs.front();
    bfs.pop();
    rep.vertices.push_back(u);
    rep.dist.push_back(dist[u]);
    if (dist[u] == r) continue;
    for (int w : g.neighbors(u))
      if (dist[w] < 0) {
        dist[w] = dist[u] + 1;
        bfs.push(w);
      }
  }
  for (int u : rep.vertices)
    for (int w : g.neighbors(u))
      if (dist[w] >= 0 && w > u) ++rep.edges;
  rep.components = 1;  // a ball is connected through its center
  rep.tree_excess = rep.edges - static_cast<std::int64_t>(rep.vertices.size()) + 1;
  return rep;
}

bool is_one_locally_treelike(const Graph& g, int R,
                             std::vector<std::int32_t>* violators) {
  bool ok = true;
  for (int v = 0; v < g.n; ++v) {
    if (ball(g, v, R).tree_excess > 1) {
      ok = false;
      if (!violators) return false;
      violators->push_back(v);
    }
  }
  return ok;
}

namespace {

std::vector<char> membership(const Graph& g, const std::vector<std::int32_t>& S,
                             const char* what) {
  std::vector<char> in(g.n, 0);
  for (int v : S) {
    validate_vertex(g, v);
    if (in[v]) throw std::invalid_argument(std::string(what) + ": duplicate vertex in set");
    in[v] = 1;
  }
  return in;
}

void finish(ExpansionReport& rep) { rep.pass = static_cast<double>(rep.count) <= rep.bound; }

}  // namespace

ExpansionReport check_degree_expansion(const Graph& g,
                                       const std::vector<std::int32_t>& S,
                                       double delta, double eta) {
  if (!(delta > 0 && delta < eta && eta < 0.5))
    throw std::invalid_argument("degree expansion: need 0 < delta < eta < 1/2");
  if (static_cast<double>(S.size()) > delta * g.n)
    throw std::invalid_argument("degree expansion: |S| exceeds delta*n");
  auto in = membership(g, S, "degree expansion");
  ExpansionReport rep;
  rep.check = "degree_expansion";
  rep.set_size = static_cast<std::int64_t>(S.size());
  const double threshold = eta * g.d;
  for (int u = 0; u < g.n; ++u) {
    int deg = 0;
    for (int w : g.neighbors(u)) deg += in[w];
    if (deg >= threshold) {
      ++rep.count;
      if (static_cast<int>(rep.witnesses.size()) < kWitnessCap)
        rep.witnesses.push_back(u);
    }
  }
  rep.bound = 4.0 * static_cast<double>(S.size()) /
              (g.d * (eta - delta) * (eta - delta));
  finish(rep);
  return rep;
}

ExpansionReport check_majority_expansion(const Graph& g,
                                         const std::vector<std::int32_t>& S,
                                         double gamma0) {
  if (g.d < 7) throw std::invalid_argument("majority expansion: needs d >= 7");
  if (static_cast<double>(S.size()) > 10.0 * gamma0 * g.n)
    throw std::invalid_argument("majority expansion: |S| exceeds 10*gamma0*n");
  auto in = membership(g, S, "majority expansion");
  ExpansionReport rep;
  rep.check = "majority_expansion";
  rep.set_size = static_cast<std::int64_t>(S.size());
  for (int v = 0; v < g.n; ++v) {
    int deg = 0;
    for (int w : g.neighbors(v)) deg += in[w];
    if (7 * deg > 3 * g.d) {  // strict deg_S(v) > 3d/7 in exact arithmetic
      ++rep.count;
      if (static_cast<int>(rep.witnesses.size()) < kWitnessCap)
        rep.witnesses.push_back(v);
    }
  }
  rep.bound = static_cast<double>(S.size()) / 3.0;
  finish(rep);
  return rep;
}

ExpansionReport check_partition_expansion(
    const Graph& g, const std::vector<std::vector<std::int32_t>>& parts,
    double eta, double delta) {
  if (!(eta > 0 && eta < delta && delta < 1))
    throw std::invalid_argument("partition expansion: need 0 < eta < delta < 1");
  const int q = static_cast<int>(parts.size());
  if (q < 2) throw std::invalid_argument("partition expansion: need q >= 2 parts");
  std::vector<std::int8_t> part_of(g.n, -1);
  for (int k = 0; k < q; ++k)
    for (int v : parts[k]) {
      validate_vertex(g, v);
      if (part_of[v] >= 0)
        throw std::invalid_argument("partition expansion: parts overlap");
      part_of[v] = static_cast<std::int8_t>(k);
    }
  for (int v = 0; v < g.n; ++v)
    if (part_of[v] < 0)
      throw std::invalid_argument("partition expansion: parts do not cover V");
  std::size_t rest_max = 0;
  for (int k = 1; k < q; ++k) rest_max = std::max(rest_max, parts[k].size());
  if (static_cast<double>(parts[0].size()) <
      static_cast<double>(rest_max) + delta * g.n)
    throw std::invalid_argument(
        "partition expansion: |S1| must exceed max |Sk| by delta*n");

  ExpansionReport rep;
  rep.check = "partition_expansion";
  rep.set_size = static_cast<std::int64_t>(parts[0].size());
  std::vector<int> deg(q);
  for (int v = 0; v < g.n; ++v) {
    std::fill(deg.begin(), deg.end(), 0);
    for (int w : g.neighbors(v)) ++deg[part_of[w]];
    int rest = 0;
    for (int k = 1; k < q; ++k) rest = std::max(rest, deg[k]);
    if (deg[0] <= rest + eta * g.d) {
      ++rep.count;
      if (static_cast<int>(rep.witnesses.size()) < kWitnessCap)
        rep.witnesses.push_back(v);
    }
  }
  rep.bound = 8.0 * (q - 1) * static_cast<double>(parts[0].size()) /
              (g.d * (delta - eta) * (delta - eta));
  finish(rep);
  return rep;
}

ExpansionReport exhaustive_majority_expansion(const Graph& g, double gamma0) {
  if (g.n > 20)
    throw std::invalid_argument("exhaustive checks are capped at n <= 20");
  const auto cap = static_cast<std::size_t>(10.0 * gamma0 * g.n);
  ExpansionReport worst;
  worst.check = "majority_expansion_exhaustive";
  worst.pass = true;
  double worst_slack = 1e300;
  for (std::uint32_t mask = 0; mask < (1u << g.n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) > cap) continue;
    std::vector<std::int32_t> S;
    for (int v = 0; v < g.n; ++v)
      if (mask & (1u << v)) S.push_back(v);
    auto rep = check_majority_expansion(g, S, gamma0);
    const double slack = rep.bound - static_cast<double>(rep.count);
    if (!rep.pass || slack < worst_slack) {
      worst_slack = slack;
      rep.check = "majority_expansion_exhaustive";
      worst = rep;
      if (!rep.pass) break;
    }
  }
  return worst;
}

ExpansionReport exhaustive_partition_expansion(const Graph& g, double eta,
                                               double delta) {
  if (g.n > 20)
    throw std::invalid_argument("exhaustive checks are capped at n <= 20");
  ExpansionReport worst;
  worst.check = "partition_expansion_exhaustive";
  worst.pass = true;
  double worst_slack = 1e300;
  for (std::uint32_t mask = 0; mask < (1u << g.n); ++mask) {
    std::vector<std::int32_t> S1, S2;
    for (int v = 0; v < g.n; ++v)
      (mask & (1u << v)) ? S1.push_back(v) : S2.push_back(v);
    if (static_cast<double>(S1.size()) <
        static_cast<double>(S2.size()) + delta * g.n)
      continue;
    auto rep = check_partition_expansion(g, {S1, S2}, eta, delta);
    const double slack = rep.bound - static_cast<double>(rep.count);
    if (!rep.pass || slack < worst_slack) {
      worst_slack = slack;
      rep.check = "partition_expansion_exhaustive";
      worst = rep;
      if (!rep.pass) break;
    }
  }
  return worst;
}

Lambda2Report estimate_lambda2(const Graph& g, int iters, double tol,
                               std::uint64_t seed) {
  if (!g.regular)
    throw std::invalid_argument("lambda2: defined for regular graphs");
  const int n = g.n;
  std::vector<double> x(n), y(n);
  std::uint64_t s = mix_seed(seed, 0x6c616d62);
  for (int v = 0; v < n; ++v)
    x[v] = (static_cast<double>(splitmix64(s) >> 11) * 0x1p-53) - 0.5;

  auto deflate = [&](std::vector<double>& vec) {
    const double mean = kernels::sum(vec.data(), vec.size()) / n;
    kernels::shift(-mean, vec.data(), vec.size());
  };
  deflate(x);
  double nrm = std::sqrt(kernels::dot(x.data(), x.data(), x.size()));
  if (nrm == 0) {  // cannot happen for n >= 2, but keep the estimator total
    x[0] = 1;
    x[n - 1] = -1;
    nrm = std::sqrt(2.0);
  }
  kernels::scal(1.0 / nrm, x.data(), x.size());

  Lambda2Report rep;
  double prev = 0;
  for (int it = 1; it <= iters; ++it) {
    for (int v = 0; v < n; ++v) {
      double acc = 0;
      for (int w : g.neighbors(v)) acc += x[w];
      y[v] = acc;
    }
    deflate(y);  // keeps round-off from re-growing the 11^T direction
    const double est = std::sqrt(kernels::dot(y.data(), y.data(), y.size()));
    rep.iterations = it;
    rep.estimate = est;
    if (est == 0) {  // e.g. complete bipartite-free corner; treat as converged
      rep.converged = true;
      return rep;
    }
    kernels::scal(1.0 / est, y.data(), y.size());
    x.swap(y);
    if (it > 1 && std::fabs(est - prev) <= tol * std::max(1.0, std::fabs(est))) {
      rep.converged = true;
      return rep;
    }
    prev = est;
  }
  return rep;
}

}  // namespace spinlab
