#include "spinlab/clusters.hpp"

#include <algorithm>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace spinlab {

ClusterStore::ClusterStore(const Graph& g, const std::vector<std::int8_t>& spins) {
  if (static_cast<int>(spins.size()) != g.n)
    throw std::invalid_argument("cluster store: spin array size mismatch");
  cluster_of_.assign(g.n, -1);
  // flood-fill the minus components; everything born at t=0 is legacy
  for (int v = 0; v < g.n; ++v) {
    if (spins[v] != -1 || cluster_of_[v] >= 0) continue;
    Cluster& c = create(v, 0.0, true);
    std::queue<std::int32_t> bfs;
    bfs.push(v);
    while (!bfs.empty()) {
      const int u = bfs.front();
      bfs.pop();
      for (int w : g.neighbors(u))
        if (spins[w] == -1 && cluster_of_[w] < 0) {
          cluster_of_[w] = c.id;
          c.region.insert(w);
          c.projection.insert(w);
          ++n_minus_;
          ++legacy_vertex_count_;
          bfs.push(w);
        }
    }
    c.peak_region = static_cast<std::int64_t>(c.region.size());
    max_projection_running_ =
        std::max<std::int64_t>(max_projection_running_, c.projection.size());
  }
  if (legacy_alive_ == 0) extinction_time_ = 0.0;  // nothing to outlive
}

Cluster& ClusterStore::create(std::int32_t v, double t, bool legacy) {
  const std::int64_t id = next_id_++;
  Cluster& c = live_[id];
  c.id = id;
  c.legacy = legacy;
  c.birth = t;
  c.region.insert(v);
  c.projection.insert(v);
  c.peak_region = 1;
  cluster_of_[v] = id;
  ++n_minus_;
  if (legacy) {
    ++legacy_alive_;
    ++legacy_vertex_count_;
  }
  max_projection_running_ =
      std::max<std::int64_t>(max_projection_running_, c.projection.size());
  return c;
}

void ClusterStore::absorb(Cluster& target, std::int64_t victim_id) {
  Cluster& victim = live_.at(victim_id);
  for (std::int32_t u : victim.region) {
    cluster_of_[u] = target.id;
    target.region.insert(u);
  }
  target.projection.insert(victim.projection.begin(), victim.projection.end());
  target.legacy = target.legacy || victim.legacy;
  target.birth = std::min(target.birth, victim.birth);
  target.peak_region = std::max(target.peak_region, victim.peak_region);
  live_.erase(victim_id);
}

void ClusterStore::on_flip_to_minus(const Graph& g, std::int32_t v, double t) {
  if (cluster_of_[v] >= 0)
    throw std::logic_error("cluster store: flip_to_minus on a minus vertex");

  std::vector<std::int64_t> ids;
  for (int w : g.neighbors(v)) {
    const std::int64_t id = cluster_of_[w];
    if (id >= 0 && std::find(ids.begin(), ids.end(), id) == ids.end())
      ids.push_back(id);
  }
  if (ids.empty()) {
    create(v, t, t == 0.0);
    return;
  }

  // Deterministic merge target: largest total payload, smallest id on ties.
  std::int64_t target_id = ids[0];
  std::size_t target_size = 0;
  for (std::int64_t id : ids) {
    const Cluster& c = live_.at(id);
    const std::size_t sz = c.region.size() + c.projection.size();
    if (sz > target_size || (sz == target_size && id < target_id)) {
      target_size = sz;
      target_id = id;
    }
  }

  int legacy_before = 0;
  std::int64_t legacy_vertices_before = 0;
  for (std::int64_t id : ids) {
    const Cluster& c = live_.at(id);
    if (c.legacy) {
      ++legacy_before;
      legacy_vertices_before += static_cast<std::int64_t>(c.region.size());
    }
  }

  Cluster& target = live_.at(target_id);
  for (std::int64_t id : ids)
    if (id != target_id) absorb(target, id);

  target.region.insert(v);
  target.projection.insert(v);
  cluster_of_[v] = target.id;
  ++n_minus_;
  target.peak_region =
      std::max(target.peak_region, static_cast<std::int64_t>(target.region.size()));
  max_projection_running_ =
      std::max<std::int64_t>(max_projection_running_, target.projection.size());

  legacy_alive_ += (target.legacy ? 1 : 0) - legacy_before;
  legacy_vertex_count_ +=
      (target.legacy ? static_cast<std::int64_t>(target.region.size()) : 0) -
      legacy_vertices_before;
}

void ClusterStore::on_flip_to_plus(std::int32_t v, double t) {
  const std::int64_t id = cluster_of_[v];
  if (id < 0)
    throw std::logic_error("cluster store: flip_to_plus on a plus vertex");
  Cluster& c = live_.at(id);
  c.region.erase(v);
  cluster_of_[v] = -1;
  --n_minus_;
  if (c.legacy) --legacy_vertex_count_;
  if (!c.region.empty()) return;

  ClusterSummary row;
  row.id = c.id;
  row.legacy = c.legacy;
  row.birth = c.birth;
  row.death = t;
  row.final_projection = static_cast<std::int64_t>(c.projection.size());
  row.peak_region = c.peak_region;
  dead_.push_back(row);
  if (c.legacy) {
    --legacy_alive_;
    if (legacy_alive_ == 0 && !extinction_time_) extinction_time_ = t;
  }
  live_.erase(id);
}

std::int64_t ClusterStore::max_region_live() const {
  std::int64_t m = 0;
  for (const auto& [id, c] : live_)
    m = std::max(m, static_cast<std::int64_t>(c.region.size()));
  return m;
}

std::int64_t ClusterStore::max_projection_live() const {
  std::int64_t m = 0;
  for (const auto& [id, c] : live_)
    m = std::max(m, static_cast<std::int64_t>(c.projection.size()));
  return m;
}

bool ClusterStore::in_legacy_region(std::int32_t v) const {
  const std::int64_t id = cluster_of_[v];
  return id >= 0 && live_.at(id).legacy;
}

bool ClusterStore::is_trifurcation(const Graph& g, std::int32_t v, int R) const {
  const std::int64_t id = cluster_of_[v];
  if (id < 0) return false;
  return is_trifurcation_point(g, live_.at(id).region, v, R);
}

ScanReport ClusterStore::full_scan(const Graph& g) const {
  auto fail = [](std::string msg) { return ScanReport{false, std::move(msg)}; };

  std::int64_t total = 0, legacy_vertices = 0;
  int legacy_live = 0;
  for (const auto& [id, c] : live_) {
    if (c.region.empty()) return fail("live cluster with empty region");
    total += static_cast<std::int64_t>(c.region.size());
    if (c.legacy) {
      ++legacy_live;
      legacy_vertices += static_cast<std::int64_t>(c.region.size());
    }
    for (std::int32_t u : c.region) {
      if (cluster_of_[u] != id) return fail("region member mapped to another cluster");
      if (!c.projection.count(u)) return fail("region not contained in projection");
    }
    if (static_cast<std::int64_t>(c.projection.size()) > max_projection_running_)
      return fail("running projection max behind a live cluster");
    // projection connected in G: BFS inside the projection set
    std::unordered_set<std::int32_t> seen;
    std::queue<std::int32_t> bfs;
    const std::int32_t start = *c.projection.begin();
    seen.insert(start);
    bfs.push(start);
    while (!bfs.empty()) {
      const int u = bfs.front();
      bfs.pop();
      for (int w : g.neighbors(u))
        if (c.projection.count(w) && seen.insert(w).second) bfs.push(w);
    }
    if (seen.size() != c.projection.size()) return fail("projection not connected");
  }
  if (total != n_minus_) return fail("region sizes do not sum to the minus count");
  if (legacy_live != legacy_alive_) return fail("legacy_alive counter mismatch");
  if (legacy_vertices != legacy_vertex_count_)
    return fail("legacy vertex counter mismatch");

  std::int64_t mapped = 0;
  for (int v = 0; v < g.n; ++v) {
    const std::int64_t id = cluster_of_[v];
    if (id < 0) continue;
    ++mapped;
    auto it = live_.find(id);
    if (it == live_.end()) return fail("vertex mapped to a dead cluster");
    if (!it->second.region.count(v)) return fail("vertex missing from its region");
    // adjacent minus vertices must share a region
    for (int w : g.neighbors(v))
      if (cluster_of_[w] >= 0 && cluster_of_[w] != id)
        return fail("distinct regions at distance 1");
  }
  if (mapped != n_minus_) return fail("cluster_of cardinality mismatch");
  return {};
}

bool is_trifurcation_point(const Graph& g,
                           const std::unordered_set<std::int32_t>& A,
                           std::int32_t v, int R) {
  if (!A.count(v)) return false;
  // ball of radius R around v, distances kept in a hash map so repeated calls
  // stay proportional to the ball, not to n
  std::unordered_map<std::int32_t, int> dist;
  std::queue<std::int32_t> bfs;
  dist.emplace(v, 0);
  bfs.push(v);
  while (!bfs.empty()) {
    const int u = bfs.front();
    bfs.pop();
    const int du = dist[u];
    if (du == R) continue;
    for (int w : g.neighbors(u))
      if (dist.emplace(w, du + 1).second) bfs.push(w);
  }
  // components of the ball minus v; count those meeting A, stop at 3
  std::unordered_set<std::int32_t> seen;
  int hits = 0;
  for (const auto& [root, dr] : dist) {
    if (root == v || seen.count(root)) continue;
    bool meets = false;
    std::queue<std::int32_t> comp;
    seen.insert(root);
    comp.push(root);
    while (!comp.empty()) {
      const int u = comp.front();
      comp.pop();
      if (A.count(u)) meets = true;
      for (int w : g.neighbors(u))
        if (w != v && dist.count(w) && seen.insert(w).second) comp.push(w);
    }
    if (meets && ++hits >= 3) return true;
  }
  return false;
}

int count_trifurcations(const Graph& g,
                        const std::unordered_set<std::int32_t>& A, int R) {
  int count = 0;
  for (std::int32_t v : A)
    if (is_trifurcation_point(g, A, v, R)) ++count;
  return count;
}

}  // namespace spinlab
