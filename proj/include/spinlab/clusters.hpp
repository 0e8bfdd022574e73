// Bookkeeping for the minus phase of a two-spin chain: connected minus
// regions, the projection each region has swept out since birth, legacy
// lineage from the initial minus set, and trifurcation queries against a
// radius-R ball.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "spinlab/graph.hpp"

namespace spinlab {

struct Cluster {
  std::int64_t id = -1;
  std::unordered_set<std::int32_t> region;      // current minus vertices
  std::unordered_set<std::int32_t> projection;  // every vertex ever in region
  bool legacy = false;
  double birth = 0;
  std::int64_t peak_region = 0;
};

// Archived row for a cluster whose region emptied; full vertex sets are
// dropped at death.
struct ClusterSummary {
  std::int64_t id = -1;
  bool legacy = false;
  double birth = 0;
  double death = 0;
  std::int64_t final_projection = 0;
  std::int64_t peak_region = 0;
};

struct ScanReport {
  bool ok = true;
  std::string detail;  // first failed condition, empty when ok
};

class ClusterStore {
 public:
  ClusterStore() = default;
  // t=0: one cluster per connected component of the minus set, all legacy.
  ClusterStore(const Graph& g, const std::vector<std::int8_t>& spins);

  // v flips plus -> minus at time t: fresh singleton cluster, or v joins the
  // union of the neighboring regions (merge, smallest moved into largest).
  void on_flip_to_minus(const Graph& g, std::int32_t v, double t);
  // v flips minus -> plus: leaves its region; an emptied region is a death.
  void on_flip_to_plus(std::int32_t v, double t);

  bool is_minus(std::int32_t v) const { return cluster_of_[v] >= 0; }
  std::int64_t cluster_id(std::int32_t v) const { return cluster_of_[v]; }
  const Cluster& cluster_by_id(std::int64_t id) const { return live_.at(id); }
  const std::unordered_map<std::int64_t, Cluster>& live() const { return live_; }
  const std::vector<ClusterSummary>& dead() const { return dead_; }

  std::int64_t n_minus() const { return n_minus_; }
  int n_live() const { return static_cast<int>(live_.size()); }
  int legacy_alive() const { return legacy_alive_; }
  std::int64_t legacy_vertex_count() const { return legacy_vertex_count_; }
  bool legacy_extinct() const { return legacy_alive_ == 0; }
  // Time the last legacy cluster died (0 when there was none to begin with);
  // empty while any legacy cluster lives.
  std::optional<double> legacy_extinction_time() const { return extinction_time_; }

  std::int64_t max_region_live() const;
  std::int64_t max_projection_live() const;
  std::int64_t max_projection_running() const { return max_projection_running_; }
  bool tau_R_reached(int R) const { return max_projection_running_ >= R; }
  bool in_legacy_region(std::int32_t v) const;

  // v is a trifurcation point when >= 3 components of B_R(v) \ {v} meet the
  // region of v's own cluster.
  bool is_trifurcation(const Graph& g, std::int32_t v, int R) const;

  // Whole-store consistency scan: region partition vs counters, adjacent
  // minus vertices share a cluster (distinct regions at distance >= 2),
  // region within projection, projection connected in G.
  ScanReport full_scan(const Graph& g) const;

 private:
  Cluster& create(std::int32_t v, double t, bool legacy);
  void absorb(Cluster& target, std::int64_t victim_id);

  std::vector<std::int64_t> cluster_of_;  // -1 for plus vertices
  std::unordered_map<std::int64_t, Cluster> live_;
  std::vector<ClusterSummary> dead_;
  std::int64_t next_id_ = 0;
  std::int64_t n_minus_ = 0;
  int legacy_alive_ = 0;
  std::int64_t legacy_vertex_count_ = 0;
  std::int64_t max_projection_running_ = 0;
  std::optional<double> extinction_time_;
};

// Brute-force trifurcation predicates for an explicit vertex set A, used by
// the combinatorial bound tests: count components of B_R(v) \ {v} meeting A.
bool is_trifurcation_point(const Graph& g,
                           const std::unordered_set<std::int32_t>& A,
                           std::int32_t v, int R);
int count_trifurcations(const Graph& g,
                        const std::unordered_set<std::int32_t>& A, int R);

}  // namespace spinlab
