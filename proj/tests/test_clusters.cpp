#include <cstdint>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "doctest.h"
#include "spinlab/clusters.hpp"
#include "spinlab/graph.hpp"
#include "spinlab/rng.hpp"

using namespace spinlab;

namespace {

std::vector<std::int8_t> all_plus(int n) { return std::vector<std::int8_t>(n, 1); }

std::vector<std::int8_t> minus_at(int n, std::initializer_list<int> where) {
  auto s = all_plus(n);
  for (int v : where) s[v] = -1;
  return s;
}

}  // namespace

TEST_CASE("scripted merge and death on a path") {
  const Graph g = path_graph(7);
  ClusterStore st(g, all_plus(7));
  CHECK(st.n_live() == 0);
  CHECK(st.n_minus() == 0);
  CHECK(st.legacy_extinct());
  CHECK(st.legacy_extinction_time() == 0.0);  // nothing to outlive

  st.on_flip_to_minus(g, 1, 0.5);
  st.on_flip_to_minus(g, 0, 0.55);  // joins the cluster of 1
  st.on_flip_to_minus(g, 3, 0.6);   // fresh singleton (distance 2)
  CHECK(st.n_live() == 2);
  CHECK(st.n_minus() == 3);
  CHECK(st.cluster_id(0) == st.cluster_id(1));
  CHECK(st.cluster_id(3) != st.cluster_id(1));
  CHECK(st.full_scan(g).ok);

  // 2 bridges the two clusters: one region {0,1,2,3}, larger cluster wins,
  // birth is the lineage minimum.
  st.on_flip_to_minus(g, 2, 0.7);
  CHECK(st.n_live() == 1);
  const auto& c = st.cluster_by_id(st.cluster_id(2));
  CHECK(c.region.size() == 4);
  CHECK(c.projection.size() == 4);
  CHECK(c.peak_region == 4);
  CHECK(c.birth == 0.5);
  CHECK_FALSE(c.legacy);
  CHECK(st.dead().empty());  // a merge is not a death
  CHECK(st.full_scan(g).ok);

  // The bridge recovers: the region splits geometrically but the lineage is
  // still one cluster, and the projection remembers vertex 2.
  st.on_flip_to_plus(2, 0.9);
  CHECK(st.n_live() == 1);
  CHECK(st.cluster_id(0) == st.cluster_id(3));
  CHECK(st.cluster_by_id(st.cluster_id(3)).region.size() == 3);
  CHECK(st.cluster_by_id(st.cluster_id(3)).projection.size() == 4);
  CHECK(st.max_region_live() == 3);
  CHECK(st.max_projection_live() == 4);
  CHECK(st.full_scan(g).ok);

  st.on_flip_to_plus(0, 1.0);
  st.on_flip_to_plus(1, 1.05);
  st.on_flip_to_plus(3, 1.1);
  CHECK(st.n_live() == 0);
  CHECK(st.n_minus() == 0);
  REQUIRE(st.dead().size() == 1);
  const auto& row = st.dead()[0];
  CHECK(row.birth == 0.5);
  CHECK(row.death == 1.1);
  CHECK(row.final_projection == 4);
  CHECK(row.peak_region == 4);
  CHECK_FALSE(row.legacy);
  CHECK(st.full_scan(g).ok);

  // Double flips are logic errors.
  st.on_flip_to_minus(g, 4, 1.2);
  CHECK_THROWS_AS(st.on_flip_to_minus(g, 4, 1.3), std::logic_error);
  CHECK_THROWS_AS(st.on_flip_to_plus(5, 1.3), std::logic_error);
}

TEST_CASE("legacy lineage and extinction time") {
  const Graph g = path_graph(7);
  ClusterStore st(g, minus_at(7, {0, 5, 6}));
  CHECK(st.n_live() == 2);  // {0} and {5,6}
  CHECK(st.legacy_alive() == 2);
  CHECK(st.legacy_vertex_count() == 3);
  CHECK_FALSE(st.legacy_extinct());
  CHECK_FALSE(st.legacy_extinction_time().has_value());
  CHECK(st.in_legacy_region(5));
  CHECK_FALSE(st.in_legacy_region(1));
  CHECK(st.max_projection_running() == 2);
  CHECK(st.tau_R_reached(2));
  CHECK_FALSE(st.tau_R_reached(3));

  st.on_flip_to_plus(0, 0.2);
  CHECK(st.legacy_alive() == 1);
  CHECK_FALSE(st.legacy_extinction_time().has_value());
  REQUIRE(st.dead().size() == 1);
  CHECK(st.dead()[0].legacy);
  CHECK(st.dead()[0].birth == 0.0);
  CHECK(st.dead()[0].death == 0.2);

  st.on_flip_to_plus(5, 0.3);
  st.on_flip_to_plus(6, 0.4);
  CHECK(st.legacy_extinct());
  CHECK(st.legacy_extinction_time() == 0.4);
  CHECK(st.legacy_vertex_count() == 0);

  // Later minus activity is not legacy and leaves the extinction time alone.
  st.on_flip_to_minus(g, 2, 0.5);
  CHECK(st.legacy_extinct());
  CHECK(st.legacy_extinction_time() == 0.4);
  CHECK_FALSE(st.in_legacy_region(2));
  CHECK(st.full_scan(g).ok);
}

TEST_CASE("legacy status survives a merge with a fresh cluster") {
  const Graph g = path_graph(5);
  ClusterStore st(g, minus_at(5, {0}));
  st.on_flip_to_minus(g, 2, 0.1);  // fresh, not legacy
  CHECK(st.legacy_vertex_count() == 1);
  st.on_flip_to_minus(g, 1, 0.2);  // bridges 0 and 2
  CHECK(st.n_live() == 1);
  const auto& c = st.cluster_by_id(st.cluster_id(2));
  CHECK(c.legacy);
  CHECK(c.birth == 0.0);
  CHECK(st.legacy_alive() == 1);
  CHECK(st.legacy_vertex_count() == 3);
  CHECK(st.in_legacy_region(2));

  // The whole merged lineage counts as legacy at death.
  st.on_flip_to_plus(0, 0.3);
  st.on_flip_to_plus(1, 0.4);
  st.on_flip_to_plus(2, 0.5);
  CHECK(st.legacy_extinct());
  CHECK(st.legacy_extinction_time() == 0.5);
  REQUIRE(st.dead().size() == 1);
  CHECK(st.dead()[0].legacy);
  CHECK(st.dead()[0].final_projection == 3);
}

TEST_CASE("store trifurcation tracks the vertex's own region") {
  // Depth-2 ternary tree: root 0 with children 1,2,3.
  const Graph g = regular_tree(3, 2);
  ClusterStore st(g, minus_at(g.n, {0, 1, 2, 3}));
  CHECK(st.n_live() == 1);
  CHECK(st.is_trifurcation(g, 0, 1));
  CHECK_FALSE(st.is_trifurcation(g, 1, 1));  // only one ball component meets the region
  CHECK_FALSE(st.is_trifurcation(g, 4, 1));  // plus vertex

  st.on_flip_to_plus(1, 0.1);
  CHECK_FALSE(st.is_trifurcation(g, 0, 1));  // two components left
}

TEST_CASE("brute-force trifurcation bound on explicit sets") {
  // Star: the center sees three marked legs, each leaf sees one component.
  const Graph star = regular_tree(3, 1);
  const std::unordered_set<std::int32_t> a = {0, 1, 2, 3};
  CHECK(is_trifurcation_point(star, a, 0, 1));
  CHECK_FALSE(is_trifurcation_point(star, a, 1, 1));
  CHECK_FALSE(is_trifurcation_point(star, a, 0, 0));  // empty punctured ball
  CHECK(count_trifurcations(star, a, 1) == 1);

  // Points outside A are never counted.
  const std::unordered_set<std::int32_t> leaves = {1, 2, 3};
  CHECK_FALSE(is_trifurcation_point(star, leaves, 0, 1));
  CHECK(count_trifurcations(star, leaves, 1) == 0);

  // On a path the punctured ball has at most two components.
  const Graph path = path_graph(9);
  std::unordered_set<std::int32_t> all;
  for (int v = 0; v < 9; ++v) all.insert(v);
  for (int r = 1; r <= 3; ++r) CHECK(count_trifurcations(path, all, r) == 0);

  // Deeper tree: root and one child both trifurcate once grandchildren join.
  const Graph t = regular_tree(3, 2);
  std::unordered_set<std::int32_t> deep = {0, 1, 2, 3, 4, 5};
  CHECK(is_trifurcation_point(t, deep, 0, 1));
  CHECK(is_trifurcation_point(t, deep, 1, 1));
  CHECK_FALSE(is_trifurcation_point(t, deep, 2, 1));
  CHECK(count_trifurcations(t, deep, 1) == 2);
  CHECK(count_trifurcations(t, deep, 1) <= static_cast<int>(deep.size()) / 2);
}

TEST_CASE("randomized store agrees with a reference minus set") {
  const Graph g = generate_random_regular(60, 4, 17);
  ClusterStore st(g, all_plus(60));
  std::vector<char> minus(60, 0);
  Rng rng(99);
  double t = 0;
  for (int step = 0; step < 4000; ++step) {
    t += 0.01;
    const auto v = static_cast<std::int32_t>(rng.below(60));
    if (minus[v]) {
      st.on_flip_to_plus(v, t);
      minus[v] = 0;
    } else {
      st.on_flip_to_minus(g, v, t);
      minus[v] = 1;
    }
    std::int64_t want = 0;
    for (char m : minus) want += m;
    REQUIRE(st.n_minus() == want);
    if (step % 200 == 0) {
      const auto scan = st.full_scan(g);
      REQUIRE_MESSAGE(scan.ok, scan.detail);
    }
  }
  // Re-running the same script gives the identical dead-cluster ledger.
  ClusterStore st2(g, all_plus(60));
  std::vector<char> minus2(60, 0);
  Rng rng2(99);
  double t2 = 0;
  for (int step = 0; step < 4000; ++step) {
    t2 += 0.01;
    const auto v = static_cast<std::int32_t>(rng2.below(60));
    if (minus2[v]) {
      st2.on_flip_to_plus(v, t2);
      minus2[v] = 0;
    } else {
      st2.on_flip_to_minus(g, v, t2);
      minus2[v] = 1;
    }
  }
  REQUIRE(st.dead().size() == st2.dead().size());
  for (std::size_t i = 0; i < st.dead().size(); ++i) {
    CHECK(st.dead()[i].id == st2.dead()[i].id);
    CHECK(st.dead()[i].birth == st2.dead()[i].birth);
    CHECK(st.dead()[i].death == st2.dead()[i].death);
    CHECK(st.dead()[i].final_projection == st2.dead()[i].final_projection);
  }
  CHECK(ClusterStore(g, all_plus(60)).full_scan(g).ok);
  CHECK_THROWS_AS(ClusterStore(g, all_plus(59)), std::invalid_argument);
}
