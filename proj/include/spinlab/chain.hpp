// Chain state containers and the coupled run engines: the shared-event
// monotone coupling, the standard/rigid pair, and the three-chain Potts
// construction with its inclusion invariants.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinlab/clusters.hpp"
#include "spinlab/events.hpp"
#include "spinlab/graph.hpp"
#include "spinlab/rules.hpp"

namespace spinlab {

struct TwoSpinConfig {
  std::vector<std::int8_t> spins;  // +1 / -1

  static TwoSpinConfig all_plus(int n);
  static TwoSpinConfig all_minus(int n);
  // Exactly ceil((1+eps) n / 2) vertices +1, chosen uniformly by seed.
  static TwoSpinConfig biased(int n, double eps, std::uint64_t seed);
  static TwoSpinConfig from_file(const std::string& path, int n);

  int n() const { return static_cast<int>(spins.size()); }
  std::int64_t spin_sum() const;
  bool leq(const TwoSpinConfig& other) const;  // pointwise
};

double magnetization_ising(const TwoSpinConfig& c);

struct PottsConfig {
  int q = 0;
  std::vector<std::uint8_t> states;  // 1..q

  static PottsConfig all_one(int n, int q);
  // ceil(eps*n) vertices forced to state 1, the rest uniform over 1..q.
  static PottsConfig biased(int n, int q, double eps, std::uint64_t seed);
  static PottsConfig from_file(const std::string& path, int n, int q);

  int n() const { return static_cast<int>(states.size()); }
  std::vector<std::int64_t> counts() const;
};

// (count of state 1 minus the largest other state count) / n
double magnetization_potts(const PottsConfig& c);

struct ApplyResult {
  bool changed = false;
  bool rejected = false;
  std::int8_t old_spin = 0;
  std::int8_t new_spin = 0;
};

// One heat-bath update: resample vertex ev.vertex against its current
// neighborhood; the spin goes to -1 exactly when uniform <= 1 - p_plus
// (closed threshold). A reject_hook veto applies only to minus->plus flips.
ApplyResult apply_two_spin(TwoSpinConfig& cfg, const Graph& g,
                           const UpdateRule& rule, const UpdateEvent& ev,
                           const std::function<bool(std::int32_t)>& reject_hook = {});

struct EngineOptions {
  int scan_every = 1000;  // full-state invariant scan cadence, 0 disables
  bool paranoid = false;  // scan after every event
  // called after the event is applied to every chain in the run
  std::function<void(const UpdateEvent&)> on_event;
  // early-out checked after each event (and its observers)
  std::function<bool()> stop;
};

struct GrandCoupledResult {
  std::vector<TwoSpinConfig> finals;
  std::int64_t events = 0;
  std::int64_t order_violations = 0;
  std::string first_violation;
};

// All chains consume the same events; initial pointwise order between any
// pair of chains is preserved by the closed-threshold update whenever the
// rule is monotone, and violations are counted, not repaired.
GrandCoupledResult run_grand_coupled(const Graph& g, const UpdateRule& rule,
                                     std::vector<TwoSpinConfig> inits,
                                     EventStream& stream, double horizon,
                                     const EngineOptions& opts = {});

struct SingleRunResult {
  TwoSpinConfig final;
  std::int64_t events = 0;
  std::int64_t flips = 0;
};

// state-view observer, called after each event is applied
using SingleObserver = std::function<void(
    const UpdateEvent&, const ApplyResult&, const TwoSpinConfig&)>;

// plain single-chain run, no cluster bookkeeping
SingleRunResult run_single(const Graph& g, const UpdateRule& rule,
                           TwoSpinConfig init, EventStream& stream,
                           double horizon, const EngineOptions& opts = {},
                           const SingleObserver& observe = {});

struct SingleStoreResult {
  TwoSpinConfig final;
  ClusterStore store;
  std::int64_t events = 0;
  std::optional<double> legacy_extinction_time;
};

// observer with a view of the evolving cluster bookkeeping
using StoreObserver = std::function<void(
    const UpdateEvent&, const ApplyResult&, const TwoSpinConfig&,
    const ClusterStore&)>;

// single chain with full minus-cluster bookkeeping; initial minus vertices
// seed the legacy clusters
SingleStoreResult run_single_with_store(const Graph& g, const UpdateRule& rule,
                                        TwoSpinConfig init, EventStream& stream,
                                        double horizon,
                                        const EngineOptions& opts = {},
                                        const StoreObserver& observe = {});

struct DominationViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RigidPairResult {
  TwoSpinConfig final_standard;
  TwoSpinConfig final_rigid;
  ClusterStore store_rigid;
  std::int64_t events = 0;
  std::int64_t rejected_flips = 0;          // trifurcation vetoes
  std::int64_t structural_violations = 0;   // counted at guarded vertices
  std::int64_t structural_checks = 0;
  // whole graph treelike at R and no projection ever reached R
  bool guard_active_throughout = true;
  std::optional<double> tau_R_time;
  std::string first_structural_violation;
};

// Standard chain and rigid chain (minus->plus flips vetoed at trifurcation
// points of the rigid chain's own regions), both from all-plus, driven by
// the same events. A rigid spin exceeding its standard partner aborts with
// DominationViolation. The structural degree laws are checked at every
// vertex whose own radius-R ball has tree excess <= 1 (for R >= 1); the
// plus-side law additionally conditions on the neighboring cluster's
// projection staying <= R, which is the regime where it is a theorem.
RigidPairResult run_rigid_pair(const Graph& g, const UpdateRule& rule,
                               EventStream& stream, double horizon, int R,
                               const EngineOptions& opts = {});

struct PottsTripleResult {
  PottsConfig final_free;   // chain started from y0
  PottsConfig final_one;    // chain started from all-ones
  TwoSpinConfig final_x;    // dominating two-spin chain
  ClusterStore store_x;
  std::int64_t events = 0;
  std::int64_t disagreement_violations = 0;  // some v with Y^{y0} != Y^1 outside a legacy region
  std::int64_t support_violations = 0;       // some non-1 state at an X-plus vertex
  std::int64_t post_extinction_disagreements = 0;
  std::optional<double> legacy_extinction_time;
  std::int64_t current_disagreements = 0;    // |{v: Y^{y0}(v) != Y^1(v)}| at the end
  std::string first_violation;
};

// Three chains on one event stream: Potts heat-bath from y0, Potts heat-bath
// from all-ones, and the dominating two-spin chain from x0(v) = +1 iff
// y0(v) = 1. The shared uniform is read against interval partitions laid out
// as state 1 first then 2..q ascending, and the X chain takes +1 exactly when
// the uniform lands in [0, p_plus) (plus interval at the bottom, which is
// what makes the inclusions hold pathwise). Both inclusions are asserted at
// the updated vertex after every event and across the whole state at the
// scan cadence.
PottsTripleResult run_potts_triple(const Graph& g, const PottsConfig& y0,
                                   double beta_p, int q, EventStream& stream,
                                   double horizon,
                                   const EngineOptions& opts = {});

}  // namespace spinlab
