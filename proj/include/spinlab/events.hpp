// Shared randomness source driving every coupled chain: one global clock at
// rate n (superposition of per-vertex rate-1 clocks), a uniform vertex, and a
// fresh Unif[0,1] per event. O(1) state, so replicas fork cheaply.
#pragma once

#include <cstdint>

#include "spinlab/rng.hpp"

namespace spinlab {

struct UpdateEvent {
  double time = 0;
  std::int32_t vertex = 0;
  double uniform = 0;
};

class EventStream {
 public:
  EventStream(std::uint64_t seed, int n) : n_(n), seed_(seed), rng_(seed) {}

  // Draw order is fixed (increment, vertex, uniform); reordering would
  // silently break reproducibility across call sites.
  UpdateEvent next() {
    t_ += rng_.exp_variate(static_cast<double>(n_));
    UpdateEvent ev;
    ev.time = t_;
    ev.vertex = static_cast<std::int32_t>(rng_.below(static_cast<std::uint64_t>(n_)));
    ev.uniform = rng_.u53();
    return ev;
  }

  static EventStream fork_replica(std::uint64_t base_seed, std::uint64_t replica,
                                  int n) {
    return EventStream(mix_seed(base_seed, replica), n);
  }

  std::uint64_t seed() const { return seed_; }
  double clock() const { return t_; }
  int n() const { return n_; }

 private:
  double t_ = 0;
  int n_;
  std::uint64_t seed_;
  Rng rng_;
};

}  // namespace spinlab
