#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "spinlab/graph.hpp"
#include "spinlab/rules.hpp"

namespace spinlab {

// configuration indexing for the exact laws: two-spin configurations are
// bitmasks where bit v set means spin(v) = +1; q-state configurations are
// base-q numbers whose digit v is state(v) - 1
inline int ising_spin(std::size_t config, int v) {
  return (config >> v) & 1u ? +1 : -1;
}
int potts_state(std::size_t config, int v, int q);

std::vector<double> exact_gibbs_ising(const Graph& g, double beta);
std::vector<double> exact_gibbs_potts(const Graph& g, double beta_p, int q);

// dispatcher that rejects rules without an explicit stationary law
std::vector<double> exact_gibbs(const Graph& g, const UpdateRule& rule);

double tv_distance(const std::vector<double>& p, const std::vector<double>& r);

std::vector<double> restrict_to_phase(
    const std::vector<double>& p, const std::function<bool(std::size_t)>& keep);

// checks pi(s) rate(s -> s') = pi(s') rate(s' -> s) over every single-site
// transition, where rate is the probability the update rule picks the new
// value when the vertex rings
struct BalanceReport {
  bool pass = false;
  double worst_rel = 0.0;
  std::string detail;
};
BalanceReport check_detailed_balance(const Graph& g, const UpdateRule& rule);

}  // namespace spinlab
