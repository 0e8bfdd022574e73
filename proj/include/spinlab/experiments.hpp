#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spinlab/chain.hpp"
#include "spinlab/records.hpp"
#include "spinlab/rules.hpp"

namespace spinlab {

// one named sweep: the cell grid is (n in ns) x graph_seeds x replicas
struct ExperimentSpec {
  std::string name;
  std::vector<int> ns;
  int d = 7;
  std::vector<std::uint64_t> graph_seeds = {1};
  nlohmann::json rule = {{"kind", "ising"}, {"beta", 3.0}};
  std::string init = "all_plus";
  double horizon = -1.0;  // < 0 picks the per-experiment default; 0 is a
                          // legal degenerate run (initial state only)
  int replicas = 1;
  std::int64_t scan_every = 1000;
  std::int64_t observe_every = 0;  // trace cadence in events, 0 disables
  bool paranoid = false;
  std::uint64_t seed = 1;
  std::string out;  // jsonl path, empty skips persistence
  nlohmann::json params = nlohmann::json::object();  // experiment-specific

  static ExperimentSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  void validate() const;
};

UpdateRule rule_from_json(int d, const nlohmann::json& j);
nlohmann::json rule_json(const UpdateRule& r);

// init strings: all_plus | all_minus | biased:EPS | file:PATH (two-spin gets
// exactly ceil((1+EPS)n/2) plus vertices; q-state forces ceil(EPS*n) vertices
// to state 1 over a uniform background)
TwoSpinConfig make_two_spin_init(const std::string& spec, int n,
                                 std::uint64_t seed);
PottsConfig make_potts_init(const std::string& spec, int n, int q,
                            std::uint64_t seed);

// runs every cell (parallel across SPINLAB_THREADS workers, default hardware
// concurrency), appends one record per cell to spec.out when set; cell order
// and content are deterministic regardless of scheduling
std::vector<ExperimentRecord> run_experiment(const ExperimentSpec& spec);

struct Summary {
  nlohmann::json groups = nlohmann::json::array();
  std::string text;
  std::string csv;
  bool any_violation = false;
};

Summary summarize(const std::vector<nlohmann::json>& records);
Summary summarize_path(const std::string& path);  // .jsonl file or directory

}  // namespace spinlab
