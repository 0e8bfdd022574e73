#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace spinlab {

// outcome of one verification pass; margins are log-space slack, so a check
// passes when worst_margin is above the tolerance the checker pinned
struct Report {
  std::string check;
  nlohmann::json params = nlohmann::json::object();
  bool pass = false;
  double worst_margin = 0.0;
  std::vector<std::string> witnesses;
  nlohmann::json extra = nlohmann::json::object();

  nlohmann::json to_json() const;
};

// everything needed to rerun one simulation cell and the numbers it produced
struct ExperimentRecord {
  std::string experiment;
  int n = 0;
  int d = 0;
  std::uint64_t graph_seed = 0;
  nlohmann::json rule = nlohmann::json::object();
  std::uint64_t stream_seed = 0;
  double horizon = 0.0;
  nlohmann::json observables = nlohmann::json::object();
  nlohmann::json violations = nlohmann::json::object();
  double wall_seconds = 0.0;

  nlohmann::json to_json() const;
  static ExperimentRecord from_json(const nlohmann::json& j);
};

void append_jsonl(const std::string& path, const nlohmann::json& obj);
std::vector<nlohmann::json> read_jsonl(const std::string& path);

}  // namespace spinlab
