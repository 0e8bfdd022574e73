#include "spinlab/records.hpp"

#include <fstream>
#include <stdexcept>

namespace spinlab {

nlohmann::json Report::to_json() const {
  return {{"check", check},     {"params", params},
          {"pass", pass},       {"worst_margin", worst_margin},
          {"witnesses", witnesses}, {"extra", extra}};
}

nlohmann::json ExperimentRecord::to_json() const {
  return {{"experiment", experiment},
          {"n", n},
          {"d", d},
          {"graph_seed", graph_seed},
          {"rule", rule},
          {"stream_seed", stream_seed},
          {"horizon", horizon},
          {"observables", observables},
          {"violations", violations},
          {"wall_seconds", wall_seconds}};
}

ExperimentRecord ExperimentRecord::from_json(const nlohmann::json& j) {
  ExperimentRecord r;
  r.experiment = j.at("experiment").get<std::string>();
  r.n = j.at("n").get<int>();
  r.d = j.at("d").get<int>();
  r.graph_seed = j.at("graph_seed").get<std::uint64_t>();
  r.rule = j.at("rule");
  r.stream_seed = j.at("stream_seed").get<std::uint64_t>();
  r.horizon = j.at("horizon").get<double>();
  r.observables = j.at("observables");
  r.violations = j.at("violations");
  r.wall_seconds = j.at("wall_seconds").get<double>();
  return r;
}

void append_jsonl(const std::string& path, const nlohmann::json& obj) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("records: cannot open " + path);
  out << obj.dump() << "\n";
}

std::vector<nlohmann::json> read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("records: cannot open " + path);
  std::vector<nlohmann::json> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(nlohmann::json::parse(line));
  }
  return out;
}

}  // namespace spinlab
