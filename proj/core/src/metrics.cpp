#include "cdrl/metrics.hpp"

#include <json.hpp>

#include "cdrl/errors.hpp"

namespace cdrl {

namespace {

using nlohmann::json;

void put_optional(json& j, const char* key, const std::optional<double>& v) {
  if (v) j[key] = *v;
}

std::optional<double> get_optional(const json& j, const char* key) {
  if (auto it = j.find(key); it != j.end()) return it->get<double>();
  return std::nullopt;
}

}  // namespace

std::string metrics_to_json_line(const MetricsRecord& r) {
  json j;
  j["wall_time_s"] = r.wall_time_s;
  j["global_step"] = r.global_step;
  j["worker_id"] = r.worker_id;
  if (r.episode_index) j["episode_index"] = *r.episode_index;
  put_optional(j, "episode_reward", r.episode_reward);
  put_optional(j, "policy_loss", r.policy_loss);
  put_optional(j, "value_loss", r.value_loss);
  put_optional(j, "entropy", r.entropy);
  put_optional(j, "distill_loss", r.distill_loss);
  put_optional(j, "align_loss", r.align_loss);
  if (r.teacher_task) j["teacher_task"] = true;
  return j.dump();
}

MetricsRecord metrics_from_json_line(const std::string& line) {
  MetricsRecord r;
  try {
    const json j = json::parse(line);
    r.wall_time_s = j.at("wall_time_s").get<double>();
    r.global_step = j.at("global_step").get<long long>();
    r.worker_id = j.at("worker_id").get<int>();
    if (auto it = j.find("episode_index"); it != j.end()) {
      r.episode_index = it->get<long long>();
    }
    r.episode_reward = get_optional(j, "episode_reward");
    r.policy_loss = get_optional(j, "policy_loss");
    r.value_loss = get_optional(j, "value_loss");
    r.entropy = get_optional(j, "entropy");
    r.distill_loss = get_optional(j, "distill_loss");
    r.align_loss = get_optional(j, "align_loss");
    if (auto it = j.find("teacher_task"); it != j.end()) {
      r.teacher_task = it->get<bool>();
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("metrics: bad record: ") + e.what());
  }
  return r;
}

MetricsWriter::MetricsWriter(const std::string& path)
    : out_(path, std::ios::trunc) {
  if (!out_) throw FormatError("metrics: cannot open '" + path + "'");
}

void MetricsWriter::write(const MetricsRecord& record) {
  const std::string line = metrics_to_json_line(record) + "\n";
  std::lock_guard<std::mutex> lock(mutex_);
  out_.write(line.data(), static_cast<std::streamsize>(line.size()));
  out_.flush();
}

std::vector<MetricsRecord> read_metrics(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("metrics: cannot open '" + path + "'");
  std::vector<MetricsRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    records.push_back(metrics_from_json_line(line));
  }
  return records;
}

}  // namespace cdrl
