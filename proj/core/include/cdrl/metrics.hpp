#pragma once

#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace cdrl {

// One line of metrics.jsonl. Episode records carry the episode fields;
// alignment-epoch records carry align_loss only. Records from teacher-task
// workers (ca3c) are flagged so reward curves stay per-task.
struct MetricsRecord {
  double wall_time_s = 0.0;
  long long global_step = 0;
  int worker_id = 0;
  std::optional<long long> episode_index;
  std::optional<double> episode_reward;
  std::optional<double> policy_loss;
  std::optional<double> value_loss;
  std::optional<double> entropy;
  std::optional<double> distill_loss;
  std::optional<double> align_loss;
  bool teacher_task = false;
};

std::string metrics_to_json_line(const MetricsRecord& record);
MetricsRecord metrics_from_json_line(const std::string& line);

// Serializes records from many workers into one JSONL file. Each record is
// written and flushed as a whole line, so a crashed run leaves only complete
// lines behind.
class MetricsWriter {
 public:
  explicit MetricsWriter(const std::string& path);
  void write(const MetricsRecord& record);

 private:
  std::ofstream out_;
  std::mutex mutex_;
};

std::vector<MetricsRecord> read_metrics(const std::string& path);

}  // namespace cdrl
