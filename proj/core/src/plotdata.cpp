#include "cdrl/plotdata.hpp"

#include <algorithm>

#include <json.hpp>

namespace cdrl {

std::vector<CurvePoint> smoothed_reward_curve(
    const std::vector<MetricsRecord>& records) {
  std::vector<const MetricsRecord*> episodes;
  for (const auto& r : records) {
    if (r.episode_reward && !r.teacher_task) episodes.push_back(&r);
  }
  std::stable_sort(episodes.begin(), episodes.end(),
                   [](const MetricsRecord* a, const MetricsRecord* b) {
                     return a->global_step < b->global_step;
                   });
  std::vector<CurvePoint> curve;
  curve.reserve(episodes.size());
  double smoothed = 0.0;
  for (std::size_t i = 0; i < episodes.size(); ++i) {
    const double r = *episodes[i]->episode_reward;
    smoothed = i == 0 ? r : 0.9 * smoothed + 0.1 * r;
    curve.push_back({episodes[i]->global_step, smoothed});
  }
  return curve;
}

void write_plotdata_csv(
    std::ostream& out,
    const std::vector<std::pair<std::string, std::vector<CurvePoint>>>& curves) {
  out << "mode,global_step,smoothed_reward\n";
  for (const auto& [mode, curve] : curves) {
    for (const CurvePoint& p : curve) {
      out << mode << ',' << p.global_step << ','
          << nlohmann::json(p.smoothed_reward).dump() << '\n';
    }
  }
}

}  // namespace cdrl
