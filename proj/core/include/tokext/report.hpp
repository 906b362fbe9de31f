#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tokext/metrics.hpp"

namespace tokext {

std::string_view tool_version() noexcept;

// Metric names used in series files, in output order.
inline constexpr std::array<std::string_view, 5> kSeriesMetrics = {
    "accuracy", "mean_norm_conf", "mean_norm_conf_correct", "mean_norm_conf_incorrect",
    "mean_cross_entropy"};

struct SeriesPoint {
  std::string checkpoint_label;
  std::uint64_t training_step = 0;
  Difficulty difficulty = Difficulty::kEasy;
  Unit unit = Unit::kToken;
  std::string metric;
  double value = 0.0;

  bool operator==(const SeriesPoint&) const = default;
};

struct CheckpointAggregates {
  std::string label;
  std::uint64_t training_step = 0;
  std::vector<TaskAggregate> aggregates;
};

// Long-format points sorted by (task, metric, training_step, label). Absent
// metrics contribute no point. Throws kDuplicateSeries when a
// (label, task, metric) triple repeats.
std::vector<SeriesPoint> build_series(std::span<const CheckpointAggregates> checkpoints);

// `checkpoint_label,training_step,difficulty,unit,metric,value`
std::string series_csv(std::span<const SeriesPoint> points);

// 64-bit FNV-1a over length-prefixed fields.
class Digest {
 public:
  Digest& add(std::string_view field);
  std::string hex() const;

 private:
  void mix(std::string_view bytes);
  std::uint64_t state_ = 0xcbf29ce484222325ull;
};

struct RunManifest {
  std::string command;
  std::vector<std::string> input_paths;
  std::vector<std::pair<std::string, std::string>> parameters;
  std::string config_digest;
  std::string tool_version;
  std::string timestamp;
};

// Digest of the command, its parameters and the contents of every input, so
// equal digests mean equal semantic inputs regardless of file locations.
std::string config_digest(std::string_view command,
                          std::span<const std::pair<std::string, std::string>> parameters,
                          std::span<const std::string> input_contents);

// UTC ISO-8601; honours SOURCE_DATE_EPOCH for reproducible builds.
std::string manifest_timestamp();

std::string serialize_manifest(const RunManifest& manifest);

}  // namespace tokext
