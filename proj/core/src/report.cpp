#include "tokext/report.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <optional>
#include <set>
#include <tuple>

#include <nlohmann/json.hpp>

#include "tokext/csv.hpp"
#include "tokext/error.hpp"

#ifndef TOKEXT_VERSION
#define TOKEXT_VERSION "0.0.0"
#endif

namespace tokext {

std::string_view tool_version() noexcept { return TOKEXT_VERSION; }

namespace {

std::optional<double> metric_value(const TaskAggregate& a, std::size_t metric) {
  switch (metric) {
    case 0: return a.accuracy;
    case 1: return a.mean_norm_conf;
    case 2: return a.mean_norm_conf_correct;
    case 3: return a.mean_norm_conf_incorrect;
    default: return a.mean_cross_entropy;
  }
}

std::size_t metric_rank(std::string_view name) {
  return static_cast<std::size_t>(
      std::find(kSeriesMetrics.begin(), kSeriesMetrics.end(), name) - kSeriesMetrics.begin());
}

}  // namespace

std::vector<SeriesPoint> build_series(std::span<const CheckpointAggregates> checkpoints) {
  std::vector<SeriesPoint> points;
  std::set<std::tuple<std::string, Difficulty, Unit, std::size_t>> seen;
  for (const CheckpointAggregates& cp : checkpoints) {
    for (const TaskAggregate& a : cp.aggregates) {
      for (std::size_t m = 0; m < kSeriesMetrics.size(); ++m) {
        const auto value = metric_value(a, m);
        if (!seen.emplace(cp.label, a.difficulty, a.unit, m).second) {
          throw Error(ErrorCode::kDuplicateSeries,
                      "checkpoint '" + cp.label + "' repeats " +
                          std::string(to_string(a.difficulty)) + "/" +
                          std::string(to_string(a.unit)) + " " +
                          std::string(kSeriesMetrics[m]));
        }
        if (!value) continue;
        points.push_back({cp.label, cp.training_step, a.difficulty, a.unit,
                          std::string(kSeriesMetrics[m]), *value});
      }
    }
  }
  std::sort(points.begin(), points.end(), [](const SeriesPoint& x, const SeriesPoint& y) {
    return std::make_tuple(x.difficulty, x.unit, metric_rank(x.metric), x.training_step,
                           std::string_view(x.checkpoint_label)) <
           std::make_tuple(y.difficulty, y.unit, metric_rank(y.metric), y.training_step,
                           std::string_view(y.checkpoint_label));
  });
  return points;
}

std::string series_csv(std::span<const SeriesPoint> points) {
  std::string out;
  csv::append_row(out, {"checkpoint_label", "training_step", "difficulty", "unit", "metric",
                        "value"});
  for (const SeriesPoint& p : points) {
    csv::append_row(out, {p.checkpoint_label, std::to_string(p.training_step),
                          std::string(to_string(p.difficulty)), std::string(to_string(p.unit)),
                          p.metric, csv::format_double(p.value)});
  }
  return out;
}

void Digest::mix(std::string_view bytes) {
  for (unsigned char c : bytes) {
    state_ ^= c;
    state_ *= 0x100000001b3ull;
  }
}

Digest& Digest::add(std::string_view field) {
  const std::string length = std::to_string(field.size()) + ":";
  mix(length);
  mix(field);
  return *this;
}

std::string Digest::hex() const {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  std::uint64_t v = state_;
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kHex[v & 0xF];
    v >>= 4;
  }
  return out;
}

std::string config_digest(std::string_view command,
                          std::span<const std::pair<std::string, std::string>> parameters,
                          std::span<const std::string> input_contents) {
  Digest d;
  d.add(command);
  auto sorted = std::vector<std::pair<std::string, std::string>>(parameters.begin(),
                                                                 parameters.end());
  std::sort(sorted.begin(), sorted.end());
  for (const auto& [key, value] : sorted) d.add(key).add(value);
  for (const auto& contents : input_contents) d.add(contents);
  return d.hex();
}

std::string manifest_timestamp() {
  std::time_t t = 0;
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch != nullptr && *epoch) {
    t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  } else {
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  std::tm utc{};
  gmtime_r(&t, &utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

std::string serialize_manifest(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["command"] = m.command;
  j["input_paths"] = m.input_paths;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [key, value] : m.parameters) params[key] = value;
  j["parameters"] = std::move(params);
  j["config_digest"] = m.config_digest;
  j["tool_version"] = m.tool_version;
  j["timestamp"] = m.timestamp;
  return j.dump(2) + "\n";
}

}  // namespace tokext
