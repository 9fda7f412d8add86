// Copyright 2026 The qstab developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include <json.hpp>

#include "qstab/device_metrics.hpp"
#include "qstab/error.hpp"

namespace qstab {

// Analysis parameters shared by the chart and study commands. Every field
// round-trips through the JSON config file; command-line flags override
// whatever the file says.
struct RunConfig {
  int bins = 20;
  unsigned truncation_order = 4;
  std::string reference_month;     // empty: earliest charted group
  std::string reference_location;  // empty: first location in the chart
  std::optional<double> threshold_override;
  Granularity group_granularity = Granularity::monthly;
  std::uint64_t seed = 12345;
  bool dedup_daily = false;
};

inline RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed config " + path.string() + ": " + e.what());
  }
  RunConfig config;
  try {
    if (j.contains("bins")) config.bins = j.at("bins").get<int>();
    if (j.contains("truncation_order")) {
      config.truncation_order = j.at("truncation_order").get<unsigned>();
    }
    if (j.contains("reference_month")) {
      config.reference_month = j.at("reference_month").get<std::string>();
    }
    if (j.contains("reference_location")) {
      config.reference_location = j.at("reference_location").get<std::string>();
    }
    if (j.contains("threshold_override") && !j.at("threshold_override").is_null()) {
      config.threshold_override = j.at("threshold_override").get<double>();
    }
    if (j.contains("group_granularity")) {
      config.group_granularity = granularity_from_name(j.at("group_granularity").get<std::string>());
    }
    if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("dedup_daily")) config.dedup_daily = j.at("dedup_daily").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed config " + path.string() + ": " + e.what());
  }
  if (config.bins < 1) throw Error("config: bins must be at least 1");
  return config;
}

inline void save_run_config(const std::filesystem::path& path, const RunConfig& config) {
  nlohmann::ordered_json j;
  j["bins"] = config.bins;
  j["truncation_order"] = config.truncation_order;
  j["reference_month"] = config.reference_month;
  j["reference_location"] = config.reference_location;
  if (config.threshold_override.has_value()) {
    j["threshold_override"] = *config.threshold_override;
  } else {
    j["threshold_override"] = nullptr;
  }
  j["group_granularity"] = granularity_name(config.group_granularity);
  j["seed"] = config.seed;
  j["dedup_daily"] = config.dedup_daily;
  std::ofstream out(path);
  if (!out) throw Error("cannot write config: " + path.string());
  out << j.dump(2) << "\n";
}

}  // namespace qstab
