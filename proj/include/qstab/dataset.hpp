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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "qstab/device_metrics.hpp"
#include "qstab/error.hpp"
#include "qstab/timeutil.hpp"

namespace qstab {

// Calibration CSV schema: one row per timestamp x location. Qubit rows fill
// the readout/coherence columns, pair rows the gate columns; inapplicable
// cells stay empty.
inline constexpr const char* kCalibrationCsvHeader =
    "timestamp,device,location_kind,location_id,readout_error,t1_us,t2_us,gate_error,"
    "gate_length_ns";

struct ParseReport {
  std::vector<std::string> warnings;
  std::size_t rows_read = 0;
  std::size_t rows_skipped = 0;
  std::string device_name;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  fields.push_back(field);
  return fields;
}

inline bool parse_double(const std::string& s, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(s, &pos);
    return pos == s.size() && std::isfinite(out);
  } catch (...) {
    return false;
  }
}

// FNV-1a over raw bytes; used for manifest content digests.
inline std::uint64_t content_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path.string());
  std::uint64_t h = 14695981039346656037ull;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace detail

// Parses the calibration CSV. Rows failing validation are skipped and
// reported with their line number; duplicate (timestamp, location) cells are
// last-write-wins with a warning. Records come back sorted by timestamp.
inline std::vector<CalibrationRecord> parse_calibration_csv(const std::filesystem::path& path,
                                                            ParseReport* report = nullptr) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path.string());
  ParseReport local;
  ParseReport& rep = report ? *report : local;

  std::string line;
  if (!std::getline(in, line)) throw Error("missing header in " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCalibrationCsvHeader) throw Error("missing or malformed header in " + path.string());

  std::map<UtcSeconds, CalibrationRecord> by_time;
  std::size_t line_no = 1;
  auto skip = [&](const std::string& why) {
    ++rep.rows_skipped;
    rep.warnings.push_back(why + ", line " + std::to_string(line_no));
  };
  auto assign = [&](std::map<std::string, double>& slot, const std::string& key, double value,
                    const char* what) {
    if (slot.contains(key)) {
      rep.warnings.push_back(std::string("duplicate ") + what + " for " + key +
                             " (last write wins), line " + std::to_string(line_no));
    }
    slot[key] = value;
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++rep.rows_read;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != 9) {
      skip("wrong field count");
      continue;
    }
    const auto ts = parse_utc(fields[0]);
    if (!ts) {
      skip("bad timestamp '" + fields[0] + "'");
      continue;
    }
    const std::string& device = fields[1];
    const std::string& kind = fields[2];
    const std::string& location = fields[3];
    if (rep.device_name.empty()) rep.device_name = device;

    double readout = 0.0, t1 = 0.0, t2 = 0.0, gate_err = 0.0, gate_ns = 0.0;
    const bool has_readout = !fields[4].empty();
    const bool has_t1 = !fields[5].empty();
    const bool has_t2 = !fields[6].empty();
    const bool has_gate_err = !fields[7].empty();
    const bool has_gate_ns = !fields[8].empty();

    if ((has_readout && !detail::parse_double(fields[4], readout)) ||
        (has_t1 && !detail::parse_double(fields[5], t1)) ||
        (has_t2 && !detail::parse_double(fields[6], t2)) ||
        (has_gate_err && !detail::parse_double(fields[7], gate_err)) ||
        (has_gate_ns && !detail::parse_double(fields[8], gate_ns))) {
      skip("unparseable numeric cell");
      continue;
    }
    if (location.empty()) {
      skip("empty location_id");
      continue;
    }
    if ((has_readout && (readout < 0.0 || readout > 1.0)) ||
        (has_gate_err && (gate_err < 0.0 || gate_err > 1.0))) {
      skip("probability out of range");
      continue;
    }
    if ((has_t1 && t1 <= 0.0) || (has_t2 && t2 <= 0.0) || (has_gate_ns && gate_ns <= 0.0)) {
      skip("non-positive time");
      continue;
    }
    if (kind != "qubit" && kind != "pair") {
      skip("unknown location_kind '" + kind + "'");
      continue;
    }
    if (kind == "pair" && location.find('-') == std::string::npos) {
      skip("malformed pair id '" + location + "'");
      continue;
    }

    CalibrationRecord& record = by_time[*ts];
    record.timestamp = *ts;
    if (kind == "qubit") {
      if (has_readout) assign(record.readout_error, location, readout, "readout_error");
      if (has_t1) assign(record.t1_us, location, t1, "t1_us");
      if (has_t2) assign(record.t2_us, location, t2, "t2_us");
    } else {
      if (has_gate_err) assign(record.gate_error, location, gate_err, "gate_error");
      if (has_gate_ns) assign(record.gate_length_ns, location, gate_ns, "gate_length_ns");
    }
  }

  std::vector<CalibrationRecord> records;
  records.reserve(by_time.size());
  for (auto& [ts, record] : by_time) {
    records.push_back(std::move(record));
  }
  if (records.empty()) throw Error("no valid rows in " + path.string());
  return records;
}

// Writes records back out in the same schema, rows ordered by timestamp
// with qubit rows before pair rows and locations sorted.
inline void write_calibration_csv(const std::filesystem::path& path,
                                  std::span<const CalibrationRecord> records,
                                  const std::string& device) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path.string());
  out << kCalibrationCsvHeader << "\n";
  char buf[512];
  for (const auto& record : records) {
    const std::string ts = format_utc(record.timestamp);
    std::set<std::string> qubits;
    for (const auto& [q, v] : record.readout_error) qubits.insert(q);
    for (const auto& [q, v] : record.t1_us) qubits.insert(q);
    for (const auto& [q, v] : record.t2_us) qubits.insert(q);
    for (const auto& q : qubits) {
      std::string cells[3];
      if (auto it = record.readout_error.find(q); it != record.readout_error.end()) {
        std::snprintf(buf, sizeof(buf), "%.12g", it->second);
        cells[0] = buf;
      }
      if (auto it = record.t1_us.find(q); it != record.t1_us.end()) {
        std::snprintf(buf, sizeof(buf), "%.12g", it->second);
        cells[1] = buf;
      }
      if (auto it = record.t2_us.find(q); it != record.t2_us.end()) {
        std::snprintf(buf, sizeof(buf), "%.12g", it->second);
        cells[2] = buf;
      }
      out << ts << ',' << device << ",qubit," << q << ',' << cells[0] << ',' << cells[1] << ','
          << cells[2] << ",,\n";
    }
    std::set<std::string> pairs;
    for (const auto& [p, v] : record.gate_error) pairs.insert(p);
    for (const auto& [p, v] : record.gate_length_ns) pairs.insert(p);
    for (const auto& p : pairs) {
      std::string cells[2];
      if (auto it = record.gate_error.find(p); it != record.gate_error.end()) {
        std::snprintf(buf, sizeof(buf), "%.12g", it->second);
        cells[0] = buf;
      }
      if (auto it = record.gate_length_ns.find(p); it != record.gate_length_ns.end()) {
        std::snprintf(buf, sizeof(buf), "%.12g", it->second);
        cells[1] = buf;
      }
      out << ts << ',' << device << ",pair," << p << ",,,," << cells[0] << ',' << cells[1] << "\n";
    }
  }
  if (!out) throw Error("write failed: " + path.string());
}

struct SourceFileEntry {
  std::string path;
  std::string digest;  // FNV-1a of the file bytes, hex
};

struct DatasetManifest {
  std::string device_name;
  std::size_t record_count = 0;
  UtcSeconds first_timestamp = 0;
  UtcSeconds last_timestamp = 0;
  std::vector<std::string> qubits;
  std::vector<std::string> pairs;
  std::vector<SourceFileEntry> source_files;
};

struct Dataset {
  DatasetManifest manifest;
  std::vector<CalibrationRecord> records;
  std::vector<std::string> warnings;
};

inline DatasetManifest build_manifest(std::span<const CalibrationRecord> records,
                                      const std::string& device,
                                      std::vector<SourceFileEntry> sources) {
  if (records.empty()) throw Error("no records");
  DatasetManifest m;
  m.device_name = device;
  m.record_count = records.size();
  m.first_timestamp = records.front().timestamp;
  m.last_timestamp = records.back().timestamp;
  std::set<std::string> qubits, pairs;
  for (const auto& record : records) {
    for (const auto& [q, v] : record.readout_error) qubits.insert(q);
    for (const auto& [q, v] : record.t1_us) qubits.insert(q);
    for (const auto& [q, v] : record.t2_us) qubits.insert(q);
    for (const auto& [p, v] : record.gate_error) pairs.insert(p);
    for (const auto& [p, v] : record.gate_length_ns) pairs.insert(p);
  }
  m.qubits.assign(qubits.begin(), qubits.end());
  m.pairs.assign(pairs.begin(), pairs.end());
  m.source_files = std::move(sources);
  return m;
}

namespace detail {

inline std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

inline void write_string_array(std::ostream& out, const std::vector<std::string>& values) {
  out << '[';
  for (std::size_t i = 0; i < values.size(); ++i) {
    out << (i ? ", " : "") << '"' << json_escape(values[i]) << '"';
  }
  out << ']';
}

}  // namespace detail

inline void write_manifest(const std::filesystem::path& path, const DatasetManifest& m) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path.string());
  out << "{\n";
  out << "  \"device_name\": \"" << detail::json_escape(m.device_name) << "\",\n";
  out << "  \"record_count\": " << m.record_count << ",\n";
  out << "  \"first_timestamp\": \"" << format_utc(m.first_timestamp) << "\",\n";
  out << "  \"last_timestamp\": \"" << format_utc(m.last_timestamp) << "\",\n";
  out << "  \"qubits\": ";
  detail::write_string_array(out, m.qubits);
  out << ",\n  \"pairs\": ";
  detail::write_string_array(out, m.pairs);
  out << ",\n  \"source_files\": [";
  for (std::size_t i = 0; i < m.source_files.size(); ++i) {
    out << (i ? ", " : "") << "{\"path\": \"" << detail::json_escape(m.source_files[i].path)
        << "\", \"digest\": \"" << m.source_files[i].digest << "\"}";
  }
  out << "]\n}\n";
  if (!out) throw Error("write failed: " + path.string());
}

// Ingests one or more calibration CSVs into a dataset directory: a single
// normalized records.csv plus manifest.json. Returns the loaded dataset.
inline Dataset ingest(std::span<const std::filesystem::path> inputs,
                      const std::filesystem::path& dataset_dir,
                      const std::string& device_override = "") {
  if (inputs.empty()) throw Error("no input files");
  std::map<UtcSeconds, CalibrationRecord> merged;
  std::vector<SourceFileEntry> sources;
  std::vector<std::string> warnings;
  std::string device = device_override;
  for (const auto& input : inputs) {
    ParseReport report;
    const auto records = parse_calibration_csv(input, &report);
    for (auto& w : report.warnings) warnings.push_back(input.string() + ": " + w);
    if (device.empty()) device = report.device_name;
    for (const auto& record : records) {
      CalibrationRecord& slot = merged[record.timestamp];
      slot.timestamp = record.timestamp;
      for (const auto& [k, v] : record.readout_error) slot.readout_error[k] = v;
      for (const auto& [k, v] : record.t1_us) slot.t1_us[k] = v;
      for (const auto& [k, v] : record.t2_us) slot.t2_us[k] = v;
      for (const auto& [k, v] : record.gate_error) slot.gate_error[k] = v;
      for (const auto& [k, v] : record.gate_length_ns) slot.gate_length_ns[k] = v;
    }
    sources.push_back({input.string(), detail::hex64(detail::content_digest(input))});
  }
  if (device.empty()) device = "unknown";

  Dataset dataset;
  for (auto& [ts, record] : merged) dataset.records.push_back(std::move(record));
  dataset.warnings = std::move(warnings);

  std::filesystem::create_directories(dataset_dir);
  write_calibration_csv(dataset_dir / "records.csv", dataset.records, device);
  dataset.manifest = build_manifest(dataset.records, device, std::move(sources));
  write_manifest(dataset_dir / "manifest.json", dataset.manifest);
  return dataset;
}

// Loads a dataset directory produced by ingest.
inline Dataset load_dataset(const std::filesystem::path& dataset_dir) {
  const auto records_path = dataset_dir / "records.csv";
  if (!std::filesystem::exists(records_path)) {
    throw Error("not a dataset directory (records.csv missing): " + dataset_dir.string());
  }
  Dataset dataset;
  ParseReport report;
  dataset.records = parse_calibration_csv(records_path, &report);
  dataset.warnings = report.warnings;
  dataset.manifest = build_manifest(dataset.records, report.device_name, {});
  return dataset;
}

}  // namespace qstab
