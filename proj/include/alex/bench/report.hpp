#pragma once

#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "alex/bench/microbench.hpp"
#include "alex/bench/workload.hpp"

namespace alex::bench {

using ordered_json = nlohmann::ordered_json;

inline ordered_json to_json(const MetricsReport& r) {
  ordered_json j;
  j["index_kind"] = r.index_kind;
  j["dataset"] = r.dataset;
  j["mix"] = r.mix;
  j["shift"] = r.shift;
  j["payload_bytes"] = r.payload_bytes;
  j["init_keys"] = r.init_keys;
  j["final_keys"] = r.final_keys;
  j["ops"] = r.ops;
  j["reads"] = r.reads;
  j["inserts"] = r.inserts;
  j["scans"] = r.scans;
  j["scanned_keys"] = r.scanned_keys;
  j["bulk_load_seconds"] = r.bulk_load_seconds;
  j["elapsed_seconds"] = r.elapsed_seconds;
  j["ops_per_second"] = r.ops_per_second;
  j["index_bytes"] = r.index_bytes;
  j["data_bytes"] = r.data_bytes;
  j["latency_ns"] = {{"p50", r.latency.p50}, {"p99", r.latency.p99}, {"p999", r.latency.p999}, {"max", r.latency.max}};
  ordered_json h = ordered_json::object();
  for (auto [b, c] : r.error_histogram) h[std::to_string(b)] = c;
  j["error_histogram"] = h;
  const auto& n = r.node_stats;
  j["node_stats"] = {{"avg_depth", n.avg_depth},
                     {"max_depth", n.max_depth},
                     {"num_internal_nodes", n.num_internal_nodes},
                     {"num_data_nodes", n.num_data_nodes},
                     {"min_data_node_bytes", n.min_data_node_bytes},
                     {"median_data_node_bytes", n.median_data_node_bytes},
                     {"max_data_node_bytes", n.max_data_node_bytes},
                     {"max_node_keys", n.max_node_keys}};
  ordered_json a = ordered_json::object();
  for (const auto& [k, v] : r.action_counts) a[k] = v;
  j["action_counts"] = a;
  j["mean_shifts_per_insert"] = r.mean_shifts_per_insert;
  j["checksum"] = r.checksum;
  j["dataset_exhausted"] = r.dataset_exhausted;
  j["verified"] = r.verified;
  j["verification_error"] = r.verification_error;
  return j;
}

inline MetricsReport report_from_json(const ordered_json& j) {
  MetricsReport r;
  j.at("index_kind").get_to(r.index_kind);
  j.at("dataset").get_to(r.dataset);
  j.at("mix").get_to(r.mix);
  j.at("shift").get_to(r.shift);
  j.at("payload_bytes").get_to(r.payload_bytes);
  j.at("init_keys").get_to(r.init_keys);
  j.at("final_keys").get_to(r.final_keys);
  j.at("ops").get_to(r.ops);
  j.at("reads").get_to(r.reads);
  j.at("inserts").get_to(r.inserts);
  j.at("scans").get_to(r.scans);
  j.at("scanned_keys").get_to(r.scanned_keys);
  j.at("bulk_load_seconds").get_to(r.bulk_load_seconds);
  j.at("elapsed_seconds").get_to(r.elapsed_seconds);
  j.at("ops_per_second").get_to(r.ops_per_second);
  j.at("index_bytes").get_to(r.index_bytes);
  j.at("data_bytes").get_to(r.data_bytes);
  const auto& l = j.at("latency_ns");
  l.at("p50").get_to(r.latency.p50);
  l.at("p99").get_to(r.latency.p99);
  l.at("p999").get_to(r.latency.p999);
  l.at("max").get_to(r.latency.max);
  for (const auto& [b, c] : j.at("error_histogram").items()) r.error_histogram[std::stoull(b)] = c.get<std::uint64_t>();
  const auto& n = j.at("node_stats");
  n.at("avg_depth").get_to(r.node_stats.avg_depth);
  n.at("max_depth").get_to(r.node_stats.max_depth);
  n.at("num_internal_nodes").get_to(r.node_stats.num_internal_nodes);
  n.at("num_data_nodes").get_to(r.node_stats.num_data_nodes);
  n.at("min_data_node_bytes").get_to(r.node_stats.min_data_node_bytes);
  n.at("median_data_node_bytes").get_to(r.node_stats.median_data_node_bytes);
  n.at("max_data_node_bytes").get_to(r.node_stats.max_data_node_bytes);
  n.at("max_node_keys").get_to(r.node_stats.max_node_keys);
  for (const auto& [k, v] : j.at("action_counts").items()) r.action_counts[k] = v.get<std::uint64_t>();
  j.at("mean_shifts_per_insert").get_to(r.mean_shifts_per_insert);
  j.at("checksum").get_to(r.checksum);
  j.at("dataset_exhausted").get_to(r.dataset_exhausted);
  j.at("verified").get_to(r.verified);
  j.at("verification_error").get_to(r.verification_error);
  return r;
}

/// Counter names always present in CSV output, in column order.
inline const std::vector<std::string>& action_columns() {
  static const std::vector<std::string> cols{
      "expand_scale",      "expand_retrain",   "split_sideways",     "split_downwards",  "expand_append",
      "forced_splits",     "periodic_retrain", "periodic_sideways",  "periodic_downwards", "contractions",
      "root_expansions",   "internal_splits",  "internal_doublings"};
  return cols;
}

inline std::string csv_header() {
  std::string h =
      "index_kind,dataset,mix,shift,payload_bytes,init_keys,final_keys,ops,reads,inserts,scans,scanned_keys,"
      "bulk_load_seconds,elapsed_seconds,ops_per_second,index_bytes,data_bytes,"
      "latency_p50_ns,latency_p99_ns,latency_p999_ns,latency_max_ns,"
      "avg_depth,max_depth,num_internal_nodes,num_data_nodes,min_data_node_bytes,median_data_node_bytes,"
      "max_data_node_bytes,max_node_keys,mean_shifts_per_insert,checksum,dataset_exhausted,verified";
  for (const auto& c : action_columns()) h += "," + c;
  h += ",error_histogram";
  return h;
}

// histogram as bucket:count pairs joined by ';'
inline std::string csv_row(const MetricsReport& r) {
  std::ostringstream o;
  o.precision(10);
  const auto& n = r.node_stats;
  o << r.index_kind << ',' << r.dataset << ',' << r.mix << ',' << r.shift << ',' << r.payload_bytes << ','
    << r.init_keys << ',' << r.final_keys << ',' << r.ops << ',' << r.reads << ',' << r.inserts << ',' << r.scans
    << ',' << r.scanned_keys << ',' << r.bulk_load_seconds << ',' << r.elapsed_seconds << ',' << r.ops_per_second
    << ',' << r.index_bytes << ',' << r.data_bytes << ',' << r.latency.p50 << ',' << r.latency.p99 << ','
    << r.latency.p999 << ',' << r.latency.max << ',' << n.avg_depth << ',' << n.max_depth << ','
    << n.num_internal_nodes << ',' << n.num_data_nodes << ',' << n.min_data_node_bytes << ','
    << n.median_data_node_bytes << ',' << n.max_data_node_bytes << ',' << n.max_node_keys << ','
    << r.mean_shifts_per_insert << ',' << r.checksum << ',' << (r.dataset_exhausted ? 1 : 0) << ','
    << (r.verified ? 1 : 0);
  for (const auto& c : action_columns()) {
    auto it = r.action_counts.find(c);
    o << ',' << (it == r.action_counts.end() ? 0 : it->second);
  }
  o << ',';
  bool first = true;
  for (auto [b, c] : r.error_histogram) {
    if (!first) o << ';';
    o << b << ':' << c;
    first = false;
  }
  return o.str();
}

inline ordered_json to_json(const std::vector<MicrobenchRow>& rows) {
  ordered_json a = ordered_json::array();
  for (const auto& r : rows)
    a.push_back({{"error", r.error}, {"method", r.method}, {"mean_ns", r.mean_ns}, {"mean_iterations", r.mean_iterations}});
  return a;
}

inline std::string microbench_csv(const std::vector<MicrobenchRow>& rows) {
  std::ostringstream o;
  o.precision(10);
  o << "error,method,mean_ns,mean_iterations\n";
  for (const auto& r : rows) o << r.error << ',' << r.method << ',' << r.mean_ns << ',' << r.mean_iterations << '\n';
  return o.str();
}

/// Writes text to path, "-" meaning stdout.
inline void write_text(const std::string& text, const std::string& path) {
  if (path == "-") {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) throw std::runtime_error("write to stdout failed");
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline void emit_report(const MetricsReport& r, const std::string& format, const std::string& path) {
  if (format == "json") write_text(to_json(r).dump(2) + "\n", path);
  else if (format == "csv") write_text(csv_header() + "\n" + csv_row(r) + "\n", path);
  else throw std::invalid_argument("unknown format: " + format);
}

inline void emit_microbench(const std::vector<MicrobenchRow>& rows, const std::string& format, const std::string& path) {
  if (format == "json") write_text(to_json(rows).dump(2) + "\n", path);
  else if (format == "csv") write_text(microbench_csv(rows), path);
  else throw std::invalid_argument("unknown format: " + format);
}

}  // namespace alex::bench
