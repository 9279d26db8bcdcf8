#pragma once

#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "bioverify/cooccur.hpp"
#include "bioverify/genharness.hpp"
#include "bioverify/sha256.hpp"
#include "bioverify/term_verify.hpp"
#include "bioverify/util.hpp"
#include "bioverify/version.hpp"

namespace bioverify {

enum class ReportFormat { Csv, Json, Markdown };

inline ReportFormat report_format_from_string(std::string_view s) {
  if (s == "csv") return ReportFormat::Csv;
  if (s == "json") return ReportFormat::Json;
  if (s == "markdown" || s == "md") return ReportFormat::Markdown;
  throw UsageError("unknown report format: '" + std::string(s) + "' (expected csv, json or markdown)");
}

inline const char* report_format_extension(ReportFormat f) {
  switch (f) {
    case ReportFormat::Csv: return "csv";
    case ReportFormat::Json: return "json";
    default: return "md";
  }
}

/// Percentages render to two decimals; an undefined value renders as the
/// literal "n/a" -- never as 0.
inline std::string format_pct(std::optional<double> fraction) {
  if (!fraction) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *fraction * 100.0);
  return buf;
}

inline std::string format_avg(std::optional<double> value) {
  if (!value) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *value);
  return buf;
}

inline std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (const char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

/// Provenance for a run: every consumed input with its checksum, plus the
/// config snapshot. The digest covers input roles and checksums only, so a
/// rerun over identical inputs embeds the identical digest.
struct RunManifest {
  struct Input {
    std::string role;  // e.g. "ontology:DOID", "dataset", "corpus"
    std::string path;
    std::string sha256;
  };

  std::string tool_version = kToolVersion;
  std::string created_at;  // excluded from the digest
  std::vector<Input> inputs;
  std::map<std::string, std::string> config;

  void add_input(std::string role, std::string path, std::string checksum) {
    inputs.push_back({std::move(role), std::move(path), std::move(checksum)});
  }

  std::string provenance_digest() const {
    std::vector<std::string> lines;
    lines.reserve(inputs.size());
    for (const auto& in : inputs) lines.push_back(in.role + "\t" + in.sha256 + "\n");
    std::sort(lines.begin(), lines.end());
    std::string blob;
    for (const auto& line : lines) blob += line;
    return sha256_hex(blob);
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["tool"] = kToolName;
    j["tool_version"] = tool_version;
    j["created_at"] = created_at;
    j["provenance_digest"] = provenance_digest();
    auto arr = nlohmann::ordered_json::array();
    for (const auto& in : inputs)
      arr.push_back({{"role", in.role}, {"path", in.path}, {"sha256", in.sha256}});
    j["inputs"] = std::move(arr);
    j["config"] = config;
    return j;
  }
};

namespace detail {

inline std::string csv_header_comment(const std::string& provenance) {
  return "# provenance: " + provenance + "\n";
}

inline std::string md_header_comment(const std::string& provenance) {
  return "<!-- provenance: " + provenance + " -->\n\n";
}

inline std::string md_row(const std::vector<std::string>& cells) {
  std::string out = "|";
  for (const auto& c : cells) {
    out += " ";
    out += c;
    out += " |";
  }
  out += "\n";
  return out;
}

inline std::string md_separator(std::size_t columns) {
  std::string out = "|";
  for (std::size_t i = 0; i < columns; ++i) out += " --- |";
  out += "\n";
  return out;
}

}  // namespace detail

inline std::string emit_term_accuracy(const TermAccuracyReport& report, ReportFormat format,
                                      const std::string& provenance) {
  switch (format) {
    case ReportFormat::Csv: {
      std::string out = detail::csv_header_comment(provenance);
      out += "category,feature,numerator,denominator,percentage\n";
      for (const auto& row : report.rows) {
        out += csv_escape(row.category) + "," + csv_escape(row.feature) + "," +
               std::to_string(row.numerator) + "," + std::to_string(row.denominator) + "," +
               format_pct(row.fraction()) + "\n";
      }
      return out;
    }
    case ReportFormat::Json: {
      nlohmann::ordered_json j;
      j["provenance"] = provenance;
      j["records_in"] = report.records_in;
      j["records_unique"] = report.records_unique;
      j["duplicates"] = report.duplicates;
      auto rows = nlohmann::ordered_json::array();
      for (const auto& row : report.rows) {
        nlohmann::ordered_json r;
        r["category"] = row.category;
        r["feature"] = row.feature;
        r["numerator"] = row.numerator;
        r["denominator"] = row.denominator;
        if (const auto f = row.fraction())
          r["fraction"] = *f;
        else
          r["fraction"] = nullptr;
        rows.push_back(std::move(r));
      }
      j["rows"] = std::move(rows);
      return j.dump(2) + "\n";
    }
    case ReportFormat::Markdown:
    default: {
      std::string out = detail::md_header_comment(provenance);
      out += detail::md_row({"category", "feature", "numerator", "denominator", "percentage"});
      out += detail::md_separator(5);
      for (const auto& row : report.rows)
        out += detail::md_row({row.category, row.feature, std::to_string(row.numerator),
                               std::to_string(row.denominator), format_pct(row.fraction())});
      return out;
    }
  }
}

inline std::string emit_coverage(const std::vector<CoverageRow>& rows, ReportFormat format,
                                 const std::string& provenance,
                                 const std::map<std::string, std::string>& metadata = {}) {
  switch (format) {
    case ReportFormat::Csv: {
      std::string out = detail::csv_header_comment(provenance);
      for (const auto& [key, value] : metadata) out += "# " + key + ": " + value + "\n";
      out +=
          "Association Type,Time Period,Unverified Links (%),Verified Links (%),"
          "Average Frequency,Verified Count,Records\n";
      for (const auto& row : rows) {
        out += std::string(kind_display(row.kind)) + "," + csv_escape(row.period_label) + "," +
               format_pct(row.unverified_pct) + "," + format_pct(row.verified_pct) + "," +
               format_avg(row.avg_frequency) + "," + std::to_string(row.verified_count) + "," +
               std::to_string(row.record_count) + "\n";
      }
      return out;
    }
    case ReportFormat::Json: {
      nlohmann::ordered_json j;
      j["provenance"] = provenance;
      nlohmann::ordered_json meta = nlohmann::ordered_json::object();
      for (const auto& [key, value] : metadata) meta[key] = value;
      j["metadata"] = std::move(meta);
      auto arr = nlohmann::ordered_json::array();
      for (const auto& row : rows) {
        nlohmann::ordered_json r;
        r["association_type"] = kind_display(row.kind);
        r["time_period"] = row.period_label;
        r["records"] = row.record_count;
        r["verified_count"] = row.verified_count;
        r["verified_fraction"] = row.verified_pct ? nlohmann::ordered_json(*row.verified_pct)
                                                  : nlohmann::ordered_json(nullptr);
        r["unverified_fraction"] = row.unverified_pct ? nlohmann::ordered_json(*row.unverified_pct)
                                                      : nlohmann::ordered_json(nullptr);
        r["avg_frequency"] = row.avg_frequency ? nlohmann::ordered_json(*row.avg_frequency)
                                               : nlohmann::ordered_json(nullptr);
        arr.push_back(std::move(r));
      }
      j["rows"] = std::move(arr);
      return j.dump(2) + "\n";
    }
    case ReportFormat::Markdown:
    default: {
      std::string out = detail::md_header_comment(provenance);
      out += detail::md_row({"Association Type", "Time Period", "Average Frequency"});
      out += detail::md_separator(3);
      for (const auto& row : rows)
        out += detail::md_row(
            {kind_display(row.kind), row.period_label, format_avg(row.avg_frequency)});
      out += "\n";
      out += detail::md_row(
          {"Association Type", "Time Period", "Unverified Links (%)", "Verified Links (%)"});
      out += detail::md_separator(4);
      for (const auto& row : rows)
        out += detail::md_row({kind_display(row.kind), row.period_label,
                               format_pct(row.unverified_pct), format_pct(row.verified_pct)});
      return out;
    }
  }
}

inline std::string emit_consistency(const std::vector<ConsistencyRow>& rows, ReportFormat format,
                                    const std::string& provenance) {
  switch (format) {
    case ReportFormat::Csv: {
      std::string out = detail::csv_header_comment(provenance);
      out += "Model,Count,Percentage (%),Association Type,Records\n";
      for (const auto& row : rows) {
        out += csv_escape(row.model_name) + "," + std::to_string(row.hit_count) + "," +
               format_pct(row.percentage) + "," + kind_display(row.kind) + "," +
               std::to_string(row.denominator) + "\n";
      }
      return out;
    }
    case ReportFormat::Json: {
      nlohmann::ordered_json j;
      j["provenance"] = provenance;
      auto arr = nlohmann::ordered_json::array();
      for (const auto& row : rows) {
        nlohmann::ordered_json r;
        r["model"] = row.model_name;
        r["count"] = row.hit_count;
        r["records"] = row.denominator;
        r["fraction"] =
            row.percentage ? nlohmann::ordered_json(*row.percentage) : nlohmann::ordered_json(nullptr);
        r["association_type"] = kind_display(row.kind);
        r["flagged"] = row.flagged;
        if (!row.note.empty()) r["note"] = row.note;
        arr.push_back(std::move(r));
      }
      j["rows"] = std::move(arr);
      return j.dump(2) + "\n";
    }
    case ReportFormat::Markdown:
    default: {
      std::string out = detail::md_header_comment(provenance);
      out += detail::md_row({"Model", "Count", "Percentage (%)", "Association Type"});
      out += detail::md_separator(4);
      for (const auto& row : rows)
        out += detail::md_row({row.model_name, std::to_string(row.hit_count),
                               format_pct(row.percentage), kind_display(row.kind)});
      return out;
    }
  }
}

/// One AssociationHit per line; doc id sample capped unless the caller asked
/// for full lists at scan time.
inline std::string emit_hits_jsonl(const std::vector<AssociationHit>& hits,
                                   const std::string& period_label) {
  std::string out;
  for (const auto& hit : hits) {
    nlohmann::ordered_json j;
    j["kind"] = kind_name(hit.record.kind);
    j["period"] = period_label;
    j["source_id"] = hit.record.source.id;
    j["source_label"] = hit.record.source.label;
    j["target_id"] = hit.record.target.id;
    j["target_label"] = hit.record.target.label;
    j["count"] = hit.count;
    j["hit_ratio"] = hit.hit_ratio;
    j["verified"] = hit.count > 0;
    j["matched_doc_ids"] = hit.matched_doc_ids;
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace bioverify
