#pragma once

#include "camo/attributes.hpp"

#include <json.hpp>

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace camo
{

/// One metric value, or the error that prevented it. Dataset-level rows
/// (Corr) leave image_id empty.
struct ReportRow
{
  std::string image_id;
  std::string method;
  std::string metric;
  std::optional<double> value;
  std::string error;

  bool operator==(const ReportRow&) const = default;
};

struct Aggregate
{
  std::string method;
  std::string metric;
  /// nullopt when every row errored.
  std::optional<double> mean;
  std::size_t count = 0;

  bool operator==(const Aggregate&) const = default;
};

struct EvaluationReport
{
  std::string task;
  std::string dataset;
  std::vector<std::string> methods;
  std::vector<std::string> metrics;
  std::vector<ReportRow> rows;
  std::vector<ReportRow> dataset_rows;
  nlohmann::ordered_json metadata;

  /// Mean of the non-error per-image rows, or the dataset-level value, per
  /// (method, metric) in declaration order.
  std::vector<Aggregate> aggregates() const;
  std::size_t error_count() const;

  bool operator==(const EvaluationReport&) const = default;
};

/// "<operation> [<path>] <kind>: <message>", with commas and newlines replaced.
std::string error_note(std::string_view operation, const std::filesystem::path& path, const std::exception& e);

enum ReportFormat : unsigned
{
  kCsv = 1,
  kJson = 2,
  kMarkdown = 4,
  kAllFormats = 7,
};

/// Writes <stem>.csv, <stem>.json and <stem>.md under dir.
void emit_report(const EvaluationReport& report, const std::filesystem::path& dir, const std::string& stem,
                 unsigned formats = kAllFormats);

std::string report_csv(const EvaluationReport& report);
std::string report_markdown(const EvaluationReport& report);
nlohmann::ordered_json report_to_json(const EvaluationReport& report);
EvaluationReport report_from_json(const nlohmann::ordered_json& doc);
EvaluationReport load_report(const std::filesystem::path& path);

/// Per-image rows read back from a report CSV.
std::vector<ReportRow> read_report_csv(const std::filesystem::path& path);

inline constexpr std::array<const char*, 8> kAttributeNames{"BM", "CB", "CP", "DC", "MM", "OC", "SA", "SO"};

std::optional<bool> attribute_flag(const AttributeRow& row, std::string_view name);

struct BreakdownRow
{
  std::string attribute;
  std::string method;
  std::string metric;
  double mean = 0.0;
  std::size_t images = 0;
};

struct AttributeBreakdown
{
  std::vector<BreakdownRow> rows;
  std::vector<std::string> notes;
};

/// An image carries an attribute when any of its instance rows is flagged.
/// Attributes carried by no image are omitted with a note.
AttributeBreakdown attr_breakdown(const EvaluationReport& report, std::span<const AttributeRow> attributes);

struct RankedInstance
{
  std::string image_id;
  std::string instance_id;
  RankLabel rank;
};

/// Instance counts per (attribute, ES..HD) cell.
using RankHistogram = std::array<std::array<std::size_t, 5>, kAttributeNames.size()>;

RankHistogram rank_histogram(std::span<const RankedInstance> ranks, std::span<const AttributeRow> attributes);

std::string breakdown_csv(const AttributeBreakdown& breakdown);
std::string histogram_csv(const RankHistogram& histogram);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace camo
