#pragma once

#include "camo/attention.hpp"
#include "camo/attributes.hpp"
#include "camo/dataset_builder.hpp"
#include "camo/fixation_metrics.hpp"
#include "camo/ranking_metrics.hpp"

#include <json.hpp>

#include <filesystem>

namespace camo
{

inline constexpr const char* kToolVersion = "camobench 1.0.0";

struct BenchConfig
{
  int emd_grid = kDefaultEmdGrid;
  double kld_eps = kKldEpsilon;
  int auc_splits = kDefaultAucSplits;
  /// The seed member is overwritten by the run seed.
  MatchConfig match;
  AttributeConfig attributes;
  BuilderConfig builder;
  RankingAttentionMode ranking_attention = RankingAttentionMode::Graded;
};

/// Unknown keys are rejected so that typos do not silently fall back to defaults.
BenchConfig parse_bench_config(const nlohmann::ordered_json& doc);
BenchConfig load_bench_config(const std::filesystem::path& path);

/// Every configurable value, in the same layout parse_bench_config accepts.
nlohmann::ordered_json to_json(const BenchConfig& config);

/// Fixed metric conventions, recorded alongside the configuration.
nlohmann::ordered_json metric_conventions();

void validate(const BenchConfig& config);

}  // namespace camo
