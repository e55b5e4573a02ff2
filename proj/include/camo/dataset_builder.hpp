#pragma once

#include "camo/types.hpp"

#include <filesystem>
#include <span>

namespace camo
{

/// Per-observer outcome for one instance: a delay in ms, or nullopt (not detected).
using ObserverDelay = std::optional<double>;

struct DelayRecord
{
  std::string image_id;
  std::string instance_id;
  std::vector<ObserverDelay> observers;
  std::optional<double> delay_ms;
  std::optional<double> normalized;
  bool failure_forced = false;
};

enum class RankBinning
{
  Quintile,
  Thresholds,
};

struct BuilderConfig
{
  int majority_threshold = 4;
  /// Gaussian sigma in pixels; nullopt means image width / 20.
  std::optional<double> sigma;
  RankBinning binning = RankBinning::Quintile;
  /// Upper bounds (inclusive) of ES, M1, M2, M3 when binning == Thresholds.
  std::vector<double> thresholds;
};

double median(std::span<const double> values);

ObserverDelay per_observer_delay(const FixationSession& session, const BinaryMask& instance);

DelayRecord aggregate_instance_delay(std::span<const ObserverDelay> outcomes, const BuilderConfig& config);

/// Divide by the largest delay among detected instances. Failure-forced records stay at 1.
void normalize_delays(std::span<DelayRecord> records);

std::vector<RankLabel> assign_ranks(std::span<const DelayRecord> records, const BuilderConfig& config = {});

ScalarMap render_fixation_map(std::span<const FixationSession> sessions, int width, int height, double sigma);

/// Unnormalized accumulation used by render_fixation_map (before max rescaling).
ScalarMap accumulate_fixations(std::span<const FixationSession> sessions, int width, int height, double sigma);

struct RenderedRankMap
{
  RankMap map;
  std::vector<std::string> warnings;
};

/// Overlaps resolve to the higher-score instance; without scores the later-listed instance wins.
RenderedRankMap render_rank_map(std::span<const InstanceRecord> instances, int width, int height);

/// Parses a fixation log: header `observer_id,image_id,t0_ms`, then rows `t_ms,x,y`.
FixationSession read_fixation_log(const std::filesystem::path& path);
void write_fixation_log(const std::filesystem::path& path, const FixationSession& session);

void write_delay_table(const std::filesystem::path& path, std::span<const DelayRecord> records,
                       std::span<const RankLabel> ranks);

}  // namespace camo
