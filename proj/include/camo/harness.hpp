#pragma once

#include "camo/config.hpp"
#include "camo/manifest.hpp"
#include "camo/report.hpp"

#include <functional>

namespace camo
{

struct HarnessOptions
{
  std::uint64_t seed = 0;
  int jobs = 1;
  /// Abort (throw) at the first errored row in manifest order.
  bool strict = false;
  BenchConfig config;
};

/// Runs body(i) for i in [0, n) on up to jobs threads. Exceptions escaping body
/// are rethrown on the calling thread (the lowest index wins).
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& body);

/// Prediction maps live at <root>/<entry id>.png.
std::filesystem::path prediction_map_path(const MethodRoot& method, const ManifestEntry& entry);
/// Prediction instances live at <root>/<entry id>.json.
std::filesystem::path prediction_instances_path(const MethodRoot& method, const ManifestEntry& entry);

inline const std::vector<std::string> kSegMetrics{"S_alpha", "F_beta", "E_xi", "MAE"};
inline const std::vector<std::string> kFixMetrics{"SIM", "CC", "EMD", "KLD", "NSS", "AUC_J", "AUC_B", "sAUC"};
inline const std::vector<std::string> kRankMetrics{"MAE", "r_MAE", "Corr"};

EvaluationReport eval_seg(const Manifest& manifest, std::span<const MethodRoot> methods,
                          const HarnessOptions& options = {});
EvaluationReport eval_fix(const Manifest& manifest, std::span<const MethodRoot> methods,
                          const HarnessOptions& options = {});
EvaluationReport eval_rank(const Manifest& manifest, std::span<const MethodRoot> methods,
                           const HarnessOptions& options = {});

/// Seed used for one (image, method) cell; stream separates metrics.
std::uint64_t cell_seed(std::uint64_t run_seed, std::size_t image, std::size_t method, std::uint64_t stream);

/// Fixation points of `from` mapped onto a width x height grid by pixel-center scaling.
std::vector<Pixel> rescale_points(const FixationPointSet& from, int width, int height);

struct BuildResult
{
  Manifest manifest;
  std::vector<DelayRecord> records;
  std::vector<RankLabel> ranks;
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
};

/// Fixation logs -> delays.csv, fixations/<id>.png, ranks/<id>.png and an
/// updated manifest.json under out_dir.
BuildResult build_dataset(const Manifest& manifest, const std::filesystem::path& out_dir,
                          const HarnessOptions& options = {});

struct AttributeRun
{
  std::vector<AttributeRow> rows;
  std::size_t errors = 0;
};

AttributeRun classify_dataset(const Manifest& manifest, const HarnessOptions& options = {});

/// Ranks of every gt instance listed in the manifest.
std::vector<RankedInstance> manifest_ranks(const Manifest& manifest);

}  // namespace camo
