#pragma once

#include "camo/image_io.hpp"

#include <filesystem>
#include <map>

namespace camo
{

struct ManifestInstance
{
  std::filesystem::path mask;
  std::optional<RankLabel> rank;
};

/// One image of a dataset. Paths are resolved against the manifest directory.
struct ManifestEntry
{
  std::string id;
  std::filesystem::path image;
  int width = 0;
  int height = 0;
  std::filesystem::path gt_mask;
  std::vector<ManifestInstance> instances;
  std::optional<std::filesystem::path> fixation_map;
  std::vector<std::filesystem::path> fixation_logs;
  /// Binary fixation-point PNG, used when no logs are listed.
  std::optional<std::filesystem::path> fixation_points;
  std::optional<std::filesystem::path> saliency_map;
  std::optional<bool> mm;
  std::optional<bool> oc;

  Dims dims() const { return {width, height}; }
};

struct Manifest
{
  std::string dataset;
  std::filesystem::path base_dir;
  std::vector<ManifestEntry> entries;
};

/// Entry ids default to the image file stem.
Manifest load_manifest(const std::filesystem::path& path);
void save_manifest(const std::filesystem::path& path, const Manifest& manifest);

/// Prediction roots given as name=path on the command line.
struct MethodRoot
{
  std::string name;
  std::filesystem::path root;
};

MethodRoot parse_method_root(const std::string& arg);

/// Ground-truth instances of an entry (masks loaded, ids "0", "1", ...).
std::vector<InstanceRecord> load_gt_instances(const ManifestEntry& entry);

/// Prediction JSON: {"image_id": ..., "instances": [{"mask", "rank", "score", "bbox"}]}.
/// Mask paths are relative to the JSON file.
std::vector<InstanceRecord> load_prediction_instances(const std::filesystem::path& path, Dims dims);

/// Union of every observer's fixation pixels for the entry.
FixationPointSet load_fixation_points(const ManifestEntry& entry);

}  // namespace camo
