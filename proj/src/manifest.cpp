#include "camo/manifest.hpp"

#include "camo/dataset_builder.hpp"
#include "camo/fixation_metrics.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>

namespace camo
{
namespace
{

using nlohmann::json;
namespace fs = std::filesystem;

json read_json(const fs::path& path)
{
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::FileMissing, path.string());
  try
  {
    return json::parse(in);
  }
  catch (const json::exception& e)
  {
    throw Error(ErrorKind::ParseError, path.string() + ": " + e.what());
  }
}

fs::path resolve(const fs::path& base, const std::string& p)
{
  const fs::path raw(p);
  return raw.is_absolute() ? raw : (base / raw).lexically_normal();
}

/// Path relative to base when it lies underneath it, otherwise absolute.
std::string relativize(const fs::path& base, const fs::path& p)
{
  const auto rel = p.lexically_relative(base);
  if (!rel.empty() && *rel.begin() != "..") return rel.generic_string();
  return p.generic_string();
}

}  // namespace

Manifest load_manifest(const fs::path& path)
{
  const json doc = read_json(path);
  Manifest m;
  m.base_dir = path.parent_path();
  try
  {
    m.dataset = doc.value("dataset", std::string{});
    for (const auto& e : doc.at("entries"))
    {
      ManifestEntry entry;
      entry.image = resolve(m.base_dir, e.at("image").get<std::string>());
      entry.width = e.at("width").get<int>();
      entry.height = e.at("height").get<int>();
      if (entry.width <= 0 || entry.height <= 0)
      {
        throw Error(ErrorKind::InvalidInput, path.string() + ": nonpositive dimensions for " + entry.image.string());
      }
      entry.id = e.contains("id") ? e.at("id").get<std::string>() : entry.image.stem().string();
      entry.gt_mask = resolve(m.base_dir, e.at("gt_mask").get<std::string>());
      if (e.contains("instances"))
      {
        for (const auto& inst : e.at("instances"))
        {
          ManifestInstance mi;
          mi.mask = resolve(m.base_dir, inst.at("mask").get<std::string>());
          if (inst.contains("rank") && !inst.at("rank").is_null())
          {
            mi.rank = parse_rank(inst.at("rank").get<std::string>());
          }
          entry.instances.push_back(std::move(mi));
        }
      }
      if (e.contains("fixation_map")) entry.fixation_map = resolve(m.base_dir, e.at("fixation_map").get<std::string>());
      if (e.contains("fixation_logs"))
      {
        for (const auto& log : e.at("fixation_logs")) entry.fixation_logs.push_back(resolve(m.base_dir, log));
      }
      if (e.contains("fixation_points"))
      {
        entry.fixation_points = resolve(m.base_dir, e.at("fixation_points").get<std::string>());
      }
      if (e.contains("saliency_map")) entry.saliency_map = resolve(m.base_dir, e.at("saliency_map").get<std::string>());
      if (e.contains("mm")) entry.mm = e.at("mm").get<bool>();
      if (e.contains("oc")) entry.oc = e.at("oc").get<bool>();
      m.entries.push_back(std::move(entry));
    }
  }
  catch (const json::exception& e)
  {
    throw Error(ErrorKind::ParseError, path.string() + ": " + e.what());
  }
  return m;
}

void save_manifest(const fs::path& path, const Manifest& manifest)
{
  const fs::path base = path.parent_path().empty() ? fs::path(".") : path.parent_path();
  const fs::path abs_base = fs::absolute(base).lexically_normal();
  auto rel = [&](const fs::path& p) { return relativize(abs_base, fs::absolute(p).lexically_normal()); };

  json doc;
  doc["dataset"] = manifest.dataset;
  doc["entries"] = json::array();
  for (const auto& e : manifest.entries)
  {
    json j;
    j["id"] = e.id;
    j["image"] = rel(e.image);
    j["width"] = e.width;
    j["height"] = e.height;
    j["gt_mask"] = rel(e.gt_mask);
    j["instances"] = json::array();
    for (const auto& inst : e.instances)
    {
      json ji;
      ji["mask"] = rel(inst.mask);
      if (inst.rank) ji["rank"] = std::string(to_string(*inst.rank));
      j["instances"].push_back(std::move(ji));
    }
    if (e.fixation_map) j["fixation_map"] = rel(*e.fixation_map);
    j["fixation_logs"] = json::array();
    for (const auto& log : e.fixation_logs) j["fixation_logs"].push_back(rel(log));
    if (e.fixation_points) j["fixation_points"] = rel(*e.fixation_points);
    if (e.saliency_map) j["saliency_map"] = rel(*e.saliency_map);
    if (e.mm) j["mm"] = *e.mm;
    if (e.oc) j["oc"] = *e.oc;
    doc["entries"].push_back(std::move(j));
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::UnwritablePath, path.string());
  out << doc.dump(2) << '\n';
}

MethodRoot parse_method_root(const std::string& arg)
{
  const auto eq = arg.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == arg.size())
  {
    throw Error(ErrorKind::InvalidConfig, "prediction root must be name=path, got '" + arg + "'");
  }
  return {arg.substr(0, eq), fs::path(arg.substr(eq + 1))};
}

std::vector<InstanceRecord> load_gt_instances(const ManifestEntry& entry)
{
  std::vector<InstanceRecord> out;
  for (std::size_t i = 0; i < entry.instances.size(); ++i)
  {
    InstanceRecord r;
    r.id = std::to_string(i);
    r.mask = load_mask(entry.instances[i].mask, entry.dims());
    r.rank = entry.instances[i].rank;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<InstanceRecord> load_prediction_instances(const fs::path& path, Dims dims)
{
  const json doc = read_json(path);
  const fs::path base = path.parent_path();
  std::vector<InstanceRecord> out;
  try
  {
    std::size_t i = 0;
    for (const auto& inst : doc.at("instances"))
    {
      InstanceRecord r;
      r.id = std::to_string(i++);
      r.mask = load_mask(resolve(base, inst.at("mask").get<std::string>()), dims);
      if (inst.contains("rank") && !inst.at("rank").is_null()) r.rank = parse_rank(inst.at("rank").get<std::string>());
      if (inst.contains("score") && !inst.at("score").is_null()) r.score = inst.at("score").get<double>();
      if (inst.contains("bbox") && !inst.at("bbox").is_null())
      {
        const auto b = inst.at("bbox").get<std::vector<int>>();
        if (b.size() != 4) throw Error(ErrorKind::ParseError, path.string() + ": bbox needs 4 numbers");
        r.bbox = BoundingBox{b[0], b[1], b[2], b[3]};
      }
      out.push_back(std::move(r));
    }
  }
  catch (const json::exception& e)
  {
    throw Error(ErrorKind::ParseError, path.string() + ": " + e.what());
  }
  return out;
}

FixationPointSet load_fixation_points(const ManifestEntry& entry)
{
  if (!entry.fixation_logs.empty())
  {
    std::vector<Pixel> points;
    for (const auto& log : entry.fixation_logs)
    {
      for (const auto& ev : read_fixation_log(log).events)
      {
        const int x = static_cast<int>(std::floor(ev.x));
        const int y = static_cast<int>(std::floor(ev.y));
        if (x < 0 || y < 0 || x >= entry.width || y >= entry.height) continue;
        points.push_back({x, y});
      }
    }
    return FixationPointSet(entry.width, entry.height, std::move(points));
  }
  if (entry.fixation_points) return fixations_from_mask(load_mask(*entry.fixation_points, entry.dims()));
  throw Error(ErrorKind::EmptyFixations, "entry '" + entry.id + "' lists no fixation logs or points");
}

}  // namespace camo
