#include "camo/config.hpp"

#include <fstream>

namespace camo
{
namespace
{

using nlohmann::ordered_json;

template <typename T>
void read(const ordered_json& obj, const char* key, T& out)
{
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

void reject_unknown(const ordered_json& obj, std::initializer_list<const char*> known, const std::string& where)
{
  if (!obj.is_object()) throw Error(ErrorKind::InvalidConfig, where + " must be an object");
  for (const auto& item : obj.items())
  {
    bool found = false;
    for (const char* k : known) found = found || item.key() == k;
    if (!found) throw Error(ErrorKind::InvalidConfig, "unknown key '" + where + item.key() + "'");
  }
}

std::string to_string(ChiSquareMode m)
{
  switch (m)
  {
    case ChiSquareMode::ColorOnly: return "color";
    case ChiSquareMode::TextureOnly: return "texture";
    case ChiSquareMode::Concatenated: return "concatenated";
    case ChiSquareMode::Mean: break;
  }
  return "mean";
}

ChiSquareMode parse_chi_mode(const std::string& s)
{
  if (s == "mean") return ChiSquareMode::Mean;
  if (s == "color") return ChiSquareMode::ColorOnly;
  if (s == "texture") return ChiSquareMode::TextureOnly;
  if (s == "concatenated") return ChiSquareMode::Concatenated;
  throw Error(ErrorKind::InvalidConfig, "chi_mode '" + s + "'");
}

CpDirection parse_direction(const std::string& s)
{
  if (s == "far") return CpDirection::Far;
  if (s == "near") return CpDirection::Near;
  throw Error(ErrorKind::InvalidConfig, "cp_direction '" + s + "'");
}

RankingAttentionMode parse_attention(const std::string& s)
{
  if (s == "graded") return RankingAttentionMode::Graded;
  if (s == "literal") return RankingAttentionMode::Literal;
  throw Error(ErrorKind::InvalidConfig, "ranking_attention '" + s + "'");
}

}  // namespace

BenchConfig parse_bench_config(const ordered_json& doc)
{
  BenchConfig c;
  try
  {
    reject_unknown(doc, {"emd_grid", "kld_eps", "auc_splits", "match", "attributes", "builder", "ranking_attention"},
                   "");
    read(doc, "emd_grid", c.emd_grid);
    read(doc, "kld_eps", c.kld_eps);
    read(doc, "auc_splits", c.auc_splits);
    if (doc.contains("ranking_attention")) c.ranking_attention = parse_attention(doc.at("ranking_attention"));

    if (doc.contains("match"))
    {
      const auto& m = doc.at("match");
      reject_unknown(m, {"iou", "samplings", "repeats"}, "match.");
      read(m, "iou", c.match.iou_threshold);
      read(m, "samplings", c.match.samplings);
      read(m, "repeats", c.match.repeats);
    }

    if (doc.contains("attributes"))
    {
      const auto& a = doc.at("attributes");
      reject_unknown(a,
                     {"bm", "cb", "cp_sigma", "cp_direction", "dc", "so", "sa_response", "sa_iou", "chi_mode",
                      "color_bins", "slic", "gabor"},
                     "attributes.");
      auto& t = c.attributes;
      read(a, "bm", t.bm_threshold);
      read(a, "cb", t.cb_threshold);
      read(a, "cp_sigma", t.cp_sigma);
      if (a.contains("cp_direction")) t.cp_direction = parse_direction(a.at("cp_direction"));
      read(a, "dc", t.dc_threshold);
      read(a, "so", t.so_threshold);
      read(a, "sa_response", t.sa_response);
      read(a, "sa_iou", t.sa_iou);
      if (a.contains("chi_mode")) t.chi_mode = parse_chi_mode(a.at("chi_mode"));
      read(a, "color_bins", t.color_bins);
      if (a.contains("slic"))
      {
        const auto& s = a.at("slic");
        reject_unknown(s, {"superpixels", "compactness", "iterations"}, "attributes.slic.");
        read(s, "superpixels", t.slic.superpixels);
        read(s, "compactness", t.slic.compactness);
        read(s, "iterations", t.slic.iterations);
      }
      if (a.contains("gabor"))
      {
        const auto& g = a.at("gabor");
        reject_unknown(g, {"wavelength", "sigma", "aspect", "phase", "normal_sigma"}, "attributes.gabor.");
        read(g, "wavelength", t.gabor.wavelength);
        read(g, "sigma", t.gabor.sigma);
        read(g, "aspect", t.gabor.aspect);
        read(g, "phase", t.gabor.phase);
        read(g, "normal_sigma", t.gabor.normal_sigma);
      }
    }

    if (doc.contains("builder"))
    {
      const auto& b = doc.at("builder");
      reject_unknown(b, {"majority_threshold", "sigma", "binning", "thresholds"}, "builder.");
      read(b, "majority_threshold", c.builder.majority_threshold);
      if (b.contains("sigma") && !b.at("sigma").is_null()) c.builder.sigma = b.at("sigma").get<double>();
      if (b.contains("binning"))
      {
        const auto s = b.at("binning").get<std::string>();
        if (s == "quintile")
          c.builder.binning = RankBinning::Quintile;
        else if (s == "thresholds")
          c.builder.binning = RankBinning::Thresholds;
        else
          throw Error(ErrorKind::InvalidConfig, "binning '" + s + "'");
      }
      read(b, "thresholds", c.builder.thresholds);
    }
  }
  catch (const nlohmann::json::exception& e)
  {
    throw Error(ErrorKind::InvalidConfig, e.what());
  }
  validate(c);
  return c;
}

BenchConfig load_bench_config(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::FileMissing, path.string());
  ordered_json doc;
  try
  {
    doc = ordered_json::parse(in);
  }
  catch (const nlohmann::json::exception& e)
  {
    throw Error(ErrorKind::ParseError, path.string() + ": " + e.what());
  }
  return parse_bench_config(doc);
}

void validate(const BenchConfig& c)
{
  auto fail = [](const std::string& what) { throw Error(ErrorKind::InvalidConfig, what); };
  if (c.emd_grid < 1) fail("emd_grid must be >= 1");
  if (!(c.kld_eps > 0)) fail("kld_eps must be positive");
  if (c.auc_splits < 1) fail("auc_splits must be >= 1");
  if (!(c.match.iou_threshold > 0 && c.match.iou_threshold <= 1)) fail("match.iou must lie in (0, 1]");
  if (c.match.samplings < 1 || c.match.repeats < 1) fail("match.samplings and match.repeats must be >= 1");
  if (c.attributes.slic.superpixels < 1 || c.attributes.slic.iterations < 1) fail("attributes.slic");
  if (c.attributes.color_bins < 1) fail("attributes.color_bins must be >= 1");
  if (c.builder.majority_threshold < 1) fail("builder.majority_threshold must be >= 1");
  if (c.builder.sigma && !(*c.builder.sigma > 0)) fail("builder.sigma must be positive");
  if (c.builder.binning == RankBinning::Thresholds && c.builder.thresholds.size() != 4)
  {
    fail("builder.thresholds needs 4 values");
  }
}

ordered_json to_json(const BenchConfig& c)
{
  ordered_json j;
  j["emd_grid"] = c.emd_grid;
  j["kld_eps"] = c.kld_eps;
  j["auc_splits"] = c.auc_splits;
  j["match"] = {{"iou", c.match.iou_threshold}, {"samplings", c.match.samplings}, {"repeats", c.match.repeats}};
  const auto& a = c.attributes;
  j["attributes"] = {
    {"bm", a.bm_threshold},
    {"cb", a.cb_threshold},
    {"cp_sigma", a.cp_sigma},
    {"cp_direction", a.cp_direction == CpDirection::Far ? "far" : "near"},
    {"dc", a.dc_threshold},
    {"so", a.so_threshold},
    {"sa_response", a.sa_response},
    {"sa_iou", a.sa_iou},
    {"chi_mode", to_string(a.chi_mode)},
    {"color_bins", a.color_bins},
    {"slic",
     {{"superpixels", a.slic.superpixels}, {"compactness", a.slic.compactness}, {"iterations", a.slic.iterations}}},
    {"gabor",
     {{"wavelength", a.gabor.wavelength},
      {"sigma", a.gabor.sigma},
      {"aspect", a.gabor.aspect},
      {"phase", a.gabor.phase},
      {"normal_sigma", a.gabor.normal_sigma}}},
  };
  ordered_json b;
  b["majority_threshold"] = c.builder.majority_threshold;
  b["sigma"] = c.builder.sigma ? ordered_json(*c.builder.sigma) : ordered_json(nullptr);
  b["binning"] = c.builder.binning == RankBinning::Quintile ? "quintile" : "thresholds";
  b["thresholds"] = c.builder.thresholds;
  j["builder"] = std::move(b);
  j["ranking_attention"] = c.ranking_attention == RankingAttentionMode::Graded ? "graded" : "literal";
  return j;
}

ordered_json metric_conventions()
{
  return {
    {"f_measure_threshold", "adaptive: min(2 * mean(pred), 1)"},
    {"f_measure_beta_squared", 0.3},
    {"s_measure_alpha", 0.5},
    {"std", "population"},
    {"emd_ground_distance", "euclidean between cell centers, cell units"},
    {"kld_direction", "sum q * ln(eps + q / (p + eps)), q = ground truth"},
    {"auc_judd_thresholds", "distinct prediction values at fixations"},
    {"auc_negatives", "uniform without replacement, |fixations| per split"},
    {"rank_codes", {{"ES", 1}, {"M1", 2}, {"M2", 3}, {"M3", 4}, {"HD", 5}, {"BG", 6}}},
    {"aggregation", "mean over images"},
  };
}

}  // namespace camo
