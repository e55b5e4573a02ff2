#include "camo/ranking_metrics.hpp"

#include "camo/dataset_builder.hpp"
#include "camo/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace camo
{

std::vector<double> average_ranks(std::span<const double> values)
{
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n)
  {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> a, std::span<const double> b)
{
  if (a.size() != b.size()) throw Error(ErrorKind::LengthMismatch, "spearman inputs differ in length");
  if (a.size() < 2) throw Error(ErrorKind::DegenerateVector, "spearman needs at least two samples");
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  const double mean = (n + 1.0) / 2.0;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i)
  {
    const double da = ra[i] - mean, db = rb[i] - mean;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) throw Error(ErrorKind::DegenerateVector, "spearman of a constant vector");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double r_mae(const RankMap& pred, const RankMap& gt)
{
  require_same_dims(pred, gt);
  return (pred.cast<double>() - gt.cast<double>()).abs().mean();
}

std::optional<std::size_t> match_instance(const InstanceRecord& gt, std::span<const InstanceRecord> predictions,
                                          double iou_threshold)
{
  const BoundingBox gbox = gt.box();
  std::optional<std::size_t> best;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < predictions.size(); ++i)
  {
    if (!(iou(gbox, predictions[i].box()) > iou_threshold)) continue;
    const double s = predictions[i].score.value_or(0.0);
    if (s > best_score)
    {
      best_score = s;
      best = i;
    }
  }
  return best;
}

CorrPool build_corr_pool(std::span<const RankImage> images, double iou_threshold)
{
  CorrPool pool;
  for (const auto& img : images)
  {
    for (const auto& g : img.gt)
    {
      if (!g.rank) throw Error(ErrorKind::MissingRank, "gt instance '" + g.id + "' has no rank");
      if (*g.rank == RankLabel::BG) continue;
      const auto m = match_instance(g, img.predictions, iou_threshold);
      if (!m || !img.predictions[*m].rank)
      {
        ++pool.unmatched;
        continue;
      }
      pool.pairs.push_back({*g.rank, *img.predictions[*m].rank});
    }
  }
  return pool;
}

double quintuple_correlation(std::span<const RankPair, 5> sample)
{
  std::array<double, 5> g{}, p{};
  for (std::size_t i = 0; i < 5; ++i)
  {
    g[i] = code(sample[i].gt);
    p[i] = code(sample[i].predicted);
  }
  if (std::all_of(p.begin(), p.end(), [&](double v) { return v == p[0]; })) return 0.0;
  return spearman(g, p);
}

double corr(const CorrPool& pool, const MatchConfig& config)
{
  if (config.samplings < 1 || config.repeats < 1) throw Error(ErrorKind::InvalidConfig, "Corr needs N, M >= 1");
  std::array<std::vector<RankPair>, 5> by_rank;
  for (const auto& pair : pool.pairs)
  {
    if (pair.gt != RankLabel::BG) by_rank[code(pair.gt) - 1].push_back(pair);
  }
  for (std::size_t r = 0; r < 5; ++r)
  {
    if (by_rank[r].empty())
    {
      throw Error(ErrorKind::RankUnderpopulated,
                  "no matchable instance of rank " + std::string(to_string(kForegroundRanks[r])));
    }
  }
  double total = 0.0;
  for (int rep = 0; rep < config.repeats; ++rep)
  {
    Rng rng(mix_seed(config.seed, static_cast<std::uint64_t>(rep)));
    double inner = 0.0;
    for (int k = 0; k < config.samplings; ++k)
    {
      std::array<RankPair, 5> sample{};
      for (std::size_t r = 0; r < 5; ++r) sample[r] = by_rank[r][uniform_below(rng, by_rank[r].size())];
      inner += quintuple_correlation(sample);
    }
    total += inner / config.samplings;
  }
  return total / config.repeats;
}

double corr(std::span<const RankImage> images, const MatchConfig& config)
{
  return corr(build_corr_pool(images, config.iou_threshold), config);
}

int PenaltyMatrix::index_of(RankLabel r) { return r == RankLabel::BG ? 0 : code(r); }

PenaltyMatrix::PenaltyMatrix(const std::array<std::array<double, 6>, 6>& values) : values_(values)
{
  for (int m = 0; m < 6; ++m)
  {
    for (int n = 0; n < 6; ++n)
    {
      const double v = values_[m][n];
      if (!std::isfinite(v) || v < 0) throw Error(ErrorKind::InvalidConfig, "penalty entries must be >= 0");
      if (m == n && v != 0.0) throw Error(ErrorKind::InvalidConfig, "penalty diagonal must be zero");
    }
  }
}

PenaltyMatrix PenaltyMatrix::linear()
{
  std::array<std::array<double, 6>, 6> v{};
  for (int m = 0; m < 6; ++m)
    for (int n = 0; n < 6; ++n) v[m][n] = std::abs(m - n) / 5.0;
  return PenaltyMatrix(v);
}

PenaltyMatrix PenaltyMatrix::paper_fig5()
{
  auto v = linear().values();
  v[index_of(RankLabel::M3)][index_of(RankLabel::ES)] = 0.4;
  return PenaltyMatrix(v);
}

PenaltyMatrix PenaltyMatrix::load(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::FileMissing, path.string());
  nlohmann::json j;
  try
  {
    in >> j;
  }
  catch (const nlohmann::json::exception& e)
  {
    throw Error(ErrorKind::ParseError, path.string() + ": " + e.what());
  }
  const std::vector<std::string> expected{"BG", "ES", "M1", "M2", "M3", "HD"};
  if (!j.contains("order") || j["order"].get<std::vector<std::string>>() != expected)
  {
    throw Error(ErrorKind::ParseError, path.string() + ": order must be [BG, ES, M1, M2, M3, HD]");
  }
  const auto& rows = j.at("matrix");
  if (!rows.is_array() || rows.size() != 6) throw Error(ErrorKind::ParseError, path.string() + ": needs 6 rows");
  std::array<std::array<double, 6>, 6> v{};
  for (int m = 0; m < 6; ++m)
  {
    if (!rows[m].is_array() || rows[m].size() != 6)
    {
      throw Error(ErrorKind::ParseError, path.string() + ": row " + std::to_string(m) + " needs 6 entries");
    }
    for (int n = 0; n < 6; ++n) v[m][n] = rows[m][n].get<double>();
  }
  return PenaltyMatrix(v);
}

void PenaltyMatrix::save(const std::filesystem::path& path) const
{
  nlohmann::json j;
  j["order"] = {"BG", "ES", "M1", "M2", "M3", "HD"};
  j["matrix"] = values_;
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::UnwritablePath, path.string());
  out << j.dump(2) << '\n';
}

double PenaltyMatrix::operator()(RankLabel predicted, RankLabel gt) const
{
  return values_[index_of(predicted)][index_of(gt)];
}

RankMap rank_prediction_to_map(std::span<const InstanceRecord> predictions, int width, int height)
{
  return render_rank_map(predictions, width, height).map;
}

BinaryMask mask_union(std::span<const InstanceRecord> instances, int width, int height)
{
  BinaryMask out = BinaryMask::Zero(height, width);
  for (const auto& inst : instances)
  {
    require_same_dims(inst.mask, out);
    out = out.max(inst.mask);
  }
  return (out != 0).cast<std::uint8_t>();
}

}  // namespace camo
