#include "camo/dataset_builder.hpp"

#include "camo/maps.hpp"
#include "camo/text.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace camo
{

double median(std::span<const double> values)
{
  if (values.empty()) throw Error(ErrorKind::EmptyInput, "median of an empty sequence");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  if (n % 2 == 1) return sorted[n / 2];
  return 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

ObserverDelay per_observer_delay(const FixationSession& session, const BinaryMask& instance)
{
  std::vector<double> deltas;
  for (const auto& ev : session.events)
  {
    const auto x = static_cast<Eigen::Index>(std::floor(ev.x));
    const auto y = static_cast<Eigen::Index>(std::floor(ev.y));
    if (x < 0 || y < 0 || x >= instance.cols() || y >= instance.rows()) continue;
    if (instance(y, x)) deltas.push_back(static_cast<double>(ev.timestamp_ms - session.t0_ms));
  }
  if (deltas.empty()) return std::nullopt;
  return median(deltas);
}

DelayRecord aggregate_instance_delay(std::span<const ObserverDelay> outcomes, const BuilderConfig& config)
{
  if (outcomes.empty()) throw Error(ErrorKind::NoObservers, "no observer outcomes");
  if (config.majority_threshold < 1 || config.majority_threshold > static_cast<int>(outcomes.size()))
  {
    throw Error(ErrorKind::InvalidConfig, "majority threshold " + std::to_string(config.majority_threshold) +
                                            " with " + std::to_string(outcomes.size()) + " observers");
  }
  DelayRecord record;
  record.observers.assign(outcomes.begin(), outcomes.end());
  std::vector<double> detected;
  for (const auto& o : outcomes)
  {
    if (o) detected.push_back(*o);
  }
  if (static_cast<int>(detected.size()) >= config.majority_threshold)
  {
    record.delay_ms = median(detected);
  }
  else
  {
    record.failure_forced = true;
    record.normalized = 1.0;
  }
  return record;
}

void normalize_delays(std::span<DelayRecord> records)
{
  double max_delay = -1.0;
  for (const auto& r : records)
  {
    if (!r.failure_forced && r.delay_ms) max_delay = std::max(max_delay, *r.delay_ms);
  }
  if (max_delay < 0) throw Error(ErrorKind::AllFailed, "every instance is failure-forced");
  for (auto& r : records)
  {
    if (r.failure_forced)
    {
      r.normalized = 1.0;
      continue;
    }
    r.normalized = max_delay > 0 ? std::clamp(*r.delay_ms / max_delay, 0.0, 1.0) : 0.0;
  }
}

std::vector<RankLabel> assign_ranks(std::span<const DelayRecord> records, const BuilderConfig& config)
{
  std::vector<double> population;
  for (const auto& r : records)
  {
    if (!r.failure_forced)
    {
      if (!r.normalized) throw Error(ErrorKind::InvalidInput, "record '" + r.instance_id + "' is not normalized");
      population.push_back(*r.normalized);
    }
  }
  std::sort(population.begin(), population.end());

  if (config.binning == RankBinning::Thresholds && config.thresholds.size() != 4)
  {
    throw Error(ErrorKind::InvalidConfig, "explicit rank binning needs 4 thresholds");
  }

  std::vector<RankLabel> ranks;
  ranks.reserve(records.size());
  for (const auto& r : records)
  {
    if (r.failure_forced)
    {
      ranks.push_back(RankLabel::HD);
      continue;
    }
    const double v = *r.normalized;
    int bin = 0;
    if (config.binning == RankBinning::Quintile)
    {
      // A tied group takes the bin of its first (lowest) sorted position.
      const auto first = std::lower_bound(population.begin(), population.end(), v) - population.begin();
      bin = static_cast<int>((5 * first) / static_cast<long>(population.size()));
    }
    else
    {
      while (bin < 4 && v > config.thresholds[bin]) ++bin;
    }
    ranks.push_back(kForegroundRanks[bin]);
  }
  return ranks;
}


ScalarMap accumulate_fixations(std::span<const FixationSession> sessions, int width, int height, double sigma)
{
  if (!(sigma > 0)) throw Error(ErrorKind::InvalidConfig, "sigma must be positive");
  ScalarMap impulses = ScalarMap::Zero(height, width);
  for (const auto& s : sessions)
  {
    for (const auto& ev : s.events)
    {
      const int x = static_cast<int>(std::floor(ev.x));
      const int y = static_cast<int>(std::floor(ev.y));
      if (x < 0 || y < 0 || x >= width || y >= height) continue;
      impulses(y, x) += 1.0;
    }
  }
  return gaussian_blur(impulses, sigma);
}

ScalarMap render_fixation_map(std::span<const FixationSession> sessions, int width, int height, double sigma)
{
  ScalarMap map = accumulate_fixations(sessions, width, height, sigma);
  const double peak = map.maxCoeff();
  if (peak > 0) map /= peak;
  return map;
}

RenderedRankMap render_rank_map(std::span<const InstanceRecord> instances, int width, int height)
{
  RenderedRankMap out;
  out.map = RankMap::Constant(height, width, static_cast<std::uint8_t>(code(RankLabel::BG)));
  Image<double> owner_score = Image<double>::Constant(height, width, -1.0);
  Image<int> owner = Image<int>::Constant(height, width, -1);
  bool overlap_without_scores = false;

  for (std::size_t i = 0; i < instances.size(); ++i)
  {
    const auto& inst = instances[i];
    if (!inst.rank) throw Error(ErrorKind::MissingRank, "instance '" + inst.id + "' has no rank");
    require_same_dims(inst.mask, out.map);
    const double s = inst.score.value_or(-1.0);
    for (Eigen::Index y = 0; y < height; ++y)
    {
      for (Eigen::Index x = 0; x < width; ++x)
      {
        if (!inst.mask(y, x)) continue;
        if (owner(y, x) >= 0)
        {
          const auto& prev = instances[owner(y, x)];
          if (!inst.score || !prev.score)
          {
            overlap_without_scores = true;
          }
          else if (s <= owner_score(y, x))
          {
            continue;
          }
        }
        owner(y, x) = static_cast<int>(i);
        owner_score(y, x) = s;
        out.map(y, x) = static_cast<std::uint8_t>(code(*inst.rank));
      }
    }
  }
  if (overlap_without_scores)
  {
    out.warnings.emplace_back("overlapping instances without scores: later-listed instance wins");
  }
  return out;
}

FixationSession read_fixation_log(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::FileMissing, path.string());
  FixationSession session;
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::ParseError, path.string() + ": empty log");
  auto header = split_csv(line);
  if (header.size() != 3) throw Error(ErrorKind::ParseError, path.string() + ": bad header line");
  session.observer_id = header[0];
  session.image_id = header[1];
  try
  {
    session.t0_ms = std::stoll(header[2]);
    int line_no = 1;
    while (std::getline(in, line))
    {
      ++line_no;
      if (trim(line).empty()) continue;
      auto f = split_csv(line);
      if (f.size() != 3) throw Error(ErrorKind::ParseError, path.string() + ":" + std::to_string(line_no));
      FixationEvent ev{std::stoll(f[0]), std::stod(f[1]), std::stod(f[2])};
      if (ev.timestamp_ms < session.t0_ms)
      {
        throw Error(ErrorKind::ParseError, path.string() + ":" + std::to_string(line_no) + ": event before t0");
      }
      session.events.push_back(ev);
    }
  }
  catch (const std::invalid_argument&)
  {
    throw Error(ErrorKind::ParseError, path.string() + ": non-numeric field");
  }
  catch (const std::out_of_range&)
  {
    throw Error(ErrorKind::ParseError, path.string() + ": numeric field out of range");
  }
  std::stable_sort(session.events.begin(), session.events.end(),
                   [](const FixationEvent& a, const FixationEvent& b) { return a.timestamp_ms < b.timestamp_ms; });
  return session;
}

void write_fixation_log(const std::filesystem::path& path, const FixationSession& session)
{
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::UnwritablePath, path.string());
  out << session.observer_id << ',' << session.image_id << ',' << session.t0_ms << '\n';
  for (const auto& ev : session.events)
  {
    out << ev.timestamp_ms << ',' << format_double(ev.x) << ',' << format_double(ev.y) << '\n';
  }
}

void write_delay_table(const std::filesystem::path& path, std::span<const DelayRecord> records,
                       std::span<const RankLabel> ranks)
{
  if (ranks.size() != records.size()) throw Error(ErrorKind::LengthMismatch, "ranks vs delay records");
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::UnwritablePath, path.string());
  out << "image_id,instance_id,delay_ms,normalized,rank,failure_forced\n";
  for (std::size_t i = 0; i < records.size(); ++i)
  {
    const auto& r = records[i];
    out << r.image_id << ',' << r.instance_id << ',' << (r.delay_ms ? format_double(*r.delay_ms) : "") << ','
        << (r.normalized ? format_double(*r.normalized) : "") << ',' << to_string(ranks[i]) << ','
        << (r.failure_forced ? "true" : "false") << '\n';
  }
}

}  // namespace camo
