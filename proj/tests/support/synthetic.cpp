#include "synthetic.hpp"

#include "camo/dataset_builder.hpp"
#include "camo/text.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <unistd.h>

namespace synth
{

using namespace camo;

fs::path fresh_dir(const std::string& name)
{
  const fs::path dir = fs::temp_directory_path() / ("camo_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

double uniform(Rng& rng, double lo, double hi)
{
  return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

BinaryMask ellipse(int width, int height, double cx, double cy, double rx, double ry)
{
  BinaryMask m(height, width);
  for (int y = 0; y < height; ++y)
  {
    for (int x = 0; x < width; ++x)
    {
      const double dx = (x + 0.5 - cx) / rx, dy = (y + 0.5 - cy) / ry;
      m(y, x) = dx * dx + dy * dy <= 1.0 ? 1 : 0;
    }
  }
  return m;
}

BinaryMask random_blob(Rng& rng, int width, int height)
{
  const double rx = uniform(rng, 0.1, 0.3) * width, ry = uniform(rng, 0.1, 0.3) * height;
  return ellipse(width, height, uniform(rng, rx, width - rx), uniform(rng, ry, height - ry), rx, ry);
}

ScalarMap random_density(Rng& rng, int width, int height)
{
  ScalarMap m = ScalarMap::Zero(height, width);
  const int bumps = 1 + static_cast<int>(uniform_below(rng, 4));
  for (int b = 0; b < bumps; ++b)
  {
    const double cx = uniform(rng, 0, width), cy = uniform(rng, 0, height);
    const double s = uniform(rng, 0.05, 0.2) * width, a = uniform(rng, 0.2, 1.0);
    for (int y = 0; y < height; ++y)
    {
      for (int x = 0; x < width; ++x)
      {
        const double dx = x + 0.5 - cx, dy = y + 0.5 - cy;
        m(y, x) += a * std::exp(-(dx * dx + dy * dy) / (2 * s * s));
      }
    }
  }
  return m / m.maxCoeff();
}

ScalarMap random_map(Rng& rng, int width, int height)
{
  ScalarMap m(height, width);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = uniform(rng, 0, 1);
  return m;
}

namespace
{

Image<std::uint8_t> to8(const BinaryMask& m) { return (m.cast<int>() * 255).cast<std::uint8_t>(); }

void write_json(const fs::path& path, const nlohmann::ordered_json& j)
{
  std::ofstream out(path);
  out << j.dump(2) << '\n';
}

}  // namespace

Dataset make_dataset(const fs::path& dir, const Options& o)
{
  Rng rng(o.seed);
  Dataset ds;
  ds.dir = dir;
  for (const char* sub : {"images", "gt", "instances", "fixations", "logs", "pred/seg_oracle", "pred/seg_noisy",
                          "pred/fix_oracle", "pred/fix_noisy", "pred/rank_oracle", "pred/rank_noisy"})
  {
    fs::create_directories(dir / sub);
  }
  ds.seg_methods = {{"oracle", dir / "pred/seg_oracle"}, {"noisy", dir / "pred/seg_noisy"}};
  ds.fix_methods = {{"oracle", dir / "pred/fix_oracle"}, {"noisy", dir / "pred/fix_noisy"}};
  ds.rank_methods = {{"oracle", dir / "pred/rank_oracle"}, {"noisy", dir / "pred/rank_noisy"}};

  nlohmann::ordered_json manifest;
  manifest["dataset"] = "synthetic";
  manifest["entries"] = nlohmann::ordered_json::array();
  const int w = o.width, h = o.height;
  int instance_counter = 0;

  for (int i = 0; i < o.images; ++i)
  {
    char idbuf[16];
    std::snprintf(idbuf, sizeof(idbuf), "img%03d", i);
    const std::string id = idbuf;

    // Two instances, one per horizontal half, so they never overlap.
    const int count = 1 + static_cast<int>(uniform_below(rng, 2));
    std::vector<BinaryMask> masks;
    BinaryMask gt = BinaryMask::Zero(h, w);
    for (int k = 0; k < count; ++k)
    {
      const double half = count == 1 ? w : w / 2.0;
      const double rx = uniform(rng, 0.1, 0.2) * w, ry = uniform(rng, 0.1, 0.25) * h;
      const double cx = k * half + uniform(rng, rx + 1, half - rx - 1);
      const double cy = uniform(rng, ry + 1, h - ry - 1);
      masks.push_back(ellipse(w, h, cx, cy, rx, ry));
      gt = gt.max(masks.back());
    }

    RgbImage rgb{w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h * 3)};
    for (int y = 0; y < h; ++y)
    {
      for (int x = 0; x < w; ++x)
      {
        for (int c = 0; c < 3; ++c)
        {
          const int base = gt(y, x) ? 90 + 30 * c : 120 - 20 * c;
          rgb.data[(static_cast<std::size_t>(y) * w + x) * 3 + c] =
            static_cast<std::uint8_t>(std::clamp(base + static_cast<int>(uniform_below(rng, 40)) - 20, 0, 255));
        }
      }
    }
    write_rgb_png(dir / "images" / (id + ".png"), rgb);
    write_gray_png(dir / "gt" / (id + ".png"), to8(gt));

    nlohmann::ordered_json entry;
    entry["image"] = "images/" + id + ".png";
    entry["width"] = w;
    entry["height"] = h;
    entry["gt_mask"] = "gt/" + id + ".png";
    entry["instances"] = nlohmann::ordered_json::array();
    nlohmann::ordered_json oracle_preds{{"image_id", id}, {"instances", nlohmann::ordered_json::array()}};
    nlohmann::ordered_json noisy_preds = oracle_preds;
    for (int k = 0; k < count; ++k)
    {
      const std::string name = id + "_" + std::to_string(k) + ".png";
      write_gray_png(dir / "instances" / name, to8(masks[k]));
      const RankLabel rank = kForegroundRanks[instance_counter++ % 5];
      entry["instances"].push_back({{"mask", "instances/" + name}, {"rank", std::string(to_string(rank))}});
      oracle_preds["instances"].push_back(
        {{"mask", "../../instances/" + name}, {"rank", std::string(to_string(rank))}, {"score", 0.9}});
      const RankLabel noisy = kForegroundRanks[uniform_below(rng, 5)];
      noisy_preds["instances"].push_back(
        {{"mask", "../../instances/" + name}, {"rank", std::string(to_string(noisy))}, {"score", 0.5}});
    }
    write_json(dir / "pred/rank_oracle" / (id + ".json"), oracle_preds);
    write_json(dir / "pred/rank_noisy" / (id + ".json"), noisy_preds);

    // Observers look at random points, biased towards the objects.
    std::vector<FixationSession> sessions;
    entry["fixation_logs"] = nlohmann::ordered_json::array();
    for (int obs = 0; obs < o.observers; ++obs)
    {
      FixationSession s{id, "obs" + std::to_string(obs), 1000, {}};
      std::int64_t t = 1000;
      for (int e = 0; e < 8; ++e)
      {
        t += 100 + static_cast<std::int64_t>(uniform_below(rng, 300));
        double x = uniform(rng, 0, w), y = uniform(rng, 0, h);
        if (e % 2 == 1)
        {
          const auto& m = masks[uniform_below(rng, masks.size())];
          for (int tries = 0; tries < 50 && !m(static_cast<int>(y), static_cast<int>(x)); ++tries)
          {
            x = uniform(rng, 0, w);
            y = uniform(rng, 0, h);
          }
        }
        s.events.push_back({t, x, y});
      }
      const std::string log = "logs/" + id + "_" + s.observer_id + ".csv";
      write_fixation_log(dir / log, s);
      entry["fixation_logs"].push_back(log);
      sessions.push_back(std::move(s));
    }
    const ScalarMap density = render_fixation_map(sessions, w, h, w / 20.0);
    const auto density8 = quantize8(density);
    write_gray_png(dir / "fixations" / (id + ".png"), density8);
    entry["fixation_map"] = "fixations/" + id + ".png";

    write_gray_png(dir / "pred/seg_oracle" / (id + ".png"), to8(gt));
    write_gray_png(dir / "pred/fix_oracle" / (id + ".png"), density8);
    ScalarMap noisy = 0.6 * gt.cast<double>() + 0.4 * random_map(rng, w, h);
    write_gray_png(dir / "pred/seg_noisy" / (id + ".png"), quantize8(noisy));
    ScalarMap noisy_fix = 0.7 * density + 0.3 * random_density(rng, w, h);
    write_gray_png(dir / "pred/fix_noisy" / (id + ".png"), quantize8(noisy_fix / noisy_fix.maxCoeff()));

    manifest["entries"].push_back(std::move(entry));
  }
  ds.manifest = dir / "manifest.json";
  write_json(ds.manifest, manifest);
  return ds;
}

}  // namespace synth
