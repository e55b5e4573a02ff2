#include "camo/attributes.hpp"

#include "camo/manifest.hpp"
#include "camo/maps.hpp"
#include "camo/text.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

namespace camo
{

double chi_square(std::span<const double> h, std::span<const double> g)
{
  if (h.size() != g.size()) throw Error(ErrorKind::LengthMismatch, "histograms differ in length");
  double total = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i)
  {
    const double d = h[i] - g[i];
    total += d * d / (h[i] + g[i] + 1e-10);
  }
  return 0.5 * total;
}

double superpixel_distance(const Superpixel& fg, const Superpixel& bg, ChiSquareMode mode)
{
  switch (mode)
  {
    case ChiSquareMode::ColorOnly: return chi_square(fg.color_histogram, bg.color_histogram);
    case ChiSquareMode::TextureOnly: return chi_square(fg.texture_histogram, bg.texture_histogram);
    case ChiSquareMode::Concatenated:
    {
      auto join = [](const Superpixel& s) {
        std::vector<double> v;
        for (double c : s.color_histogram) v.push_back(0.5 * c);
        for (double t : s.texture_histogram) v.push_back(0.5 * t);
        return v;
      };
      return chi_square(join(fg), join(bg));
    }
    case ChiSquareMode::Mean:
    default:
      return 0.5 * (chi_square(fg.color_histogram, bg.color_histogram) +
                    chi_square(fg.texture_histogram, bg.texture_histogram));
  }
}

ScoredFlag bm_flag(std::span<const Superpixel> superpixels, const AttributeConfig& config)
{
  std::vector<const Superpixel*> fg, bg;
  for (const auto& s : superpixels)
  {
    if (s.members.empty()) continue;
    (s.side == Side::Foreground ? fg : bg).push_back(&s);
  }
  if (fg.empty()) throw Error(ErrorKind::NoForeground, "no foreground superpixel");
  if (bg.empty()) throw Error(ErrorKind::NoBackground, "no background superpixel");
  double score = 0.0;
  for (const auto* f : fg)
  {
    double to_background = 0.0;
    for (const auto* b : bg) to_background += superpixel_distance(*f, *b, config.chi_mode);
    score += to_background / static_cast<double>(bg.size());
  }
  score /= static_cast<double>(fg.size());
  return {score < config.bm_threshold, score};
}

ComplexityMeasure mean_gradient_complexity()
{
  return {"mean_gradient", [](const RgbImage& image, const BinaryMask& background) {
            const ScalarMap gray = luminance(image);
            const int h = image.height, w = image.width;
            const double max_magnitude = std::sqrt(0.5);
            double total = 0.0;
            long count = 0;
            for (int y = 0; y < h; ++y)
            {
              for (int x = 0; x < w; ++x)
              {
                if (!background(y, x)) continue;
                const double gx = 0.5 * (gray(y, std::min(w - 1, x + 1)) - gray(y, std::max(0, x - 1)));
                const double gy = 0.5 * (gray(std::min(h - 1, y + 1), x) - gray(std::max(0, y - 1), x));
                total += std::sqrt(gx * gx + gy * gy) / max_magnitude;
                ++count;
              }
            }
            return count > 0 ? total / count : 0.0;
          }};
}

ScoredFlag cb_flag(const RgbImage& image, const BinaryMask& gt, const AttributeConfig& config,
                   const ComplexityMeasure& measure)
{
  if (gt.rows() != image.height || gt.cols() != image.width)
  {
    throw Error(ErrorKind::DimensionMismatch, "gt mask and image differ in size");
  }
  const BinaryMask background = (gt == 0).cast<std::uint8_t>();
  if (count_nonzero(background) == 0) throw Error(ErrorKind::NoBackground, "mask covers the whole image");
  const double score = measure.compute(image, background);
  return {score > config.cb_threshold, score};
}

std::array<double, 2> mask_centroid(const BinaryMask& mask)
{
  double sx = 0.0, sy = 0.0;
  long n = 0;
  for (Eigen::Index y = 0; y < mask.rows(); ++y)
  {
    for (Eigen::Index x = 0; x < mask.cols(); ++x)
    {
      if (!mask(y, x)) continue;
      sx += static_cast<double>(x) + 0.5;
      sy += static_cast<double>(y) + 0.5;
      ++n;
    }
  }
  if (n == 0) throw Error(ErrorKind::EmptyMask, "centroid of an empty mask");
  return {sx / n, sy / n};
}

bool cp_flag(const BinaryMask& instance, const AttributeConfig& config)
{
  const auto [u, v] = mask_centroid(instance);
  const double w = static_cast<double>(instance.cols()), h = static_cast<double>(instance.rows());
  const double du = std::abs(u - w / 2.0), dv = std::abs(v - h / 2.0);
  if (config.cp_direction == CpDirection::Near) return du < config.cp_sigma * w || dv < config.cp_sigma * h;
  return du > config.cp_sigma * w || dv > config.cp_sigma * h;
}

std::vector<Pixel> mask_outline(const BinaryMask& mask)
{
  std::vector<Pixel> out;
  const auto h = mask.rows(), w = mask.cols();
  for (Eigen::Index y = 0; y < h; ++y)
  {
    for (Eigen::Index x = 0; x < w; ++x)
    {
      if (!mask(y, x)) continue;
      const bool edge = (x > 0 && !mask(y, x - 1)) || (x + 1 < w && !mask(y, x + 1)) || (y > 0 && !mask(y - 1, x)) ||
                        (y + 1 < h && !mask(y + 1, x));
      if (edge) out.push_back({static_cast<int>(x), static_cast<int>(y)});
    }
  }
  return out;
}

namespace
{

// Quadrature Gabor energy at (px, py) for a wave travelling along angle theta.
// Both kernels have their DC component removed.
double gabor_energy(const ScalarMap& gray, int px, int py, double theta, const GaborConfig& g)
{
  const int radius = static_cast<int>(std::ceil(3.0 * g.sigma));
  const int h = static_cast<int>(gray.rows()), w = static_cast<int>(gray.cols());
  const double c = std::cos(theta), s = std::sin(theta);
  const double k = 2.0 * std::numbers::pi / g.wavelength;
  double env_sum = 0.0, even_dc = 0.0, odd_dc = 0.0;
  double img_env = 0.0, even = 0.0, odd = 0.0;
  for (int dy = -radius; dy <= radius; ++dy)
  {
    const int yy = std::clamp(py + dy, 0, h - 1);
    for (int dx = -radius; dx <= radius; ++dx)
    {
      const int xx = std::clamp(px + dx, 0, w - 1);
      const double along = dx * c + dy * s;
      const double across = -dx * s + dy * c;
      const double env =
        std::exp(-(along * along + g.aspect * g.aspect * across * across) / (2.0 * g.sigma * g.sigma));
      const double ke = env * std::cos(k * along + g.phase);
      const double ko = env * std::sin(k * along + g.phase);
      const double v = gray(yy, xx);
      env_sum += env;
      even_dc += ke;
      odd_dc += ko;
      img_env += env * v;
      even += ke * v;
      odd += ko * v;
    }
  }
  even -= even_dc / env_sum * img_env;
  odd -= odd_dc / env_sum * img_env;
  return std::sqrt(even * even + odd * odd);
}

}  // namespace

double gabrat(const ScalarMap& gray, const BinaryMask& instance, const GaborConfig& config)
{
  require_same_dims(gray, instance);
  const auto outline = mask_outline(instance);
  if (outline.size() < 8)
  {
    throw Error(ErrorKind::DegenerateBoundary, std::to_string(outline.size()) + " outline pixels");
  }
  const ScalarMap smooth = gaussian_blur(mask_to_map(instance), config.normal_sigma);
  const int h = static_cast<int>(gray.rows()), w = static_cast<int>(gray.cols());
  double total = 0.0;
  long used = 0;
  for (const auto& p : outline)
  {
    const double gx = 0.5 * (smooth(p.y, std::min(w - 1, p.x + 1)) - smooth(p.y, std::max(0, p.x - 1)));
    const double gy = 0.5 * (smooth(std::min(h - 1, p.y + 1), p.x) - smooth(std::max(0, p.y - 1), p.x));
    if (gx == 0.0 && gy == 0.0) continue;
    const double normal = std::atan2(gy, gx);
    const double e_par = gabor_energy(gray, p.x, p.y, normal, config);
    const double e_perp = gabor_energy(gray, p.x, p.y, normal + std::numbers::pi / 2.0, config);
    total += e_perp / (e_par + e_perp + 1e-12);
    ++used;
  }
  if (used == 0) throw Error(ErrorKind::DegenerateBoundary, "no outline point has a defined normal");
  return total / used;
}

ScoredFlag dc_gabrat(const RgbImage& image, const BinaryMask& instance, const AttributeConfig& config)
{
  const double score = gabrat(luminance(image), instance, config.gabor);
  return {score > config.dc_threshold, score};
}

bool so_flag(const BinaryMask& instance, const AttributeConfig& config)
{
  const double fraction = static_cast<double>(count_nonzero(instance)) / static_cast<double>(instance.size());
  return fraction < config.so_threshold;
}

std::optional<bool> sa_flag(const std::optional<ScalarMap>& saliency, const BinaryMask& instance,
                            const AttributeConfig& config)
{
  if (!saliency) return std::nullopt;
  require_same_dims(*saliency, instance);
  const double peak = saliency->maxCoeff();
  const long inside = count_nonzero(instance);
  if (!(peak > 0) || inside == 0) return false;
  const double mean_inside = (*saliency * instance.cast<double>()).sum() / inside;
  const BinaryMask bin = binarize_adaptive(*saliency);
  const long inter = ((bin != 0) && (instance != 0)).count();
  const long uni = ((bin != 0) || (instance != 0)).count();
  const double overlap = uni > 0 ? static_cast<double>(inter) / uni : 0.0;
  return mean_inside / peak >= config.sa_response && overlap >= config.sa_iou;
}

std::vector<AttributeRow> classify_attributes(const ManifestEntry& entry, const AttributeConfig& config)
{
  auto note = [](std::vector<std::string>& notes, const char* attr, const std::exception& e) {
    notes.push_back(std::string(attr) + ": " + e.what());
  };

  std::vector<std::string> image_notes;
  std::optional<RgbImage> image;
  std::optional<BinaryMask> gt;
  try
  {
    image = load_rgb(entry.image, entry.dims());
  }
  catch (const std::exception& e)
  {
    note(image_notes, "image", e);
  }
  try
  {
    gt = load_mask(entry.gt_mask, entry.dims());
  }
  catch (const std::exception& e)
  {
    note(image_notes, "gt_mask", e);
  }

  std::optional<bool> bm, cb;
  std::optional<double> bm_score, cb_score;
  if (image && gt)
  {
    try
    {
      auto seg = slic_superpixels(*image, config.slic);
      superpixel_features(*image, seg, *gt, config.color_bins);
      const auto r = bm_flag(seg.superpixels, config);
      bm = r.flag;
      bm_score = r.score;
    }
    catch (const std::exception& e)
    {
      note(image_notes, "BM", e);
    }
    try
    {
      const auto r = cb_flag(*image, *gt, config);
      cb = r.flag;
      cb_score = r.score;
    }
    catch (const std::exception& e)
    {
      note(image_notes, "CB", e);
    }
  }

  std::optional<ScalarMap> saliency;
  std::string saliency_error;
  if (entry.saliency_map)
  {
    try
    {
      saliency = load_scalar_map(*entry.saliency_map, entry.dims());
    }
    catch (const std::exception& e)
    {
      saliency_error = e.what();
    }
  }

  std::vector<std::pair<std::string, std::optional<BinaryMask>>> instances;
  std::vector<std::string> instance_errors;
  if (entry.instances.empty())
  {
    instances.emplace_back("0", gt);
    instance_errors.emplace_back(gt ? "" : "gt mask unavailable");
  }
  for (std::size_t i = 0; i < entry.instances.size(); ++i)
  {
    try
    {
      instances.emplace_back(std::to_string(i), load_mask(entry.instances[i].mask, entry.dims()));
      instance_errors.emplace_back();
    }
    catch (const std::exception& e)
    {
      instances.emplace_back(std::to_string(i), std::nullopt);
      instance_errors.emplace_back(e.what());
    }
  }

  std::vector<AttributeRow> rows;
  for (std::size_t i = 0; i < instances.size(); ++i)
  {
    AttributeRow row;
    row.image_id = entry.id;
    row.instance_id = instances[i].first;
    row.notes = image_notes;
    row.bm = bm;
    row.bm_score = bm_score;
    row.cb = cb;
    row.cb_score = cb_score;
    row.mm = entry.mm;
    row.oc = entry.oc;
    const auto& mask = instances[i].second;
    if (!mask)
    {
      row.notes.push_back("instance: " + instance_errors[i]);
      rows.push_back(std::move(row));
      continue;
    }
    try
    {
      row.cp = cp_flag(*mask, config);
    }
    catch (const std::exception& e)
    {
      note(row.notes, "CP", e);
    }
    row.so = so_flag(*mask, config);
    if (image)
    {
      try
      {
        const auto r = dc_gabrat(*image, *mask, config);
        row.dc = r.flag;
        row.gabrat = r.score;
      }
      catch (const std::exception& e)
      {
        note(row.notes, "DC", e);
      }
    }
    if (!saliency_error.empty())
    {
      row.notes.push_back("SA: " + saliency_error);
    }
    else
    {
      try
      {
        row.sa = sa_flag(saliency, *mask, config);
      }
      catch (const std::exception& e)
      {
        note(row.notes, "SA", e);
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace
{

std::string flag_field(const std::optional<bool>& v) { return v ? (*v ? "true" : "false") : ""; }
std::string score_field(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

std::optional<bool> parse_flag(const std::string& s)
{
  if (s.empty()) return std::nullopt;
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw Error(ErrorKind::ParseError, "attribute flag '" + s + "'");
}

std::optional<double> parse_score(const std::string& s)
{
  if (s.empty()) return std::nullopt;
  try
  {
    return std::stod(s);
  }
  catch (const std::exception&)
  {
    throw Error(ErrorKind::ParseError, "attribute score '" + s + "'");
  }
}

constexpr const char* kAttributeHeader = "image_id,instance_id,BM,CB,CP,DC,MM,OC,SA,SO,bm_score,cb_score,gabrat";

}  // namespace

void write_attribute_csv(const std::filesystem::path& path, std::span<const AttributeRow> rows)
{
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::UnwritablePath, path.string());
  out << kAttributeHeader << '\n';
  for (const auto& r : rows)
  {
    out << r.image_id << ',' << r.instance_id << ',' << flag_field(r.bm) << ',' << flag_field(r.cb) << ','
        << flag_field(r.cp) << ',' << flag_field(r.dc) << ',' << flag_field(r.mm) << ',' << flag_field(r.oc) << ','
        << flag_field(r.sa) << ',' << flag_field(r.so) << ',' << score_field(r.bm_score) << ','
        << score_field(r.cb_score) << ',' << score_field(r.gabrat) << '\n';
  }
}

std::vector<AttributeRow> read_attribute_csv(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::FileMissing, path.string());
  std::string line;
  if (!std::getline(in, line) || trim(line) != kAttributeHeader)
  {
    throw Error(ErrorKind::ParseError, path.string() + ": unexpected header");
  }
  std::vector<AttributeRow> rows;
  while (std::getline(in, line))
  {
    if (trim(line).empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 13) throw Error(ErrorKind::ParseError, path.string() + ": expected 13 fields");
    AttributeRow r;
    r.image_id = f[0];
    r.instance_id = f[1];
    r.bm = parse_flag(f[2]);
    r.cb = parse_flag(f[3]);
    r.cp = parse_flag(f[4]);
    r.dc = parse_flag(f[5]);
    r.mm = parse_flag(f[6]);
    r.oc = parse_flag(f[7]);
    r.sa = parse_flag(f[8]);
    r.so = parse_flag(f[9]);
    r.bm_score = parse_score(f[10]);
    r.cb_score = parse_score(f[11]);
    r.gabrat = parse_score(f[12]);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace camo
