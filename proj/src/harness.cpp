#include "camo/harness.hpp"

#include "camo/fixation_metrics.hpp"
#include "camo/random.hpp"
#include "camo/ranking_metrics.hpp"
#include "camo/seg_metrics.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

namespace camo
{
namespace
{

namespace fs = std::filesystem;

/// A loaded input, or the error note explaining why it is missing.
template <typename T>
struct Loaded
{
  std::optional<T> value;
  std::string error;

  explicit operator bool() const { return value.has_value(); }
};

template <typename F>
auto try_load(std::string_view op, const fs::path& path, F&& f) -> Loaded<decltype(f())>
{
  Loaded<decltype(f())> out;
  try
  {
    out.value = f();
  }
  catch (const std::exception& e)
  {
    out.error = error_note(op, path, e);
  }
  return out;
}

/// Computes one metric row; prerequisite failures propagate their own note.
template <typename F>
ReportRow metric_row(std::string_view op, const std::string& image, const std::string& method,
                     const std::string& metric, const fs::path& path, std::initializer_list<const std::string*> deps,
                     F&& f)
{
  ReportRow row{image, method, metric, std::nullopt, {}};
  for (const auto* d : deps)
  {
    if (!d->empty())
    {
      row.error = *d;
      return row;
    }
  }
  try
  {
    const double v = f();
    if (!std::isfinite(v)) throw Error(ErrorKind::DegenerateMap, metric + " is not finite");
    row.value = v;
  }
  catch (const std::exception& e)
  {
    row.error = error_note(op, path, e);
  }
  return row;
}

bool has_error(const std::vector<ReportRow>& rows)
{
  for (const auto& r : rows)
  {
    if (!r.error.empty()) return true;
  }
  return false;
}

/// Evaluates every image, then concatenates rows in manifest order. In strict
/// mode no new image starts once one has failed, and the first failure in
/// manifest order is thrown.
std::vector<ReportRow> run_images(std::size_t n, const HarnessOptions& options,
                                  const std::function<std::vector<ReportRow>(std::size_t)>& eval)
{
  std::vector<std::vector<ReportRow>> per_image(n);
  std::atomic<bool> abort{false};
  parallel_for(n, options.jobs, [&](std::size_t i) {
    if (options.strict && abort.load()) return;
    per_image[i] = eval(i);
    if (options.strict && has_error(per_image[i])) abort = true;
  });
  std::vector<ReportRow> rows;
  for (auto& image_rows : per_image)
  {
    for (auto& r : image_rows)
    {
      if (options.strict && !r.error.empty()) throw std::runtime_error("strict mode: " + r.error);
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

nlohmann::ordered_json base_metadata(const std::string& task, std::span<const MethodRoot> methods,
                                     const HarnessOptions& options)
{
  nlohmann::ordered_json meta;
  meta["tool_version"] = kToolVersion;
  meta["task"] = task;
  meta["seed"] = options.seed;
  meta["sub_seed_rule"] = "mix_seed(mix_seed(seed, image index, method index), stream)";
  meta["config"] = to_json(options.config);
  meta["conventions"] = metric_conventions();
  nlohmann::ordered_json roots = nlohmann::ordered_json::object();
  for (const auto& m : methods) roots[m.name] = m.root.generic_string();
  meta["prediction_roots"] = roots;
  return meta;
}

EvaluationReport new_report(const Manifest& manifest, std::span<const MethodRoot> methods, const std::string& task,
                            const std::vector<std::string>& metrics, const HarnessOptions& options)
{
  validate(options.config);
  EvaluationReport r;
  r.task = task;
  r.dataset = manifest.dataset;
  for (const auto& m : methods) r.methods.push_back(m.name);
  r.metrics = metrics;
  r.metadata = base_metadata(task, methods, options);
  return r;
}

fs::path fixation_source(const ManifestEntry& e)
{
  if (!e.fixation_logs.empty()) return e.fixation_logs.front();
  if (e.fixation_points) return *e.fixation_points;
  return e.image;
}

}  // namespace

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& body)
{
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  std::atomic<std::size_t> next{0};
  std::mutex mutex;
  std::exception_ptr first_error;
  std::size_t first_index = std::numeric_limits<std::size_t>::max();
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;)
    {
      try
      {
        body(i);
      }
      catch (...)
      {
        std::lock_guard lock(mutex);
        if (i < first_index)
        {
          first_index = i;
          first_error = std::current_exception();
        }
      }
    }
  };
  if (workers <= 1)
  {
    work();
  }
  else
  {
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < workers; ++t) threads.emplace_back(work);
    for (auto& t : threads) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
}

fs::path prediction_map_path(const MethodRoot& method, const ManifestEntry& entry)
{
  return method.root / (entry.id + ".png");
}

fs::path prediction_instances_path(const MethodRoot& method, const ManifestEntry& entry)
{
  return method.root / (entry.id + ".json");
}

std::uint64_t cell_seed(std::uint64_t run_seed, std::size_t image, std::size_t method, std::uint64_t stream)
{
  return mix_seed(mix_seed(run_seed, image, method), stream);
}

std::vector<Pixel> rescale_points(const FixationPointSet& from, int width, int height)
{
  std::vector<Pixel> out;
  out.reserve(from.size());
  const double sx = static_cast<double>(width) / from.width();
  const double sy = static_cast<double>(height) / from.height();
  for (const auto& p : from.points())
  {
    const int x = std::min(width - 1, static_cast<int>(std::floor((p.x + 0.5) * sx)));
    const int y = std::min(height - 1, static_cast<int>(std::floor((p.y + 0.5) * sy)));
    out.push_back({x, y});
  }
  return out;
}

EvaluationReport eval_seg(const Manifest& manifest, std::span<const MethodRoot> methods,
                          const HarnessOptions& options)
{
  auto report = new_report(manifest, methods, "seg", kSegMetrics, options);
  report.rows = run_images(manifest.entries.size(), options, [&](std::size_t i) {
    const auto& entry = manifest.entries[i];
    const auto gt = try_load("eval_seg", entry.gt_mask, [&] { return load_mask(entry.gt_mask, entry.dims()); });
    std::vector<ReportRow> rows;
    for (const auto& method : methods)
    {
      const auto path = prediction_map_path(method, entry);
      const auto pred = try_load("eval_seg", path, [&] { return load_scalar_map(path, entry.dims()); });
      auto row = [&](const std::string& metric, auto&& f) {
        rows.push_back(metric_row("eval_seg", entry.id, method.name, metric, path, {&gt.error, &pred.error}, f));
      };
      row("S_alpha", [&] { return s_measure(*pred.value, *gt.value); });
      row("F_beta", [&] { return f_measure(*pred.value, *gt.value); });
      row("E_xi", [&] { return e_measure(*pred.value, *gt.value); });
      row("MAE", [&] { return mae(*pred.value, *gt.value); });
    }
    return rows;
  });
  return report;
}

EvaluationReport eval_fix(const Manifest& manifest, std::span<const MethodRoot> methods,
                          const HarnessOptions& options)
{
  auto report = new_report(manifest, methods, "fix", kFixMetrics, options);
  const auto& cfg = options.config;
  const std::size_t n = manifest.entries.size();

  std::vector<Loaded<FixationPointSet>> fixations(n);
  parallel_for(n, options.jobs, [&](std::size_t i) {
    const auto& e = manifest.entries[i];
    fixations[i] = try_load("eval_fix", fixation_source(e), [&] {
      auto points = load_fixation_points(e);
      if (points.empty()) throw Error(ErrorKind::EmptyFixations, "entry '" + e.id + "' has no fixations");
      return points;
    });
  });

  report.rows = run_images(n, options, [&](std::size_t i) {
    const auto& entry = manifest.entries[i];
    const auto& fix = fixations[i];
    const fs::path gt_path = entry.fixation_map.value_or(entry.image);
    const auto gt = try_load("eval_fix", gt_path, [&] {
      if (!entry.fixation_map) throw Error(ErrorKind::FileMissing, "entry '" + entry.id + "' has no fixation map");
      return load_scalar_map(*entry.fixation_map, entry.dims());
    });
    Loaded<ScalarMap> gt_dist;
    if (gt) gt_dist = try_load("eval_fix", gt_path, [&] { return to_distribution(*gt.value); });
    else gt_dist.error = gt.error;

    std::vector<Pixel> pool;
    for (std::size_t j = 0; j < n; ++j)
    {
      if (j == i || !fixations[j]) continue;
      const auto moved = rescale_points(*fixations[j].value, entry.width, entry.height);
      pool.insert(pool.end(), moved.begin(), moved.end());
    }

    std::vector<ReportRow> rows;
    for (std::size_t m = 0; m < methods.size(); ++m)
    {
      const auto& method = methods[m];
      const auto path = prediction_map_path(method, entry);
      const auto pred = try_load("eval_fix", path, [&] { return load_scalar_map(path, entry.dims()); });
      Loaded<ScalarMap> pred_dist;
      if (pred) pred_dist = try_load("eval_fix", path, [&] { return to_distribution(*pred.value); });
      else pred_dist.error = pred.error;

      auto row = [&](const std::string& metric, std::initializer_list<const std::string*> deps, auto&& f) {
        rows.push_back(metric_row("eval_fix", entry.id, method.name, metric, path, deps, f));
      };
      row("SIM", {&gt_dist.error, &pred_dist.error}, [&] { return sim(*pred_dist.value, *gt_dist.value); });
      row("CC", {&gt.error, &pred.error}, [&] { return cc(*pred.value, *gt.value); });
      row("EMD", {&gt_dist.error, &pred_dist.error},
          [&] { return emd(*pred_dist.value, *gt_dist.value, cfg.emd_grid); });
      row("KLD", {&gt_dist.error, &pred_dist.error},
          [&] { return kld(*pred_dist.value, *gt_dist.value, cfg.kld_eps); });
      row("NSS", {&fix.error, &pred.error}, [&] { return nss(*pred.value, *fix.value); });
      row("AUC_J", {&fix.error, &pred.error}, [&] { return auc_judd(*pred.value, *fix.value); });
      row("AUC_B", {&fix.error, &pred.error},
          [&] { return auc_borji(*pred.value, *fix.value, cell_seed(options.seed, i, m, 1), cfg.auc_splits); });
      row("sAUC", {&fix.error, &pred.error}, [&] {
        return sauc(*pred.value, *fix.value, pool, cell_seed(options.seed, i, m, 2), cfg.auc_splits);
      });
    }
    return rows;
  });
  return report;
}

EvaluationReport eval_rank(const Manifest& manifest, std::span<const MethodRoot> methods,
                           const HarnessOptions& options)
{
  auto report = new_report(manifest, methods, "rank", kRankMetrics, options);
  const std::size_t n = manifest.entries.size();
  // (image, method) -> loaded gt + predictions for the Corr pool.
  std::vector<std::vector<std::optional<RankImage>>> corr_inputs(n, std::vector<std::optional<RankImage>>(methods.size()));

  report.rows = run_images(n, options, [&](std::size_t i) {
    const auto& entry = manifest.entries[i];
    const auto source = entry.instances.empty() ? entry.gt_mask : entry.instances.front().mask;
    const auto gt_instances = try_load("eval_rank", source, [&] { return load_gt_instances(entry); });
    Loaded<RankMap> gt_ranks;
    if (gt_instances)
    {
      gt_ranks = try_load("eval_rank", source,
                          [&] { return render_rank_map(*gt_instances.value, entry.width, entry.height).map; });
    }
    else
    {
      gt_ranks.error = gt_instances.error;
    }
    const auto gt_mask = try_load("eval_rank", entry.gt_mask, [&] { return load_mask(entry.gt_mask, entry.dims()); });

    std::vector<ReportRow> rows;
    for (std::size_t m = 0; m < methods.size(); ++m)
    {
      const auto& method = methods[m];
      const auto path = prediction_instances_path(method, entry);
      const auto preds = try_load("eval_rank", path, [&] { return load_prediction_instances(path, entry.dims()); });
      auto row = [&](const std::string& metric, std::initializer_list<const std::string*> deps, auto&& f) {
        rows.push_back(metric_row("eval_rank", entry.id, method.name, metric, path, deps, f));
      };
      row("MAE", {&gt_mask.error, &preds.error}, [&] {
        return mae(mask_union(*preds.value, entry.width, entry.height).cast<double>(), *gt_mask.value);
      });
      row("r_MAE", {&gt_ranks.error, &preds.error}, [&] {
        return r_mae(rank_prediction_to_map(*preds.value, entry.width, entry.height), *gt_ranks.value);
      });
      if (gt_instances && preds) corr_inputs[i][m] = RankImage{*gt_instances.value, *preds.value};
    }
    return rows;
  });

  nlohmann::ordered_json excluded = nlohmann::ordered_json::object();
  nlohmann::ordered_json skipped = nlohmann::ordered_json::object();
  for (std::size_t m = 0; m < methods.size(); ++m)
  {
    std::vector<RankImage> images;
    std::size_t missing = 0;
    for (std::size_t i = 0; i < n; ++i)
    {
      if (corr_inputs[i][m]) images.push_back(std::move(*corr_inputs[i][m]));
      else ++missing;
    }
    ReportRow row{"", methods[m].name, "Corr", std::nullopt, {}};
    try
    {
      const CorrPool pool = build_corr_pool(images, options.config.match.iou_threshold);
      excluded[methods[m].name] = pool.unmatched;
      MatchConfig match = options.config.match;
      match.seed = cell_seed(options.seed, std::numeric_limits<std::size_t>::max(), m, 3);
      row.value = corr(pool, match);
    }
    catch (const std::exception& e)
    {
      row.error = error_note("eval_rank", methods[m].root, e);
    }
    skipped[methods[m].name] = missing;
    if (options.strict && !row.error.empty()) throw std::runtime_error("strict mode: " + row.error);
    report.dataset_rows.push_back(std::move(row));
  }
  report.metadata["corr_excluded_unmatched"] = excluded;
  report.metadata["corr_images_unavailable"] = skipped;
  return report;
}

BuildResult build_dataset(const Manifest& manifest, const fs::path& out_dir, const HarnessOptions& options)
{
  validate(options.config);
  const auto& cfg = options.config.builder;
  const std::size_t n = manifest.entries.size();
  std::error_code ec;
  fs::create_directories(out_dir / "fixations", ec);
  fs::create_directories(out_dir / "ranks", ec);
  if (ec) throw Error(ErrorKind::UnwritablePath, out_dir.string() + ": " + ec.message());

  struct EntryWork
  {
    std::vector<InstanceRecord> instances;
    std::vector<std::optional<DelayRecord>> records;
    std::vector<std::string> errors;
    std::optional<fs::path> fixation_map;
  };
  std::vector<EntryWork> work(n);
  BuildResult result;
  result.manifest = manifest;

  parallel_for(n, options.jobs, [&](std::size_t i) {
    const auto& entry = manifest.entries[i];
    auto& w = work[i];
    std::vector<FixationSession> sessions;
    for (const auto& log : entry.fixation_logs)
    {
      try
      {
        sessions.push_back(read_fixation_log(log));
      }
      catch (const std::exception& e)
      {
        w.errors.push_back(error_note("build_dataset", log, e));
      }
    }
    std::vector<fs::path> masks;
    for (const auto& inst : entry.instances) masks.push_back(inst.mask);
    if (masks.empty()) masks.push_back(entry.gt_mask);
    for (std::size_t k = 0; k < masks.size(); ++k)
    {
      InstanceRecord rec;
      rec.id = std::to_string(k);
      std::optional<DelayRecord> delay;
      try
      {
        rec.mask = load_mask(masks[k], entry.dims());
        std::vector<ObserverDelay> outcomes;
        for (const auto& s : sessions) outcomes.push_back(per_observer_delay(s, rec.mask));
        delay = aggregate_instance_delay(outcomes, cfg);
        delay->image_id = entry.id;
        delay->instance_id = rec.id;
      }
      catch (const std::exception& e)
      {
        w.errors.push_back(error_note("build_dataset", masks[k], e));
      }
      w.instances.push_back(std::move(rec));
      w.records.push_back(std::move(delay));
    }
    try
    {
      const double sigma = cfg.sigma.value_or(entry.width / 20.0);
      const auto map = render_fixation_map(sessions, entry.width, entry.height, sigma);
      const fs::path out = out_dir / "fixations" / (entry.id + ".png");
      write_gray_png(out, quantize8(map));
      w.fixation_map = out;
    }
    catch (const std::exception& e)
    {
      w.errors.push_back(error_note("build_dataset", out_dir / "fixations", e));
    }
  });

  // Dataset-global barrier: normalization and binning see every record.
  std::vector<DelayRecord> records;
  std::vector<std::pair<std::size_t, std::size_t>> owners;
  for (std::size_t i = 0; i < n; ++i)
  {
    for (std::size_t k = 0; k < work[i].records.size(); ++k)
    {
      if (!work[i].records[k]) continue;
      records.push_back(*work[i].records[k]);
      owners.emplace_back(i, k);
    }
  }
  std::vector<RankLabel> ranks;
  try
  {
    normalize_delays(records);
    ranks = assign_ranks(records, cfg);
  }
  catch (const std::exception& e)
  {
    result.errors.push_back(error_note("build_dataset", manifest.base_dir, e));
    ranks.clear();
  }
  for (std::size_t r = 0; r < ranks.size(); ++r)
  {
    work[owners[r].first].instances[owners[r].second].rank = ranks[r];
  }

  parallel_for(n, options.jobs, [&](std::size_t i) {
    auto& w = work[i];
    const auto& entry = manifest.entries[i];
    std::vector<InstanceRecord> ranked;
    for (const auto& inst : w.instances)
    {
      if (inst.rank) ranked.push_back(inst);
    }
    if (ranked.size() != w.instances.size()) return;
    try
    {
      auto rendered = render_rank_map(ranked, entry.width, entry.height);
      Image<std::uint8_t> gray = rendered.map.unaryExpr([](std::uint8_t c) { return rank_gray_level(rank_from_code(c)); });
      write_gray_png(out_dir / "ranks" / (entry.id + ".png"), gray);
      for (auto& msg : rendered.warnings) w.errors.push_back("warning: " + entry.id + ": " + msg);
    }
    catch (const std::exception& e)
    {
      w.errors.push_back(error_note("build_dataset", out_dir / "ranks", e));
    }
  });

  for (std::size_t i = 0; i < n; ++i)
  {
    auto& entry = result.manifest.entries[i];
    auto& w = work[i];
    if (entry.instances.empty()) entry.instances.push_back({entry.gt_mask, std::nullopt});
    for (std::size_t k = 0; k < entry.instances.size(); ++k) entry.instances[k].rank = w.instances[k].rank;
    if (w.fixation_map) entry.fixation_map = fs::absolute(*w.fixation_map);
    for (auto& msg : w.errors)
    {
      (msg.rfind("warning: ", 0) == 0 ? result.warnings : result.errors).push_back(std::move(msg));
    }
  }
  result.records = std::move(records);
  result.ranks = std::move(ranks);
  if (result.ranks.size() == result.records.size())
  {
    write_delay_table(out_dir / "delays.csv", result.records, result.ranks);
  }
  save_manifest(out_dir / "manifest.json", result.manifest);
  return result;
}

AttributeRun classify_dataset(const Manifest& manifest, const HarnessOptions& options)
{
  validate(options.config);
  std::vector<std::vector<AttributeRow>> per_entry(manifest.entries.size());
  parallel_for(manifest.entries.size(), options.jobs, [&](std::size_t i) {
    per_entry[i] = classify_attributes(manifest.entries[i], options.config.attributes);
  });
  AttributeRun run;
  for (auto& rows : per_entry)
  {
    for (auto& r : rows)
    {
      if (!r.notes.empty()) ++run.errors;
      if (options.strict && !r.notes.empty()) throw std::runtime_error("strict mode: " + r.notes.front());
      run.rows.push_back(std::move(r));
    }
  }
  return run;
}

std::vector<RankedInstance> manifest_ranks(const Manifest& manifest)
{
  std::vector<RankedInstance> out;
  for (const auto& e : manifest.entries)
  {
    for (std::size_t k = 0; k < e.instances.size(); ++k)
    {
      if (e.instances[k].rank) out.push_back({e.id, std::to_string(k), *e.instances[k].rank});
    }
  }
  return out;
}

}  // namespace camo
