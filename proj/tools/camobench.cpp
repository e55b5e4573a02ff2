#include "camo/attention.hpp"
#include "camo/harness.hpp"
#include "camo/maps.hpp"
#include "camo/text.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace fs = std::filesystem;
using namespace camo;

namespace
{

struct CommonArgs
{
  std::string manifest;
  std::vector<std::string> pred_roots;
  std::string out = ".";
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string config;
  bool strict = false;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool with_preds)
{
  cmd->add_option("--manifest", a.manifest, "Dataset manifest JSON")->required();
  if (with_preds) cmd->add_option("--pred-root", a.pred_roots, "Prediction root as name=path")->required();
  cmd->add_option("--out", a.out, "Output directory");
  cmd->add_option("--seed", a.seed, "Run seed");
  cmd->add_option("--jobs", a.jobs, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--config", a.config, "Benchmark configuration JSON");
  cmd->add_flag("--strict", a.strict, "Abort on the first error");
}

HarnessOptions options_from(const CommonArgs& a)
{
  HarnessOptions o;
  o.seed = a.seed;
  o.jobs = a.jobs;
  o.strict = a.strict;
  if (!a.config.empty()) o.config = load_bench_config(a.config);
  return o;
}

std::vector<MethodRoot> roots_from(const CommonArgs& a)
{
  std::vector<MethodRoot> roots;
  for (const auto& s : a.pred_roots) roots.push_back(parse_method_root(s));
  return roots;
}

int finish_report(const EvaluationReport& report, const CommonArgs& a)
{
  emit_report(report, a.out, report.task);
  std::cout << report_markdown(report);
  for (const auto& r : report.rows)
  {
    if (!r.error.empty()) std::cerr << r.image_id << ' ' << r.method << ' ' << r.metric << ": " << r.error << '\n';
  }
  for (const auto& r : report.dataset_rows)
  {
    if (!r.error.empty()) std::cerr << r.method << ' ' << r.metric << ": " << r.error << '\n';
  }
  return report.error_count() > 0 ? 1 : 0;
}

/// Min-max rescaled PNG plus a sidecar with the raw range.
void write_attention(const ScalarMap& map, const fs::path& out)
{
  const double lo = map.minCoeff(), hi = map.maxCoeff();
  const ScalarMap scaled = hi > lo ? ScalarMap((map - lo) / (hi - lo)) : ScalarMap(ScalarMap::Zero(map.rows(), map.cols()));
  write_gray_png(out, quantize8(scaled));
  fs::path sidecar = out;
  sidecar.replace_extension(".json");
  nlohmann::ordered_json j{{"min", lo}, {"max", hi}, {"width", map.cols()}, {"height", map.rows()}};
  write_text(sidecar, j.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Camouflage benchmark toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  CommonArgs build_args, seg_args, fix_args, rank_args, attr_args;
  auto* build = app.add_subcommand("build-dataset", "Fixation logs to delays, ranks and maps");
  add_common(build, build_args, false);
  auto* seg = app.add_subcommand("eval-seg", "S, F, E and MAE per image and method");
  add_common(seg, seg_args, true);
  auto* fix = app.add_subcommand("eval-fix", "Fixation-prediction metrics");
  add_common(fix, fix_args, true);
  auto* rank = app.add_subcommand("eval-rank", "MAE, r_MAE and Corr");
  add_common(rank, rank_args, true);
  auto* attrs = app.add_subcommand("attrs", "Camouflage attribute flags");
  add_common(attrs, attr_args, false);

  std::string report_path, attr_csv, report_manifest, report_out = ".";
  auto* rep = app.add_subcommand("report", "Attribute breakdown and rank histogram");
  rep->add_option("--report", report_path, "Report JSON from an eval-* run");
  rep->add_option("--attrs", attr_csv, "Attribute CSV")->required();
  rep->add_option("--manifest", report_manifest, "Manifest with gt instance ranks");
  rep->add_option("--out", report_out, "Output directory");

  std::string seg_map, loc_map, rank_map, gt_mask, attention_out = "attention.png";
  bool literal = false;
  auto* att = app.add_subcommand("attention", "Attention-map visualizations");
  att->add_option("--seg", seg_map, "Segmentation map PNG");
  att->add_option("--loc", loc_map, "Localization map PNG");
  att->add_option("--rank", rank_map, "Rank map PNG (gray codes)");
  att->add_option("--out", attention_out, "Output PNG");
  att->add_flag("--attr-literal", literal, "Literal indicator form of the ranking attention");

  CLI11_PARSE(app, argc, argv);

  try
  {
    if (*build)
    {
      const auto m = load_manifest(build_args.manifest);
      const auto result = build_dataset(m, build_args.out, options_from(build_args));
      for (const auto& w : result.warnings) std::cerr << w << '\n';
      for (const auto& e : result.errors) std::cerr << e << '\n';
      std::cout << result.records.size() << " instances ranked\n";
      return result.errors.empty() ? 0 : 1;
    }
    if (*seg) return finish_report(eval_seg(load_manifest(seg_args.manifest), roots_from(seg_args), options_from(seg_args)), seg_args);
    if (*fix) return finish_report(eval_fix(load_manifest(fix_args.manifest), roots_from(fix_args), options_from(fix_args)), fix_args);
    if (*rank)
    {
      return finish_report(eval_rank(load_manifest(rank_args.manifest), roots_from(rank_args), options_from(rank_args)),
                           rank_args);
    }
    if (*attrs)
    {
      const auto run = classify_dataset(load_manifest(attr_args.manifest), options_from(attr_args));
      fs::create_directories(attr_args.out);
      write_attribute_csv(fs::path(attr_args.out) / "attributes.csv", run.rows);
      for (const auto& r : run.rows)
      {
        for (const auto& n : r.notes) std::cerr << r.image_id << '/' << r.instance_id << ": " << n << '\n';
      }
      return run.errors > 0 ? 1 : 0;
    }
    if (*rep)
    {
      const auto rows = read_attribute_csv(attr_csv);
      fs::create_directories(report_out);
      if (!report_path.empty())
      {
        const auto report = load_report(report_path);
        const auto breakdown = attr_breakdown(report, rows);
        write_text(fs::path(report_out) / (report.task + "_attributes.csv"), breakdown_csv(breakdown));
        for (const auto& n : breakdown.notes) std::cerr << n << '\n';
      }
      if (!report_manifest.empty())
      {
        const auto ranks = manifest_ranks(load_manifest(report_manifest));
        write_text(fs::path(report_out) / "rank_histogram.csv", histogram_csv(rank_histogram(ranks, rows)));
      }
      return 0;
    }
    if (*att)
    {
      if (!rank_map.empty())
      {
        const auto gray = read_gray_png(rank_map);
        RankMap codes = gray.samples.unaryExpr([](std::uint16_t v) {
          return static_cast<std::uint8_t>(code(rank_from_gray_level(static_cast<std::uint8_t>(v))));
        });
        const auto mode = literal ? RankingAttentionMode::Literal : RankingAttentionMode::Graded;
        write_attention(ranking_attention(codes, mode), attention_out);
        return 0;
      }
      if (seg_map.empty() || loc_map.empty()) throw Error(ErrorKind::InvalidConfig, "attention needs --seg and --loc, or --rank");
      const auto s = load_scalar_map(seg_map);
      const auto l = load_scalar_map(loc_map, dims_of(s));
      write_attention(reverse_attention(s, l), attention_out);
      return 0;
    }
  }
  catch (const std::exception& e)
  {
    std::cerr << "camobench: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
