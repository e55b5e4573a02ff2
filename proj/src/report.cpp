#include "camo/report.hpp"

#include "camo/text.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace camo
{
namespace
{

using nlohmann::ordered_json;

std::string sanitize(std::string s)
{
  for (auto& c : s)
  {
    if (c == ',') c = ';';
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

std::string fixed(double v, int digits)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

ordered_json row_to_json(const ReportRow& r)
{
  ordered_json j;
  j["image_id"] = r.image_id;
  j["method"] = r.method;
  j["metric"] = r.metric;
  j["value"] = r.value ? ordered_json(*r.value) : ordered_json(nullptr);
  j["error"] = r.error;
  return j;
}

ReportRow row_from_json(const ordered_json& j)
{
  ReportRow r;
  r.image_id = j.at("image_id").get<std::string>();
  r.method = j.at("method").get<std::string>();
  r.metric = j.at("metric").get<std::string>();
  if (!j.at("value").is_null()) r.value = j.at("value").get<double>();
  r.error = j.at("error").get<std::string>();
  return r;
}

}  // namespace

std::vector<Aggregate> EvaluationReport::aggregates() const
{
  std::map<std::pair<std::string, std::string>, std::pair<double, std::size_t>> sums;
  std::map<std::pair<std::string, std::string>, std::optional<double>> dataset_level;
  for (const auto& r : rows)
  {
    auto& s = sums[{r.method, r.metric}];
    if (r.error.empty() && r.value)
    {
      s.first += *r.value;
      ++s.second;
    }
  }
  for (const auto& r : dataset_rows)
  {
    dataset_level[{r.method, r.metric}] = r.error.empty() ? r.value : std::nullopt;
  }

  std::vector<Aggregate> out;
  for (const auto& method : methods)
  {
    for (const auto& metric : metrics)
    {
      Aggregate a{method, metric, std::nullopt, 0};
      if (auto d = dataset_level.find({method, metric}); d != dataset_level.end())
      {
        a.mean = d->second;
        a.count = d->second ? 1 : 0;
      }
      else if (auto s = sums.find({method, metric}); s != sums.end() && s->second.second > 0)
      {
        a.mean = s->second.first / static_cast<double>(s->second.second);
        a.count = s->second.second;
      }
      out.push_back(a);
    }
  }
  return out;
}

std::size_t EvaluationReport::error_count() const
{
  std::size_t n = 0;
  for (const auto& r : rows) n += r.error.empty() ? 0 : 1;
  for (const auto& r : dataset_rows) n += r.error.empty() ? 0 : 1;
  return n;
}

std::string error_note(std::string_view operation, const std::filesystem::path& path, const std::exception& e)
{
  std::string what = e.what();
  if (!dynamic_cast<const Error*>(&e)) what = "Unknown: " + what;
  return sanitize(std::string(operation) + " [" + path.generic_string() + "] " + what);
}

std::string report_csv(const EvaluationReport& report)
{
  std::ostringstream out;
  out << "image_id,method,metric,value,error\n";
  for (const auto& r : report.rows)
  {
    out << r.image_id << ',' << r.method << ',' << r.metric << ',' << (r.value ? format_double(*r.value) : "") << ','
        << sanitize(r.error) << '\n';
  }
  return out.str();
}

std::string report_markdown(const EvaluationReport& report)
{
  std::ostringstream out;
  out << "| Method |";
  for (const auto& m : report.metrics) out << ' ' << m << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < report.metrics.size(); ++i) out << "---|";
  out << '\n';
  const auto agg = report.aggregates();
  std::size_t k = 0;
  for (const auto& method : report.methods)
  {
    out << "| " << method << " |";
    for (std::size_t i = 0; i < report.metrics.size(); ++i, ++k)
    {
      out << ' ' << (agg[k].mean ? fixed(*agg[k].mean, 3) : "-") << " |";
    }
    out << '\n';
  }
  return out.str();
}

ordered_json report_to_json(const EvaluationReport& report)
{
  ordered_json j;
  j["task"] = report.task;
  j["dataset"] = report.dataset;
  j["methods"] = report.methods;
  j["metrics"] = report.metrics;
  j["metadata"] = report.metadata;
  j["rows"] = ordered_json::array();
  for (const auto& r : report.rows) j["rows"].push_back(row_to_json(r));
  j["dataset_rows"] = ordered_json::array();
  for (const auto& r : report.dataset_rows) j["dataset_rows"].push_back(row_to_json(r));
  j["aggregates"] = ordered_json::array();
  for (const auto& a : report.aggregates())
  {
    j["aggregates"].push_back({{"method", a.method},
                               {"metric", a.metric},
                               {"mean", a.mean ? ordered_json(*a.mean) : ordered_json(nullptr)},
                               {"count", a.count}});
  }
  j["errors"] = report.error_count();
  return j;
}

EvaluationReport report_from_json(const ordered_json& doc)
{
  EvaluationReport r;
  try
  {
    r.task = doc.at("task").get<std::string>();
    r.dataset = doc.at("dataset").get<std::string>();
    r.methods = doc.at("methods").get<std::vector<std::string>>();
    r.metrics = doc.at("metrics").get<std::vector<std::string>>();
    r.metadata = doc.at("metadata");
    for (const auto& row : doc.at("rows")) r.rows.push_back(row_from_json(row));
    for (const auto& row : doc.at("dataset_rows")) r.dataset_rows.push_back(row_from_json(row));
  }
  catch (const nlohmann::json::exception& e)
  {
    throw Error(ErrorKind::ParseError, std::string("report: ") + e.what());
  }
  return r;
}

EvaluationReport load_report(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::FileMissing, path.string());
  try
  {
    return report_from_json(ordered_json::parse(in));
  }
  catch (const nlohmann::json::exception& e)
  {
    throw Error(ErrorKind::ParseError, path.string() + ": " + e.what());
  }
}

std::vector<ReportRow> read_report_csv(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::FileMissing, path.string());
  std::string line;
  std::getline(in, line);
  if (trim(line) != "image_id,method,metric,value,error") throw Error(ErrorKind::ParseError, path.string());
  std::vector<ReportRow> rows;
  while (std::getline(in, line))
  {
    if (trim(line).empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 5) throw Error(ErrorKind::ParseError, path.string() + ": expected 5 fields");
    ReportRow r{f[0], f[1], f[2], std::nullopt, f[4]};
    if (!f[3].empty()) r.value = std::stod(f[3]);
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::UnwritablePath, path.string());
  out << text;
  if (!out) throw Error(ErrorKind::UnwritablePath, path.string());
}

void emit_report(const EvaluationReport& report, const std::filesystem::path& dir, const std::string& stem,
                 unsigned formats)
{
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::UnwritablePath, dir.string() + ": " + ec.message());
  if (formats & kCsv) write_text(dir / (stem + ".csv"), report_csv(report));
  if (formats & kJson) write_text(dir / (stem + ".json"), report_to_json(report).dump(2) + "\n");
  if (formats & kMarkdown) write_text(dir / (stem + ".md"), report_markdown(report));
}

std::optional<bool> attribute_flag(const AttributeRow& row, std::string_view name)
{
  if (name == "BM") return row.bm;
  if (name == "CB") return row.cb;
  if (name == "CP") return row.cp;
  if (name == "DC") return row.dc;
  if (name == "MM") return row.mm;
  if (name == "OC") return row.oc;
  if (name == "SA") return row.sa;
  if (name == "SO") return row.so;
  throw Error(ErrorKind::InvalidInput, "unknown attribute '" + std::string(name) + "'");
}

AttributeBreakdown attr_breakdown(const EvaluationReport& report, std::span<const AttributeRow> attributes)
{
  AttributeBreakdown out;
  for (const char* name : kAttributeNames)
  {
    std::set<std::string> images;
    for (const auto& a : attributes)
    {
      if (attribute_flag(a, name).value_or(false)) images.insert(a.image_id);
    }
    if (images.empty())
    {
      out.notes.push_back(std::string(name) + ": no image carries this attribute");
      continue;
    }
    for (const auto& method : report.methods)
    {
      for (const auto& metric : report.metrics)
      {
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& r : report.rows)
        {
          if (r.method != method || r.metric != metric || !r.error.empty() || !r.value) continue;
          if (!images.count(r.image_id)) continue;
          sum += *r.value;
          ++n;
        }
        if (n > 0) out.rows.push_back({name, method, metric, sum / static_cast<double>(n), n});
      }
    }
  }
  return out;
}

RankHistogram rank_histogram(std::span<const RankedInstance> ranks, std::span<const AttributeRow> attributes)
{
  RankHistogram h{};
  std::map<std::pair<std::string, std::string>, RankLabel> lookup;
  for (const auto& r : ranks) lookup[{r.image_id, r.instance_id}] = r.rank;
  for (const auto& a : attributes)
  {
    const auto it = lookup.find({a.image_id, a.instance_id});
    if (it == lookup.end() || it->second == RankLabel::BG) continue;
    for (std::size_t k = 0; k < kAttributeNames.size(); ++k)
    {
      if (attribute_flag(a, kAttributeNames[k]).value_or(false)) ++h[k][code(it->second) - 1];
    }
  }
  return h;
}

std::string breakdown_csv(const AttributeBreakdown& breakdown)
{
  std::ostringstream out;
  out << "attribute,method,metric,mean,images\n";
  for (const auto& r : breakdown.rows)
  {
    out << r.attribute << ',' << r.method << ',' << r.metric << ',' << format_double(r.mean) << ',' << r.images
        << '\n';
  }
  return out.str();
}

std::string histogram_csv(const RankHistogram& histogram)
{
  std::ostringstream out;
  out << "attribute,ES,M1,M2,M3,HD\n";
  for (std::size_t k = 0; k < kAttributeNames.size(); ++k)
  {
    out << kAttributeNames[k];
    for (auto c : histogram[k]) out << ',' << c;
    out << '\n';
  }
  return out.str();
}

}  // namespace camo
