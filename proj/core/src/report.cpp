#include "reqa/report.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "reqa/error.hpp"

namespace reqa {
namespace {

using nlohmann::json;

json bundle_to_json(const MetricBundle& b) {
  json r_at, r_any;
  for (size_t i = 0; i < kRecallPoints.size(); ++i) {
    r_at[std::to_string(kRecallPoints[i])] = b.r_at[i];
    r_any[std::to_string(kRecallPoints[i])] = b.r_at_any[i];
  }
  return json{{"mrr", b.mrr},
              {"r_at", r_at},
              {"r_at_any_hit", r_any},
              {"n_questions", b.n_questions}};
}

MetricBundle bundle_from_json(const json& j) {
  MetricBundle b;
  b.mrr = j.at("mrr").get<double>();
  b.n_questions = j.at("n_questions").get<uint64_t>();
  for (size_t i = 0; i < kRecallPoints.size(); ++i) {
    const std::string key = std::to_string(kRecallPoints[i]);
    b.r_at[i] = j.at("r_at").at(key).get<double>();
    b.r_at_any[i] = j.at("r_at_any_hit").at(key).get<double>();
  }
  return b;
}

json report_to_json(const EvalReport& r) {
  json j = bundle_to_json(r.overall);
  j["granularity"] = r.granularity;
  j["n_candidates"] = r.n_candidates;
  json by_type = json::object();
  for (const auto& [name, bundle] : r.by_type) by_type[name] = bundle_to_json(bundle);
  j["by_type"] = by_type;
  if (!r.clamped.empty()) j["clamped_n"] = r.clamped;
  j["config"] = r.config;
  return j;
}

EvalReport report_from_json(const json& j) {
  EvalReport r;
  r.granularity = j.at("granularity").get<std::string>();
  r.overall = bundle_from_json(j);
  r.n_candidates = j.at("n_candidates").get<uint64_t>();
  // Preserve the canonical type order when rebuilding from the (sorted) JSON.
  for (QuestionType t : kQuestionTypes) {
    const char* name = to_string(t);
    if (j.at("by_type").contains(name))
      r.by_type.emplace_back(name, bundle_from_json(j.at("by_type").at(name)));
  }
  if (j.contains("clamped_n")) r.clamped = j.at("clamped_n").get<std::vector<uint32_t>>();
  for (const auto& [key, value] : j.at("config").items())
    r.config[key] = value.get<std::string>();
  return r;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string system_label(const EvalReport& r) {
  std::string label = "?";
  if (auto it = r.config.find("backend"); it != r.config.end()) label = it->second;
  if (auto it = r.config.find("encoder"); it != r.config.end()) label += "/" + it->second;
  if (auto it = r.config.find("probes"); it != r.config.end()) label += " probes=" + it->second;
  return label;
}

void metric_row(std::string& out, const std::string& head, const MetricBundle& b) {
  out += "| " + head + " | " + fmt(b.mrr);
  for (size_t i = 0; i < kRecallPoints.size(); ++i) out += " | " + fmt(b.r_at[i]);
  for (size_t i = 0; i < kRecallPoints.size(); ++i) out += " | " + fmt(b.r_at_any[i]);
  out += " |\n";
}

const char* kMetricHeader =
    "| system | MRR | R@1 | R@5 | R@10 | any@1 | any@5 | any@10 |\n"
    "|---|---|---|---|---|---|---|---|\n";

const std::string* find_fingerprint(const EvalReport& r) {
  const auto it = r.config.find("task_fingerprint");
  return it == r.config.end() ? nullptr : &it->second;
}

}  // namespace

std::string reports_to_json(const std::vector<EvalReport>& reports) {
  json out;
  out["reports"] = json::array();
  for (const EvalReport& r : reports) out["reports"].push_back(report_to_json(r));
  return out.dump(2) + "\n";
}

void write_report(const std::vector<EvalReport>& reports, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(errc::io_error, "cannot open " + path.string() + " for writing");
  out << reports_to_json(reports);
  if (!out) throw Error(errc::io_error, "short write to " + path.string());
}

std::vector<EvalReport> load_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(errc::io_error, "cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error&) {
    throw Error(errc::parse_error, path.string() + ": malformed JSON");
  }
  std::vector<EvalReport> reports;
  try {
    if (!j.contains("reports") || !j["reports"].is_array())
      throw Error(errc::schema_error, path.string() + ": missing reports array");
    for (const json& r : j["reports"]) reports.push_back(report_from_json(r));
  } catch (const json::exception& e) {
    throw Error(errc::schema_error, path.string() + ": " + e.what());
  }
  return reports;
}

std::string render_report_markdown(const std::vector<EvalReport>& reports) {
  std::string out = "# Retrieval report\n";
  for (const EvalReport& r : reports) {
    out += "\n## " + r.granularity + " (" + system_label(r) + ")\n\n";
    out += std::to_string(r.overall.n_questions) + " questions over " +
           std::to_string(r.n_candidates) + " candidates";
    if (!r.clamped.empty()) {
      out += "; recall points clamped to the pool:";
      for (uint32_t n : r.clamped) out += " " + std::to_string(n);
    }
    out += "\n\n";
    out += kMetricHeader;
    metric_row(out, "overall", r.overall);
    for (const auto& [name, bundle] : r.by_type)
      metric_row(out, name + " (" + std::to_string(bundle.n_questions) + ")", bundle);
  }
  return out;
}

std::string compare_reports(const std::vector<EvalReport>& baseline,
                            const std::vector<EvalReport>& other) {
  if (baseline.empty() || other.empty())
    throw Error(errc::empty_input, "nothing to compare: a report file is empty");

  for (const EvalReport& a : baseline)
    for (const EvalReport& b : other) {
      const std::string* fa = find_fingerprint(a);
      const std::string* fb = find_fingerprint(b);
      if (fa && fb && *fa != *fb)
        throw Error(errc::fingerprint_mismatch,
                    "reports were built from different tasks (" + *fa + " vs " + *fb + ")");
    }

  std::string out = "# Report comparison\n";
  std::vector<bool> used(other.size(), false);
  size_t matched = 0;
  for (const EvalReport& a : baseline) {
    // Prefer the same backend at the same granularity, else any unused
    // report of that granularity (the cross-system comparison case).
    size_t pick = other.size();
    for (size_t i = 0; i < other.size(); ++i)
      if (!used[i] && other[i].granularity == a.granularity &&
          system_label(other[i]) == system_label(a)) {
        pick = i;
        break;
      }
    if (pick == other.size())
      for (size_t i = 0; i < other.size(); ++i)
        if (!used[i] && other[i].granularity == a.granularity) {
          pick = i;
          break;
        }
    if (pick == other.size()) continue;
    used[pick] = true;
    ++matched;
    const EvalReport& b = other[pick];

    out += "\n## " + a.granularity + "\n\n";
    out += kMetricHeader;
    metric_row(out, "A: " + system_label(a), a.overall);
    metric_row(out, "B: " + system_label(b), b.overall);
    MetricBundle delta;
    delta.mrr = b.overall.mrr - a.overall.mrr;
    for (size_t i = 0; i < kRecallPoints.size(); ++i) {
      delta.r_at[i] = b.overall.r_at[i] - a.overall.r_at[i];
      delta.r_at_any[i] = b.overall.r_at_any[i] - a.overall.r_at_any[i];
    }
    metric_row(out, "delta (B-A)", delta);
  }
  if (matched == 0)
    throw Error(errc::invalid_argument, "no reports share a granularity; nothing to compare");
  return out;
}

}  // namespace reqa
