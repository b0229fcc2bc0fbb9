#include "reqa/pipeline.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include <json.hpp>

#include "reqa/bm25.hpp"
#include "reqa/corpus.hpp"
#include "reqa/error.hpp"
#include "reqa/hashing.hpp"
#include "reqa/report.hpp"

namespace reqa {
namespace {

using nlohmann::json;

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(errc::io_error, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error(errc::io_error, "short write to " + path.string());
}

void write_status(const std::filesystem::path& dir, const RunConfig& config,
                  const std::string& status, const Error* error) {
  json j{{"status", status}, {"config", json::parse(config_to_json(config))}};
  if (error) j["error"] = {{"code", to_string(error->code())}, {"message", error->detail()}};
  write_text(dir / "pipeline.json", j.dump(2) + "\n");
}

std::string fingerprint_hex(uint64_t fp) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fp));
  return buf;
}

PipelineResult run_stages(const RunConfig& config) {
  const std::filesystem::path out_dir = config.out_dir;
  const std::filesystem::path input = resolve_input(config.input);

  Corpus corpus;
  if (config.format == "squad") {
    corpus = load_squad_file(input);
  } else if (config.format == "nq-simplified") {
    corpus = load_nq_file(input).corpus;
  } else {
    throw Error(errc::invalid_argument, "unknown format '" + config.format + "'");
  }

  PipelineResult result;
  result.task_dir = out_dir / "task";
  Task task = build_task(corpus);
  save_task(task, result.task_dir);

  result.stats = compute_stats(task, config.threads);
  write_text(out_dir / "stats.json", stats_to_json(result.stats));
  write_text(out_dir / "stats.md", stats_to_markdown(result.stats));

  EmbeddingMatrix answers, questions;
  if (config.encoder == "hash-tfidf") {
    HashEncoderConfig enc;
    enc.dim = config.dim;
    enc.alpha = config.alpha;
    if (config.seed != 0) enc.seed = mix64(config.seed ^ 0x656e636f64657231ULL);
    const IdfTable idf = fit_idf(task, enc);
    answers = encode_all_answers(task, idf, enc, config.threads);
    questions = encode_all_questions(task, idf, enc, config.threads);
    write_matrix(answers, out_dir / "answers.rqav");
    write_matrix(questions, out_dir / "questions.rqav");
  } else if (config.encoder == "external") {
    if (config.answers_vec.empty() || config.questions_vec.empty())
      throw Error(errc::invalid_argument,
                  "external encoder needs --answers-vec and --questions-vec");
    answers = read_matrix(resolve_input(config.answers_vec));
    questions = read_matrix(resolve_input(config.questions_vec));
  } else {
    throw Error(errc::invalid_argument, "unknown encoder '" + config.encoder + "'");
  }

  EvalOptions options;
  options.threads = config.threads;
  IvfIndex ivf;
  if (config.use_ivf) {
    uint32_t k = config.clusters;
    if (k == 0)
      k = static_cast<uint32_t>(
          std::lround(std::sqrt(static_cast<double>(answers.rows()))));
    k = std::max<uint32_t>(1, std::min<uint32_t>(k, static_cast<uint32_t>(answers.rows())));
    const uint64_t seed =
        config.seed != 0 ? mix64(config.seed ^ 0x6976662d696e6974ULL) : kIvfSeed;
    ivf = build_ivf(answers, k, seed, config.threads);
    save_ivf(ivf, out_dir / "ivf.bin");
    options.ann = &ivf;
    options.probes = config.probes;
  }

  result.dense = evaluate_dense(task, answers, questions, options);

  const std::string config_fp = fingerprint_hex(config_fingerprint(config));
  result.dense.sentence.config["encoder"] = config.encoder;
  result.dense.sentence.config["config_fingerprint"] = config_fp;
  result.dense.paragraph.config["encoder"] = config.encoder;
  result.dense.paragraph.config["config_fingerprint"] = config_fp;

  std::vector<EvalReport> reports{result.dense.sentence, result.dense.paragraph};

  if (config.use_bm25) {
    std::vector<std::string> contexts;
    contexts.reserve(task.paragraphs.size());
    for (const ParagraphEntry& p : task.paragraphs) contexts.push_back(p.context);
    const Bm25Index bm25 = Bm25Index::build(contexts, {config.k1, config.b});
    save_bm25(bm25, out_dir / "bm25.bin");
    EvalReport report = evaluate_bm25(task, bm25, config.threads);
    report.config["config_fingerprint"] = config_fp;
    result.bm25 = std::move(report);
    reports.push_back(*result.bm25);
  }

  result.report_path = out_dir / "report.json";
  write_report(reports, result.report_path);
  write_text(out_dir / "report.md", render_report_markdown(reports));
  return result;
}

}  // namespace

RunConfig config_from_json(const std::string& text, RunConfig base) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error&) {
    throw Error(errc::parse_error, "config: malformed JSON");
  }
  if (!j.is_object()) throw Error(errc::schema_error, "config: expected a JSON object");

  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "input") base.input = value.get<std::string>();
      else if (key == "format") base.format = value.get<std::string>();
      else if (key == "out_dir") base.out_dir = value.get<std::string>();
      else if (key == "encoder") base.encoder = value.get<std::string>();
      else if (key == "answers_vec") base.answers_vec = value.get<std::string>();
      else if (key == "questions_vec") base.questions_vec = value.get<std::string>();
      else if (key == "dim") base.dim = value.get<uint32_t>();
      else if (key == "alpha") base.alpha = value.get<double>();
      else if (key == "seed") base.seed = value.get<uint64_t>();
      else if (key == "use_ivf") base.use_ivf = value.get<bool>();
      else if (key == "clusters") base.clusters = value.get<uint32_t>();
      else if (key == "probes") base.probes = value.get<uint32_t>();
      else if (key == "use_bm25") base.use_bm25 = value.get<bool>();
      else if (key == "k1") base.k1 = value.get<double>();
      else if (key == "b") base.b = value.get<double>();
      else if (key == "threads") base.threads = value.get<unsigned>();
      else throw Error(errc::schema_error, "config: unknown key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw Error(errc::schema_error, std::string("config: ") + e.what());
  }
  return base;
}

std::string config_to_json(const RunConfig& c) {
  json j{
      {"input", c.input},
      {"format", c.format},
      {"out_dir", c.out_dir},
      {"encoder", c.encoder},
      {"answers_vec", c.answers_vec},
      {"questions_vec", c.questions_vec},
      {"dim", c.dim},
      {"alpha", c.alpha},
      {"seed", c.seed},
      {"use_ivf", c.use_ivf},
      {"clusters", c.clusters},
      {"probes", c.probes},
      {"use_bm25", c.use_bm25},
      {"k1", c.k1},
      {"b", c.b},
      {"threads", c.threads},
  };
  return j.dump(2) + "\n";
}

uint64_t config_fingerprint(const RunConfig& c) {
  Fingerprint fp;
  // threads and out_dir are excluded: neither may change results.
  fp.add(c.input);
  fp.add(c.format);
  fp.add(c.encoder);
  fp.add(c.answers_vec);
  fp.add(c.questions_vec);
  fp.add(c.dim);
  fp.add(std::bit_cast<uint64_t>(c.alpha));
  fp.add(c.seed);
  fp.add(static_cast<uint64_t>(c.use_ivf));
  fp.add(c.clusters);
  fp.add(c.probes);
  fp.add(static_cast<uint64_t>(c.use_bm25));
  fp.add(std::bit_cast<uint64_t>(c.k1));
  fp.add(std::bit_cast<uint64_t>(c.b));
  return fp.value();
}

std::filesystem::path resolve_input(const std::string& path) {
  if (path.empty()) throw Error(errc::invalid_argument, "no input path given");
  std::filesystem::path p = path;
  if (std::filesystem::exists(p)) return p;
  if (const char* dir = std::getenv("REQA_DATA_DIR")) {
    const std::filesystem::path candidate = std::filesystem::path(dir) / p;
    if (std::filesystem::exists(candidate)) return candidate;
  }
  throw Error(errc::io_error, "input not found: " + path);
}

PipelineResult run_pipeline(const RunConfig& config) {
  if (config.out_dir.empty()) throw Error(errc::invalid_argument, "no output directory given");
  std::filesystem::create_directories(config.out_dir);
  write_status(config.out_dir, config, "running", nullptr);
  try {
    PipelineResult result = run_stages(config);
    write_status(config.out_dir, config, "complete", nullptr);
    return result;
  } catch (const Error& e) {
    write_status(config.out_dir, config, "failed", &e);
    throw;
  } catch (const std::exception& e) {
    const Error wrapped(errc::io_error, e.what());
    write_status(config.out_dir, config, "failed", &wrapped);
    throw;
  }
}

}  // namespace reqa
