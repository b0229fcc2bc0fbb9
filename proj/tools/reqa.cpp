// reqa: build sentence-level answer-retrieval tasks from reading-
// comprehension corpora, encode and index them, and score retrieval runs.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "reqa/corpus.hpp"
#include "reqa/embedding.hpp"
#include "reqa/error.hpp"
#include "reqa/evaluator.hpp"
#include "reqa/hashing.hpp"
#include "reqa/ivf.hpp"
#include "reqa/pipeline.hpp"
#include "reqa/report.hpp"
#include "reqa/segmenter.hpp"
#include "reqa/stats.hpp"
#include "reqa/task.hpp"

namespace {

using nlohmann::json;

struct Global {
  unsigned threads = 0;
  uint64_t seed = 0;
};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw reqa::Error(reqa::errc::io_error, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw reqa::Error(reqa::errc::io_error, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw reqa::Error(reqa::errc::io_error, "short write to " + path.string());
}

reqa::Corpus load_corpus(const std::string& path, const std::string& format, bool quiet = false) {
  const auto resolved = reqa::resolve_input(path);
  if (format == "squad") return reqa::load_squad_file(resolved);
  if (format == "nq-simplified") {
    reqa::NqFilterResult result = reqa::load_nq_file(resolved);
    if (!quiet) {
      const reqa::NqFilterSummary& s = result.summary;
      std::cerr << json{{"records_in", s.records_in},
                        {"retained", s.retained},
                        {"dropped_multi_span", s.dropped_multi_span},
                        {"dropped_no_span", s.dropped_no_span},
                        {"dropped_block_type", s.dropped_block_type},
                        {"dropped_missing_block", s.dropped_missing_block}}
                       .dump()
                << "\n";
    }
    return std::move(result.corpus);
  }
  throw reqa::Error(reqa::errc::invalid_argument, "unknown format '" + format + "'");
}

// ---- convert ----------------------------------------------------------

struct ConvertArgs {
  std::string format = "squad";
  std::string in, out;
};

void run_convert(const ConvertArgs& args) {
  const reqa::Corpus corpus = load_corpus(args.in, args.format);
  write_file(args.out, reqa::to_squad_json(corpus));
  std::cerr << "wrote " << args.out << " (" << corpus.question_count() << " questions, "
            << corpus.paragraph_count() << " paragraphs)\n";
}

// ---- segment ----------------------------------------------------------

struct SegmentArgs {
  std::string in;
  bool show_offsets = false;
};

void run_segment(const SegmentArgs& args) {
  const std::string text = read_file(reqa::resolve_input(args.in));
  for (const reqa::SentenceSpan& span : reqa::split_sentences(text)) {
    if (args.show_offsets)
      std::cout << json{{"start", span.start}, {"end", span.end}, {"text", span.text}}.dump()
                << "\n";
    else
      std::cout << span.text << "\n";
  }
}

// ---- index build ------------------------------------------------------

struct IndexBuildArgs {
  std::string corpus;
  std::string format = "squad";
  std::string out;
};

void run_index_build(const IndexBuildArgs& args) {
  const reqa::Task task = reqa::build_task(load_corpus(args.corpus, args.format));
  reqa::save_task(task, args.out);
  std::cerr << "task " << task.fingerprint_hex() << ": " << task.candidates.size()
            << " candidates, " << task.questions.size() << " questions, "
            << task.paragraphs.size() << " paragraphs -> " << args.out << "\n";
}

// ---- index encode -----------------------------------------------------

struct IndexEncodeArgs {
  std::string task;
  std::string encoder = "hash-tfidf";
  uint32_t dim = 512;
  double alpha = 0.75;
  std::string answers_vec, questions_vec;
  std::string out;
};

void run_index_encode(const IndexEncodeArgs& args, const Global& global) {
  const reqa::Task task = reqa::load_task(args.task);
  if (args.encoder == "hash-tfidf") {
    reqa::HashEncoderConfig config;
    config.dim = args.dim;
    config.alpha = args.alpha;
    if (global.seed != 0) config.seed = reqa::mix64(global.seed ^ 0x656e636f64657231ULL);
    const reqa::IdfTable idf = reqa::fit_idf(task, config);
    const auto answers = reqa::encode_all_answers(task, idf, config, global.threads);
    const auto questions = reqa::encode_all_questions(task, idf, config, global.threads);
    std::filesystem::create_directories(args.out);
    reqa::write_matrix(answers, std::filesystem::path(args.out) / "answers.rqav");
    reqa::write_matrix(questions, std::filesystem::path(args.out) / "questions.rqav");
    std::cerr << "encoded " << answers.rows() << " answers and " << questions.rows()
              << " questions at dim " << args.dim << " -> " << args.out << "\n";
  } else if (args.encoder == "external") {
    if (args.answers_vec.empty() || args.questions_vec.empty())
      throw reqa::Error(reqa::errc::invalid_argument,
                        "external encoder needs --answers-vec and --questions-vec");
    const auto answers = reqa::read_matrix(reqa::resolve_input(args.answers_vec));
    const auto questions = reqa::read_matrix(reqa::resolve_input(args.questions_vec));
    if (answers.rows() != task.candidates.size())
      throw reqa::Error(reqa::errc::manifest_mismatch,
                        "answer vectors hold " + std::to_string(answers.rows()) + " rows for " +
                            std::to_string(task.candidates.size()) + " candidates");
    if (questions.rows() != task.questions.size())
      throw reqa::Error(reqa::errc::manifest_mismatch,
                        "question vectors hold " + std::to_string(questions.rows()) + " rows for " +
                            std::to_string(task.questions.size()) + " questions");
    std::cerr << "external vectors align with task " << task.fingerprint_hex() << "\n";
  } else {
    throw reqa::Error(reqa::errc::invalid_argument, "unknown encoder '" + args.encoder + "'");
  }
}

// ---- index bm25 -------------------------------------------------------

struct IndexBm25Args {
  std::string corpus;
  std::string format = "squad";
  std::string task;
  double k1 = 1.2, b = 0.75;
  std::string out;
};

void run_index_bm25(const IndexBm25Args& args) {
  std::vector<std::string> contexts;
  if (!args.task.empty()) {
    const reqa::Task task = reqa::load_task(args.task);
    contexts.reserve(task.paragraphs.size());
    for (const reqa::ParagraphEntry& p : task.paragraphs) contexts.push_back(p.context);
  } else if (!args.corpus.empty()) {
    const reqa::Corpus corpus = load_corpus(args.corpus, args.format);
    for (const reqa::Article& a : corpus.articles)
      for (const reqa::Paragraph& p : a.paragraphs) contexts.push_back(p.context);
  } else {
    throw reqa::Error(reqa::errc::invalid_argument, "need --corpus or --task");
  }
  const reqa::Bm25Index index = reqa::Bm25Index::build(contexts, {args.k1, args.b});
  reqa::save_bm25(index, args.out);
  std::cerr << "indexed " << index.document_count() << " paragraphs (avg length "
            << index.average_length() << ") -> " << args.out << "\n";
}

// ---- index ivf --------------------------------------------------------

struct IndexIvfArgs {
  std::string vectors;
  uint32_t clusters = 0;
  std::string out;
};

void run_index_ivf(const IndexIvfArgs& args, const Global& global) {
  const reqa::EmbeddingMatrix answers = reqa::read_matrix(reqa::resolve_input(args.vectors));
  uint32_t k = args.clusters;
  if (k == 0)
    k = static_cast<uint32_t>(std::lround(std::sqrt(static_cast<double>(answers.rows()))));
  k = std::max<uint32_t>(1, std::min<uint32_t>(k, static_cast<uint32_t>(answers.rows())));
  const uint64_t seed =
      global.seed != 0 ? reqa::mix64(global.seed ^ 0x6976662d696e6974ULL) : reqa::kIvfSeed;
  const reqa::IvfIndex index = reqa::build_ivf(answers, k, seed, global.threads);
  reqa::save_ivf(index, args.out);
  std::cerr << "ivf over " << answers.rows() << " rows: " << k << " clusters, default probes "
            << index.default_probes << " -> " << args.out << "\n";
}

// ---- eval -------------------------------------------------------------

struct EvalArgs {
  std::string task;
  std::string answers_vec, questions_vec;
  bool ann = false;
  std::string ivf_path;
  uint32_t clusters = 0;
  uint32_t probes = 0;
  std::string bm25_path;
  std::string out;
};

void run_eval(const EvalArgs& args, const Global& global) {
  const reqa::Task task = reqa::load_task(args.task);
  const auto answers = reqa::read_matrix(reqa::resolve_input(args.answers_vec));
  const auto questions = reqa::read_matrix(reqa::resolve_input(args.questions_vec));

  reqa::EvalOptions options;
  options.threads = global.threads;
  reqa::IvfIndex ivf;
  if (args.ann) {
    if (!args.ivf_path.empty()) {
      ivf = reqa::load_ivf(reqa::resolve_input(args.ivf_path));
    } else {
      uint32_t k = args.clusters;
      if (k == 0)
        k = static_cast<uint32_t>(std::lround(std::sqrt(static_cast<double>(answers.rows()))));
      k = std::max<uint32_t>(1, std::min<uint32_t>(k, static_cast<uint32_t>(answers.rows())));
      const uint64_t seed =
          global.seed != 0 ? reqa::mix64(global.seed ^ 0x6976662d696e6974ULL) : reqa::kIvfSeed;
      ivf = reqa::build_ivf(answers, k, seed, global.threads);
    }
    options.ann = &ivf;
    options.probes = args.probes;
  }

  const reqa::EvalRun run = reqa::evaluate_dense(task, answers, questions, options);
  std::vector<reqa::EvalReport> reports{run.sentence, run.paragraph};
  if (!args.bm25_path.empty()) {
    const reqa::Bm25Index bm25 = reqa::load_bm25(reqa::resolve_input(args.bm25_path));
    reports.push_back(reqa::evaluate_bm25(task, bm25, global.threads));
  }
  reqa::write_report(reports, args.out);
  std::cerr << "sentence MRR " << run.sentence.overall.mrr << ", paragraph MRR "
            << run.paragraph.overall.mrr << " -> " << args.out << "\n";
}

// ---- stats ------------------------------------------------------------

struct StatsArgs {
  std::string task;
  std::string out;
  std::string markdown;
};

void run_stats(const StatsArgs& args, const Global& global) {
  const reqa::Task task = reqa::load_task(args.task);
  const reqa::DatasetStats stats = reqa::compute_stats(task, global.threads);
  if (!args.out.empty()) write_file(args.out, reqa::stats_to_json(stats));
  if (!args.markdown.empty()) write_file(args.markdown, reqa::stats_to_markdown(stats));
  if (args.out.empty() && args.markdown.empty()) std::cout << reqa::stats_to_json(stats);
}

// ---- compare ----------------------------------------------------------

struct CompareArgs {
  std::string a, b;
  std::string out;
};

void run_compare(const CompareArgs& args) {
  const auto baseline = reqa::load_report(args.a);
  const auto other = reqa::load_report(args.b);
  const std::string table = reqa::compare_reports(baseline, other);
  if (args.out.empty())
    std::cout << table;
  else
    write_file(args.out, table);
}

// ---- run --------------------------------------------------------------

struct RunArgs {
  reqa::RunConfig config;
  std::string config_path;
};

void run_run(RunArgs& args, const Global& global) {
  args.config.threads = global.threads;
  args.config.seed = global.seed;
  if (!args.config_path.empty())
    args.config = reqa::config_from_json(read_file(args.config_path), args.config);
  const reqa::PipelineResult result = reqa::run_pipeline(args.config);
  std::cerr << "pipeline complete: " << result.report_path.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sentence-level answer retrieval benchmark engine"};
  app.require_subcommand(1);

  Global global;
  app.add_option("--threads", global.threads, "worker threads (0 = all cores)");
  app.add_option("--seed", global.seed, "master seed (0 = per-module defaults)");

  ConvertArgs convert_args;
  auto* convert = app.add_subcommand("convert", "validate and normalize a corpus");
  convert->fallthrough();
  convert->add_option("--format", convert_args.format, "squad | nq-simplified")
      ->check(CLI::IsMember({"squad", "nq-simplified"}));
  convert->add_option("--in", convert_args.in, "input dataset")->required();
  convert->add_option("--out", convert_args.out, "normalized output JSON")->required();

  SegmentArgs segment_args;
  auto* segment = app.add_subcommand("segment", "split a text file into sentences");
  segment->fallthrough();
  segment->add_option("--in", segment_args.in, "text file")->required();
  segment->add_flag("--show-offsets", segment_args.show_offsets,
                    "emit JSONL with code-point offsets");

  auto* index = app.add_subcommand("index", "build task, vector, bm25, or ivf artifacts");
  index->require_subcommand(1);
  index->fallthrough();

  IndexBuildArgs build_args;
  auto* ib = index->add_subcommand("build", "corpus -> task directory");
  ib->fallthrough();
  ib->add_option("--corpus", build_args.corpus, "corpus file")->required();
  ib->add_option("--format", build_args.format, "squad | nq-simplified")
      ->check(CLI::IsMember({"squad", "nq-simplified"}));
  ib->add_option("--out", build_args.out, "task directory")->required();

  IndexEncodeArgs encode_args;
  auto* ie = index->add_subcommand("encode", "task -> answer/question vectors");
  ie->fallthrough();
  ie->add_option("--task", encode_args.task, "task directory")->required();
  ie->add_option("--encoder", encode_args.encoder, "hash-tfidf | external")
      ->check(CLI::IsMember({"hash-tfidf", "external"}));
  ie->add_option("--dim", encode_args.dim, "embedding dimension");
  ie->add_option("--alpha", encode_args.alpha, "sentence/context mixing weight");
  ie->add_option("--answers-vec", encode_args.answers_vec, "external answer vectors");
  ie->add_option("--questions-vec", encode_args.questions_vec, "external question vectors");
  ie->add_option("--out", encode_args.out, "output directory");

  IndexBm25Args bm25_args;
  auto* ibm = index->add_subcommand("bm25", "paragraphs -> bm25 index");
  ibm->fallthrough();
  ibm->add_option("--corpus", bm25_args.corpus, "corpus file");
  ibm->add_option("--format", bm25_args.format, "squad | nq-simplified")
      ->check(CLI::IsMember({"squad", "nq-simplified"}));
  ibm->add_option("--task", bm25_args.task, "task directory (alternative to --corpus)");
  ibm->add_option("--k1", bm25_args.k1, "term-frequency saturation");
  ibm->add_option("--b", bm25_args.b, "length normalization");
  ibm->add_option("--out", bm25_args.out, "index file")->required();

  IndexIvfArgs ivf_args;
  auto* iiv = index->add_subcommand("ivf", "answer vectors -> ivf index");
  iiv->fallthrough();
  iiv->add_option("--vectors", ivf_args.vectors, "answer vector file")->required();
  iiv->add_option("--clusters", ivf_args.clusters, "cluster count (0 = sqrt of rows)");
  iiv->add_option("--out", ivf_args.out, "index file")->required();

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "score retrieval and write a report");
  eval->fallthrough();
  eval->add_option("--task", eval_args.task, "task directory")->required();
  eval->add_option("--answers-vec", eval_args.answers_vec, "answer vectors")->required();
  eval->add_option("--questions-vec", eval_args.questions_vec, "question vectors")->required();
  eval->add_flag("--ann", eval_args.ann, "probe an ivf index instead of exact scoring");
  eval->add_option("--ivf", eval_args.ivf_path, "ivf index file (built in memory if omitted)");
  eval->add_option("--clusters", eval_args.clusters, "clusters for in-memory ivf");
  eval->add_option("--probes", eval_args.probes, "probed clusters (0 = index default)");
  eval->add_option("--bm25-index", eval_args.bm25_path, "add a bm25 paragraph report");
  eval->add_option("--out", eval_args.out, "report file")->required();

  StatsArgs stats_args;
  auto* stats = app.add_subcommand("stats", "dataset characterization tables");
  stats->fallthrough();
  stats->add_option("--task", stats_args.task, "task directory")->required();
  stats->add_option("--out", stats_args.out, "stats JSON file");
  stats->add_option("--markdown", stats_args.markdown, "stats markdown file");

  CompareArgs compare_args;
  auto* compare = app.add_subcommand("compare", "delta table between two reports");
  compare->fallthrough();
  compare->add_option("a", compare_args.a, "baseline report")->required();
  compare->add_option("b", compare_args.b, "other report")->required();
  compare->add_option("--out", compare_args.out, "markdown output (stdout if omitted)");

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "full pipeline: convert through reports");
  run->fallthrough();
  run->add_option("--in", run_args.config.input, "dataset file");
  run->add_option("--format", run_args.config.format, "squad | nq-simplified")
      ->check(CLI::IsMember({"squad", "nq-simplified"}));
  run->add_option("--out", run_args.config.out_dir, "output directory");
  run->add_option("--encoder", run_args.config.encoder, "hash-tfidf | external")
      ->check(CLI::IsMember({"hash-tfidf", "external"}));
  run->add_option("--answers-vec", run_args.config.answers_vec, "external answer vectors");
  run->add_option("--questions-vec", run_args.config.questions_vec, "external question vectors");
  run->add_option("--dim", run_args.config.dim, "embedding dimension");
  run->add_option("--alpha", run_args.config.alpha, "sentence/context mixing weight");
  run->add_flag("--ivf", run_args.config.use_ivf, "evaluate through an ivf index");
  run->add_option("--clusters", run_args.config.clusters, "ivf cluster count");
  run->add_option("--probes", run_args.config.probes, "ivf probes");
  run->add_flag("--bm25", run_args.config.use_bm25, "add the bm25 paragraph baseline");
  run->add_option("--k1", run_args.config.k1, "bm25 k1");
  run->add_option("--b", run_args.config.b, "bm25 b");
  run->add_option("--config", run_args.config_path, "JSON config overriding flags");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*convert) run_convert(convert_args);
    if (*segment) run_segment(segment_args);
    if (*ib) run_index_build(build_args);
    if (*ie) run_index_encode(encode_args, global);
    if (*ibm) run_index_bm25(bm25_args);
    if (*iiv) run_index_ivf(ivf_args, global);
    if (*eval) run_eval(eval_args, global);
    if (*stats) run_stats(stats_args, global);
    if (*compare) run_compare(compare_args);
    if (*run) run_run(run_args, global);
  } catch (const reqa::Error& e) {
    std::cerr << json{{"error", {{"code", to_string(e.code())}, {"message", e.detail()}}}}.dump()
              << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", {{"code", "unknown"}, {"message", e.what()}}}}.dump() << "\n";
    return 1;
  }
  return 0;
}
