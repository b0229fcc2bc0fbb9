#include "reqa/task.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <unordered_map>

#include <json.hpp>

#include "reqa/error.hpp"
#include "reqa/hashing.hpp"
#include "reqa/parallel.hpp"
#include "reqa/segmenter.hpp"
#include "reqa/text.hpp"

namespace reqa {
namespace {

using nlohmann::json;

constexpr std::string_view kPrepositions[] = {
    "at", "by", "in", "on", "with", "to", "for", "from", "of", "about", "during", "after", "under",
};

bool is_preposition(std::string_view token) {
  for (auto p : kPrepositions)
    if (token == p) return true;
  return false;
}

struct FlatParagraph {
  ParagraphId id;
  const std::string* title = nullptr;
  const Paragraph* paragraph = nullptr;
};

std::vector<FlatParagraph> flatten(const Corpus& corpus) {
  std::vector<FlatParagraph> flat;
  for (uint32_t a = 0; a < corpus.articles.size(); ++a) {
    const Article& article = corpus.articles[a];
    for (uint32_t p = 0; p < article.paragraphs.size(); ++p)
      flat.push_back({{a, p}, &article.title, &article.paragraphs[p]});
  }
  return flat;
}

std::vector<std::vector<SentenceSpan>> segment_all(const std::vector<FlatParagraph>& flat,
                                                   unsigned threads) {
  std::vector<std::vector<SentenceSpan>> spans(flat.size());
  parallel_chunks(flat.size(), 64, threads, [&](size_t, size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) spans[i] = split_sentences(flat[i].paragraph->context);
  });
  return spans;
}

AnswerIndex index_from_spans(const std::vector<FlatParagraph>& flat,
                             const std::vector<std::vector<SentenceSpan>>& spans) {
  AnswerIndex index;
  index.paragraphs.reserve(flat.size());
  size_t total = 0;
  for (const auto& s : spans) total += s.size();
  index.candidates.reserve(total);
  for (uint32_t ord = 0; ord < flat.size(); ++ord) {
    const FlatParagraph& fp = flat[ord];
    index.paragraphs.push_back({fp.id, *fp.title, fp.paragraph->context});
    for (uint32_t s = 0; s < spans[ord].size(); ++s) {
      Candidate c;
      c.candidate_id = static_cast<uint32_t>(index.candidates.size());
      c.sentence = spans[ord][s].text;
      c.paragraph_ord = ord;
      c.paragraph_id = fp.id;
      c.sentence_index = s;
      index.candidates.push_back(std::move(c));
    }
  }
  return index;
}

GoldMap gold_from_spans(const std::vector<FlatParagraph>& flat,
                        const std::vector<std::vector<SentenceSpan>>& spans,
                        const std::vector<TaskQuestion>& questions) {
  // First candidate id of each paragraph; candidates are laid out in
  // (paragraph ordinal, sentence index) order.
  std::vector<uint32_t> first_candidate(flat.size() + 1, 0);
  for (size_t i = 0; i < flat.size(); ++i)
    first_candidate[i + 1] = first_candidate[i] + static_cast<uint32_t>(spans[i].size());

  GoldMap gold;
  gold.candidates.resize(questions.size());
  gold.paragraphs.resize(questions.size());

  size_t q = 0;
  for (uint32_t ord = 0; ord < flat.size(); ++ord) {
    const Paragraph& para = *flat[ord].paragraph;
    const size_t context_length = utf8_length(para.context);
    for (const QuestionRecord& qa : para.qas) {
      auto& cand_set = gold.candidates[q];
      for (const AnswerSpan& ans : qa.answers) {
        size_t sentence_idx;
        try {
          sentence_idx = locate_answer_sentence(spans[ord], ans.start,
                                                static_cast<uint32_t>(utf8_length(ans.text)),
                                                context_length);
        } catch (const Error&) {
          throw Error(errc::validation_error,
                      "answer span of question '" + qa.id + "' maps to no sentence");
        }
        cand_set.push_back(first_candidate[ord] + static_cast<uint32_t>(sentence_idx));
      }
      std::sort(cand_set.begin(), cand_set.end());
      cand_set.erase(std::unique(cand_set.begin(), cand_set.end()), cand_set.end());
      if (cand_set.empty())
        throw Error(errc::validation_error, "question '" + qa.id + "' has an empty gold set");
      gold.paragraphs[q] = {ord};
      ++q;
    }
  }

  // Duplicate-question rule: identical normalized text ⇒ shared (unioned)
  // gold sets, so a correct answer under either article counts for both.
  std::unordered_map<std::string, std::vector<uint32_t>> groups;
  for (const TaskQuestion& tq : questions)
    groups[normalize_question(tq.text)].push_back(tq.question_id);
  for (const auto& [text, members] : groups) {
    if (members.size() < 2) continue;
    std::vector<uint32_t> cands, paras;
    for (uint32_t qid : members) {
      cands.insert(cands.end(), gold.candidates[qid].begin(), gold.candidates[qid].end());
      paras.insert(paras.end(), gold.paragraphs[qid].begin(), gold.paragraphs[qid].end());
    }
    std::sort(cands.begin(), cands.end());
    cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
    std::sort(paras.begin(), paras.end());
    paras.erase(std::unique(paras.begin(), paras.end()), paras.end());
    for (uint32_t qid : members) {
      gold.candidates[qid] = cands;
      gold.paragraphs[qid] = paras;
    }
  }
  return gold;
}

json candidate_to_json(const Candidate& c) {
  return json{{"candidate_id", c.candidate_id},
              {"sentence", c.sentence},
              {"paragraph_ord", c.paragraph_ord},
              {"article", c.paragraph_id.article},
              {"paragraph", c.paragraph_id.paragraph},
              {"sentence_index", c.sentence_index}};
}

void write_lines(const std::filesystem::path& path, const std::vector<json>& lines) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(errc::io_error, "cannot open " + path.string() + " for writing");
  for (const json& j : lines) out << j.dump() << '\n';
  if (!out) throw Error(errc::io_error, "short write to " + path.string());
}

std::vector<json> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(errc::io_error, "cannot open " + path.string());
  std::vector<json> lines;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      lines.push_back(json::parse(line));
    } catch (const json::parse_error&) {
      throw Error(errc::parse_error,
                  path.filename().string() + " line " + std::to_string(line_no) + ": malformed JSON");
    }
  }
  return lines;
}

uint64_t require_u64(const json& j, const char* key, const std::filesystem::path& path) {
  if (!j.contains(key) || !j[key].is_number_unsigned())
    throw Error(errc::schema_error,
                path.filename().string() + ": missing or non-integer field '" + std::string(key) + "'");
  return j[key].get<uint64_t>();
}

std::string require_str(const json& j, const char* key, const std::filesystem::path& path) {
  if (!j.contains(key) || !j[key].is_string())
    throw Error(errc::schema_error,
                path.filename().string() + ": missing or non-string field '" + std::string(key) + "'");
  return j[key].get<std::string>();
}

}  // namespace

const char* to_string(QuestionType type) {
  switch (type) {
    case QuestionType::what: return "what";
    case QuestionType::who: return "who";
    case QuestionType::how: return "how";
    case QuestionType::when: return "when";
    case QuestionType::which: return "which";
    case QuestionType::where: return "where";
    case QuestionType::why: return "why";
    case QuestionType::other: return "other";
  }
  return "other";
}

QuestionType classify_question(std::string_view question_text) {
  std::vector<std::string> tokens = tokenize(question_text);
  if (tokens.empty()) return QuestionType::other;
  std::string_view head = tokens[0];
  // "In what year...", "By which route..." — a preposition may precede the
  // wh- word; only what/which questions are phrased this way.
  if (tokens.size() > 1 && is_preposition(head) && (tokens[1] == "what" || tokens[1] == "which"))
    head = tokens[1];
  if (head == "what") return QuestionType::what;
  if (head == "who") return QuestionType::who;
  if (head == "how") return QuestionType::how;
  if (head == "when") return QuestionType::when;
  if (head == "which") return QuestionType::which;
  if (head == "where") return QuestionType::where;
  if (head == "why") return QuestionType::why;
  return QuestionType::other;
}

std::vector<TaskQuestion> extract_questions(const Corpus& corpus) {
  std::vector<TaskQuestion> questions;
  for (const Article& article : corpus.articles)
    for (const Paragraph& para : article.paragraphs)
      for (const QuestionRecord& qa : para.qas) {
        TaskQuestion tq;
        tq.question_id = static_cast<uint32_t>(questions.size());
        tq.source_id = qa.id;
        tq.text = qa.text;
        tq.type = classify_question(qa.text);
        questions.push_back(std::move(tq));
      }
  return questions;
}

AnswerIndex build_answer_index(const Corpus& corpus) {
  validate(corpus);
  auto flat = flatten(corpus);
  return index_from_spans(flat, segment_all(flat, 0));
}

GoldMap build_gold_map(const Corpus& corpus, const AnswerIndex& index,
                       const std::vector<TaskQuestion>& questions) {
  auto flat = flatten(corpus);
  if (flat.size() != index.paragraphs.size())
    throw Error(errc::invalid_argument, "answer index was built from a different corpus");
  return gold_from_spans(flat, segment_all(flat, 0), questions);
}

Task build_task(const Corpus& corpus) {
  validate(corpus);
  auto flat = flatten(corpus);
  auto spans = segment_all(flat, 0);
  AnswerIndex index = index_from_spans(flat, spans);
  Task task;
  task.source_name = corpus.source_name;
  task.questions = extract_questions(corpus);
  task.gold = gold_from_spans(flat, spans, task.questions);
  task.paragraphs = std::move(index.paragraphs);
  task.candidates = std::move(index.candidates);
  return task;
}

uint64_t Task::fingerprint() const {
  Fingerprint fp;
  fp.add(source_name);
  fp.add(static_cast<uint64_t>(paragraphs.size()));
  fp.add(static_cast<uint64_t>(candidates.size()));
  fp.add(static_cast<uint64_t>(questions.size()));
  for (const ParagraphEntry& p : paragraphs) {
    fp.add(p.id.article);
    fp.add(p.id.paragraph);
    fp.add(p.article_title);
    fp.add(p.context);
  }
  for (const Candidate& c : candidates) {
    fp.add(c.candidate_id);
    fp.add(c.sentence);
    fp.add(c.paragraph_ord);
    fp.add(c.sentence_index);
  }
  for (const TaskQuestion& q : questions) {
    fp.add(q.question_id);
    fp.add(q.source_id);
    fp.add(q.text);
    fp.add(std::string_view(to_string(q.type)));
  }
  for (const auto& set : gold.candidates) {
    fp.add(static_cast<uint64_t>(set.size()));
    for (uint32_t id : set) fp.add(id);
  }
  for (const auto& set : gold.paragraphs) {
    fp.add(static_cast<uint64_t>(set.size()));
    for (uint32_t id : set) fp.add(id);
  }
  return fp.value();
}

std::string Task::fingerprint_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fingerprint()));
  return buf;
}

void save_task(const Task& task, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);

  std::vector<json> lines;
  lines.reserve(task.paragraphs.size());
  for (uint32_t ord = 0; ord < task.paragraphs.size(); ++ord) {
    const ParagraphEntry& p = task.paragraphs[ord];
    lines.push_back(json{{"paragraph_ord", ord},
                         {"article", p.id.article},
                         {"paragraph", p.id.paragraph},
                         {"title", p.article_title},
                         {"context", p.context}});
  }
  write_lines(dir / "paragraphs.jsonl", lines);

  lines.clear();
  lines.reserve(task.candidates.size());
  for (const Candidate& c : task.candidates) lines.push_back(candidate_to_json(c));
  write_lines(dir / "candidates.jsonl", lines);

  lines.clear();
  lines.reserve(task.questions.size());
  for (const TaskQuestion& q : task.questions)
    lines.push_back(json{{"question_id", q.question_id},
                         {"source_id", q.source_id},
                         {"text", q.text},
                         {"type", to_string(q.type)}});
  write_lines(dir / "questions.jsonl", lines);

  lines.clear();
  lines.reserve(task.questions.size());
  for (uint32_t qid = 0; qid < task.questions.size(); ++qid)
    lines.push_back(json{{"question_id", qid},
                         {"candidates", task.gold.candidates[qid]},
                         {"paragraphs", task.gold.paragraphs[qid]}});
  write_lines(dir / "gold.jsonl", lines);

  json meta{{"source_name", task.source_name},
            {"paragraph_count", task.paragraphs.size()},
            {"candidate_count", task.candidates.size()},
            {"question_count", task.questions.size()},
            {"fingerprint", task.fingerprint_hex()}};
  std::ofstream out(dir / "task.json", std::ios::binary);
  if (!out) throw Error(errc::io_error, "cannot open " + (dir / "task.json").string());
  out << meta.dump(2) << '\n';
}

Task load_task(const std::filesystem::path& dir) {
  Task task;

  const auto meta_path = dir / "task.json";
  std::ifstream meta_in(meta_path, std::ios::binary);
  if (!meta_in) throw Error(errc::io_error, "cannot open " + meta_path.string());
  json meta;
  try {
    meta = json::parse(meta_in);
  } catch (const json::parse_error&) {
    throw Error(errc::parse_error, "task.json: malformed JSON");
  }
  task.source_name = require_str(meta, "source_name", meta_path);
  const std::string want_fp = require_str(meta, "fingerprint", meta_path);

  for (const json& j : read_lines(dir / "paragraphs.jsonl")) {
    ParagraphEntry p;
    const auto path = dir / "paragraphs.jsonl";
    if (require_u64(j, "paragraph_ord", path) != task.paragraphs.size())
      throw Error(errc::schema_error, "paragraphs.jsonl: paragraph_ord out of order");
    p.id.article = static_cast<uint32_t>(require_u64(j, "article", path));
    p.id.paragraph = static_cast<uint32_t>(require_u64(j, "paragraph", path));
    p.article_title = require_str(j, "title", path);
    p.context = require_str(j, "context", path);
    task.paragraphs.push_back(std::move(p));
  }

  for (const json& j : read_lines(dir / "candidates.jsonl")) {
    Candidate c;
    const auto path = dir / "candidates.jsonl";
    c.candidate_id = static_cast<uint32_t>(require_u64(j, "candidate_id", path));
    if (c.candidate_id != task.candidates.size())
      throw Error(errc::schema_error, "candidates.jsonl: candidate_id out of order");
    c.sentence = require_str(j, "sentence", path);
    c.paragraph_ord = static_cast<uint32_t>(require_u64(j, "paragraph_ord", path));
    if (c.paragraph_ord >= task.paragraphs.size())
      throw Error(errc::validation_error, "candidates.jsonl: paragraph_ord out of range");
    if (!task.candidates.empty() && c.paragraph_ord < task.candidates.back().paragraph_ord)
      throw Error(errc::validation_error, "candidates.jsonl: rows are not grouped by paragraph");
    c.paragraph_id.article = static_cast<uint32_t>(require_u64(j, "article", path));
    c.paragraph_id.paragraph = static_cast<uint32_t>(require_u64(j, "paragraph", path));
    c.sentence_index = static_cast<uint32_t>(require_u64(j, "sentence_index", path));
    task.candidates.push_back(std::move(c));
  }

  for (const json& j : read_lines(dir / "questions.jsonl")) {
    TaskQuestion q;
    const auto path = dir / "questions.jsonl";
    q.question_id = static_cast<uint32_t>(require_u64(j, "question_id", path));
    if (q.question_id != task.questions.size())
      throw Error(errc::schema_error, "questions.jsonl: question_id out of order");
    q.source_id = require_str(j, "source_id", path);
    q.text = require_str(j, "text", path);
    const std::string type = require_str(j, "type", path);
    bool known = false;
    for (QuestionType t : kQuestionTypes)
      if (type == to_string(t)) {
        q.type = t;
        known = true;
        break;
      }
    if (!known) throw Error(errc::schema_error, "questions.jsonl: unknown type '" + type + "'");
    task.questions.push_back(std::move(q));
  }

  task.gold.candidates.resize(task.questions.size());
  task.gold.paragraphs.resize(task.questions.size());
  size_t gold_rows = 0;
  for (const json& j : read_lines(dir / "gold.jsonl")) {
    const auto path = dir / "gold.jsonl";
    const auto qid = require_u64(j, "question_id", path);
    if (qid >= task.questions.size())
      throw Error(errc::validation_error, "gold.jsonl: question_id out of range");
    if (!j.contains("candidates") || !j["candidates"].is_array() || !j.contains("paragraphs") ||
        !j["paragraphs"].is_array())
      throw Error(errc::schema_error, "gold.jsonl: missing candidates/paragraphs arrays");
    auto& cands = task.gold.candidates[qid];
    for (const json& v : j["candidates"]) {
      if (!v.is_number_unsigned() || v.get<uint64_t>() >= task.candidates.size())
        throw Error(errc::validation_error, "gold.jsonl: candidate id out of range");
      if (!cands.empty() && v.get<uint32_t>() <= cands.back())
        throw Error(errc::validation_error, "gold.jsonl: candidate sets must ascend");
      cands.push_back(v.get<uint32_t>());
    }
    auto& paras = task.gold.paragraphs[qid];
    for (const json& v : j["paragraphs"]) {
      if (!v.is_number_unsigned() || v.get<uint64_t>() >= task.paragraphs.size())
        throw Error(errc::validation_error, "gold.jsonl: paragraph ordinal out of range");
      if (!paras.empty() && v.get<uint32_t>() <= paras.back())
        throw Error(errc::validation_error, "gold.jsonl: paragraph sets must ascend");
      paras.push_back(v.get<uint32_t>());
    }
    if (cands.empty() || paras.empty())
      throw Error(errc::validation_error,
                  "gold.jsonl: empty gold set for question " + std::to_string(qid));
    ++gold_rows;
  }
  if (gold_rows != task.questions.size())
    throw Error(errc::validation_error, "gold.jsonl: row count does not match questions.jsonl");

  if (task.fingerprint_hex() != want_fp)
    throw Error(errc::fingerprint_mismatch,
                "task content does not match the fingerprint recorded in task.json");
  return task;
}

}  // namespace reqa
