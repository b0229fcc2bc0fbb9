#include "reqa/corpus.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "reqa/error.hpp"
#include "reqa/text.hpp"

namespace reqa {

using nlohmann::json;

size_t Corpus::question_count() const {
  size_t n = 0;
  for (const auto& article : articles)
    for (const auto& paragraph : article.paragraphs) n += paragraph.qas.size();
  return n;
}

size_t Corpus::paragraph_count() const {
  size_t n = 0;
  for (const auto& article : articles) n += article.paragraphs.size();
  return n;
}

namespace {

bool whitespace_only(std::string_view s) {
  for (char c : s) {
    unsigned char b = static_cast<unsigned char>(c);
    if (b != ' ' && b != '\t' && b != '\n' && b != '\r' && b != '\f' && b != '\v') return false;
  }
  return true;
}

void validate_span(const DecodedText& context, std::string_view context_bytes,
                   const AnswerSpan& span, const std::string& question_id) {
  const size_t answer_len = utf8_length(span.text);
  if (span.start + answer_len > context.size()) {
    throw Error(errc::validation_error,
                "answer span out of range for question " + question_id + " (start " +
                    std::to_string(span.start) + ", length " + std::to_string(answer_len) +
                    ", context length " + std::to_string(context.size()) + ")");
  }
  std::string_view found = context.slice(context_bytes, span.start, span.start + answer_len);
  if (found != span.text) {
    throw Error(errc::validation_error, "answer text does not match context substring for question " +
                                            question_id + " (expected \"" + span.text + "\", found \"" +
                                            std::string(found) + "\")");
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(errc::io_error, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

// JSON-path helpers for schema errors.
const json& require_field(const json& node, const char* key, const std::string& path) {
  auto it = node.find(key);
  if (it == node.end()) {
    throw Error(errc::schema_error, "missing field at " + path + "." + key);
  }
  return *it;
}

std::string require_string(const json& node, const char* key, const std::string& path) {
  const json& field = require_field(node, key, path);
  if (!field.is_string()) {
    throw Error(errc::schema_error, "expected string at " + path + "." + key);
  }
  return field.get<std::string>();
}

}  // namespace

void validate(const Corpus& corpus) {
  for (size_t ai = 0; ai < corpus.articles.size(); ++ai) {
    const Article& article = corpus.articles[ai];
    if (article.paragraphs.empty()) {
      throw Error(errc::validation_error, "article " + std::to_string(ai) + " has no paragraphs");
    }
    for (size_t pi = 0; pi < article.paragraphs.size(); ++pi) {
      const Paragraph& paragraph = article.paragraphs[pi];
      if (paragraph.context.empty() || whitespace_only(paragraph.context)) {
        throw Error(errc::validation_error, "paragraph " + std::to_string(ai) + ":" +
                                                std::to_string(pi) + " has a whitespace-only context");
      }
      DecodedText decoded = decode_utf8(paragraph.context);
      for (const QuestionRecord& qa : paragraph.qas) {
        if (qa.text.empty()) {
          throw Error(errc::validation_error, "question " + qa.id + " has empty text");
        }
        if (qa.answers.empty()) {
          throw Error(errc::validation_error, "question " + qa.id + " has no answers");
        }
        for (const AnswerSpan& span : qa.answers) {
          validate_span(decoded, paragraph.context, span, qa.id);
        }
      }
    }
  }
}

Corpus parse_squad(std::string_view json_text, std::string source_name) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(errc::parse_error, std::string("malformed JSON at byte ") + std::to_string(e.byte) +
                                       ": " + e.what());
  }

  Corpus corpus;
  corpus.source_name = std::move(source_name);

  const json& data = require_field(root, "data", "$");
  if (!data.is_array()) throw Error(errc::schema_error, "expected array at $.data");

  for (size_t ai = 0; ai < data.size(); ++ai) {
    const std::string apath = "$.data[" + std::to_string(ai) + "]";
    const json& jarticle = data[ai];
    Article article;
    if (auto it = jarticle.find("title"); it != jarticle.end() && it->is_string()) {
      article.title = it->get<std::string>();
    }
    const json& jparagraphs = require_field(jarticle, "paragraphs", apath);
    if (!jparagraphs.is_array()) throw Error(errc::schema_error, "expected array at " + apath + ".paragraphs");

    for (size_t pi = 0; pi < jparagraphs.size(); ++pi) {
      const std::string ppath = apath + ".paragraphs[" + std::to_string(pi) + "]";
      const json& jparagraph = jparagraphs[pi];
      Paragraph paragraph;
      paragraph.context = require_string(jparagraph, "context", ppath);
      if (whitespace_only(paragraph.context)) {
        throw Error(errc::validation_error, "whitespace-only context at " + ppath);
      }
      const json& jqas = require_field(jparagraph, "qas", ppath);
      if (!jqas.is_array()) throw Error(errc::schema_error, "expected array at " + ppath + ".qas");

      DecodedText decoded = decode_utf8(paragraph.context);
      for (size_t qi = 0; qi < jqas.size(); ++qi) {
        const std::string qpath = ppath + ".qas[" + std::to_string(qi) + "]";
        const json& jqa = jqas[qi];
        QuestionRecord qa;
        qa.id = require_string(jqa, "id", qpath);
        qa.text = require_string(jqa, "question", qpath);
        if (qa.text.empty()) {
          throw Error(errc::validation_error, "empty question text for question " + qa.id);
        }
        const json& janswers = require_field(jqa, "answers", qpath);
        if (!janswers.is_array()) throw Error(errc::schema_error, "expected array at " + qpath + ".answers");
        if (janswers.empty()) {
          throw Error(errc::validation_error, "question " + qa.id + " has no answers");
        }
        for (size_t si = 0; si < janswers.size(); ++si) {
          const std::string spath = qpath + ".answers[" + std::to_string(si) + "]";
          const json& janswer = janswers[si];
          AnswerSpan span;
          span.text = require_string(janswer, "text", spath);
          const json& jstart = require_field(janswer, "answer_start", spath);
          if (!jstart.is_number_integer() || jstart.get<int64_t>() < 0) {
            throw Error(errc::schema_error, "expected non-negative integer at " + spath + ".answer_start");
          }
          span.start = jstart.get<uint32_t>();
          validate_span(decoded, paragraph.context, span, qa.id);
          qa.answers.push_back(std::move(span));
        }
        paragraph.qas.push_back(std::move(qa));
      }
      article.paragraphs.push_back(std::move(paragraph));
    }
    if (article.paragraphs.empty()) {
      throw Error(errc::validation_error, "article at " + apath + " has no paragraphs");
    }
    corpus.articles.push_back(std::move(article));
  }
  return corpus;
}

Corpus load_squad_file(const std::filesystem::path& path, std::string source_name) {
  return parse_squad(read_file(path), std::move(source_name));
}

std::string to_squad_json(const Corpus& corpus) {
  json data = json::array();
  for (const Article& article : corpus.articles) {
    json jparagraphs = json::array();
    for (const Paragraph& paragraph : article.paragraphs) {
      json jqas = json::array();
      for (const QuestionRecord& qa : paragraph.qas) {
        json janswers = json::array();
        for (const AnswerSpan& span : qa.answers) {
          janswers.push_back({{"answer_start", span.start}, {"text", span.text}});
        }
        jqas.push_back({{"id", qa.id}, {"question", qa.text}, {"answers", std::move(janswers)}});
      }
      jparagraphs.push_back({{"context", paragraph.context}, {"qas", std::move(jqas)}});
    }
    data.push_back({{"title", article.title}, {"paragraphs", std::move(jparagraphs)}});
  }
  json root = {{"version", "1.1"}, {"data", std::move(data)}};
  return root.dump();
}

NqFilterResult filter_nq_records(std::string_view jsonl, std::string source_name) {
  NqFilterResult result;
  result.corpus.source_name = source_name;
  Article article;
  article.title = source_name;

  size_t line_no = 0;
  size_t pos = 0;
  while (pos <= jsonl.size()) {
    size_t nl = jsonl.find('\n', pos);
    std::string_view line = jsonl.substr(pos, nl == std::string_view::npos ? jsonl.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? jsonl.size() + 1 : nl + 1;
    if (whitespace_only(line)) continue;
    ++line_no;
    ++result.summary.records_in;

    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(errc::parse_error, "malformed JSON on record " + std::to_string(line_no) + ": " + e.what());
    }
    const std::string rpath = "$[" + std::to_string(line_no - 1) + "]";
    std::string question = require_string(record, "question", rpath);
    std::string context = require_string(record, "context", rpath);

    auto block_it = record.find("block_type");
    if (block_it == record.end() || !block_it->is_string()) {
      ++result.summary.dropped_missing_block;
      continue;
    }
    const json& jspans = require_field(record, "spans", rpath);
    if (!jspans.is_array()) throw Error(errc::schema_error, "expected array at " + rpath + ".spans");

    if (jspans.empty()) {
      ++result.summary.dropped_no_span;
      continue;
    }
    if (jspans.size() > 1) {
      ++result.summary.dropped_multi_span;
      continue;
    }
    if (block_it->get<std::string>() != "paragraph") {
      ++result.summary.dropped_block_type;
      continue;
    }

    const json& jspan = jspans[0];
    const json& jstart = require_field(jspan, "start", rpath + ".spans[0]");
    const json& jlength = require_field(jspan, "length", rpath + ".spans[0]");
    if (!jstart.is_number_integer() || !jlength.is_number_integer()) {
      throw Error(errc::schema_error, "expected integer span fields at " + rpath + ".spans[0]");
    }
    int64_t start = jstart.get<int64_t>();
    int64_t length = jlength.get<int64_t>();
    DecodedText decoded = decode_utf8(context);
    if (start < 0 || length <= 0 || static_cast<size_t>(start + length) > decoded.size()) {
      throw Error(errc::validation_error, "span outside paragraph text on record " + std::to_string(line_no));
    }
    if (whitespace_only(context)) {
      throw Error(errc::validation_error, "whitespace-only context on record " + std::to_string(line_no));
    }

    Paragraph paragraph;
    paragraph.context = std::move(context);
    QuestionRecord qa;
    qa.id = source_name + "-" + std::to_string(line_no - 1);
    qa.text = std::move(question);
    AnswerSpan span;
    span.start = static_cast<uint32_t>(start);
    span.text = std::string(
        decoded.slice(paragraph.context, static_cast<size_t>(start), static_cast<size_t>(start + length)));
    qa.answers.push_back(std::move(span));
    paragraph.qas.push_back(std::move(qa));
    article.paragraphs.push_back(std::move(paragraph));
    ++result.summary.retained;
  }

  if (!article.paragraphs.empty()) {
    result.corpus.articles.push_back(std::move(article));
  }
  return result;
}

NqFilterResult load_nq_file(const std::filesystem::path& path, std::string source_name) {
  return filter_nq_records(read_file(path), std::move(source_name));
}

}  // namespace reqa
