#include "docbias/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "docbias/util.hpp"
#include "json.hpp"

namespace docbias {

using json = nlohmann::ordered_json;

namespace {

const char* const kLabelNames[kNumBiasLabels] = {
    "far-left", "left", "left-center", "center",
    "right-center", "right", "far-right"};

// Words that commonly precede a non-terminal period.
const std::unordered_set<std::string>& abbreviations() {
  static const std::unordered_set<std::string> kAbbrev = {
      "dr",   "mr",   "mrs",  "ms",   "prof", "rev",  "gen",  "sen",
      "rep",  "gov",  "lt",   "col",  "sgt",  "capt", "cmdr", "st",
      "jr",   "sr",   "inc",  "ltd",  "co",   "corp", "vs",   "etc",
      "e.g",  "i.e",  "u.s",  "u.k",  "u.n",  "d.c",  "a.m",  "p.m",
      "jan",  "feb",  "mar",  "apr",  "jun",  "jul",  "aug",  "sep",
      "sept", "oct",  "nov",  "dec",  "no",   "al",   "approx"};
  return kAbbrev;
}

bool is_space_cp(std::uint32_t cp) {
  if (cp == 0x20 || cp == 0x09 || cp == 0x0A || cp == 0x0D || cp == 0x0B ||
      cp == 0x0C)
    return true;
  if (cp == 0xA0 || cp == 0x1680 || (cp >= 0x2000 && cp <= 0x200B) ||
      cp == 0x202F || cp == 0x205F || cp == 0x3000 || cp == 0xFEFF)
    return true;
  return false;
}

bool is_control_cp(std::uint32_t cp) {
  return cp < 0x20 || (cp >= 0x7F && cp <= 0x9F);
}

bool is_punct_cp(std::uint32_t cp) {
  if (cp < 0x80) {
    return std::ispunct(static_cast<int>(cp)) != 0;
  }
  // Common unicode punctuation: general punctuation block, quotes, dashes,
  // inverted marks, guillemets, ellipsis, CJK ideographic full stop.
  if (cp >= 0x2010 && cp <= 0x205E) return true;
  if (cp == 0xA1 || cp == 0xAB || cp == 0xBB || cp == 0xBF) return true;
  if (cp == 0x2E2E || cp == 0x3001 || cp == 0x3002) return true;
  return false;
}

// Decodes one UTF-8 codepoint at s[i]; advances i. Returns nullopt on
// malformed input.
std::optional<std::uint32_t> decode_utf8(const std::string& s, std::size_t& i) {
  unsigned char c = static_cast<unsigned char>(s[i]);
  if (c < 0x80) {
    ++i;
    return c;
  }
  int extra;
  std::uint32_t cp;
  if ((c & 0xE0) == 0xC0) {
    extra = 1;
    cp = c & 0x1F;
  } else if ((c & 0xF0) == 0xE0) {
    extra = 2;
    cp = c & 0x0F;
  } else if ((c & 0xF8) == 0xF0) {
    extra = 3;
    cp = c & 0x07;
  } else {
    return std::nullopt;
  }
  if (i + static_cast<std::size_t>(extra) >= s.size()) return std::nullopt;
  for (int k = 1; k <= extra; ++k) {
    unsigned char cc = static_cast<unsigned char>(s[i + k]);
    if ((cc & 0xC0) != 0x80) return std::nullopt;
    cp = (cp << 6) | (cc & 0x3F);
  }
  // reject overlong encodings and surrogates
  if ((extra == 1 && cp < 0x80) || (extra == 2 && cp < 0x800) ||
      (extra == 3 && cp < 0x10000))
    return std::nullopt;
  if (cp >= 0xD800 && cp <= 0xDFFF) return std::nullopt;
  if (cp > 0x10FFFF) return std::nullopt;
  i += 1 + extra;
  return cp;
}

void encode_utf8(std::uint32_t cp, std::string& out) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

bool starts_with_at(const std::string& s, std::size_t pos, const char* prefix) {
  std::size_t n = std::strlen(prefix);
  if (pos + n > s.size()) return false;
  for (std::size_t k = 0; k < n; ++k) {
    char c = s[pos + k];
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if (c != prefix[k]) return false;
  }
  return true;
}

std::string decode_entities(const std::string& s) {
  static const std::pair<const char*, const char*> kEntities[] = {
      {"&amp;", "&"}, {"&lt;", "<"},   {"&gt;", ">"},
      {"&quot;", "\""}, {"&#39;", "'"}, {"&apos;", "'"}, {"&nbsp;", " "}};
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    bool matched = false;
    if (s[i] == '&') {
      for (const auto& [ent, repl] : kEntities) {
        std::size_t n = std::strlen(ent);
        if (s.compare(i, n, ent) == 0) {
          out += repl;
          i += n;
          matched = true;
          break;
        }
      }
    }
    if (!matched) {
      out += s[i];
      ++i;
    }
  }
  return out;
}

}  // namespace

const char* to_string(BiasLabel label) {
  return kLabelNames[static_cast<int>(label)];
}

std::optional<BiasLabel> parse_bias_label(const std::string& s) {
  std::string norm = lower_ascii(trim(s));
  // tolerate space or underscore in place of hyphen
  for (char& c : norm) {
    if (c == ' ' || c == '_') c = '-';
  }
  for (int i = 0; i < kNumBiasLabels; ++i) {
    if (norm == kLabelNames[i]) return static_cast<BiasLabel>(i);
  }
  return std::nullopt;
}

int ordinal(BiasLabel label) { return static_cast<int>(label) - 3; }

std::uint64_t SplitSpec::hash() const {
  std::uint64_t h = fnv1a64(std::to_string(seed));
  for (const auto& id : train_ids) h = fnv1a64(id + "\x1f", h);
  h = fnv1a64(std::string("|"), h);
  for (const auto& id : test_ids) h = fnv1a64(id + "\x1f", h);
  return h;
}

std::string SplitSpec::to_json() const {
  json j;
  j["seed"] = seed;
  j["train_ids"] = train_ids;
  j["test_ids"] = test_ids;
  return j.dump(2) + "\n";
}

SplitSpec SplitSpec::from_json(const std::string& json_text) {
  json j = json::parse(json_text);
  SplitSpec s;
  s.seed = j.at("seed").get<std::uint64_t>();
  s.train_ids = j.at("train_ids").get<std::vector<std::string>>();
  s.test_ids = j.at("test_ids").get<std::vector<std::string>>();
  return s;
}

std::string clean_text(const std::string& raw, const std::string& context) {
  // pass 1: strip tags and URLs at the byte level
  std::string stripped;
  stripped.reserve(raw.size());
  std::size_t i = 0;
  while (i < raw.size()) {
    char c = raw[i];
    if (c == '<') {
      std::size_t close = raw.find('>', i + 1);
      if (close != std::string::npos && close - i < 512) {
        stripped += ' ';
        i = close + 1;
        continue;
      }
    }
    if (starts_with_at(raw, i, "http://") || starts_with_at(raw, i, "https://") ||
        starts_with_at(raw, i, "www.")) {
      while (i < raw.size() &&
             !std::isspace(static_cast<unsigned char>(raw[i])) &&
             static_cast<unsigned char>(raw[i]) < 0x80) {
        ++i;
      }
      stripped += ' ';
      continue;
    }
    stripped += c;
    ++i;
  }
  stripped = decode_entities(stripped);

  // pass 2: decode UTF-8, normalize spaces, drop controls, collapse runs
  std::string out;
  out.reserve(stripped.size());
  bool pending_space = false;
  i = 0;
  while (i < stripped.size()) {
    std::size_t at = i;
    auto cp = decode_utf8(stripped, i);
    if (!cp) {
      std::string where = context.empty() ? "" : " in " + context;
      throw IngestError("invalid UTF-8 at byte " + std::to_string(at) + where);
    }
    if (is_space_cp(*cp) || is_control_cp(*cp)) {
      pending_space = true;
      continue;
    }
    if (pending_space && !out.empty()) out += ' ';
    pending_space = false;
    encode_utf8(*cp, out);
  }
  return out;
}

namespace {

// Lowercases and removes punctuation codepoints; empty result means the
// token was all punctuation.
std::string normalize_token(const std::string& tok) {
  std::string out;
  std::size_t i = 0;
  while (i < tok.size()) {
    auto cp = decode_utf8(tok, i);
    if (!cp) {  // cleaned text is valid UTF-8; treat stray bytes as punct
      ++i;
      continue;
    }
    if (is_punct_cp(*cp)) continue;
    if (*cp < 0x80) {
      char c = static_cast<char>(*cp);
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
      out += c;
    } else {
      encode_utf8(*cp, out);
    }
  }
  return out;
}

void flush_sentence(std::vector<std::string>& words,
                    const LemmaTable& lemmas, const Stoplist& stoplist,
                    std::vector<std::vector<std::string>>& sentences) {
  std::vector<std::string> lemmed;
  for (const auto& w : words) {
    std::string norm = normalize_token(w);
    if (norm.empty()) continue;
    if (stoplist.count(norm)) continue;
    auto it = lemmas.find(norm);
    lemmed.push_back(it == lemmas.end() ? norm : it->second);
  }
  if (!lemmed.empty()) sentences.push_back(std::move(lemmed));
  words.clear();
}

}  // namespace

std::vector<std::vector<std::string>> segment_and_lemmatize(
    const std::string& text, const LemmaTable& lemmas,
    const Stoplist& stoplist) {
  std::vector<std::vector<std::string>> sentences;
  std::vector<std::string> words;
  std::string cur;

  auto push_word = [&]() {
    if (!cur.empty()) {
      words.push_back(cur);
      cur.clear();
    }
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      push_word();
      continue;
    }
    if (c == '.' || c == '!' || c == '?') {
      bool boundary = true;
      if (c == '.') {
        // decimal number: digit on both sides
        bool digit_before = !cur.empty() &&
            std::isdigit(static_cast<unsigned char>(cur.back()));
        bool digit_after = i + 1 < text.size() &&
            std::isdigit(static_cast<unsigned char>(text[i + 1]));
        if (digit_before && digit_after) {
          cur += c;
          continue;
        }
        // abbreviation guard on the word before the period
        std::string before = lower_ascii(cur);
        while (!before.empty() && before.front() == '.') before.erase(0, 1);
        if (abbreviations().count(before)) {
          cur += c;
          continue;
        }
        // internal acronym dots: "U.S." mid-token, next char is a letter
        if (i + 1 < text.size() &&
            std::isalpha(static_cast<unsigned char>(text[i + 1])) &&
            !cur.empty()) {
          cur += c;
          continue;
        }
      }
      if (boundary) {
        // swallow any run of terminators and trailing quotes/brackets
        push_word();
        while (i + 1 < text.size() &&
               (text[i + 1] == '.' || text[i + 1] == '!' ||
                text[i + 1] == '?' || text[i + 1] == '"' ||
                text[i + 1] == '\'' || text[i + 1] == ')' ||
                text[i + 1] == ']')) {
          ++i;
        }
        flush_sentence(words, lemmas, stoplist, sentences);
      }
      continue;
    }
    cur += c;
  }
  push_word();
  flush_sentence(words, lemmas, stoplist, sentences);
  return sentences;
}

std::optional<BiasLabel> assign_weak_label(const RawArticle& article,
                                           const DomainTable& table) {
  auto it = table.find(article.domain);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

std::optional<Document> ingest_article(const RawArticle& article,
                                       const DomainTable& table,
                                       const CleanOptions& opts) {
  auto label = assign_weak_label(article, table);
  if (!label) {
    std::fprintf(stderr, "warning: article %s excluded, unknown domain %s\n",
                 article.id.c_str(), article.domain.c_str());
    return std::nullopt;
  }
  Document doc;
  doc.id = article.id;
  doc.domain = article.domain;
  doc.topic = article.topic;
  doc.label = *label;
  doc.article_label = article.article_label;
  std::string body = clean_text(article.body, "article " + article.id);
  doc.sentences = segment_and_lemmatize(body, opts.lemmas, opts.stoplist);
  if (opts.include_title && !article.title.empty()) {
    std::string title = clean_text(article.title, "article " + article.id);
    auto title_sents = segment_and_lemmatize(title, opts.lemmas, opts.stoplist);
    doc.sentences.insert(doc.sentences.begin(), title_sents.begin(),
                         title_sents.end());
  }
  if (doc.sentences.empty()) {
    std::fprintf(stderr, "warning: article %s excluded, empty after cleaning\n",
                 article.id.c_str());
    return std::nullopt;
  }
  return doc;
}

SplitSpec make_split(const std::vector<std::string>& doc_ids,
                     std::uint64_t seed, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ConfigError("split fraction must be inside (0,1), got " +
                      std::to_string(fraction));
  }
  if (doc_ids.size() < 2) {
    throw ConfigError("split needs at least 2 documents");
  }
  std::vector<std::string> ids = doc_ids;
  std::sort(ids.begin(), ids.end());
  Rng rng(seed);
  shuffle(ids, rng);
  std::size_t n = ids.size();
  std::size_t n_train = static_cast<std::size_t>(std::llround(n * fraction));
  if (n_train == 0) n_train = 1;
  if (n_train >= n) n_train = n - 1;
  SplitSpec spec;
  spec.seed = seed;
  spec.train_ids.assign(ids.begin(), ids.begin() + n_train);
  spec.test_ids.assign(ids.begin() + n_train, ids.end());
  std::sort(spec.train_ids.begin(), spec.train_ids.end());
  std::sort(spec.test_ids.begin(), spec.test_ids.end());
  return spec;
}

SplitSpec make_split_stratified(const std::vector<Document>& docs,
                                std::uint64_t seed, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ConfigError("split fraction must be inside (0,1), got " +
                      std::to_string(fraction));
  }
  if (docs.size() < 2) throw ConfigError("split needs at least 2 documents");
  std::map<BiasLabel, std::vector<std::string>> groups;
  for (const auto& d : docs) groups[d.label].push_back(d.id);
  SplitSpec spec;
  spec.seed = seed;
  for (auto& [label, ids] : groups) {
    std::sort(ids.begin(), ids.end());
    Rng rng(seed ^ fnv1a64(to_string(label)));
    shuffle(ids, rng);
    std::size_t n_train =
        static_cast<std::size_t>(std::llround(ids.size() * fraction));
    if (ids.size() > 1) {
      if (n_train == 0) n_train = 1;
      if (n_train >= ids.size()) n_train = ids.size() - 1;
    }
    for (std::size_t i = 0; i < ids.size(); ++i) {
      (i < n_train ? spec.train_ids : spec.test_ids).push_back(ids[i]);
    }
  }
  std::sort(spec.train_ids.begin(), spec.train_ids.end());
  std::sort(spec.test_ids.begin(), spec.test_ids.end());
  if (spec.test_ids.empty()) {
    spec.test_ids.push_back(spec.train_ids.back());
    spec.train_ids.pop_back();
  }
  return spec;
}

std::vector<RawArticle> load_corpus_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus file " + path);
  std::vector<RawArticle> articles;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw IngestError(path + " line " + std::to_string(line_no) +
                        ": JSON parse error: " + e.what());
    }
    RawArticle a;
    try {
      a.id = j.at("id").get<std::string>();
      a.title = j.value("title", std::string());
      a.body = j.at("body").get<std::string>();
      a.domain = lower_ascii(trim(j.at("domain").get<std::string>()));
      a.topic = j.value("topic", std::string());
      if (j.contains("article_label") && !j["article_label"].is_null()) {
        auto lbl = parse_bias_label(j["article_label"].get<std::string>());
        if (!lbl) {
          throw IngestError(path + " line " + std::to_string(line_no) +
                            ": unknown article_label");
        }
        a.article_label = *lbl;
      }
    } catch (const json::exception& e) {
      throw IngestError(path + " line " + std::to_string(line_no) +
                        ": missing field: " + e.what());
    }
    if (!seen_ids.insert(a.id).second) {
      throw IngestError(path + " line " + std::to_string(line_no) +
                        ": duplicate article id " + a.id);
    }
    articles.push_back(std::move(a));
  }
  return articles;
}

DomainTable load_domain_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open domain table " + path);
  DomainTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() < 2) {
      throw IngestError(path + " line " + std::to_string(line_no) +
                        ": expected domain,label");
    }
    std::string domain = lower_ascii(trim(fields[0]));
    std::string label_str = trim(fields[1]);
    if (line_no == 1 && domain == "domain") continue;  // header
    auto label = parse_bias_label(label_str);
    if (!label) {
      throw IngestError(path + " line " + std::to_string(line_no) +
                        ": unknown label '" + label_str + "'");
    }
    table[domain] = *label;
  }
  return table;
}

LemmaTable load_lemma_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open lemma table " + path);
  LemmaTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw IngestError(path + " line " + std::to_string(line_no) +
                        ": expected token<TAB>lemma");
    }
    table[trim(line.substr(0, tab))] = trim(line.substr(tab + 1));
  }
  return table;
}

Stoplist load_stoplist(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open stoplist " + path);
  Stoplist list;
  std::string line;
  while (std::getline(in, line)) {
    std::string tok = trim(line);
    if (!tok.empty()) list.insert(lower_ascii(tok));
  }
  return list;
}

std::string document_to_json(const Document& doc) {
  json j;
  j["id"] = doc.id;
  j["sentences"] = doc.sentences;
  j["domain"] = doc.domain;
  j["topic"] = doc.topic;
  j["label"] = to_string(doc.label);
  if (doc.article_label) j["article_label"] = to_string(*doc.article_label);
  return j.dump();
}

Document document_from_json(const std::string& json_text) {
  json j = json::parse(json_text);
  Document d;
  d.id = j.at("id").get<std::string>();
  d.sentences = j.at("sentences").get<std::vector<std::vector<std::string>>>();
  d.domain = j.at("domain").get<std::string>();
  d.topic = j.at("topic").get<std::string>();
  auto label = parse_bias_label(j.at("label").get<std::string>());
  if (!label) throw IngestError("document " + d.id + ": unknown label");
  d.label = *label;
  if (j.contains("article_label") && !j["article_label"].is_null()) {
    auto albl = parse_bias_label(j["article_label"].get<std::string>());
    if (!albl) throw IngestError("document " + d.id + ": unknown article_label");
    d.article_label = *albl;
  }
  return d;
}

std::vector<Document> load_documents_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open documents file " + path);
  std::vector<Document> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      docs.push_back(document_from_json(line));
    } catch (const json::exception& e) {
      throw IngestError(path + " line " + std::to_string(line_no) + ": " +
                        e.what());
    }
  }
  return docs;
}

void save_documents_jsonl(const std::string& path,
                          const std::vector<Document>& docs) {
  std::ostringstream out;
  for (const auto& d : docs) out << document_to_json(d) << "\n";
  write_file(path, out.str());
}

}  // namespace docbias
