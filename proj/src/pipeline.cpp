#include "docbias/pipeline.hpp"

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <set>
#include <sstream>

#include "docbias/corpus.hpp"
#include "docbias/detector.hpp"
#include "docbias/embedding.hpp"
#include "docbias/evaluation.hpp"
#include "docbias/graph.hpp"
#include "docbias/llm.hpp"
#include "docbias/wl.hpp"
#include "json.hpp"

namespace docbias {

using ordered_json = nlohmann::ordered_json;

const char* kLibraryVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

Config Config::from_file(const std::string& path) {
  if (!file_exists(path)) throw ConfigError("config file not found: " + path);
  Config cfg;
  std::istringstream in(read_file(path));
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": expected key = value");
    }
    std::string key = trim(t.substr(0, eq));
    if (key.empty()) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": empty key");
    }
    cfg.map_[key] = trim(t.substr(eq + 1));
  }
  return cfg;
}

void Config::set(const std::string& key, const std::string& value) {
  map_[key] = value;
}

void Config::apply_override(const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override must look like key=value: " + assignment);
  }
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

bool Config::has(const std::string& key) const { return map_.count(key) > 0; }

std::string Config::get(const std::string& key,
                        const std::string& fallback) const {
  auto it = map_.find(key);
  return it == map_.end() ? fallback : it->second;
}

std::string Config::require(const std::string& key) const {
  auto it = map_.find(key);
  if (it == map_.end() || it->second.empty()) {
    throw ConfigError("missing config key '" + key + "'");
  }
  return it->second;
}

long Config::get_int(const std::string& key, long fallback) const {
  auto it = map_.find(key);
  if (it == map_.end()) return fallback;
  char* end = nullptr;
  long v = std::strtol(it->second.c_str(), &end, 10);
  if (end == it->second.c_str() || *end != '\0') {
    throw ConfigError("config key '" + key + "' is not an integer: " +
                      it->second);
  }
  return v;
}

double Config::get_double(const std::string& key, double fallback) const {
  auto it = map_.find(key);
  if (it == map_.end()) return fallback;
  char* end = nullptr;
  double v = std::strtod(it->second.c_str(), &end);
  if (end == it->second.c_str() || *end != '\0') {
    throw ConfigError("config key '" + key + "' is not a number: " +
                      it->second);
  }
  return v;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  auto it = map_.find(key);
  if (it == map_.end()) return fallback;
  std::string v = lower_ascii(it->second);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config key '" + key + "' is not a boolean: " +
                    it->second);
}

std::vector<std::string> Config::get_list(const std::string& key,
                                          const std::string& fallback) const {
  std::string raw = get(key, fallback);
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(raw);
  while (std::getline(in, item, ',')) {
    std::string t = trim(item);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

std::uint64_t Config::seed() const {
  auto it = map_.find("seed");
  if (it == map_.end()) return 42;
  char* end = nullptr;
  std::uint64_t v = std::strtoull(it->second.c_str(), &end, 10);
  if (end == it->second.c_str() || *end != '\0') {
    throw ConfigError("config key 'seed' is not an integer: " + it->second);
  }
  return v;
}

std::vector<std::uint64_t> Config::seeds() const {
  if (!has("seeds")) return {seed()};
  std::vector<std::uint64_t> out;
  for (const auto& s : get_list("seeds", "")) {
    char* end = nullptr;
    std::uint64_t v = std::strtoull(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0') {
      throw ConfigError("config key 'seeds' has a non-integer entry: " + s);
    }
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("config key 'seeds' is empty");
  return out;
}

std::string Config::out_dir() const { return get("out_dir", "out"); }

std::string Config::hash() const {
  std::uint64_t h = fnv1a64("", 0);
  for (const auto& [key, value] : map_) {
    std::string line = key + "=" + value + "\n";
    h = fnv1a64(line.data(), line.size(), h);
  }
  return hex64(h);
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

namespace {

ordered_json parse_or_empty(const std::string& text) {
  try {
    ordered_json j = ordered_json::parse(text);
    if (j.is_object()) return j;
  } catch (const nlohmann::json::exception&) {
  }
  return ordered_json::object();
}

}  // namespace

Manifest::Manifest(const std::string& out_dir)
    : path_(out_dir + "/manifest.json") {
  text_ = file_exists(path_) ? read_file(path_) : "{}";
}

bool Manifest::stage_current(
    const std::string& stage, const std::string& config_hash,
    std::uint64_t seed,
    const std::map<std::string, std::string>& inputs) const {
  ordered_json j = parse_or_empty(text_);
  if (!j.contains("stages") || !j["stages"].contains(stage)) return false;
  const auto& entry = j["stages"][stage];
  if (entry.value("config_hash", "") != config_hash) return false;
  if (entry.value("seed", std::uint64_t{0}) != seed) return false;
  if (!entry.contains("inputs") || !entry["inputs"].is_object()) return false;
  if (entry["inputs"].size() != inputs.size()) return false;
  for (const auto& [path, hash] : inputs) {
    if (!entry["inputs"].contains(path) ||
        entry["inputs"][path].get<std::string>() != hash) {
      return false;
    }
  }
  if (!entry.contains("outputs") || !entry["outputs"].is_object()) return false;
  for (const auto& [path, hash] : entry["outputs"].items()) {
    if (!file_exists(path)) return false;
    if (hex64(hash_file(path)) != hash.get<std::string>()) return false;
  }
  return true;
}

void Manifest::record_stage(const std::string& stage,
                            const std::string& config_hash, std::uint64_t seed,
                            const std::map<std::string, std::string>& inputs,
                            const std::vector<std::string>& outputs) {
  ordered_json j = parse_or_empty(text_);
  ordered_json entry;
  entry["config_hash"] = config_hash;
  entry["seed"] = seed;
  entry["inputs"] = ordered_json::object();
  for (const auto& [path, hash] : inputs) entry["inputs"][path] = hash;
  entry["outputs"] = ordered_json::object();
  for (const auto& path : outputs) {
    entry["outputs"][path] = hex64(hash_file(path));
  }
  if (!j.contains("stages")) j["stages"] = ordered_json::object();
  j["stages"][stage] = std::move(entry);
  j["library_version"] = kLibraryVersion;
  j["config_hash"] = config_hash;
  text_ = j.dump(2);
}

void Manifest::set_field(const std::string& key, const std::string& value) {
  ordered_json j = parse_or_empty(text_);
  j[key] = value;
  text_ = j.dump(2);
}

std::string Manifest::field(const std::string& key) const {
  ordered_json j = parse_or_empty(text_);
  if (j.contains(key) && j[key].is_string()) return j[key].get<std::string>();
  return "";
}

void Manifest::save() const { write_file(path_, text_ + "\n"); }

std::map<std::string, std::string> hash_inputs(
    const std::vector<std::string>& paths) {
  std::map<std::string, std::string> out;
  for (const auto& path : paths) out[path] = hex64(hash_file(path));
  return out;
}

// ---------------------------------------------------------------------------
// shared stage helpers
// ---------------------------------------------------------------------------

namespace {

void note_skip(const std::string& stage) {
  std::cout << "[" << stage << "] up to date, skipping\n";
}

void require_artifact(const std::string& path, const std::string& stage) {
  if (!file_exists(path)) {
    throw UserError("missing " + path + "; run the " + stage +
                    " stage first");
  }
}

std::string graphs_path(const std::string& out, GraphVariant v) {
  return out + "/graphs/" + std::string(to_string(v)) + ".jsonl";
}

std::string emb_csv_path(const std::string& out, const std::string& emb,
                         std::uint64_t seed) {
  return out + "/embeddings/" + emb + "_s" + std::to_string(seed) + ".csv";
}

std::string emb_model_path(const std::string& out, const std::string& emb,
                           std::uint64_t seed) {
  return out + "/models/" + emb + "_s" + std::to_string(seed) + ".bin";
}

struct EmbeddingKind {
  bool graph_based = false;
  GraphVariant variant = GraphVariant::WordNode;
  TrainMode mode = TrainMode::Dbow;
};

EmbeddingKind parse_embedding_name(const std::string& name) {
  EmbeddingKind kind;
  if (name == "g2v_base" || name == "g2v_word" || name == "g2v_vector") {
    kind.graph_based = true;
    kind.variant = name == "g2v_base"
                       ? GraphVariant::Base
                       : (name == "g2v_word" ? GraphVariant::WordNode
                                             : GraphVariant::VectorNode);
    kind.mode = TrainMode::Dbow;
    return kind;
  }
  if (name == "d2v_dbow" || name == "d2v_dm") {
    kind.graph_based = false;
    kind.mode = name == "d2v_dbow" ? TrainMode::Dbow : TrainMode::Dm;
    return kind;
  }
  throw ConfigError("unknown embedding config '" + name +
                    "' (expected g2v_base, g2v_word, g2v_vector, d2v_dbow, "
                    "d2v_dm, or hybrid)");
}

TrainParams params_from_config(const Config& cfg, TrainMode mode) {
  TrainParams p;
  p.mode = mode;
  p.dim = static_cast<int>(cfg.get_int("dim", 128));
  p.window = static_cast<int>(cfg.get_int("window", 10));
  p.epochs = static_cast<int>(cfg.get_int("epochs", 50));
  p.lr0 = cfg.get_double("learning_rate", 0.05);
  p.lr_floor = cfg.get_double("lr_floor", 1e-4);
  p.negative = static_cast<int>(cfg.get_int("negative", 5));
  p.min_count = static_cast<int>(cfg.get_int("min_count", 3));
  p.noise_exponent = cfg.get_double("noise_exponent", 0.75);
  bool deterministic = cfg.get_bool("deterministic", true);
  p.workers = deterministic ? 1 : static_cast<int>(cfg.get_int("workers", 1));
  if (p.dim <= 0 || p.epochs <= 0 || p.window <= 0 || p.negative < 1 ||
      p.min_count < 1 || p.lr0 <= 0.0) {
    throw ConfigError("embedding hyperparameters out of range");
  }
  return p;
}

SoftmaxParams softmax_from_config(const Config& cfg) {
  SoftmaxParams p;
  p.lambda = cfg.get_double("lambda", 1e-4);
  p.tol = cfg.get_double("clf_tol", 1e-6);
  p.max_iter = static_cast<int>(cfg.get_int("clf_max_iter", 500));
  if (p.lambda < 0.0 || p.tol <= 0.0 || p.max_iter < 1) {
    throw ConfigError("classifier hyperparameters out of range");
  }
  return p;
}

std::vector<LabelScheme> schemes_from_config(const Config& cfg) {
  std::vector<LabelScheme> out;
  for (const auto& name : cfg.get_list("schemes", "full,lcr,binary")) {
    out.push_back(parse_label_scheme(name));
  }
  if (out.empty()) throw ConfigError("config key 'schemes' is empty");
  return out;
}

std::vector<Aggregation> aggregations_from_config(const Config& cfg) {
  std::vector<Aggregation> out;
  for (const auto& name : cfg.get_list("aggregations", "none")) {
    out.push_back(parse_aggregation(name));
  }
  if (out.empty()) throw ConfigError("config key 'aggregations' is empty");
  return out;
}

struct EmbeddingPlan {
  std::vector<std::string> concrete;          // trained directly
  std::vector<std::string> hybrid_parts;      // two concrete names
  bool wants_hybrid = false;
};

EmbeddingPlan embedding_plan(const Config& cfg) {
  EmbeddingPlan plan;
  auto names = cfg.get_list("embeddings", "g2v_word");
  if (names.empty()) throw ConfigError("config key 'embeddings' is empty");
  for (const auto& name : names) {
    if (name == "hybrid") {
      plan.wants_hybrid = true;
      continue;
    }
    parse_embedding_name(name);  // validate
    plan.concrete.push_back(name);
  }
  if (plan.wants_hybrid) {
    std::string parts = cfg.get("hybrid_parts", "g2v_word+d2v_dbow");
    auto plus = parts.find('+');
    if (plus == std::string::npos) {
      throw ConfigError("hybrid_parts must look like a+b: " + parts);
    }
    plan.hybrid_parts = {trim(parts.substr(0, plus)),
                         trim(parts.substr(plus + 1))};
    for (const auto& part : plan.hybrid_parts) {
      parse_embedding_name(part);  // validate
      if (std::find(plan.concrete.begin(), plan.concrete.end(), part) ==
          plan.concrete.end()) {
        plan.concrete.push_back(part);
      }
    }
  }
  return plan;
}

std::vector<TokenDoc> lemma_token_docs(const std::vector<Document>& docs) {
  std::vector<TokenDoc> out;
  out.reserve(docs.size());
  for (const auto& doc : docs) {
    TokenDoc td;
    td.id = doc.id;
    for (const auto& sentence : doc.sentences) {
      td.tokens.insert(td.tokens.end(), sentence.begin(), sentence.end());
    }
    out.push_back(std::move(td));
  }
  return out;
}

std::vector<TokenDoc> wl_token_docs(const std::vector<DocGraph>& graphs,
                                    int iterations) {
  std::vector<TokenDoc> out;
  out.reserve(graphs.size());
  for (const auto& g : graphs) {
    FeatureDoc fd = wl_relabel(g, iterations);
    TokenDoc td;
    td.id = fd.doc_id;
    td.tokens = std::move(fd.tokens);
    out.push_back(std::move(td));
  }
  return out;
}

struct SplitSets {
  SplitSpec spec;
  std::set<std::string> train;
  std::set<std::string> test;
};

SplitSets load_split(const std::string& out) {
  require_artifact(out + "/split.json", "ingest");
  SplitSets s;
  s.spec = SplitSpec::from_json(read_file(out + "/split.json"));
  s.train.insert(s.spec.train_ids.begin(), s.spec.train_ids.end());
  s.test.insert(s.spec.test_ids.begin(), s.spec.test_ids.end());
  return s;
}

std::string sanitize_filename(const std::string& name) {
  std::string out;
  for (char c : name) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
              (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
    out.push_back(ok ? c : '_');
  }
  return out.empty() ? "_" : out;
}

}  // namespace

// ---------------------------------------------------------------------------
// ingest
// ---------------------------------------------------------------------------

void cmd_ingest(const Config& cfg) {
  std::string out = cfg.out_dir();
  std::string corpus_path = cfg.require("corpus");
  std::string domains_path = cfg.require("domains");
  if (!file_exists(corpus_path)) {
    throw UserError("corpus file not found: " + corpus_path);
  }
  if (!file_exists(domains_path)) {
    throw UserError("domain table not found: " + domains_path);
  }
  std::vector<std::string> input_paths = {corpus_path, domains_path};
  std::string lemmas_path = cfg.get("lemmas", "");
  std::string stoplist_path = cfg.get("stoplist", "");
  for (const auto& p : {lemmas_path, stoplist_path}) {
    if (!p.empty()) {
      if (!file_exists(p)) throw UserError("file not found: " + p);
      input_paths.push_back(p);
    }
  }

  Manifest manifest(out);
  auto inputs = hash_inputs(input_paths);
  if (manifest.stage_current("ingest", cfg.hash(), cfg.seed(), inputs)) {
    note_skip("ingest");
    return;
  }

  auto raw = load_corpus_jsonl(corpus_path);
  auto table = load_domain_table(domains_path);
  CleanOptions opts;
  if (!lemmas_path.empty()) opts.lemmas = load_lemma_table(lemmas_path);
  if (!stoplist_path.empty()) opts.stoplist = load_stoplist(stoplist_path);
  opts.include_title = cfg.get_bool("include_title", false);
  bool drop_empty = cfg.get_bool("drop_empty", true);

  std::sort(raw.begin(), raw.end(),
            [](const RawArticle& a, const RawArticle& b) { return a.id < b.id; });

  std::vector<Document> docs;
  long skipped_domain = 0, skipped_empty = 0;
  for (const auto& article : raw) {
    if (!table.count(article.domain)) {
      std::cerr << "warning: skipping " << article.id << ": unknown domain "
                << article.domain << "\n";
      ++skipped_domain;
      continue;
    }
    auto doc = ingest_article(article, table, opts);
    if (!doc) {
      if (!drop_empty) {
        throw IngestError("document " + article.id +
                          " is empty after cleaning");
      }
      std::cerr << "warning: skipping " << article.id
                << ": empty after cleaning\n";
      ++skipped_empty;
      continue;
    }
    docs.push_back(std::move(*doc));
  }
  if (docs.size() < 2) {
    throw UserError("fewer than two usable documents after ingest");
  }

  std::vector<std::string> ids;
  for (const auto& d : docs) ids.push_back(d.id);
  double fraction = cfg.get_double("split_fraction", 0.8);
  SplitSpec split = cfg.get_bool("split_stratified", false)
                        ? make_split_stratified(docs, cfg.seed(), fraction)
                        : make_split(ids, cfg.seed(), fraction);

  save_documents_jsonl(out + "/documents.jsonl", docs);
  write_file(out + "/split.json", split.to_json());

  manifest.record_stage("ingest", cfg.hash(), cfg.seed(), inputs,
                        {out + "/documents.jsonl", out + "/split.json"});
  manifest.set_field("corpus_hash", hex64(hash_file(corpus_path)));
  manifest.set_field("split_hash", hex64(split.hash()));
  manifest.save();
  std::cout << "[ingest] " << docs.size() << " documents ("
            << skipped_domain << " unknown-domain, " << skipped_empty
            << " empty skipped), train " << split.train_ids.size()
            << " / test " << split.test_ids.size() << "\n";
}

// ---------------------------------------------------------------------------
// build-graphs
// ---------------------------------------------------------------------------

void cmd_build_graphs(const Config& cfg) {
  std::string out = cfg.out_dir();
  require_artifact(out + "/documents.jsonl", "ingest");

  std::vector<GraphVariant> variants;
  for (const auto& name : cfg.get_list("graph_variants", "word")) {
    auto v = parse_graph_variant(name);
    if (!v) {
      throw ConfigError("unknown graph variant '" + name +
                        "' (expected base, word, or vector)");
    }
    variants.push_back(*v);
  }
  if (variants.empty()) throw ConfigError("config key 'graph_variants' is empty");

  bool wants_vector = std::find(variants.begin(), variants.end(),
                                GraphVariant::VectorNode) != variants.end();
  std::vector<std::string> input_paths = {out + "/documents.jsonl"};
  std::string vectors_path = cfg.get("word_vectors", "");
  std::string lexicon_path = cfg.get("sentiment_lexicon", "");
  if (wants_vector) {
    if (vectors_path.empty()) {
      throw ConfigError(
          "graph variant 'vector' needs the word_vectors config key");
    }
    if (!file_exists(vectors_path)) {
      throw UserError("word vector file not found: " + vectors_path);
    }
    input_paths.push_back(vectors_path);
    if (!lexicon_path.empty()) {
      if (!file_exists(lexicon_path)) {
        throw UserError("sentiment lexicon not found: " + lexicon_path);
      }
      input_paths.push_back(lexicon_path);
    }
  }

  Manifest manifest(out);
  auto inputs = hash_inputs(input_paths);
  if (manifest.stage_current("build-graphs", cfg.hash(), cfg.seed(), inputs)) {
    note_skip("build-graphs");
    return;
  }

  auto docs = load_documents_jsonl(out + "/documents.jsonl");
  WordVectors vectors;
  SentimentLexicon lexicon;
  if (wants_vector) {
    vectors = load_word_vectors(vectors_path);
    if (!lexicon_path.empty()) lexicon = load_sentiment_lexicon(lexicon_path);
  }

  std::vector<std::string> outputs;
  for (GraphVariant variant : variants) {
    std::vector<DocGraph> graphs;
    graphs.reserve(docs.size());
    for (const auto& doc : docs) {
      try {
        graphs.push_back(build_graph(doc, variant, &vectors, &lexicon));
      } catch (const EmptyDocumentError& e) {
        throw UserError(std::string(e.what()) + "; re-run the ingest stage");
      }
    }
    std::string path = graphs_path(out, variant);
    save_graphs_jsonl(path, graphs);
    outputs.push_back(path);
    std::cout << "[build-graphs] " << to_string(variant) << ": "
              << graphs.size() << " graphs\n";
  }

  manifest.record_stage("build-graphs", cfg.hash(), cfg.seed(), inputs,
                        outputs);
  manifest.save();
}

// ---------------------------------------------------------------------------
// train-embed
// ---------------------------------------------------------------------------

void cmd_train_embed(const Config& cfg) {
  std::string out = cfg.out_dir();
  require_artifact(out + "/documents.jsonl", "ingest");
  SplitSets split = load_split(out);
  EmbeddingPlan plan = embedding_plan(cfg);
  auto run_seeds = cfg.seeds();
  int wl_iterations = static_cast<int>(cfg.get_int("wl_iterations", 2));
  if (wl_iterations < 0) throw ConfigError("wl_iterations must be >= 0");

  std::vector<std::string> input_paths = {out + "/documents.jsonl",
                                          out + "/split.json"};
  std::set<GraphVariant> needed_variants;
  for (const auto& name : plan.concrete) {
    EmbeddingKind kind = parse_embedding_name(name);
    if (kind.graph_based) needed_variants.insert(kind.variant);
  }
  for (GraphVariant v : needed_variants) {
    require_artifact(graphs_path(out, v), "build-graphs");
    input_paths.push_back(graphs_path(out, v));
  }

  Manifest manifest(out);
  auto inputs = hash_inputs(input_paths);
  if (manifest.stage_current("train-embed", cfg.hash(), cfg.seed(), inputs)) {
    note_skip("train-embed");
    return;
  }

  auto docs = load_documents_jsonl(out + "/documents.jsonl");
  std::map<GraphVariant, std::vector<TokenDoc>> graph_tokens;
  for (GraphVariant v : needed_variants) {
    graph_tokens[v] =
        wl_token_docs(load_graphs_jsonl(graphs_path(out, v)), wl_iterations);
  }
  std::vector<TokenDoc> lemma_tokens;

  std::vector<std::string> outputs;
  for (const auto& name : plan.concrete) {
    EmbeddingKind kind = parse_embedding_name(name);
    const std::vector<TokenDoc>* all_tokens;
    if (kind.graph_based) {
      all_tokens = &graph_tokens[kind.variant];
    } else {
      if (lemma_tokens.empty()) lemma_tokens = lemma_token_docs(docs);
      all_tokens = &lemma_tokens;
    }
    TrainParams params = params_from_config(cfg, kind.mode);

    std::vector<TokenDoc> train_tokens;
    std::vector<const TokenDoc*> test_tokens;
    for (const auto& td : *all_tokens) {
      if (split.train.count(td.id)) {
        train_tokens.push_back(td);
      } else if (split.test.count(td.id)) {
        test_tokens.push_back(&td);
      }
    }
    if (train_tokens.empty()) {
      throw UserError("no training documents for embedding " + name +
                      "; the split does not match the corpus");
    }

    for (std::uint64_t seed : run_seeds) {
      EmbeddingModel model = train_embeddings(train_tokens, params, seed);
      std::string mpath = emb_model_path(out, name, seed);
      save_model(model, mpath);
      outputs.push_back(mpath);

      std::map<std::string, DocVector> by_id;
      for (std::size_t d = 0; d < model.doc_ids.size(); ++d) {
        DocVector dv;
        dv.doc_id = model.doc_ids[d];
        dv.values.assign(
            model.doc_vectors.begin() + static_cast<long>(d) * params.dim,
            model.doc_vectors.begin() + static_cast<long>(d + 1) * params.dim);
        by_id[dv.doc_id] = std::move(dv);
      }
      for (const TokenDoc* td : test_tokens) {
        DocVector dv = infer_vector(model, *td, seed);
        if (dv.all_oov) {
          std::cerr << "warning: " << td->id << " has no in-vocabulary "
                    << "tokens under " << name << "; zero vector used\n";
        }
        by_id[dv.doc_id] = std::move(dv);
      }
      std::vector<DocVector> ordered;
      ordered.reserve(by_id.size());
      for (auto& [id, dv] : by_id) ordered.push_back(std::move(dv));
      std::string cpath = emb_csv_path(out, name, seed);
      save_embeddings_csv(cpath, ordered);
      outputs.push_back(cpath);
      std::cout << "[train-embed] " << name << " seed " << seed
                << ": vocab " << model.vocab.size() << ", final loss "
                << (model.epoch_loss.empty() ? 0.0 : model.epoch_loss.back())
                << "\n";
    }
  }

  if (plan.wants_hybrid) {
    for (std::uint64_t seed : run_seeds) {
      auto a = load_embeddings_csv(
          emb_csv_path(out, plan.hybrid_parts[0], seed));
      auto b = load_embeddings_csv(
          emb_csv_path(out, plan.hybrid_parts[1], seed));
      if (a.size() != b.size()) {
        throw UserError("hybrid parts cover different document sets");
      }
      std::vector<DocVector> combined;
      combined.reserve(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) {
        combined.push_back(concat_hybrid(a[i], b[i]));
      }
      std::string cpath = emb_csv_path(out, "hybrid", seed);
      save_embeddings_csv(cpath, combined);
      outputs.push_back(cpath);
      std::cout << "[train-embed] hybrid seed " << seed << ": "
                << combined.size() << " vectors of length "
                << (combined.empty() ? 0 : combined.front().values.size())
                << "\n";
    }
  }

  manifest.record_stage("train-embed", cfg.hash(), cfg.seed(), inputs,
                        outputs);
  manifest.save();
}

// ---------------------------------------------------------------------------
// train-clf
// ---------------------------------------------------------------------------

namespace {

struct CellFiles {
  std::string embedding;
  std::string scheme;
  std::string aggregation;
  std::uint64_t seed = 0;
  bool derived_from_full = false;
  bool ok = false;
  std::string error;
  std::string predictions;
  std::string zero_rule;
  int n_train_units = 0;
  int n_test_units = 0;
};

std::string cell_file(const std::string& out, const std::string& emb,
                      const std::string& scheme, const std::string& agg,
                      std::uint64_t seed, bool derived) {
  return out + "/predictions/" + emb + "." + scheme + "." + agg + ".s" +
         std::to_string(seed) + (derived ? ".regroup" : "") + ".csv";
}

std::string zero_file(const std::string& out, const std::string& scheme,
                      const std::string& agg, bool derived) {
  return out + "/predictions/zero_rule." + scheme + "." + agg +
         (derived ? ".regroup" : "") + ".csv";
}

}  // namespace

void cmd_train_clf(const Config& cfg) {
  std::string out = cfg.out_dir();
  require_artifact(out + "/documents.jsonl", "ingest");
  SplitSets split = load_split(out);
  EmbeddingPlan plan = embedding_plan(cfg);
  std::vector<std::string> emb_names = cfg.get_list("embeddings", "g2v_word");
  auto run_seeds = cfg.seeds();
  auto schemes = schemes_from_config(cfg);
  auto aggregations = aggregations_from_config(cfg);
  SoftmaxParams sm = softmax_from_config(cfg);
  bool regroup_full = cfg.get_bool("regroup_full", true);
  bool use_article_labels = cfg.get_bool("use_article_labels", false);

  std::vector<std::string> input_paths = {out + "/documents.jsonl",
                                          out + "/split.json"};
  for (const auto& emb : emb_names) {
    for (std::uint64_t seed : run_seeds) {
      require_artifact(emb_csv_path(out, emb, seed), "train-embed");
      input_paths.push_back(emb_csv_path(out, emb, seed));
    }
  }

  Manifest manifest(out);
  auto inputs = hash_inputs(input_paths);
  if (manifest.stage_current("train-clf", cfg.hash(), cfg.seed(), inputs)) {
    note_skip("train-clf");
    return;
  }

  auto docs = load_documents_jsonl(out + "/documents.jsonl");
  std::map<std::string, const Document*> doc_by_id;
  for (const auto& d : docs) doc_by_id[d.id] = &d;

  auto grid_side = [&](const std::map<std::string, std::vector<double>>& vecs,
                       const std::set<std::string>& ids) {
    std::vector<GridArticle> articles;
    for (const auto& id : ids) {
      auto dit = doc_by_id.find(id);
      if (dit == doc_by_id.end()) continue;
      auto vit = vecs.find(id);
      if (vit == vecs.end()) {
        throw UserError("embedding csv has no vector for document " + id +
                        "; re-run the train-embed stage");
      }
      GridArticle a;
      a.doc_id = id;
      a.domain = dit->second->domain;
      a.topic = dit->second->topic;
      a.label = use_article_labels && dit->second->article_label
                    ? *dit->second->article_label
                    : dit->second->label;
      a.values = vit->second;
      articles.push_back(std::move(a));
    }
    return articles;
  };

  std::vector<CellFiles> index;
  std::set<std::string> zero_written;
  std::vector<std::string> outputs;

  for (const auto& emb : emb_names) {
    for (std::uint64_t seed : run_seeds) {
      auto csv = load_embeddings_csv(emb_csv_path(out, emb, seed));
      std::map<std::string, std::vector<double>> vecs;
      for (auto& dv : csv) vecs[dv.doc_id] = std::move(dv.values);
      auto train_articles = grid_side(vecs, split.train);
      auto test_articles = grid_side(vecs, split.test);

      for (LabelScheme scheme : schemes) {
        for (Aggregation agg : aggregations) {
          CellFiles cell;
          cell.embedding = emb;
          cell.scheme = to_string(scheme);
          cell.aggregation = to_string(agg);
          cell.seed = seed;
          try {
            CellUnits tr = grid_units(train_articles, scheme, agg);
            CellUnits te = grid_units(test_articles, scheme, agg);
            cell.n_train_units = static_cast<int>(tr.ids.size());
            cell.n_test_units = static_cast<int>(te.ids.size());
            auto classes = scheme_classes(scheme);

            SoftmaxModel model = train_softmax(tr.features, tr.labels,
                                               classes, sm);
            if (!model.converged) {
              std::cerr << "warning: " << emb << "/" << cell.scheme << "/"
                        << cell.aggregation << " seed " << seed
                        << ": gradient descent stopped at "
                        << model.iterations << " iterations (grad norm "
                        << model.final_grad_norm << "); using best iterate\n";
            }
            std::string clf_path = out + "/models/clf_" + emb + "." +
                                   cell.scheme + "." + cell.aggregation +
                                   ".s" + std::to_string(seed) + ".json";
            save_softmax(model, clf_path);
            outputs.push_back(clf_path);

            std::vector<Prediction> preds;
            preds.reserve(te.ids.size());
            for (std::size_t i = 0; i < te.ids.size(); ++i) {
              preds.push_back(predict_one(model, te.ids[i], te.labels[i],
                                          te.features[i]));
            }
            cell.predictions =
                cell_file(out, emb, cell.scheme, cell.aggregation, seed, false);
            save_predictions_csv(cell.predictions, preds, cell.scheme,
                                 cell.aggregation, emb);
            outputs.push_back(cell.predictions);

            ZeroRule zr = train_zero_rule(tr.labels, classes);
            cell.zero_rule = zero_file(out, cell.scheme, cell.aggregation,
                                       false);
            if (!zero_written.count(cell.zero_rule)) {
              std::vector<Prediction> zr_preds;
              for (std::size_t i = 0; i < te.ids.size(); ++i) {
                Prediction p;
                p.id = te.ids[i];
                p.true_label = te.labels[i];
                p.pred_label = zr.majority;
                p.prob_max = 1.0;
                zr_preds.push_back(std::move(p));
              }
              save_predictions_csv(cell.zero_rule, zr_preds, cell.scheme,
                                   cell.aggregation, "zero_rule");
              zero_written.insert(cell.zero_rule);
              outputs.push_back(cell.zero_rule);
            }
            cell.ok = true;

            if (scheme == LabelScheme::Full && regroup_full) {
              for (LabelScheme target :
                   {LabelScheme::LeftCenterRight, LabelScheme::Binary}) {
                CellFiles derived = cell;
                derived.scheme = to_string(target);
                derived.derived_from_full = true;
                std::vector<Prediction> re_preds;
                re_preds.reserve(preds.size());
                for (const auto& p : preds) {
                  Prediction rp = p;
                  rp.true_label =
                      map_label(*parse_bias_label(p.true_label), target);
                  rp.pred_label =
                      map_label(*parse_bias_label(p.pred_label), target);
                  re_preds.push_back(std::move(rp));
                }
                derived.predictions = cell_file(out, emb, derived.scheme,
                                                derived.aggregation, seed,
                                                true);
                save_predictions_csv(derived.predictions, re_preds,
                                     derived.scheme, derived.aggregation, emb);
                outputs.push_back(derived.predictions);

                derived.zero_rule = zero_file(out, derived.scheme,
                                              derived.aggregation, true);
                if (!zero_written.count(derived.zero_rule)) {
                  std::vector<Prediction> zr_preds;
                  std::string zr_mapped =
                      map_label(*parse_bias_label(zr.majority), target);
                  for (std::size_t i = 0; i < te.ids.size(); ++i) {
                    Prediction p;
                    p.id = te.ids[i];
                    p.true_label =
                        map_label(*parse_bias_label(te.labels[i]), target);
                    p.pred_label = zr_mapped;
                    p.prob_max = 1.0;
                    zr_preds.push_back(std::move(p));
                  }
                  save_predictions_csv(derived.zero_rule, zr_preds,
                                       derived.scheme, derived.aggregation,
                                       "zero_rule");
                  zero_written.insert(derived.zero_rule);
                  outputs.push_back(derived.zero_rule);
                }
                index.push_back(std::move(derived));
              }
            }
          } catch (const std::exception& e) {
            cell.ok = false;
            cell.error = e.what();
            std::cerr << "warning: cell " << emb << "/" << cell.scheme << "/"
                      << cell.aggregation << " seed " << seed
                      << " failed: " << e.what() << "\n";
          }
          index.push_back(std::move(cell));
        }
      }
    }
  }

  ordered_json jindex;
  jindex["cells"] = ordered_json::array();
  for (const auto& cell : index) {
    ordered_json jc;
    jc["embedding"] = cell.embedding;
    jc["scheme"] = cell.scheme;
    jc["aggregation"] = cell.aggregation;
    jc["seed"] = cell.seed;
    jc["derived_from_full"] = cell.derived_from_full;
    jc["ok"] = cell.ok;
    if (cell.ok) {
      jc["predictions"] = cell.predictions;
      jc["zero_rule"] = cell.zero_rule;
      jc["n_train_units"] = cell.n_train_units;
      jc["n_test_units"] = cell.n_test_units;
    } else {
      jc["error"] = cell.error;
    }
    jindex["cells"].push_back(std::move(jc));
  }
  std::string index_path = out + "/predictions/index.json";
  write_file(index_path, jindex.dump(2) + "\n");
  outputs.push_back(index_path);

  manifest.record_stage("train-clf", cfg.hash(), cfg.seed(), inputs, outputs);
  manifest.save();
  std::cout << "[train-clf] " << index.size() << " cells\n";
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

void cmd_evaluate(const Config& cfg) {
  std::string out = cfg.out_dir();
  std::string index_path = out + "/predictions/index.json";
  require_artifact(index_path, "train-clf");
  require_artifact(out + "/documents.jsonl", "ingest");
  SplitSets split = load_split(out);

  bool metrics_study = cfg.get_bool("metrics_study", true);
  auto graph_variants = cfg.get_list("graph_variants", "word");
  std::string metrics_variant_name =
      cfg.get("metrics_variant",
              graph_variants.empty() ? "word" : graph_variants.front());
  std::string metrics_graphs;
  if (metrics_study) {
    auto v = parse_graph_variant(metrics_variant_name);
    if (!v) {
      throw ConfigError("unknown metrics_variant '" + metrics_variant_name +
                        "'");
    }
    metrics_graphs = graphs_path(out, *v);
    require_artifact(metrics_graphs, "build-graphs");
  }

  ordered_json jindex;
  try {
    jindex = ordered_json::parse(read_file(index_path));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(index_path + ": " + e.what());
  }

  std::vector<std::string> input_paths = {index_path, out + "/documents.jsonl",
                                          out + "/split.json"};
  for (const auto& jc : jindex["cells"]) {
    if (jc.value("ok", false)) {
      input_paths.push_back(jc["predictions"].get<std::string>());
      input_paths.push_back(jc["zero_rule"].get<std::string>());
    }
  }
  std::sort(input_paths.begin(), input_paths.end());
  input_paths.erase(std::unique(input_paths.begin(), input_paths.end()),
                    input_paths.end());
  if (!metrics_graphs.empty()) input_paths.push_back(metrics_graphs);

  Manifest manifest(out);
  auto inputs = hash_inputs(input_paths);
  if (manifest.stage_current("evaluate", cfg.hash(), cfg.seed(), inputs)) {
    note_skip("evaluate");
    return;
  }

  ExperimentReport report;
  report.dataset = cfg.get("dataset", "corpus");
  report.split_hash = hex64(split.spec.hash());

  for (const auto& jc : jindex["cells"]) {
    GridCell cell;
    cell.embedding = jc.value("embedding", "");
    cell.scheme = jc.value("scheme", "");
    cell.aggregation = jc.value("aggregation", "");
    cell.seed = jc.value("seed", std::uint64_t{0});
    cell.derived_from_full = jc.value("derived_from_full", false);
    cell.ok = jc.value("ok", false);
    if (!cell.ok) {
      cell.error = jc.value("error", "");
      report.cells.push_back(std::move(cell));
      continue;
    }
    cell.n_train_units = jc.value("n_train_units", 0);
    cell.n_test_units = jc.value("n_test_units", 0);
    auto preds = load_predictions_csv(jc["predictions"].get<std::string>());
    auto zeros = load_predictions_csv(jc["zero_rule"].get<std::string>());
    std::vector<std::string> p, t, zp, zt;
    for (const auto& pr : preds) {
      p.push_back(pr.pred_label);
      t.push_back(pr.true_label);
    }
    for (const auto& pr : zeros) {
      zp.push_back(pr.pred_label);
      zt.push_back(pr.true_label);
    }
    cell.model = score(p, t);
    cell.zero_rule = score(zp, zt);
    report.cells.push_back(std::move(cell));
  }

  std::vector<std::pair<std::string, std::string>> comparison_pairs;
  for (const auto& pair_spec : cfg.get_list("comparisons", "")) {
    auto colon = pair_spec.find(':');
    if (colon == std::string::npos) {
      throw ConfigError("comparisons entries must look like a:b, got " +
                        pair_spec);
    }
    comparison_pairs.emplace_back(trim(pair_spec.substr(0, colon)),
                                  trim(pair_spec.substr(colon + 1)));
  }
  finalize_report(report, comparison_pairs);
  save_report(report, out);

  std::vector<std::string> outputs = {out + "/report.json",
                                      out + "/summary.csv",
                                      out + "/comparisons.csv"};

  // descriptive graph metrics: per-article table, correlation with the
  // ordinal bias encoding, and a metrics-only classifier baseline
  if (metrics_study) {
    auto docs = load_documents_jsonl(out + "/documents.jsonl");
    std::map<std::string, const Document*> doc_by_id;
    for (const auto& d : docs) doc_by_id[d.id] = &d;
    auto graphs = load_graphs_jsonl(metrics_graphs);

    std::ostringstream csv;
    csv << "doc_id,label,ordinal";
    for (const auto& name : GraphMetricVector::names()) csv << ',' << name;
    csv << ",assortativity_defined\n";

    std::vector<std::vector<double>> rows;
    std::vector<int> ordinals;
    std::vector<bool> assort_defined;
    std::vector<std::string> binary_labels, row_ids;
    for (const auto& g : graphs) {
      auto dit = doc_by_id.find(g.doc_id);
      if (dit == doc_by_id.end()) continue;
      GraphMetricVector m = graph_metrics(g);
      std::vector<double> vals = m.values();
      csv << csv_escape(g.doc_id) << ',' << to_string(dit->second->label)
          << ',' << ordinal(dit->second->label);
      for (double v : vals) csv << ',' << repr_double(v);
      csv << ',' << (m.assortativity_defined ? "true" : "false") << '\n';
      rows.push_back(std::move(vals));
      ordinals.push_back(ordinal(dit->second->label));
      assort_defined.push_back(m.assortativity_defined);
      binary_labels.push_back(map_label(dit->second->label,
                                        LabelScheme::Binary));
      row_ids.push_back(g.doc_id);
    }
    write_file(out + "/metrics_articles.csv", csv.str());
    outputs.push_back(out + "/metrics_articles.csv");

    ordered_json extended = ordered_json::parse(report_to_json(report));
    extended["metric_correlations"] = ordered_json::array();
    const auto& names = GraphMetricVector::names();
    for (std::size_t j = 0; j < names.size(); ++j) {
      std::vector<double> x, y;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (names[j] == "degree_assortativity" && !assort_defined[i]) continue;
        x.push_back(static_cast<double>(ordinals[i]));
        y.push_back(rows[i][j]);
      }
      ordered_json jr;
      jr["metric"] = names[j];
      jr["n"] = x.size();
      if (x.size() < 3) {
        jr["undefined"] = true;
      } else {
        PearsonResult pr = pearson_r(x, y);
        if (pr.undefined) {
          jr["undefined"] = true;
        } else {
          jr["r"] = pr.r;
          jr["p_value"] = pr.p;
        }
      }
      extended["metric_correlations"].push_back(std::move(jr));
    }

    ordered_json jb;
    try {
      std::vector<std::vector<double>> train_x, test_x;
      std::vector<std::string> train_y, test_y;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (split.train.count(row_ids[i])) {
          train_x.push_back(rows[i]);
          train_y.push_back(binary_labels[i]);
        } else if (split.test.count(row_ids[i])) {
          test_x.push_back(rows[i]);
          test_y.push_back(binary_labels[i]);
        }
      }
      MetricsBaselineResult mb = metrics_baseline(
          train_x, train_y, test_x, test_y,
          scheme_classes(LabelScheme::Binary), softmax_from_config(cfg));
      jb["accuracy"] = mb.test_score.accuracy;
      jb["macro_f1"] = mb.test_score.macro_f1;
      jb["dropped_columns"] = mb.dropped_columns;
      for (const auto& w : mb.warnings) std::cerr << "warning: " << w << "\n";
    } catch (const std::exception& e) {
      jb["error"] = e.what();
    }
    extended["metrics_baseline"] = std::move(jb);
    write_file(out + "/report.json", extended.dump(2) + "\n");
  }

  manifest.record_stage("evaluate", cfg.hash(), cfg.seed(), inputs, outputs);
  manifest.save();
  std::cout << "[evaluate] " << report.cells.size() << " cells, "
            << report.comparisons.size() << " comparisons, "
            << report.summaries.size() << " summary rows\n";
}

// ---------------------------------------------------------------------------
// export-graph
// ---------------------------------------------------------------------------

void cmd_export_graph(const Config& cfg) {
  std::string out = cfg.out_dir();
  std::string variant_name = cfg.get("export_variant", "word");
  auto variant = parse_graph_variant(variant_name);
  if (!variant) {
    throw ConfigError("unknown export_variant '" + variant_name + "'");
  }
  std::string format = cfg.get("export_format", "graphml");
  if (format != "graphml" && format != "dot") {
    throw ConfigError("export_format must be graphml or dot, got " + format);
  }
  std::string gpath = graphs_path(out, *variant);
  require_artifact(gpath, "build-graphs");

  auto wanted = cfg.get_list("export_ids", "");
  std::set<std::string> wanted_set(wanted.begin(), wanted.end());

  Manifest manifest(out);
  auto inputs = hash_inputs({gpath});
  if (manifest.stage_current("export-graph", cfg.hash(), cfg.seed(), inputs)) {
    note_skip("export-graph");
    return;
  }

  auto graphs = load_graphs_jsonl(gpath);
  std::vector<std::string> outputs;
  long exported = 0;
  for (const auto& g : graphs) {
    if (!wanted_set.empty() && !wanted_set.count(g.doc_id)) continue;
    std::string path = out + "/export/" + sanitize_filename(g.doc_id) +
                       (format == "graphml" ? ".graphml" : ".dot");
    write_file(path, format == "graphml" ? export_graphml(g) : export_dot(g));
    outputs.push_back(path);
    ++exported;
  }
  if (!wanted_set.empty() && exported != static_cast<long>(wanted_set.size())) {
    std::cerr << "warning: " << (wanted_set.size() - exported)
              << " requested ids not present in " << gpath << "\n";
  }
  manifest.record_stage("export-graph", cfg.hash(), cfg.seed(), inputs,
                        outputs);
  manifest.save();
  std::cout << "[export-graph] wrote " << exported << " files\n";
}

// ---------------------------------------------------------------------------
// llm-baseline
// ---------------------------------------------------------------------------

void cmd_llm_baseline(const Config& cfg) {
  std::string out = cfg.out_dir();
  std::string corpus_path = cfg.require("corpus");
  std::string domains_path = cfg.require("domains");
  if (!file_exists(corpus_path)) {
    throw UserError("corpus file not found: " + corpus_path);
  }
  if (!file_exists(domains_path)) {
    throw UserError("domain table not found: " + domains_path);
  }

  LabelScheme scheme = parse_label_scheme(cfg.get("llm_scheme", "binary"));
  LlmConfig lc;
  lc.endpoint = cfg.require("llm_endpoint");
  lc.model = cfg.require("llm_model");
  lc.labels = scheme_classes(scheme);
  lc.timeout_s = static_cast<int>(cfg.get_int("llm_timeout_s", 30));
  lc.workers = static_cast<int>(cfg.get_int("llm_workers", 4));
  lc.cache_path = cfg.get("llm_cache", out + "/llm_cache.json");
  std::string key_env = cfg.get("llm_api_key_env", "");
  if (!key_env.empty()) {
    const char* key = std::getenv(key_env.c_str());
    if (key) lc.api_key = key;
  }

  auto raw = load_corpus_jsonl(corpus_path);
  auto table = load_domain_table(domains_path);
  std::sort(raw.begin(), raw.end(),
            [](const RawArticle& a, const RawArticle& b) { return a.id < b.id; });

  // only the held-out side when a split exists, so scores line up with the
  // grid's test metrics
  std::set<std::string> test_ids;
  if (file_exists(out + "/split.json")) {
    SplitSpec spec = SplitSpec::from_json(read_file(out + "/split.json"));
    test_ids.insert(spec.test_ids.begin(), spec.test_ids.end());
  }

  std::vector<LlmArticle> articles;
  for (const auto& a : raw) {
    if (!test_ids.empty() && !test_ids.count(a.id)) continue;
    auto it = table.find(a.domain);
    if (it == table.end()) {
      std::cerr << "warning: skipping " << a.id << ": unknown domain "
                << a.domain << "\n";
      continue;
    }
    LlmArticle la;
    la.id = a.id;
    la.title = a.title;
    la.body = a.body;
    la.true_label = map_label(it->second, scheme);
    articles.push_back(std::move(la));
  }
  if (articles.empty()) throw UserError("no articles to classify");

  auto results = llm_classify(lc, articles);

  std::vector<Prediction> preds;
  ordered_json errors = ordered_json::array();
  long n_unparseable = 0;
  for (const auto& r : results) {
    if (!r.error.empty()) {
      ordered_json je;
      je["id"] = r.id;
      je["error"] = r.error;
      errors.push_back(std::move(je));
      continue;
    }
    Prediction p;
    p.id = r.id;
    p.true_label = r.true_label;
    p.pred_label = r.pred_label;
    p.prob_max = 0.0;
    if (r.pred_label == "unparseable") ++n_unparseable;
    preds.push_back(std::move(p));
  }

  save_predictions_csv(out + "/llm/predictions.csv", preds,
                       to_string(scheme), "none", "llm:" + lc.model);

  ordered_json jscore;
  jscore["model"] = lc.model;
  jscore["scheme"] = to_string(scheme);
  jscore["n_scored"] = preds.size();
  jscore["n_errors"] = errors.size();
  jscore["n_unparseable"] = n_unparseable;
  if (!preds.empty()) {
    std::vector<std::string> p, t;
    for (const auto& pr : preds) {
      p.push_back(pr.pred_label);
      t.push_back(pr.true_label);
    }
    MetricPair mp = score(p, t);
    jscore["accuracy"] = mp.accuracy;
    jscore["macro_f1"] = mp.macro_f1;
  }
  write_file(out + "/llm/score.json", jscore.dump(2) + "\n");
  write_file(out + "/llm/errors.json", errors.dump(2) + "\n");

  std::cout << "[llm-baseline] " << preds.size() << " scored, "
            << errors.size() << " request errors, " << n_unparseable
            << " unparseable\n";
}

}  // namespace docbias
