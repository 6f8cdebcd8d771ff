#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <atomic>
#include <thread>

#include "docbias/detector.hpp"
#include "docbias/llm.hpp"
#include "docbias/pipeline.hpp"
#include "helpers.hpp"
#include "httplib.h"
#include "json.hpp"

using namespace docbias;

TEST_CASE("config files parse comments, blanks, and typed values") {
  testutil::TempDir tmp("config");
  std::string path = tmp.file("run.conf");
  write_file(path,
             "# pipeline settings\n"
             "\n"
             "corpus = data/corpus.jsonl\n"
             "dim=32\n"
             "learning_rate = 0.025\n"
             "deterministic = true\n"
             "embeddings = g2v_word, d2v_dbow\n"
             "seeds=3,5,9\n");
  Config cfg = Config::from_file(path);
  CHECK(cfg.require("corpus") == "data/corpus.jsonl");
  CHECK(cfg.get_int("dim", 0) == 32);
  CHECK(cfg.get_double("learning_rate", 0.0) == 0.025);
  CHECK(cfg.get_bool("deterministic", false));
  CHECK(cfg.get_list("embeddings", "") ==
        std::vector<std::string>{"g2v_word", "d2v_dbow"});
  CHECK(cfg.seeds() == std::vector<std::uint64_t>{3, 5, 9});
  CHECK(cfg.get("absent", "fallback") == "fallback");
  CHECK(cfg.get_int("absent", 7) == 7);
  CHECK_FALSE(cfg.has("absent"));
  CHECK_THROWS_AS(cfg.require("absent"), ConfigError);
}

TEST_CASE("config defaults: seed 42, out dir 'out'") {
  Config cfg;
  CHECK(cfg.seed() == 42);
  CHECK(cfg.seeds() == std::vector<std::uint64_t>{42});
  CHECK(cfg.out_dir() == "out");
  cfg.set("seed", "7");
  CHECK(cfg.seed() == 7);
  CHECK(cfg.seeds() == std::vector<std::uint64_t>{7});
}

TEST_CASE("malformed config lines carry their line number") {
  testutil::TempDir tmp("badconfig");
  std::string path = tmp.file("bad.conf");
  write_file(path, "a = 1\nb = 2\nnot-an-assignment\n");
  try {
    Config::from_file(path);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find(":3") != std::string::npos);
  }
}

TEST_CASE("typed getters reject unparseable values") {
  Config cfg;
  cfg.set("dim", "not-a-number");
  cfg.set("rate", "fast");
  cfg.set("flag", "perhaps");
  CHECK_THROWS_AS(cfg.get_int("dim", 0), ConfigError);
  CHECK_THROWS_AS(cfg.get_double("rate", 0.0), ConfigError);
  CHECK_THROWS_AS(cfg.get_bool("flag", false), ConfigError);
}

TEST_CASE("command-line overrides replace config entries") {
  Config cfg;
  cfg.set("dim", "128");
  cfg.apply_override("dim=16");
  CHECK(cfg.get_int("dim", 0) == 16);
  cfg.apply_override("fresh=value");
  CHECK(cfg.get("fresh", "") == "value");
  CHECK_THROWS_AS(cfg.apply_override("no-equals-sign"), ConfigError);
}

TEST_CASE("config hashes track content, not insertion order") {
  Config a, b;
  a.set("x", "1");
  a.set("y", "2");
  b.set("y", "2");
  b.set("x", "1");
  CHECK(a.hash() == b.hash());
  b.set("x", "3");
  CHECK(a.hash() != b.hash());
}

TEST_CASE("manifest records stages and notices drift") {
  testutil::TempDir tmp("manifest");
  std::string input = tmp.file("input.txt");
  std::string output = tmp.file("output.txt");
  write_file(input, "in-v1");
  write_file(output, "out-v1");

  Manifest m(tmp.path());
  auto inputs = hash_inputs({input});
  CHECK_FALSE(m.stage_current("ingest", "cfg1", 42, inputs));
  m.record_stage("ingest", "cfg1", 42, inputs, {output});
  CHECK(m.stage_current("ingest", "cfg1", 42, inputs));

  // another config hash, another seed, or another input hash invalidates
  CHECK_FALSE(m.stage_current("ingest", "cfg2", 42, inputs));
  CHECK_FALSE(m.stage_current("ingest", "cfg1", 43, inputs));
  write_file(input, "in-v2");
  CHECK_FALSE(m.stage_current("ingest", "cfg1", 42, hash_inputs({input})));
  write_file(input, "in-v1");
  CHECK(m.stage_current("ingest", "cfg1", 42, hash_inputs({input})));

  // output tampering invalidates even with matching inputs
  write_file(output, "corrupted");
  CHECK_FALSE(m.stage_current("ingest", "cfg1", 42, inputs));
  write_file(output, "out-v1");
  CHECK(m.stage_current("ingest", "cfg1", 42, inputs));

  // persistence across instances
  m.set_field("library_version", "x");
  m.save();
  Manifest reloaded(tmp.path());
  CHECK(reloaded.stage_current("ingest", "cfg1", 42, inputs));
  CHECK(reloaded.field("library_version") == "x");
  CHECK(reloaded.field("no_such_field") == "");
}

namespace {

struct Fixture {
  testutil::TempDir tmp{"cli_pipeline"};
  std::string corpus, domains, config, out;

  explicit Fixture(int n_per_class = 10, std::uint64_t seed = 21) {
    auto docs = testutil::structural_corpus(n_per_class, n_per_class, 3, seed);
    corpus = tmp.file("corpus.jsonl");
    domains = tmp.file("domains.csv");
    out = tmp.file("out");
    testutil::write_raw_corpus(docs, corpus, domains);
    config = tmp.file("run.conf");
    write_file(config,
               "corpus = " + corpus + "\n" +
               "domains = " + domains + "\n" +
               "out_dir = " + out + "\n" +
               "graph_variants = word\n" +
               "embeddings = g2v_word\n" +
               "dim = 8\n"
               "window = 4\n"
               "epochs = 3\n"
               "min_count = 1\n"
               "schemes = full,binary\n"
               "aggregations = none\n"
               "seeds = 1\n");
  }

  int run(const std::string& stage, std::string* out_text = nullptr,
          std::string* err_text = nullptr, const std::string& extra = "") {
    return testutil::run_cli(stage + " --config " + config + extra, out_text,
                             err_text);
  }
};

}  // namespace

TEST_CASE("the staged pipeline runs end to end and then skips itself") {
  Fixture fx;

  CHECK(fx.run("ingest") == 0);
  CHECK(file_exists(fx.out + "/documents.jsonl"));
  CHECK(file_exists(fx.out + "/split.json"));
  CHECK(file_exists(fx.out + "/manifest.json"));

  CHECK(fx.run("build-graphs") == 0);
  CHECK(file_exists(fx.out + "/graphs/word.jsonl"));

  CHECK(fx.run("train-embed") == 0);
  CHECK(file_exists(fx.out + "/embeddings/g2v_word_s1.csv"));
  CHECK(file_exists(fx.out + "/models/g2v_word_s1.bin"));

  CHECK(fx.run("train-clf") == 0);
  CHECK(file_exists(fx.out + "/predictions/index.json"));

  CHECK(fx.run("evaluate") == 0);
  CHECK(file_exists(fx.out + "/report.json"));
  CHECK(file_exists(fx.out + "/summary.csv"));
  CHECK(file_exists(fx.out + "/comparisons.csv"));

  std::string report = read_file(fx.out + "/report.json");
  CHECK(report.find("\"cells\"") != std::string::npos);
  CHECK(report.find("g2v_word") != std::string::npos);

  // reruns are no-ops: stages announce the skip, artifacts stay byte-equal
  std::string docs_before = read_file(fx.out + "/documents.jsonl");
  std::string report_before = read_file(fx.out + "/report.json");
  for (const char* stage :
       {"ingest", "build-graphs", "train-embed", "train-clf", "evaluate"}) {
    std::string stdout_text;
    CHECK(fx.run(stage, &stdout_text) == 0);
    CHECK(stdout_text.find("up to date") != std::string::npos);
  }
  CHECK(read_file(fx.out + "/documents.jsonl") == docs_before);
  CHECK(read_file(fx.out + "/report.json") == report_before);

  // manifest carries the provenance fields
  std::string manifest = read_file(fx.out + "/manifest.json");
  CHECK(manifest.find("library_version") != std::string::npos);
  CHECK(manifest.find("config_hash") != std::string::npos);
  CHECK(manifest.find("corpus_hash") != std::string::npos);
  CHECK(manifest.find("split_hash") != std::string::npos);

  // graph export rides on the build-graphs artifacts
  std::string err;
  CHECK(fx.run("export-graph", nullptr, &err,
               " --set export_ids=a000 --set export_format=dot") == 0);
  CHECK(file_exists(fx.out + "/export/a000.dot"));
  std::string dot = read_file(fx.out + "/export/a000.dot");
  CHECK(dot.find("--") != std::string::npos);
}

TEST_CASE("the seed flag overrides the config seed") {
  Fixture a_run, b_run;
  CHECK(a_run.run("ingest", nullptr, nullptr, " --seed 7") == 0);
  CHECK(b_run.run("ingest", nullptr, nullptr, " --seed 7") == 0);
  CHECK(read_file(a_run.out + "/split.json") ==
        read_file(b_run.out + "/split.json"));

  Fixture c_run;
  CHECK(c_run.run("ingest", nullptr, nullptr, " --seed 8") == 0);
  CHECK(read_file(a_run.out + "/split.json") !=
        read_file(c_run.out + "/split.json"));
}

TEST_CASE("a corrupt corpus line fails ingest with its line number") {
  Fixture fx;
  std::string good = read_file(fx.corpus);
  auto first_newline = good.find('\n');
  std::string corrupted = good.substr(0, first_newline + 1) + "{broken\n" +
                          good.substr(first_newline + 1);
  write_file(fx.corpus, corrupted);
  std::string err;
  CHECK(fx.run("ingest", nullptr, &err) == 1);
  CHECK(err.find("line 2") != std::string::npos);
}

TEST_CASE("stages demand their prerequisites by name") {
  Fixture fx;
  std::string err;
  CHECK(fx.run("train-embed", nullptr, &err) == 1);
  CHECK(err.find("ingest") != std::string::npos);

  CHECK(fx.run("ingest") == 0);
  CHECK(fx.run("build-graphs") == 0);
  err.clear();
  CHECK(fx.run("train-clf", nullptr, &err) == 1);
  CHECK(err.find("train-embed") != std::string::npos);

  err.clear();
  CHECK(fx.run("evaluate", nullptr, &err) == 1);
  CHECK(err.find("train-clf") != std::string::npos);
}

TEST_CASE("unknown domains are excluded with a warning, not an error") {
  Fixture fx;
  // strip one domain row so its articles lose their label source
  std::string table = read_file(fx.domains);
  auto pos = table.find("dense0.example");
  REQUIRE(pos != std::string::npos);
  auto end = table.find('\n', pos);
  table.erase(pos, end - pos + 1);
  write_file(fx.domains, table);

  std::string err;
  CHECK(fx.run("ingest", nullptr, &err) == 0);
  CHECK(err.find("unknown domain") != std::string::npos);
  auto docs = load_documents_jsonl(fx.out + "/documents.jsonl");
  CHECK(docs.size() == 19);  // 20 minus the one dense0.example article
}

TEST_CASE("cli argument handling: help, bad flags, unknown commands") {
  std::string out_text;
  CHECK(testutil::run_cli("--help", &out_text) == 0);
  CHECK(out_text.find("ingest") != std::string::npos);
  CHECK(out_text.find("evaluate") != std::string::npos);

  CHECK(testutil::run_cli("ingest") == 1);        // --config required
  CHECK(testutil::run_cli("no-such-stage") == 1);
  CHECK(testutil::run_cli("") == 1);              // a subcommand is required
}

TEST_CASE("bad config files surface as user errors, not crashes") {
  testutil::TempDir tmp("cli_badcfg");
  std::string cfg = tmp.file("bad.conf");
  write_file(cfg, "key = 1\nbroken line without equals\n");
  std::string err;
  CHECK(testutil::run_cli("ingest --config " + cfg, nullptr, &err) == 1);
  CHECK(err.find("error:") != std::string::npos);
  CHECK(err.find(":2") != std::string::npos);

  CHECK(testutil::run_cli("ingest --config /no/such/file.conf", nullptr,
                          &err) == 1);
}

// ---------------------------------------------------------------------------
// llm baseline
// ---------------------------------------------------------------------------

namespace {

struct LlmServer {
  httplib::Server server;
  std::thread thread;
  int port = 0;
  std::atomic<int> requests{0};

  explicit LlmServer(std::function<std::string(const std::string&)> reply,
                     int status = 200) {
    server.Post("/v1/chat/completions",
                [this, reply, status](const httplib::Request& req,
                                      httplib::Response& res) {
                  ++requests;
                  std::string prompt;
                  try {
                    auto body = nlohmann::json::parse(req.body);
                    prompt = body["messages"][0]["content"].get<std::string>();
                  } catch (...) {
                  }
                  if (status != 200) {
                    res.status = status;
                    res.set_content("{}", "application/json");
                    return;
                  }
                  nlohmann::json out = {
                      {"choices",
                       {{{"message", {{"content", reply(prompt)}}}}}}};
                  res.set_content(out.dump(), "application/json");
                });
    port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    thread = std::thread([this]() { server.listen_after_bind(); });
    server.wait_until_ready();
  }

  ~LlmServer() {
    server.stop();
    thread.join();
  }

  std::string endpoint() const {
    return "http://127.0.0.1:" + std::to_string(port) +
           "/v1/chat/completions";
  }
};

}  // namespace

TEST_CASE("the zero-shot prompt is assembled verbatim") {
  std::string p = build_llm_prompt("T", "A", {"biased", "unbiased"});
  CHECK(p ==
        "Please classify the following news article by its political bias. "
        "Please only classify the article as biased, unbiased, and return no "
        "other text.\n"
        "title: T\n"
        "article: A\n"
        "bias: ");
}

TEST_CASE("llm responses parse by trimmed case-insensitive exact match") {
  std::vector<std::string> full = scheme_classes(LabelScheme::Full);
  CHECK(parse_llm_label("left-center", full) == "left-center");
  CHECK(parse_llm_label("  LEFT-CENTER.\n", full) == "left-center");
  CHECK(parse_llm_label("\"far-right\"", full) == "far-right");
  CHECK(parse_llm_label("The article is left.", full) == "");
  CHECK(parse_llm_label("", full) == "");
  CHECK(parse_llm_label("biased!!", {"biased", "unbiased"}) == "biased");
}

TEST_CASE("llm classification round-trips against a local server") {
  LlmServer srv([](const std::string&) { return std::string("Left"); });
  testutil::TempDir tmp("llm_cache");

  LlmConfig cfg;
  cfg.endpoint = srv.endpoint();
  cfg.model = "test-model";
  cfg.labels = {"left", "center", "right"};
  cfg.workers = 2;
  cfg.cache_path = tmp.file("cache.json");

  std::vector<LlmArticle> arts = {{"a1", "T1", "body one", "left"},
                                  {"a2", "T2", "body two", "center"}};
  auto preds = llm_classify(cfg, arts);
  REQUIRE(preds.size() == 2);
  CHECK(preds[0].pred_label == "left");
  CHECK(preds[0].raw_response == "Left");
  CHECK_FALSE(preds[0].from_cache);
  CHECK(preds[1].pred_label == "left");
  CHECK(srv.requests == 2);
  CHECK(file_exists(cfg.cache_path));

  // a second pass answers everything from the cache
  auto cached = llm_classify(cfg, arts);
  CHECK(cached[0].from_cache);
  CHECK(cached[1].from_cache);
  CHECK(cached[0].pred_label == "left");
  CHECK(srv.requests == 2);
}

TEST_CASE("unmatched llm responses retry once, then score unparseable") {
  LlmServer srv(
      [](const std::string&) { return std::string("It's complicated."); });
  LlmConfig cfg;
  cfg.endpoint = srv.endpoint();
  cfg.model = "m";
  cfg.labels = {"biased", "unbiased"};
  cfg.workers = 1;

  auto preds = llm_classify(cfg, {{"a1", "T", "body", "biased"}});
  REQUIRE(preds.size() == 1);
  CHECK(preds[0].pred_label == "unparseable");
  CHECK(srv.requests == 2);  // original plus one retry
}

TEST_CASE("auth failures abort the llm run") {
  LlmServer srv([](const std::string&) { return std::string("x"); }, 401);
  LlmConfig cfg;
  cfg.endpoint = srv.endpoint();
  cfg.model = "m";
  cfg.labels = {"biased", "unbiased"};

  CHECK_THROWS_AS(
      llm_classify(cfg, {{"a1", "T", "b", "biased"},
                         {"a2", "T", "b", "unbiased"}}),
      UserError);
}

TEST_CASE("https endpoints are rejected with guidance") {
  LlmConfig cfg;
  cfg.endpoint = "https://api.example.com/v1/chat/completions";
  cfg.model = "m";
  cfg.labels = {"biased", "unbiased"};
  try {
    llm_classify(cfg, {});
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("http") != std::string::npos);
  }
}

TEST_CASE("non-200 statuses record per-article errors without aborting") {
  LlmServer srv([](const std::string&) { return std::string("x"); }, 500);
  LlmConfig cfg;
  cfg.endpoint = srv.endpoint();
  cfg.model = "m";
  cfg.labels = {"biased", "unbiased"};
  auto preds = llm_classify(cfg, {{"a1", "T", "b", "biased"}});
  REQUIRE(preds.size() == 1);
  CHECK_FALSE(preds[0].error.empty());
  CHECK(preds[0].pred_label.empty());
}

TEST_CASE("the llm-baseline command writes predictions and a score file") {
  LlmServer srv([](const std::string&) { return std::string("biased"); });
  Fixture fx;
  // classify the whole corpus (no split yet): every truth in class B is
  // center -> unbiased, class A left -> biased
  std::string extra = " --set llm_endpoint=" + srv.endpoint() +
                      " --set llm_model=test-model --set llm_scheme=binary" +
                      " --set llm_workers=2";
  CHECK(fx.run("llm-baseline", nullptr, nullptr, extra) == 0);
  CHECK(file_exists(fx.out + "/llm/predictions.csv"));
  CHECK(file_exists(fx.out + "/llm/score.json"));

  std::string score = read_file(fx.out + "/llm/score.json");
  CHECK(score.find("\"model\": \"test-model\"") != std::string::npos);
  CHECK(score.find("\"scheme\": \"binary\"") != std::string::npos);
  // half the articles are biased and the server always answers biased
  CHECK(score.find("\"accuracy\": 0.5") != std::string::npos);

  std::string preds = read_file(fx.out + "/llm/predictions.csv");
  CHECK(preds.find("llm:test-model") != std::string::npos);
}
