#pragma once

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "docbias/corpus.hpp"
#include "docbias/util.hpp"

namespace testutil {

// fresh scratch directory under the system temp root, removed on destruction
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    auto base = std::filesystem::temp_directory_path();
    for (int i = 0; i < 10000; ++i) {
      auto candidate = base / (tag + "_" + std::to_string(i));
      std::error_code ec;
      if (std::filesystem::create_directory(candidate, ec)) {
        path_ = candidate.string();
        return;
      }
    }
    throw std::runtime_error("cannot create temp dir for " + tag);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::string& path() const { return path_; }
  std::string file(const std::string& name) const { return path_ + "/" + name; }

 private:
  std::string path_;
};

// two structurally distinct sentence generators over one shared vocabulary:
// class A sentences are random dense subsets (clique-like graphs), class B
// sentences walk a fixed ring (chain-like graphs)
inline std::vector<docbias::Document> structural_corpus(int n_a, int n_b,
                                                        int sentences_per_doc,
                                                        std::uint64_t seed,
                                                        int vocab = 30) {
  std::vector<std::string> lemmas;
  for (int i = 0; i < vocab; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "w%02d", i);
    lemmas.push_back(buf);
  }
  docbias::Rng rng(seed);
  std::vector<docbias::Document> docs;
  auto make_id = [](const char* prefix, int i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%03d", prefix, i);
    return std::string(buf);
  };
  for (int i = 0; i < n_a; ++i) {
    docbias::Document d;
    d.id = make_id("a", i);
    d.domain = "dense" + std::to_string(i % 10) + ".example";
    d.topic = "t" + std::to_string(i % 4);
    d.label = docbias::BiasLabel::Left;
    for (int s = 0; s < sentences_per_doc; ++s) {
      std::vector<std::string> pool = lemmas;
      docbias::shuffle(pool, rng);
      d.sentences.emplace_back(pool.begin(), pool.begin() + 8);
    }
    docs.push_back(std::move(d));
  }
  for (int i = 0; i < n_b; ++i) {
    docbias::Document d;
    d.id = make_id("b", i);
    d.domain = "sparse" + std::to_string(i % 10) + ".example";
    d.topic = "t" + std::to_string(i % 4);
    d.label = docbias::BiasLabel::Center;
    for (int s = 0; s < sentences_per_doc; ++s) {
      int start = static_cast<int>(rng.below(vocab));
      std::vector<std::string> sentence;
      for (int k = 0; k < 3; ++k) {
        sentence.push_back(lemmas[(start + k) % vocab]);
      }
      d.sentences.push_back(std::move(sentence));
    }
    docs.push_back(std::move(d));
  }
  std::sort(docs.begin(), docs.end(),
            [](const docbias::Document& x, const docbias::Document& y) {
              return x.id < y.id;
            });
  return docs;
}

// writes documents out as a raw corpus.jsonl (bodies re-synthesized from the
// lemma sentences) plus the matching domains.csv
inline void write_raw_corpus(const std::vector<docbias::Document>& docs,
                             const std::string& corpus_path,
                             const std::string& domains_path) {
  std::ostringstream corpus;
  std::map<std::string, docbias::BiasLabel> domains;
  for (const auto& d : docs) {
    std::string body;
    for (const auto& sentence : d.sentences) {
      body += docbias::join(sentence, " ") + ". ";
    }
    corpus << "{\"id\":\"" << d.id << "\",\"title\":\"Title " << d.id
           << "\",\"body\":\"" << body << "\",\"domain\":\"" << d.domain
           << "\",\"topic\":\"" << d.topic << "\"}\n";
    domains[d.domain] = d.label;
  }
  docbias::write_file(corpus_path, corpus.str());
  std::ostringstream table;
  table << "domain,label\n";
  for (const auto& [domain, label] : domains) {
    table << domain << ',' << docbias::to_string(label) << '\n';
  }
  docbias::write_file(domains_path, table.str());
}

// runs the pipeline binary named by DOCBIAS_BIN; returns the exit code
inline int run_cli(const std::string& args, std::string* out = nullptr,
                   std::string* err = nullptr) {
  const char* bin = std::getenv("DOCBIAS_BIN");
  if (!bin) throw std::runtime_error("DOCBIAS_BIN not set");
  static int counter = 0;
  std::string tag = (std::filesystem::temp_directory_path() /
                     ("cli_io_" + std::to_string(++counter)))
                        .string();
  std::string cmd = std::string(bin) + " " + args + " >" + tag + ".out 2>" +
                    tag + ".err";
  int rc = std::system(cmd.c_str());
  if (out) *out = docbias::read_file(tag + ".out");
  if (err) *err = docbias::read_file(tag + ".err");
  std::error_code ec;
  std::filesystem::remove(tag + ".out", ec);
  std::filesystem::remove(tag + ".err", ec);
  if (rc == -1) return -1;
  return WEXITSTATUS(rc);
}

}  // namespace testutil
