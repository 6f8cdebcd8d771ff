#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "docbias/util.hpp"

namespace docbias {

// flat key = value configuration with typed accessors; '#' lines are
// comments, lists are comma separated
class Config {
 public:
  Config() = default;
  static Config from_file(const std::string& path);

  void set(const std::string& key, const std::string& value);
  // "key=value" as passed on the command line
  void apply_override(const std::string& assignment);

  bool has(const std::string& key) const;
  std::string get(const std::string& key, const std::string& fallback) const;
  std::string require(const std::string& key) const;
  long get_int(const std::string& key, long fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<std::string> get_list(const std::string& key,
                                    const std::string& fallback) const;

  std::uint64_t seed() const;                 // key "seed", default 42
  std::vector<std::uint64_t> seeds() const;   // key "seeds", default {seed}
  std::string out_dir() const;                // key "out_dir", default "out"

  std::string hash() const;  // content hash over sorted entries
  const std::map<std::string, std::string>& entries() const { return map_; }

 private:
  std::map<std::string, std::string> map_;
};

// per-stage record of config hash, seed, input hashes, and output hashes;
// a stage whose record still matches the world is skipped on rerun
class Manifest {
 public:
  explicit Manifest(const std::string& out_dir);

  bool stage_current(const std::string& stage, const std::string& config_hash,
                     std::uint64_t seed,
                     const std::map<std::string, std::string>& inputs) const;
  void record_stage(const std::string& stage, const std::string& config_hash,
                    std::uint64_t seed,
                    const std::map<std::string, std::string>& inputs,
                    const std::vector<std::string>& outputs);
  void set_field(const std::string& key, const std::string& value);
  std::string field(const std::string& key) const;  // "" when absent
  void save() const;

 private:
  std::string path_;
  std::string text_;  // current json document
};

std::map<std::string, std::string> hash_inputs(
    const std::vector<std::string>& paths);

// pipeline stages; each throws UserError subclasses on bad input and skips
// itself when the manifest still matches
void cmd_ingest(const Config& cfg);
void cmd_build_graphs(const Config& cfg);
void cmd_train_embed(const Config& cfg);
void cmd_train_clf(const Config& cfg);
void cmd_evaluate(const Config& cfg);
void cmd_export_graph(const Config& cfg);
void cmd_llm_baseline(const Config& cfg);

extern const char* kLibraryVersion;

}  // namespace docbias
