#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "docbias/pipeline.hpp"

namespace {

struct Stage {
  const char* name;
  const char* help;
  void (*fn)(const docbias::Config&);
  CLI::App* sub = nullptr;
  std::string config_path;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
  std::vector<std::string> overrides;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"news bias detection over word co-occurrence graphs"};
  app.require_subcommand(1);

  Stage stages[] = {
      {"ingest", "clean, lemmatize, label, and split the corpus",
       &docbias::cmd_ingest},
      {"build-graphs", "build per-article co-occurrence graphs",
       &docbias::cmd_build_graphs},
      {"train-embed", "train document embeddings and infer test vectors",
       &docbias::cmd_train_embed},
      {"train-clf", "train classifiers for every grid cell",
       &docbias::cmd_train_clf},
      {"evaluate", "score cells, run comparisons, write the report",
       &docbias::cmd_evaluate},
      {"export-graph", "export article graphs as GraphML or DOT",
       &docbias::cmd_export_graph},
      {"llm-baseline", "zero-shot chat-completions baseline",
       &docbias::cmd_llm_baseline},
  };

  for (Stage& stage : stages) {
    stage.sub = app.add_subcommand(stage.name, stage.help);
    stage.sub->add_option("--config", stage.config_path, "config file path")
        ->required();
    stage.seed_opt =
        stage.sub->add_option("--seed", stage.seed, "override the run seed");
    stage.sub->add_option("--set", stage.overrides,
                          "override a config key (key=value), repeatable");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  for (Stage& stage : stages) {
    if (!stage.sub->parsed()) continue;
    try {
      docbias::Config cfg = docbias::Config::from_file(stage.config_path);
      if (stage.seed_opt->count() > 0) {
        cfg.set("seed", std::to_string(stage.seed));
      }
      for (const auto& assignment : stage.overrides) {
        cfg.apply_override(assignment);
      }
      stage.fn(cfg);
      return 0;
    } catch (const docbias::UserError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    } catch (const std::exception& e) {
      std::cerr << "internal error: " << e.what() << "\n";
      return 2;
    }
  }
  return 1;
}
