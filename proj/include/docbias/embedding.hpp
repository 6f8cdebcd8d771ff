#ifndef DOCBIAS_EMBEDDING_HPP_
#define DOCBIAS_EMBEDDING_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "docbias/util.hpp"

namespace docbias {

// A training document: an id plus a token stream. For graph embeddings the
// tokens are WL subtree labels; for text embeddings they are the lemma
// stream of the article.
struct TokenDoc {
  std::string id;
  std::vector<std::string> tokens;
};

struct Vocab {
  std::vector<std::string> tokens;       // index -> token
  std::vector<long> counts;              // index -> corpus count
  std::unordered_map<std::string, int> index;
  int min_count = 3;

  int size() const { return static_cast<int>(tokens.size()); }
  int lookup(const std::string& tok) const {
    auto it = index.find(tok);
    return it == index.end() ? -1 : it->second;
  }
};

Vocab build_vocab(const std::vector<TokenDoc>& docs, int min_count = 3);

// Cumulative word2vec-style noise table over count^exponent.
std::vector<int> build_noise_table(const Vocab& vocab, double exponent = 0.75,
                                   std::size_t table_size = 1 << 20);

enum class TrainMode { Dbow, Dm };

struct TrainParams {
  TrainMode mode = TrainMode::Dbow;
  int dim = 128;
  int window = 10;
  double lr0 = 0.05;
  double lr_floor = 1e-4;
  int epochs = 50;
  int negative = 5;
  int min_count = 3;
  double noise_exponent = 0.75;
  int workers = 1;  // >1 trades seed reproducibility for speed
};

struct EmbeddingModel {
  TrainParams params;
  Vocab vocab;
  std::vector<std::string> doc_ids;
  std::unordered_map<std::string, int> doc_index;
  std::vector<double> doc_vectors;  // n x dim, row-major
  std::vector<double> out_matrix;   // V x dim
  std::vector<double> in_matrix;    // V x dim, DM only
  std::vector<double> epoch_loss;   // mean loss per epoch
  std::uint64_t seed = 0;

  const double* doc_vector(int i) const {
    return doc_vectors.data() + static_cast<std::size_t>(i) * params.dim;
  }
};

struct DocVector {
  std::string doc_id;
  std::vector<double> values;
  bool all_oov = false;  // inference found no in-vocabulary tokens
};

// One negative-sampling prediction step. rows[0] is the positive target's
// out-vector, the rest are sampled negatives. Returns the loss
// -log s(h.r0) - sum_k log s(-h.rk); fills grad_h (size dim) and
// grad_rows[r] (each size dim) when non-null.
double ns_loss(const double* h, const double* const* rows, int n_rows,
               int dim, double* grad_h, double* const* grad_rows);

// DM step: h = (doc + sum of context in-vectors) / (1 + n_ctx). Gradients
// for doc and each context vector are grad_h scaled by 1/(1 + n_ctx).
double dm_loss(const double* doc, const double* const* ctx, int n_ctx,
               const double* const* rows, int n_rows, int dim,
               double* grad_doc, double* const* grad_ctx,
               double* const* grad_rows);

EmbeddingModel train_embeddings(const std::vector<TokenDoc>& docs,
                                const TrainParams& params,
                                std::uint64_t seed);

// Optimizes a fresh document vector against frozen matrices with the same
// epoch/learning-rate schedule used in training.
DocVector infer_vector(const EmbeddingModel& model, const TokenDoc& doc,
                       std::uint64_t seed);

DocVector concat_hybrid(const DocVector& a, const DocVector& b);

void save_model(const EmbeddingModel& model, const std::string& path);
EmbeddingModel load_model(const std::string& path);

void save_embeddings_csv(const std::string& path,
                         const std::vector<DocVector>& vectors);
std::vector<DocVector> load_embeddings_csv(const std::string& path);

}  // namespace docbias

#endif
