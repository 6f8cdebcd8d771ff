#include "docbias/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

namespace docbias {

namespace {

// log(sigmoid(x)), numerically stable
inline double log_sigmoid(double x) {
  if (x >= 0.0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

inline double dot(const double* a, const double* b, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

inline void axpy(double alpha, const double* x, double* y, int n) {
  for (int i = 0; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace

Vocab build_vocab(const std::vector<TokenDoc>& docs, int min_count) {
  if (docs.empty()) throw TrainError("empty corpus");
  std::map<std::string, long> counts;
  for (const auto& doc : docs) {
    for (const auto& tok : doc.tokens) ++counts[tok];
  }
  std::vector<std::pair<std::string, long>> entries;
  for (const auto& [tok, count] : counts) {
    if (count >= min_count) entries.emplace_back(tok, count);
  }
  if (entries.empty()) {
    throw TrainError("vocabulary empty after min_count=" +
                     std::to_string(min_count) + " filtering");
  }
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Vocab vocab;
  vocab.min_count = min_count;
  for (const auto& [tok, count] : entries) {
    vocab.index[tok] = static_cast<int>(vocab.tokens.size());
    vocab.tokens.push_back(tok);
    vocab.counts.push_back(count);
  }
  return vocab;
}

std::vector<int> build_noise_table(const Vocab& vocab, double exponent,
                                   std::size_t table_size) {
  std::vector<double> cum(vocab.size());
  double total = 0.0;
  for (int i = 0; i < vocab.size(); ++i) {
    total += std::pow(static_cast<double>(vocab.counts[i]), exponent);
  }
  double running = 0.0;
  for (int i = 0; i < vocab.size(); ++i) {
    running += std::pow(static_cast<double>(vocab.counts[i]), exponent);
    cum[i] = running / total;
  }
  std::vector<int> table(table_size);
  int idx = 0;
  for (std::size_t a = 0; a < table_size; ++a) {
    double mid = (a + 0.5) / table_size;
    while (idx < vocab.size() - 1 && mid > cum[idx]) ++idx;
    table[a] = idx;
  }
  return table;
}

double ns_loss(const double* h, const double* const* rows, int n_rows,
               int dim, double* grad_h, double* const* grad_rows) {
  double loss = 0.0;
  if (grad_h) std::memset(grad_h, 0, sizeof(double) * dim);
  for (int r = 0; r < n_rows; ++r) {
    double label = r == 0 ? 1.0 : 0.0;
    double score = dot(h, rows[r], dim);
    loss -= label == 1.0 ? log_sigmoid(score) : log_sigmoid(-score);
    double g = sigmoid(score) - label;  // dL/dscore
    if (grad_h) axpy(g, rows[r], grad_h, dim);
    if (grad_rows && grad_rows[r]) {
      for (int i = 0; i < dim; ++i) grad_rows[r][i] = g * h[i];
    }
  }
  return loss;
}

double dm_loss(const double* doc, const double* const* ctx, int n_ctx,
               const double* const* rows, int n_rows, int dim,
               double* grad_doc, double* const* grad_ctx,
               double* const* grad_rows) {
  thread_local std::vector<double> h_buf;
  thread_local std::vector<double> gh_buf;
  h_buf.assign(dim, 0.0);
  gh_buf.assign(dim, 0.0);
  double inv_m = 1.0 / (1 + n_ctx);
  for (int i = 0; i < dim; ++i) h_buf[i] = doc[i];
  for (int c = 0; c < n_ctx; ++c) axpy(1.0, ctx[c], h_buf.data(), dim);
  for (int i = 0; i < dim; ++i) h_buf[i] *= inv_m;

  double loss = ns_loss(h_buf.data(), rows, n_rows, dim, gh_buf.data(),
                        grad_rows);
  if (grad_doc) {
    for (int i = 0; i < dim; ++i) grad_doc[i] = gh_buf[i] * inv_m;
  }
  if (grad_ctx) {
    for (int c = 0; c < n_ctx; ++c) {
      if (!grad_ctx[c]) continue;
      for (int i = 0; i < dim; ++i) grad_ctx[c][i] = gh_buf[i] * inv_m;
    }
  }
  return loss;
}

namespace {

struct TrainScratch {
  std::vector<double> grad_h;
  std::vector<double> grad_rows_storage;
  std::vector<double*> grad_rows;
  std::vector<const double*> rows;
  std::vector<int> row_index;
  std::vector<const double*> ctx;
  std::vector<double*> grad_ctx;
  std::vector<double> grad_ctx_storage;
  std::vector<int> ctx_index;

  explicit TrainScratch(const TrainParams& p) {
    int max_rows = 1 + p.negative;
    grad_h.resize(p.dim);
    grad_rows_storage.resize(static_cast<std::size_t>(max_rows) * p.dim);
    grad_rows.resize(max_rows);
    for (int r = 0; r < max_rows; ++r) {
      grad_rows[r] = grad_rows_storage.data() + static_cast<std::size_t>(r) * p.dim;
    }
    rows.reserve(max_rows);
    row_index.reserve(max_rows);
    int max_ctx = 2 * p.window;
    ctx.reserve(max_ctx);
    ctx_index.reserve(max_ctx);
    grad_ctx_storage.resize(static_cast<std::size_t>(std::max(max_ctx, 1)) * p.dim);
    grad_ctx.resize(max_ctx);
    for (int c = 0; c < max_ctx; ++c) {
      grad_ctx[c] = grad_ctx_storage.data() + static_cast<std::size_t>(c) * p.dim;
    }
  }
};

double epoch_lr(const TrainParams& p, int epoch) {
  if (p.epochs <= 1) return p.lr0;
  double t = static_cast<double>(epoch) / (p.epochs - 1);
  return p.lr0 + t * (p.lr_floor - p.lr0);
}

void init_uniform(double* vec, int dim, Rng& rng) {
  double scale = 0.5 / dim;
  for (int i = 0; i < dim; ++i) vec[i] = rng.uniform(-scale, scale);
}

// Draws the positive row plus up to `negative` noise rows, skipping
// accidental draws of the positive target.
void sample_rows(int target, const std::vector<int>& noise_table, Rng& rng,
                 int negative, std::vector<int>& row_index) {
  row_index.clear();
  row_index.push_back(target);
  for (int k = 0; k < negative; ++k) {
    int cand = noise_table[rng.below(noise_table.size())];
    if (cand == target) continue;
    row_index.push_back(cand);
  }
}

// One pass over a document in DBOW mode; returns (loss sum, step count).
std::pair<double, long> dbow_doc_pass(const std::vector<int>& token_ids,
                                      double* doc_vec, double* out_matrix,
                                      const std::vector<int>& noise_table,
                                      const TrainParams& p, double lr,
                                      bool update_out, Rng& rng,
                                      TrainScratch& scratch) {
  double loss_sum = 0.0;
  long steps = 0;
  for (int target : token_ids) {
    sample_rows(target, noise_table, rng, p.negative, scratch.row_index);
    int n_rows = static_cast<int>(scratch.row_index.size());
    scratch.rows.clear();
    for (int r = 0; r < n_rows; ++r) {
      scratch.rows.push_back(out_matrix +
                             static_cast<std::size_t>(scratch.row_index[r]) * p.dim);
    }
    loss_sum += ns_loss(doc_vec, scratch.rows.data(), n_rows, p.dim,
                        scratch.grad_h.data(),
                        update_out ? scratch.grad_rows.data() : nullptr);
    ++steps;
    if (update_out) {
      for (int r = 0; r < n_rows; ++r) {
        double* row = out_matrix +
                      static_cast<std::size_t>(scratch.row_index[r]) * p.dim;
        axpy(-lr, scratch.grad_rows[r], row, p.dim);
      }
    }
    axpy(-lr, scratch.grad_h.data(), doc_vec, p.dim);
  }
  return {loss_sum, steps};
}

// One pass over a document in DM mode.
std::pair<double, long> dm_doc_pass(const std::vector<int>& token_ids,
                                    double* doc_vec, double* in_matrix,
                                    double* out_matrix,
                                    const std::vector<int>& noise_table,
                                    const TrainParams& p, double lr,
                                    bool update_matrices, Rng& rng,
                                    TrainScratch& scratch) {
  double loss_sum = 0.0;
  long steps = 0;
  int n = static_cast<int>(token_ids.size());
  for (int t = 0; t < n; ++t) {
    int target = token_ids[t];
    scratch.ctx.clear();
    scratch.ctx_index.clear();
    int lo = std::max(0, t - p.window);
    int hi = std::min(n - 1, t + p.window);
    for (int j = lo; j <= hi; ++j) {
      if (j == t) continue;
      scratch.ctx_index.push_back(token_ids[j]);
      scratch.ctx.push_back(in_matrix +
                            static_cast<std::size_t>(token_ids[j]) * p.dim);
    }
    int n_ctx = static_cast<int>(scratch.ctx.size());
    sample_rows(target, noise_table, rng, p.negative, scratch.row_index);
    int n_rows = static_cast<int>(scratch.row_index.size());
    scratch.rows.clear();
    for (int r = 0; r < n_rows; ++r) {
      scratch.rows.push_back(out_matrix +
                             static_cast<std::size_t>(scratch.row_index[r]) * p.dim);
    }
    loss_sum += dm_loss(doc_vec, scratch.ctx.data(), n_ctx,
                        scratch.rows.data(), n_rows, p.dim,
                        scratch.grad_h.data(),
                        update_matrices ? scratch.grad_ctx.data() : nullptr,
                        update_matrices ? scratch.grad_rows.data() : nullptr);
    ++steps;
    if (update_matrices) {
      for (int r = 0; r < n_rows; ++r) {
        double* row = out_matrix +
                      static_cast<std::size_t>(scratch.row_index[r]) * p.dim;
        axpy(-lr, scratch.grad_rows[r], row, p.dim);
      }
      for (int c = 0; c < n_ctx; ++c) {
        double* row = in_matrix +
                      static_cast<std::size_t>(scratch.ctx_index[c]) * p.dim;
        axpy(-lr, scratch.grad_ctx[c], row, p.dim);
      }
    }
    axpy(-lr, scratch.grad_h.data(), doc_vec, p.dim);
  }
  return {loss_sum, steps};
}

}  // namespace

EmbeddingModel train_embeddings(const std::vector<TokenDoc>& docs,
                                const TrainParams& params,
                                std::uint64_t seed) {
  EmbeddingModel model;
  model.params = params;
  model.seed = seed;
  model.vocab = build_vocab(docs, params.min_count);
  const int dim = params.dim;
  const int V = model.vocab.size();
  const int n = static_cast<int>(docs.size());

  // token streams restricted to the vocabulary
  std::vector<std::vector<int>> token_ids(n);
  for (int d = 0; d < n; ++d) {
    model.doc_index[docs[d].id] = d;
    model.doc_ids.push_back(docs[d].id);
    for (const auto& tok : docs[d].tokens) {
      int idx = model.vocab.lookup(tok);
      if (idx >= 0) token_ids[d].push_back(idx);
    }
  }

  model.doc_vectors.resize(static_cast<std::size_t>(n) * dim);
  for (int d = 0; d < n; ++d) {
    Rng rng(seed ^ fnv1a64(docs[d].id));
    init_uniform(model.doc_vectors.data() + static_cast<std::size_t>(d) * dim,
                 dim, rng);
  }
  model.out_matrix.assign(static_cast<std::size_t>(V) * dim, 0.0);
  if (params.mode == TrainMode::Dm) {
    model.in_matrix.resize(static_cast<std::size_t>(V) * dim);
    for (int w = 0; w < V; ++w) {
      Rng rng(seed ^ fnv1a64("in:" + model.vocab.tokens[w]));
      init_uniform(model.in_matrix.data() + static_cast<std::size_t>(w) * dim,
                   dim, rng);
    }
  }

  std::vector<int> noise_table =
      build_noise_table(model.vocab, params.noise_exponent);

  int workers = std::max(1, params.workers);
  if (workers > n) workers = n;

  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    double lr = epoch_lr(params, epoch);
    double loss_sum = 0.0;
    long steps = 0;

    auto run_range = [&](int d_begin, int d_end, std::uint64_t rng_seed,
                         double* out_loss, long* out_steps) {
      Rng rng(rng_seed);
      TrainScratch scratch(params);
      double local_loss = 0.0;
      long local_steps = 0;
      for (int d = d_begin; d < d_end; ++d) {
        if (token_ids[d].empty()) continue;
        double* doc_vec =
            model.doc_vectors.data() + static_cast<std::size_t>(d) * dim;
        std::pair<double, long> r;
        if (params.mode == TrainMode::Dbow) {
          r = dbow_doc_pass(token_ids[d], doc_vec, model.out_matrix.data(),
                            noise_table, params, lr, true, rng, scratch);
        } else {
          r = dm_doc_pass(token_ids[d], doc_vec, model.in_matrix.data(),
                          model.out_matrix.data(), noise_table, params, lr,
                          true, rng, scratch);
        }
        local_loss += r.first;
        local_steps += r.second;
      }
      *out_loss = local_loss;
      *out_steps = local_steps;
    };

    if (workers == 1) {
      run_range(0, n, seed + 0x9E37 * (epoch + 1), &loss_sum, &steps);
    } else {
      std::vector<std::thread> threads;
      std::vector<double> losses(workers, 0.0);
      std::vector<long> counts(workers, 0);
      int chunk = (n + workers - 1) / workers;
      for (int w = 0; w < workers; ++w) {
        int b = w * chunk;
        int e = std::min(n, b + chunk);
        if (b >= e) break;
        threads.emplace_back(run_range, b, e,
                             seed + 0x9E37 * (epoch + 1) + 7919ULL * w,
                             &losses[w], &counts[w]);
      }
      for (auto& t : threads) t.join();
      for (int w = 0; w < workers; ++w) {
        loss_sum += losses[w];
        steps += counts[w];
      }
    }

    double mean_loss = steps > 0 ? loss_sum / steps : 0.0;
    if (!std::isfinite(mean_loss)) {
      throw TrainError("non-finite loss at epoch " + std::to_string(epoch) +
                       " (lr=" + std::to_string(lr) + ")");
    }
    model.epoch_loss.push_back(mean_loss);
  }
  return model;
}

DocVector infer_vector(const EmbeddingModel& model, const TokenDoc& doc,
                       std::uint64_t seed) {
  const TrainParams& p = model.params;
  DocVector result;
  result.doc_id = doc.id;
  result.values.assign(p.dim, 0.0);

  std::vector<int> token_ids;
  for (const auto& tok : doc.tokens) {
    int idx = model.vocab.lookup(tok);
    if (idx >= 0) token_ids.push_back(idx);
  }
  if (token_ids.empty()) {
    result.all_oov = true;
    return result;
  }

  Rng init_rng(seed ^ fnv1a64(doc.id));
  init_uniform(result.values.data(), p.dim, init_rng);

  std::vector<int> noise_table = build_noise_table(model.vocab,
                                                   p.noise_exponent);
  // matrices stay frozen; const_cast is confined to the unused update path
  auto* out = const_cast<double*>(model.out_matrix.data());
  auto* in = model.in_matrix.empty()
                 ? nullptr
                 : const_cast<double*>(model.in_matrix.data());

  Rng rng(seed ^ fnv1a64("infer:" + doc.id));
  TrainScratch scratch(p);
  for (int epoch = 0; epoch < p.epochs; ++epoch) {
    double lr = epoch_lr(p, epoch);
    if (p.mode == TrainMode::Dbow) {
      dbow_doc_pass(token_ids, result.values.data(), out, noise_table, p, lr,
                    false, rng, scratch);
    } else {
      dm_doc_pass(token_ids, result.values.data(), in, out, noise_table, p,
                  lr, false, rng, scratch);
    }
  }
  return result;
}

DocVector concat_hybrid(const DocVector& a, const DocVector& b) {
  if (a.doc_id != b.doc_id) {
    throw TrainError("hybrid concat id mismatch: " + a.doc_id + " vs " +
                     b.doc_id);
  }
  if (a.values.size() != b.values.size()) {
    throw TrainError("hybrid concat dim mismatch: " +
                     std::to_string(a.values.size()) + " vs " +
                     std::to_string(b.values.size()));
  }
  DocVector out;
  out.doc_id = a.doc_id;
  out.values = a.values;
  out.values.insert(out.values.end(), b.values.begin(), b.values.end());
  out.all_oov = a.all_oov && b.all_oov;
  return out;
}

namespace {

constexpr char kModelMagic[4] = {'D', 'B', 'E', 'M'};
constexpr std::uint32_t kModelVersion = 1;

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
T get(std::istream& in) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}
void put_string(std::ostream& out, const std::string& s) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}
std::string get_string(std::istream& in) {
  auto len = get<std::uint32_t>(in);
  std::string s(len, '\0');
  in.read(s.data(), len);
  return s;
}
void put_doubles(std::ostream& out, const std::vector<double>& v) {
  put<std::uint64_t>(out, v.size());
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
}
std::vector<double> get_doubles(std::istream& in) {
  auto len = get<std::uint64_t>(in);
  std::vector<double> v(len);
  in.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(len * sizeof(double)));
  return v;
}

}  // namespace

void save_model(const EmbeddingModel& model, const std::string& path) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write model " + path);
  out.write(kModelMagic, 4);
  put(out, kModelVersion);
  put<std::uint8_t>(out, model.params.mode == TrainMode::Dbow ? 0 : 1);
  put<std::uint32_t>(out, model.params.dim);
  put<std::uint32_t>(out, model.params.window);
  put<std::uint32_t>(out, model.params.epochs);
  put<std::uint32_t>(out, model.params.negative);
  put<std::uint32_t>(out, model.params.min_count);
  put(out, model.params.lr0);
  put(out, model.params.lr_floor);
  put(out, model.params.noise_exponent);
  put(out, model.seed);
  put<std::uint32_t>(out, model.vocab.size());
  for (int i = 0; i < model.vocab.size(); ++i) {
    put_string(out, model.vocab.tokens[i]);
    put<std::int64_t>(out, model.vocab.counts[i]);
  }
  put<std::uint32_t>(out, static_cast<std::uint32_t>(model.doc_ids.size()));
  for (const auto& id : model.doc_ids) put_string(out, id);
  put_doubles(out, model.doc_vectors);
  put_doubles(out, model.out_matrix);
  put_doubles(out, model.in_matrix);
  put_doubles(out, model.epoch_loss);
  if (!out) throw IoError("write failed: " + path);
}

EmbeddingModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model " + path);
  char magic[4];
  in.read(magic, 4);
  if (std::memcmp(magic, kModelMagic, 4) != 0) {
    throw IoError(path + ": not a model file");
  }
  auto version = get<std::uint32_t>(in);
  if (version != kModelVersion) {
    throw IoError(path + ": unsupported model version " +
                  std::to_string(version));
  }
  EmbeddingModel model;
  model.params.mode = get<std::uint8_t>(in) == 0 ? TrainMode::Dbow
                                                 : TrainMode::Dm;
  model.params.dim = static_cast<int>(get<std::uint32_t>(in));
  model.params.window = static_cast<int>(get<std::uint32_t>(in));
  model.params.epochs = static_cast<int>(get<std::uint32_t>(in));
  model.params.negative = static_cast<int>(get<std::uint32_t>(in));
  model.params.min_count = static_cast<int>(get<std::uint32_t>(in));
  model.params.lr0 = get<double>(in);
  model.params.lr_floor = get<double>(in);
  model.params.noise_exponent = get<double>(in);
  model.seed = get<std::uint64_t>(in);
  auto vsize = get<std::uint32_t>(in);
  model.vocab.min_count = model.params.min_count;
  for (std::uint32_t i = 0; i < vsize; ++i) {
    std::string tok = get_string(in);
    long count = static_cast<long>(get<std::int64_t>(in));
    model.vocab.index[tok] = static_cast<int>(model.vocab.tokens.size());
    model.vocab.tokens.push_back(tok);
    model.vocab.counts.push_back(count);
  }
  auto ndocs = get<std::uint32_t>(in);
  for (std::uint32_t i = 0; i < ndocs; ++i) {
    std::string id = get_string(in);
    model.doc_index[id] = static_cast<int>(model.doc_ids.size());
    model.doc_ids.push_back(id);
  }
  model.doc_vectors = get_doubles(in);
  model.out_matrix = get_doubles(in);
  model.in_matrix = get_doubles(in);
  model.epoch_loss = get_doubles(in);
  if (!in) throw IoError(path + ": truncated model file");
  return model;
}

void save_embeddings_csv(const std::string& path,
                         const std::vector<DocVector>& vectors) {
  std::ostringstream out;
  out << "doc_id";
  std::size_t dim = vectors.empty() ? 0 : vectors.front().values.size();
  for (std::size_t i = 1; i <= dim; ++i) out << ",v" << i;
  out << '\n';
  for (const auto& dv : vectors) {
    out << csv_escape(dv.doc_id);
    for (double v : dv.values) out << ',' << repr_double(v);
    out << '\n';
  }
  write_file(path, out.str());
}

std::vector<DocVector> load_embeddings_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open embeddings " + path);
  std::vector<DocVector> vectors;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("doc_id", 0) == 0) continue;
    }
    auto fields = split_csv_line(line);
    DocVector dv;
    dv.doc_id = fields[0];
    for (std::size_t i = 1; i < fields.size(); ++i) {
      dv.values.push_back(std::strtod(fields[i].c_str(), nullptr));
    }
    vectors.push_back(std::move(dv));
  }
  return vectors;
}

}  // namespace docbias
