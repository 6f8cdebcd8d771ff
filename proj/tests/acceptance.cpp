// Acceptance gate: one pass/fail line per shipping criterion, each checked
// against an oracle implemented independently in this file (brute-force
// counting, explicit enumeration, finite differences) rather than against
// the library's own internals.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "docbias/corpus.hpp"
#include "docbias/detector.hpp"
#include "docbias/embedding.hpp"
#include "docbias/evaluation.hpp"
#include "docbias/graph.hpp"
#include "docbias/util.hpp"
#include "docbias/wl.hpp"
#include "helpers.hpp"

using namespace docbias;

namespace {

int g_failures = 0;

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void report(int idx, const char* name, bool ok, double secs,
            const std::string& detail) {
  std::printf("[%2d] %s  %s (%.2fs)%s%s\n", idx, ok ? "PASS" : "FAIL", name,
              secs, detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

// ---------------------------------------------------------------------------
// 1. co-occurrence edges and weights vs a brute-force oracle
// ---------------------------------------------------------------------------

bool criterion_cooccurrence(std::string* detail) {
  std::mt19937_64 rng(101);
  auto pick = [&](int n) { return static_cast<int>(rng() % n); };

  for (int trial = 0; trial < 200; ++trial) {
    int vocab = 1 + pick(6);
    Document doc;
    doc.id = "d" + std::to_string(trial);
    int n_sentences = 1 + pick(4);
    for (int s = 0; s < n_sentences; ++s) {
      int len = 1 + pick(6);
      std::vector<std::string> sentence;
      for (int t = 0; t < len; ++t) {
        sentence.push_back("w" + std::to_string(pick(vocab)));
      }
      doc.sentences.push_back(std::move(sentence));
    }

    // oracle counts, recomputed from scratch
    std::map<std::string, long> uni;
    long total_uni = 0;
    std::map<std::pair<std::string, std::string>, long> pair_count;
    long total_pairs = 0;
    for (const auto& sentence : doc.sentences) {
      for (const auto& t : sentence) {
        ++uni[t];
        ++total_uni;
      }
      std::set<std::string> uniq(sentence.begin(), sentence.end());
      std::vector<std::string> u(uniq.begin(), uniq.end());
      for (std::size_t i = 0; i < u.size(); ++i) {
        for (std::size_t j = i + 1; j < u.size(); ++j) {
          ++pair_count[{u[i], u[j]}];
          ++total_pairs;
        }
      }
    }
    std::map<std::pair<std::string, std::string>, double> want;
    for (const auto& [key, c] : pair_count) {
      double pp = static_cast<double>(c) / total_pairs;
      double p1 = static_cast<double>(uni[key.first]) / total_uni;
      double p2 = static_cast<double>(uni[key.second]) / total_uni;
      double w = pp >= 1.0 ? 1.0 : std::log2(pp / (p1 * p2)) / -std::log2(pp);
      if (w > 0.0) want[key] = w;
    }

    DocGraph g = build_graph(doc, GraphVariant::WordNode);
    std::map<std::pair<std::string, std::string>, double> got;
    for (const auto& e : g.edges) {
      got[{g.nodes[e.u].lemma, g.nodes[e.v].lemma}] = e.weight;
    }

    for (const auto& [key, w] : want) {
      auto it = got.find(key);
      if (it == got.end()) {
        // allow knife-edge disagreement only within the stated tolerance
        if (std::fabs(w) > 1e-9) {
          *detail = "missing edge " + key.first + "-" + key.second + " in " +
                    doc.id;
          return false;
        }
        continue;
      }
      if (std::fabs(it->second - w) > 1e-9) {
        *detail = "weight mismatch on " + key.first + "-" + key.second;
        return false;
      }
    }
    for (const auto& [key, w] : got) {
      if (!want.count(key) && std::fabs(w) > 1e-9) {
        *detail = "unexpected edge " + key.first + "-" + key.second;
        return false;
      }
    }
  }
  *detail = "200 random documents, tolerance 1e-9";
  return true;
}

// ---------------------------------------------------------------------------
// 2. relabeling features are invariant to node storage order
// ---------------------------------------------------------------------------

bool criterion_wl_invariance(std::string* detail) {
  std::mt19937_64 rng(202);
  auto pick = [&](int n) { return static_cast<int>(rng() % n); };
  GraphVariant variants[] = {GraphVariant::Base, GraphVariant::WordNode,
                             GraphVariant::VectorNode};

  for (int trial = 0; trial < 100; ++trial) {
    int n = 1 + pick(30);
    GraphVariant variant = variants[trial % 3];

    DocGraph g;
    g.doc_id = "g" + std::to_string(trial);
    g.variant = variant;
    std::vector<int> ids(n);
    for (int i = 0; i < n; ++i) ids[i] = i;
    std::shuffle(ids.begin(), ids.end(), rng);  // unsorted storage order
    for (int i = 0; i < n; ++i) {
      GraphNode node;
      char buf[8];
      std::snprintf(buf, sizeof(buf), "n%02d", ids[i]);
      node.lemma = buf;
      if (variant == GraphVariant::VectorNode) {
        node.attr = {(rng() % 9) / 4.0 - 1.0, (rng() % 9) / 4.0 - 1.0};
      }
      g.nodes.push_back(std::move(node));
    }
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v) {
        if (rng() % 4 == 0) {
          g.edges.push_back({u, v, 0.25 + (rng() % 4) / 4.0});
        }
      }
    }

    FeatureDoc base = wl_relabel(g, 2);
    std::vector<std::string> base_sorted = base.tokens;
    std::sort(base_sorted.begin(), base_sorted.end());

    for (int p = 0; p < 10; ++p) {
      std::vector<int> perm(n);
      for (int i = 0; i < n; ++i) perm[i] = i;
      std::shuffle(perm.begin(), perm.end(), rng);

      DocGraph h;
      h.doc_id = g.doc_id;
      h.variant = g.variant;
      h.nodes.resize(n);
      for (int i = 0; i < n; ++i) h.nodes[perm[i]] = g.nodes[i];
      for (const auto& e : g.edges) {
        int a = perm[e.u], b = perm[e.v];
        if (a > b) std::swap(a, b);
        h.edges.push_back({a, b, e.weight});
      }

      FeatureDoc moved = wl_relabel(h, 2);
      std::vector<std::string> moved_sorted = moved.tokens;
      std::sort(moved_sorted.begin(), moved_sorted.end());
      if (moved_sorted != base_sorted) {
        *detail = "feature multiset changed under permutation of " + g.doc_id;
        return false;
      }
    }
  }
  *detail = "100 graphs x 10 permutations, all variants";
  return true;
}

// ---------------------------------------------------------------------------
// 3. analytic gradients vs central finite differences
// ---------------------------------------------------------------------------

// relative error of the analytic gradient against central differences,
// measured on the worst coordinate and normalized by the largest finite-
// difference magnitude (floored so that an all-tiny gradient still compares
// in absolute terms)
double gradient_gap(const std::vector<double>& analytic,
                    const std::vector<double>& fd) {
  double worst = 0.0, scale = 1e-3;
  for (std::size_t i = 0; i < fd.size(); ++i) {
    worst = std::max(worst, std::fabs(analytic[i] - fd[i]));
    scale = std::max(scale, std::fabs(fd[i]));
  }
  return worst / scale;
}

bool criterion_gradients(std::string* detail) {
  std::mt19937_64 rng(303);
  auto uniform = [&](double lo, double hi) {
    return lo + (hi - lo) * ((rng() >> 11) * 0x1.0p-53);
  };
  const double eps = 1e-5;

  // sampled-prediction step used by the bag-of-words trainer
  for (int trial = 0; trial < 100; ++trial) {
    int dim = 2 + static_cast<int>(rng() % 5);
    int n_rows = 2 + static_cast<int>(rng() % 4);
    std::vector<double> h(dim);
    std::vector<std::vector<double>> rows(n_rows, std::vector<double>(dim));
    for (auto& x : h) x = uniform(-0.8, 0.8);
    for (auto& r : rows)
      for (auto& x : r) x = uniform(-0.8, 0.8);

    auto eval = [&](const std::vector<double>& hv,
                    const std::vector<std::vector<double>>& rv) {
      std::vector<const double*> rp;
      for (const auto& r : rv) rp.push_back(r.data());
      return ns_loss(hv.data(), rp.data(), n_rows, dim, nullptr, nullptr);
    };

    std::vector<double> grad_h(dim, 0.0);
    std::vector<std::vector<double>> grad_rows(n_rows,
                                               std::vector<double>(dim, 0.0));
    {
      std::vector<const double*> rp;
      std::vector<double*> gp;
      for (int r = 0; r < n_rows; ++r) {
        rp.push_back(rows[r].data());
        gp.push_back(grad_rows[r].data());
      }
      ns_loss(h.data(), rp.data(), n_rows, dim, grad_h.data(), gp.data());
    }

    std::vector<double> flat_analytic, flat_fd;
    for (int j = 0; j < dim; ++j) {
      auto hp = h, hm = h;
      hp[j] += eps;
      hm[j] -= eps;
      flat_fd.push_back((eval(hp, rows) - eval(hm, rows)) / (2 * eps));
      flat_analytic.push_back(grad_h[j]);
    }
    for (int r = 0; r < n_rows; ++r) {
      for (int j = 0; j < dim; ++j) {
        auto rp = rows, rm = rows;
        rp[r][j] += eps;
        rm[r][j] -= eps;
        flat_fd.push_back((eval(h, rp) - eval(h, rm)) / (2 * eps));
        flat_analytic.push_back(grad_rows[r][j]);
      }
    }
    double gap = gradient_gap(flat_analytic, flat_fd);
    if (gap > 1e-5) {
      *detail = "sampled-prediction gradient off by " + std::to_string(gap);
      return false;
    }
  }

  // averaged-context step used by the context-window trainer
  for (int trial = 0; trial < 100; ++trial) {
    int dim = 2 + static_cast<int>(rng() % 5);
    int n_ctx = 1 + static_cast<int>(rng() % 4);
    int n_rows = 2 + static_cast<int>(rng() % 4);
    std::vector<double> doc(dim);
    std::vector<std::vector<double>> ctx(n_ctx, std::vector<double>(dim));
    std::vector<std::vector<double>> rows(n_rows, std::vector<double>(dim));
    for (auto& x : doc) x = uniform(-0.8, 0.8);
    for (auto& c : ctx)
      for (auto& x : c) x = uniform(-0.8, 0.8);
    for (auto& r : rows)
      for (auto& x : r) x = uniform(-0.8, 0.8);

    auto eval = [&](const std::vector<double>& dv,
                    const std::vector<std::vector<double>>& cv,
                    const std::vector<std::vector<double>>& rv) {
      std::vector<const double*> cp, rp;
      for (const auto& c : cv) cp.push_back(c.data());
      for (const auto& r : rv) rp.push_back(r.data());
      return dm_loss(dv.data(), cp.data(), n_ctx, rp.data(), n_rows, dim,
                     nullptr, nullptr, nullptr);
    };

    std::vector<double> grad_doc(dim, 0.0);
    std::vector<std::vector<double>> grad_ctx(n_ctx,
                                              std::vector<double>(dim, 0.0));
    std::vector<std::vector<double>> grad_rows(n_rows,
                                               std::vector<double>(dim, 0.0));
    {
      std::vector<const double*> cp, rp;
      std::vector<double*> gcp, grp;
      for (int c = 0; c < n_ctx; ++c) {
        cp.push_back(ctx[c].data());
        gcp.push_back(grad_ctx[c].data());
      }
      for (int r = 0; r < n_rows; ++r) {
        rp.push_back(rows[r].data());
        grp.push_back(grad_rows[r].data());
      }
      dm_loss(doc.data(), cp.data(), n_ctx, rp.data(), n_rows, dim,
              grad_doc.data(), gcp.data(), grp.data());
    }

    std::vector<double> flat_analytic, flat_fd;
    for (int j = 0; j < dim; ++j) {
      auto dp = doc, dm = doc;
      dp[j] += eps;
      dm[j] -= eps;
      flat_fd.push_back((eval(dp, ctx, rows) - eval(dm, ctx, rows)) /
                        (2 * eps));
      flat_analytic.push_back(grad_doc[j]);
    }
    for (int c = 0; c < n_ctx; ++c) {
      for (int j = 0; j < dim; ++j) {
        auto cp = ctx, cm = ctx;
        cp[c][j] += eps;
        cm[c][j] -= eps;
        flat_fd.push_back((eval(doc, cp, rows) - eval(doc, cm, rows)) /
                          (2 * eps));
        flat_analytic.push_back(grad_ctx[c][j]);
      }
    }
    for (int r = 0; r < n_rows; ++r) {
      for (int j = 0; j < dim; ++j) {
        auto rp = rows, rm = rows;
        rp[r][j] += eps;
        rm[r][j] -= eps;
        flat_fd.push_back((eval(doc, ctx, rp) - eval(doc, ctx, rm)) /
                          (2 * eps));
        flat_analytic.push_back(grad_rows[r][j]);
      }
    }
    double gap = gradient_gap(flat_analytic, flat_fd);
    if (gap > 1e-5) {
      *detail = "averaged-context gradient off by " + std::to_string(gap);
      return false;
    }
  }

  // regularized cross-entropy objective of the linear classifier
  for (int trial = 0; trial < 100; ++trial) {
    int dim = 2 + static_cast<int>(rng() % 3);
    int k = 2 + static_cast<int>(rng() % 3);
    int n = 6 + static_cast<int>(rng() % 7);
    double lambda = (trial % 3 == 0) ? 0.0 : 0.05 * (trial % 3);
    std::vector<double> weights(static_cast<std::size_t>(k) * (dim + 1));
    for (auto& w : weights) w = uniform(-1.0, 1.0);
    std::vector<double> features(static_cast<std::size_t>(n) * dim);
    for (auto& f : features) f = uniform(-1.0, 1.0);
    std::vector<int> targets(n);
    for (auto& t : targets) t = static_cast<int>(rng() % k);

    std::vector<double> grad;
    softmax_objective(weights, k, dim, features, targets, lambda, &grad);

    std::vector<double> fd(weights.size());
    for (std::size_t j = 0; j < weights.size(); ++j) {
      auto wp = weights, wm = weights;
      wp[j] += eps;
      wm[j] -= eps;
      double lp =
          softmax_objective(wp, k, dim, features, targets, lambda, nullptr);
      double lm =
          softmax_objective(wm, k, dim, features, targets, lambda, nullptr);
      fd[j] = (lp - lm) / (2 * eps);
    }
    double gap = gradient_gap(grad, fd);
    if (gap > 1e-6) {
      *detail = "classifier gradient off by " + std::to_string(gap);
      return false;
    }
  }

  *detail = "300 random configurations, central differences";
  return true;
}

// ---------------------------------------------------------------------------
// 4. signed-rank p-values vs full enumeration; correlation sanity
// ---------------------------------------------------------------------------

// independent oracle: drop zeros, average ranks over |d| (doubled to stay
// integral), then walk every sign assignment explicitly
double enumerate_signed_rank_p(const std::vector<double>& diffs,
                               bool* degenerate) {
  std::vector<double> mags;
  std::vector<bool> pos;
  for (double d : diffs) {
    if (d == 0.0) continue;
    mags.push_back(std::fabs(d));
    pos.push_back(d > 0.0);
  }
  int n = static_cast<int>(mags.size());
  *degenerate = n == 0;
  if (n == 0) return 1.0;

  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(),
            [&](int a, int b) { return mags[a] < mags[b]; });
  std::vector<long> rank2(n);
  int i = 0;
  while (i < n) {
    int j = i;
    while (j + 1 < n && mags[idx[j + 1]] == mags[idx[i]]) ++j;
    for (int t = i; t <= j; ++t) rank2[idx[t]] = i + 1 + j + 1;
    i = j + 1;
  }

  long w2_obs = 0;
  for (int t = 0; t < n; ++t) {
    if (pos[t]) w2_obs += rank2[t];
  }
  long ge = 0;
  for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
    long w2 = 0;
    for (int t = 0; t < n; ++t) {
      if (mask & (1ULL << t)) w2 += rank2[t];
    }
    if (w2 >= w2_obs) ++ge;
  }
  return static_cast<double>(ge) / std::pow(2.0, n);
}

bool criterion_statistics(std::string* detail) {
  std::mt19937_64 rng(404);
  for (int trial = 0; trial < 500; ++trial) {
    int n = 1 + trial % 12;
    std::vector<double> diffs(n);
    for (auto& d : diffs) {
      d = (static_cast<double>(rng() % 13) - 6.0) / 2.0;  // ties and zeros
    }
    bool want_degenerate = false;
    double want_p = enumerate_signed_rank_p(diffs, &want_degenerate);
    WilcoxonResult got = wilcoxon_one_sided(diffs);
    if (got.degenerate != want_degenerate ||
        std::fabs(got.p - want_p) > 1e-12) {
      *detail = "signed-rank mismatch at trial " + std::to_string(trial) +
                ": got " + std::to_string(got.p) + " want " +
                std::to_string(want_p);
      return false;
    }
  }

  WilcoxonResult all_pos = wilcoxon_one_sided({0.5, 1.0, 1.5, 2.0, 2.5});
  if (all_pos.p != 0.03125) {
    *detail = "all-positive n=5 p was " + std::to_string(all_pos.p);
    return false;
  }

  std::vector<double> x, y;
  for (int i = 0; i < 10; ++i) {
    x.push_back(i);
    y.push_back(2.0 * i + 1.0);
  }
  PearsonResult pr = pearson_r(x, y);
  if (pr.undefined || std::fabs(pr.r - 1.0) > 1e-12) {
    *detail = "linear correlation returned r=" + std::to_string(pr.r);
    return false;
  }
  *detail = "500 enumerated vectors; exact pinned values";
  return true;
}

// ---------------------------------------------------------------------------
// 5. majority-baseline arithmetic on the 7/3 train, 6/4 test fixture
// ---------------------------------------------------------------------------

bool criterion_zero_rule(std::string* detail) {
  std::vector<std::string> train(7, "biased");
  train.insert(train.end(), 3, "unbiased");
  ZeroRule zr = train_zero_rule(train, scheme_classes(LabelScheme::Binary));
  if (zr.majority != "biased") {
    *detail = "majority class was " + zr.majority;
    return false;
  }
  std::vector<std::string> truths(6, "biased");
  truths.insert(truths.end(), 4, "unbiased");
  std::vector<std::string> preds(10, zr.majority);
  MetricPair m = score(preds, truths);
  if (m.accuracy != 0.600 || m.macro_f1 != 0.375) {
    *detail = "got accuracy " + std::to_string(m.accuracy) + ", macro F1 " +
              std::to_string(m.macro_f1);
    return false;
  }
  *detail = "accuracy 0.600 and macro F1 0.375, exact";
  return true;
}

// ---------------------------------------------------------------------------
// shared harness for the end-to-end graph-embedding runs
// ---------------------------------------------------------------------------

struct EmbeddingRun {
  MetricPair model;
  MetricPair zero;
};

// trains the graph-token embedding on the train split, infers the test split,
// fits the linear classifier, and scores both it and the majority baseline
EmbeddingRun run_graph_embedding(const std::vector<Document>& docs,
                                 const SplitSpec& split, int dim, int epochs,
                                 std::uint64_t seed) {
  std::vector<TokenDoc> train_tokens;
  std::vector<TokenDoc> test_tokens;
  std::set<std::string> train_ids(split.train_ids.begin(),
                                  split.train_ids.end());
  std::map<std::string, const Document*> by_id;
  for (const auto& d : docs) {
    by_id[d.id] = &d;
    FeatureDoc fd = wl_relabel(build_graph(d, GraphVariant::WordNode), 2);
    TokenDoc td{d.id, std::move(fd.tokens)};
    if (train_ids.count(d.id)) {
      train_tokens.push_back(std::move(td));
    } else {
      test_tokens.push_back(std::move(td));
    }
  }

  TrainParams params;
  params.mode = TrainMode::Dbow;
  params.dim = dim;
  params.epochs = epochs;
  params.min_count = 1;
  EmbeddingModel model = train_embeddings(train_tokens, params, seed);

  auto label_of = [&](const std::string& id) {
    return map_label(by_id.at(id)->label, LabelScheme::Binary);
  };

  std::vector<std::vector<double>> train_x;
  std::vector<std::string> train_y;
  for (const auto& td : train_tokens) {
    int row = model.doc_index.at(td.id);
    const double* v = model.doc_vector(row);
    train_x.emplace_back(v, v + dim);
    train_y.push_back(label_of(td.id));
  }

  SoftmaxModel clf = train_softmax(train_x, train_y,
                                   scheme_classes(LabelScheme::Binary), {});
  ZeroRule zr =
      train_zero_rule(train_y, scheme_classes(LabelScheme::Binary));

  std::vector<std::string> preds, zero_preds, truths;
  for (const auto& td : test_tokens) {
    DocVector dv = infer_vector(model, td, seed);
    Prediction p = predict_one(clf, td.id, label_of(td.id), dv.values);
    preds.push_back(p.pred_label);
    zero_preds.push_back(zr.majority);
    truths.push_back(p.true_label);
  }

  EmbeddingRun out;
  out.model = score(preds, truths);
  out.zero = score(zero_preds, truths);
  return out;
}

// ---------------------------------------------------------------------------
// 6. synthetic two-population separation, strict thresholds
// ---------------------------------------------------------------------------

bool criterion_separation(std::string* detail) {
  auto docs = testutil::structural_corpus(100, 100, 4, 5);
  std::vector<std::string> ids;
  for (const auto& d : docs) ids.push_back(d.id);
  SplitSpec split = make_split(ids, 17, 0.8);

  int hits = 0;
  std::string scores;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    EmbeddingRun run = run_graph_embedding(docs, split, 128, 50, seed);
    if (run.model.accuracy >= 0.90 && run.model.macro_f1 >= 0.85) ++hits;
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%s%.2f/%.2f", scores.empty() ? "" : " ",
                  run.model.accuracy, run.model.macro_f1);
    scores += buf;
  }
  *detail = std::to_string(hits) + "/5 seeds at acc>=0.90 F1>=0.85 [" +
            scores + "]";
  return hits >= 4;
}

// ---------------------------------------------------------------------------
// 7. embedding beats the majority baseline across seeds
// ---------------------------------------------------------------------------

bool criterion_baseline_dominance(std::string* detail) {
  auto docs = testutil::structural_corpus(120, 80, 3, 33);  // 60/40 imbalance
  std::vector<std::string> ids;
  for (const auto& d : docs) ids.push_back(d.id);
  SplitSpec split = make_split(ids, 29, 0.8);

  int wins = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    EmbeddingRun run = run_graph_embedding(docs, split, 64, 30, seed);
    if (run.model.macro_f1 > run.zero.macro_f1) ++wins;
  }
  *detail = std::to_string(wins) + "/20 seeds beat the majority baseline";
  return wins >= 18;
}

// ---------------------------------------------------------------------------
// 8. regrouping predictions never lowers accuracy
// ---------------------------------------------------------------------------

bool criterion_regrouping(std::string* detail) {
  std::mt19937_64 rng(808);
  auto classes = scheme_classes(LabelScheme::Full);
  for (int trial = 0; trial < 1000; ++trial) {
    int n = 5 + static_cast<int>(rng() % 46);
    std::vector<std::string> preds(n), truths(n);
    for (int i = 0; i < n; ++i) {
      preds[i] = classes[rng() % classes.size()];
      truths[i] = classes[rng() % classes.size()];
    }
    double full_acc = score(preds, truths).accuracy;

    if (regroup_predictions(preds, LabelScheme::Full) != preds) {
      *detail = "identity regroup changed a prediction vector";
      return false;
    }
    for (LabelScheme target :
         {LabelScheme::LeftCenterRight, LabelScheme::Binary}) {
      auto rp = regroup_predictions(preds, target);
      auto rt = regroup_predictions(truths, target);
      double acc = score(rp, rt).accuracy;
      if (acc < full_acc) {
        *detail = "regrouping lowered accuracy at trial " +
                  std::to_string(trial);
        return false;
      }
    }
  }
  *detail = "1000 random seven-class prediction vectors";
  return true;
}

// ---------------------------------------------------------------------------
// 9. domain aggregation identities, exact
// ---------------------------------------------------------------------------

bool criterion_aggregation(std::string* detail) {
  // a topic spanned by a single domain centers to the zero vector
  std::vector<ArticleVector> solo = {
      {"x1", "d", "t", "biased", {1.0, 2.0}},
      {"x2", "d", "t", "biased", {3.0, 4.0}},
      {"x3", "d", "t", "biased", {5.0, 0.0}},
  };
  auto centered = aggregate_domains(solo, Aggregation::TopicDiffAvg);
  if (centered.size() != 1 || centered[0].values != std::vector<double>{0.0, 0.0}) {
    *detail = "single-domain topic did not center to zero";
    return false;
  }

  // deviations {[3,0],[4,0]} combine to [5,0] under the norm aggregation
  std::vector<ArticleVector> two = {
      {"a1", "d", "t", "biased", {8.0, 0.0}},
      {"a2", "d", "t", "biased", {9.0, 0.0}},
      {"b1", "e", "t", "unbiased", {1.0, 0.0}},
      {"b2", "e", "t", "unbiased", {2.0, 0.0}},
  };
  auto norms = aggregate_domains(two, Aggregation::TopicDiffNorm);
  if (norms.size() != 2) {
    *detail = "expected two domain rows";
    return false;
  }
  for (const auto& dv : norms) {
    if (dv.values != std::vector<double>{5.0, 0.0}) {
      *detail = "norm aggregation for " + dv.domain + " was not [5,0]";
      return false;
    }
  }

  // the mean of a singleton domain is the article vector itself
  std::vector<ArticleVector> singleton = {
      {"s1", "d", "t", "biased", {0.125, -7.75, 3.0}}};
  auto means = aggregate_domains(singleton, Aggregation::Mean);
  if (means.size() != 1 ||
      means[0].values != std::vector<double>{0.125, -7.75, 3.0}) {
    *detail = "singleton mean differed from the article vector";
    return false;
  }
  *detail = "centering, norm, and singleton identities hold exactly";
  return true;
}

// ---------------------------------------------------------------------------
// 10. concatenated vectors are always 256-dimensional
// ---------------------------------------------------------------------------

bool criterion_hybrid(std::string* detail) {
  auto docs = testutil::structural_corpus(5, 5, 2, 3);
  std::vector<TokenDoc> graph_tokens, lemma_tokens;
  for (const auto& d : docs) {
    FeatureDoc fd = wl_relabel(build_graph(d, GraphVariant::WordNode), 2);
    graph_tokens.push_back({d.id, std::move(fd.tokens)});
    TokenDoc td{d.id, {}};
    for (const auto& s : d.sentences)
      td.tokens.insert(td.tokens.end(), s.begin(), s.end());
    lemma_tokens.push_back(std::move(td));
  }

  TrainParams params;
  params.dim = 128;
  params.epochs = 2;
  params.min_count = 1;
  EmbeddingModel graph_model = train_embeddings(graph_tokens, params, 1);
  EmbeddingModel text_model = train_embeddings(lemma_tokens, params, 1);

  for (const auto& d : docs) {
    int gi = graph_model.doc_index.at(d.id);
    int ti = text_model.doc_index.at(d.id);
    DocVector a{d.id,
                std::vector<double>(graph_model.doc_vector(gi),
                                    graph_model.doc_vector(gi) + params.dim),
                false};
    DocVector b{d.id,
                std::vector<double>(text_model.doc_vector(ti),
                                    text_model.doc_vector(ti) + params.dim),
                false};
    DocVector hybrid = concat_hybrid(a, b);
    if (hybrid.values.size() != 256) {
      *detail = d.id + " hybrid length was " +
                std::to_string(hybrid.values.size());
      return false;
    }
  }
  *detail = "two 128-dim models concatenate to 256 for every document";
  return true;
}

// ---------------------------------------------------------------------------
// 11. byte-identical reports from identical config and seed
// ---------------------------------------------------------------------------

bool criterion_reproducibility(std::string* detail) {
  testutil::TempDir tmp("acceptance_repro");
  auto docs = testutil::structural_corpus(20, 20, 3, 77);
  std::string corpus = tmp.file("corpus.jsonl");
  std::string domains = tmp.file("domains.csv");
  testutil::write_raw_corpus(docs, corpus, domains);

  std::string config = tmp.file("run.conf");
  write_file(config, "corpus = " + corpus + "\n" + "domains = " + domains +
                         "\n" +
                         "graph_variants = word\n"
                         "embeddings = g2v_word\n"
                         "dim = 16\n"
                         "window = 4\n"
                         "epochs = 5\n"
                         "min_count = 1\n"
                         "schemes = full,binary\n"
                         "aggregations = none,mean\n"
                         "seed = 13\n"
                         "deterministic = true\n"
                         "workers = 1\n");

  for (const char* run : {"A", "B"}) {
    std::string out_dir = tmp.file(run);
    for (const char* stage :
         {"ingest", "build-graphs", "train-embed", "train-clf", "evaluate"}) {
      std::string err;
      int rc = testutil::run_cli(std::string(stage) + " --config " + config +
                                     " --set out_dir=" + out_dir,
                                 nullptr, &err);
      if (rc != 0) {
        *detail = std::string(stage) + " run " + run + " exited " +
                  std::to_string(rc) + ": " + err;
        return false;
      }
    }
  }

  std::string a = read_file(tmp.file("A") + "/report.json");
  std::string b = read_file(tmp.file("B") + "/report.json");
  if (a != b) {
    *detail = "report.json differs between the two runs";
    return false;
  }
  *detail = "full pipeline twice, byte-identical report.json";
  return true;
}

struct Criterion {
  const char* name;
  bool (*fn)(std::string*);
  double max_seconds;  // 0 = no stated budget
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {"co-occurrence edges and weights match a brute-force oracle",
       &criterion_cooccurrence, 5.0},
      {"relabeling features are invariant to node order",
       &criterion_wl_invariance, 10.0},
      {"analytic gradients match central finite differences",
       &criterion_gradients, 0.0},
      {"signed-rank p-values match full enumeration; correlation is exact",
       &criterion_statistics, 0.0},
      {"majority-baseline fixture scores exactly 0.600 / 0.375",
       &criterion_zero_rule, 0.0},
      {"two-population corpus separates at acc>=0.90, F1>=0.85",
       &criterion_separation, 300.0},
      {"graph embedding beats the majority baseline in >=90% of seeds",
       &criterion_baseline_dominance, 0.0},
      {"regrouping predictions never lowers accuracy", &criterion_regrouping,
       0.0},
      {"domain aggregation identities hold exactly", &criterion_aggregation,
       0.0},
      {"hybrid vectors are 256-dimensional", &criterion_hybrid, 0.0},
      {"identical config and seed reproduce report.json byte-for-byte",
       &criterion_reproducibility, 0.0},
  };

  int idx = 0;
  for (const auto& c : criteria) {
    ++idx;
    Timer timer;
    std::string detail;
    bool ok = false;
    try {
      ok = c.fn(&detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    double secs = timer.seconds();
    if (ok && c.max_seconds > 0 && secs > c.max_seconds) {
      ok = false;
      detail += " (over time budget of " + std::to_string(c.max_seconds) +
                "s)";
    }
    report(idx, c.name, ok, secs, detail);
  }

  if (g_failures == 0) {
    std::printf("all %d criteria passed\n",
                static_cast<int>(std::size(criteria)));
  } else {
    std::printf("%d criteria FAILED\n", g_failures);
  }
  return g_failures == 0 ? 0 : 1;
}
