#include "sglayout/introspect.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>

#include "sglayout/errors.hpp"
#include "sglayout/gcn.hpp"
#include "sglayout/rng.hpp"

namespace sglayout {

LabelledEmbeddings collect_embeddings(const std::vector<SceneGraph>& graphs,
                                      const ModelParams& params,
                                      std::string source_tag) {
  LabelledEmbeddings emb;
  emb.source = std::move(source_tag);
  for (const auto& g : graphs) {
    auto rows = object_embeddings(g, params);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      emb.vectors.push_back(std::move(rows[i]));
      emb.labels.push_back(g.node_categories[i]);
    }
  }
  return emb;
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

// Full-batch Pegasos without intercept: step 1/(lambda*t) on
// lambda/2 |w|^2 + mean hinge, then projection onto the 1/sqrt(lambda) ball.
std::vector<double> train_binary_svm(
    const std::vector<const std::vector<double>*>& xs,
    const std::vector<double>& ys, double lambda, int epochs) {
  const std::size_t d = xs.front()->size();
  const std::size_t n = xs.size();
  std::vector<double> w(d, 0.0);
  std::vector<double> grad(d);
  const double radius = 1.0 / std::sqrt(lambda);
  for (int t = 1; t <= epochs; ++t) {
    for (std::size_t j = 0; j < d; ++j) grad[j] = lambda * w[j];
    for (std::size_t i = 0; i < n; ++i) {
      if (ys[i] * dot(w, *xs[i]) < 1.0) {
        const double scale = -ys[i] / static_cast<double>(n);
        const auto& x = *xs[i];
        for (std::size_t j = 0; j < d; ++j) grad[j] += scale * x[j];
      }
    }
    const double eta = 1.0 / (lambda * static_cast<double>(t));
    for (std::size_t j = 0; j < d; ++j) w[j] -= eta * grad[j];
    const double norm2 = dot(w, w);
    if (norm2 > radius * radius) {
      const double scale = radius / std::sqrt(norm2);
      for (auto& wj : w) wj *= scale;
    }
  }
  return w;
}

}  // namespace

ProbeReport linear_probe(const LabelledEmbeddings& emb, const ProbeConfig& cfg) {
  if (emb.vectors.empty()) throw DataError("linear_probe: no embeddings");
  if (cfg.test_fraction <= 0.0 || cfg.test_fraction >= 1.0)
    throw ConfigError("linear_probe: test_fraction must be in (0, 1)");

  ProbeReport report;
  report.config = cfg;
  report.source = emb.source;

  std::map<int, std::vector<int>> by_class;
  for (std::size_t i = 0; i < emb.labels.size(); ++i)
    by_class[emb.labels[i]].push_back(static_cast<int>(i));

  std::vector<int> classes;
  std::vector<int> train_idx, test_idx;
  std::map<int, std::vector<int>> test_by_class;
  for (auto& [cls, idx] : by_class) {
    if (idx.size() < 2) {
      report.excluded_classes.push_back(cls);
      continue;
    }
    classes.push_back(cls);
    Rng rng(mix_seed(cfg.split_seed, static_cast<std::uint64_t>(cls)));
    rng.shuffle(idx);
    const int n = static_cast<int>(idx.size());
    int n_test = static_cast<int>(std::floor(cfg.test_fraction * n + 0.5));
    n_test = std::clamp(n_test, 1, n - 1);
    for (int k = 0; k < n; ++k) {
      if (k < n_test) {
        test_idx.push_back(idx[k]);
        test_by_class[cls].push_back(idx[k]);
      } else {
        train_idx.push_back(idx[k]);
      }
    }
  }
  if (classes.size() < 2)
    throw DataError("linear_probe: need at least 2 classes with 2+ samples");
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());
  report.n_train = static_cast<int>(train_idx.size());
  report.n_test = static_cast<int>(test_idx.size());

  std::vector<const std::vector<double>*> xs;
  xs.reserve(train_idx.size());
  for (const int i : train_idx) xs.push_back(&emb.vectors[i]);
  const double lambda =
      1.0 / (cfg.C * static_cast<double>(train_idx.size()));

  std::map<int, std::vector<double>> weights;
  std::vector<double> ys(train_idx.size());
  for (const int cls : classes) {
    for (std::size_t i = 0; i < train_idx.size(); ++i)
      ys[i] = emb.labels[train_idx[i]] == cls ? 1.0 : -1.0;
    weights[cls] = train_binary_svm(xs, ys, lambda, cfg.epochs);
  }

  double acc_sum = 0.0;
  for (const int cls : classes) {
    int correct = 0;
    const auto& members = test_by_class[cls];
    for (const int i : members) {
      int best = classes.front();
      double best_score = -std::numeric_limits<double>::infinity();
      for (const int k : classes) {  // ascending: ties pick the smaller index
        const double score = dot(weights[k], emb.vectors[i]);
        if (score > best_score) {
          best_score = score;
          best = k;
        }
      }
      if (best == cls) ++correct;
    }
    const double acc =
        static_cast<double>(correct) / static_cast<double>(members.size());
    report.per_class_accuracy[cls] = acc;
    acc_sum += acc;
  }
  report.mean_accuracy = acc_sum / static_cast<double>(classes.size());
  return report;
}

std::vector<std::pair<int, std::vector<double>>> mean_embeddings(
    const LabelledEmbeddings& emb, int top_k) {
  if (top_k < 1) throw ConfigError("mean_embeddings: top_k must be >= 1");
  std::map<int, int> counts;
  for (const int label : emb.labels) ++counts[label];

  std::vector<std::pair<int, int>> freq(counts.begin(), counts.end());
  std::sort(freq.begin(), freq.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (static_cast<int>(freq.size()) > top_k) freq.resize(top_k);

  const std::size_t d = emb.vectors.front().size();
  std::vector<std::pair<int, std::vector<double>>> means;
  for (const auto& [cls, count] : freq) {
    std::vector<double> mean(d, 0.0);
    for (std::size_t i = 0; i < emb.labels.size(); ++i) {
      if (emb.labels[i] != cls) continue;
      for (std::size_t j = 0; j < d; ++j) mean[j] += emb.vectors[i][j];
    }
    for (auto& x : mean) x /= static_cast<double>(count);
    means.emplace_back(cls, std::move(mean));
  }
  return means;
}

std::vector<std::vector<double>> distance_matrix(
    const std::vector<std::pair<int, std::vector<double>>>& means) {
  const std::size_t k = means.size();
  if (k < 2) throw DataError("distance_matrix: need at least 2 means");
  std::vector<std::vector<double>> dist(k, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      double acc = 0.0;
      const auto& a = means[i].second;
      const auto& b = means[j].second;
      for (std::size_t t = 0; t < a.size(); ++t) {
        const double dlt = a[t] - b[t];
        acc += dlt * dlt;
      }
      dist[i][j] = dist[j][i] = std::sqrt(acc);
    }
  }
  return dist;
}

ClusterTree agglomerate(const std::vector<std::vector<double>>& dist) {
  const int k = static_cast<int>(dist.size());
  if (k < 2) throw DataError("agglomerate: need at least 2 points");
  for (const auto& row : dist)
    if (static_cast<int>(row.size()) != k)
      throw DataError("agglomerate: distance matrix not square");

  ClusterTree tree;
  tree.n_leaves = k;
  auto d = dist;  // working copy; slot i holds the current cluster there
  std::vector<int> node_id(k), size(k, 1);
  std::iota(node_id.begin(), node_id.end(), 0);
  std::vector<bool> alive(k, true);

  for (int m = 0; m < k - 1; ++m) {
    int bi = -1, bj = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i) {
      if (!alive[i]) continue;
      for (int j = i + 1; j < k; ++j) {
        if (!alive[j]) continue;
        if (d[i][j] < best) {  // strict: ties keep the smallest (i, j)
          best = d[i][j];
          bi = i;
          bj = j;
        }
      }
    }
    tree.merges.push_back({node_id[bi], node_id[bj], best});
    // Average linkage: weighted by member counts.
    for (int t = 0; t < k; ++t) {
      if (!alive[t] || t == bi || t == bj) continue;
      d[bi][t] = d[t][bi] =
          (size[bi] * d[bi][t] + size[bj] * d[bj][t]) /
          static_cast<double>(size[bi] + size[bj]);
    }
    node_id[bi] = k + m;
    size[bi] += size[bj];
    alive[bj] = false;
  }

  // Smaller subtree first; equal sizes break toward the smaller node id.
  std::vector<int> leaf_count(2 * k - 1, 1);
  for (int m = 0; m < k - 1; ++m)
    leaf_count[k + m] =
        leaf_count[tree.merges[m].a] + leaf_count[tree.merges[m].b];
  std::vector<int> stack{2 * k - 2};
  while (!stack.empty()) {
    const int node = stack.back();
    stack.pop_back();
    if (node < k) {
      tree.leaf_order.push_back(node);
      continue;
    }
    const auto& merge = tree.merges[node - k];
    int first = merge.a, second = merge.b;
    if (leaf_count[second] < leaf_count[first] ||
        (leaf_count[second] == leaf_count[first] && second < first))
      std::swap(first, second);
    stack.push_back(second);  // LIFO: push the later child first
    stack.push_back(first);
  }
  return tree;
}

void export_embeddings(const LabelledEmbeddings& emb, const Vocab& vocab,
                       const std::filesystem::path& path, int top_k) {
  std::vector<bool> keep_class(vocab.object_categories.size(), true);
  if (top_k > 0) {
    std::fill(keep_class.begin(), keep_class.end(), false);
    for (const auto& [cls, mean] : mean_embeddings(emb, top_k))
      keep_class[cls] = true;
  }

  std::ofstream out(path);
  if (!out) throw IoError("export_embeddings: cannot open " + path.string());
  const std::size_t d = emb.vectors.empty() ? 0 : emb.vectors.front().size();
  out << "label,category_name";
  for (std::size_t j = 0; j < d; ++j) out << ",v" << j;
  out << "\n";
  char buf[32];
  for (std::size_t i = 0; i < emb.vectors.size(); ++i) {
    const int label = emb.labels[i];
    if (!keep_class[label]) continue;
    out << label << ',' << vocab.object_categories[label];
    for (const double x : emb.vectors[i]) {
      std::snprintf(buf, sizeof(buf), "%.17g", x);
      out << ',' << buf;
    }
    out << "\n";
  }
  if (!out) throw IoError("export_embeddings: write failed for " + path.string());
}

}  // namespace sglayout
