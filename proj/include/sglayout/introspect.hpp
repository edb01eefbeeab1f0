#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sglayout/core.hpp"
#include "sglayout/model.hpp"

namespace sglayout {

struct LabelledEmbeddings {
  std::vector<std::vector<double>> vectors;  // N x D
  std::vector<int> labels;                   // category index per row
  std::string source;                        // model tag
};

// One row per graph node: its final object embedding, labeled by category.
LabelledEmbeddings collect_embeddings(const std::vector<SceneGraph>& graphs,
                                      const ModelParams& params,
                                      std::string source_tag);

struct ProbeConfig {
  double C = 1.0;        // hinge penalty (lambda = 1 / (C * N))
  int epochs = 200;      // full-batch subgradient iterations
  double test_fraction = 0.2;
  std::uint64_t split_seed = 17;
};

struct ProbeReport {
  std::map<int, double> per_class_accuracy;
  std::vector<int> excluded_classes;  // fewer than 2 samples
  double mean_accuracy = 0.0;         // unweighted over classes in the test split
  int n_train = 0;
  int n_test = 0;
  ProbeConfig config;
  std::string source;
};

// One-vs-rest linear SVMs (no intercept) trained by deterministic Pegasos-
// style full-batch subgradient descent on a seeded stratified 80/20 split.
// Prediction is argmax of the per-class scores, ties to the smaller index.
ProbeReport linear_probe(const LabelledEmbeddings& emb, const ProbeConfig& cfg);

// Per-category mean vectors for the top_k most frequent categories
// (frequency ties break toward the smaller category index). Ordered by
// descending frequency.
std::vector<std::pair<int, std::vector<double>>> mean_embeddings(
    const LabelledEmbeddings& emb, int top_k);

// Pairwise Euclidean distances between the mean vectors.
std::vector<std::vector<double>> distance_matrix(
    const std::vector<std::pair<int, std::vector<double>>>& means);

struct ClusterMerge {
  int a = 0;
  int b = 0;
  double height = 0.0;
};

// Leaves are 0..K-1; merge m creates node K+m.
struct ClusterTree {
  int n_leaves = 0;
  std::vector<ClusterMerge> merges;
  std::vector<int> leaf_order;  // smaller-subtree-first traversal
};

// Average-linkage agglomerative clustering; equal distances break toward the
// smallest slot pair. Throws DataError for K < 2.
ClusterTree agglomerate(const std::vector<std::vector<double>>& dist);

// CSV export: label,category_name,v0..v{D-1}. top_k > 0 restricts rows to
// the top_k most frequent categories.
void export_embeddings(const LabelledEmbeddings& emb, const Vocab& vocab,
                       const std::filesystem::path& path, int top_k = 0);

}  // namespace sglayout
