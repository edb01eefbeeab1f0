#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "sglayout/errors.hpp"
#include "sglayout/serialize.hpp"
#include "test_util.hpp"

using namespace sglayout;
namespace fs = std::filesystem;

TEST_CASE("graph json round-trip") {
  const Vocab vocab = testutil::test_vocab(3);
  SceneGraph g;
  g.node_categories = {0, 2, 1};
  g.edges = {{0, pred::kLeftOf, 1},
             {2, pred::kAbove, 0},
             {1, pred::kInFrontOf, 2}};
  g.augmented = {0, 0, 1};

  const json doc = graphs_to_json({g}, vocab);
  CHECK(doc["graphs"][0]["nodes"][1] == "cat2");
  CHECK(doc["graphs"][0]["edges"][0]["p"] == "left of");
  CHECK(doc["graphs"][0]["edges"][2]["aug"] == true);

  const auto back = graphs_from_json(doc, vocab);
  REQUIRE(back.size() == 1);
  CHECK(back[0].node_categories == g.node_categories);
  CHECK(back[0].edges == g.edges);
  CHECK(back[0].augmented == g.augmented);
}

TEST_CASE("graph json validates edges") {
  const Vocab vocab = testutil::test_vocab(2);
  json doc;
  doc["graphs"] = {{{"nodes", {"cat0", "cat1"}},
                    {"edges", {{{"s", 0}, {"p", "left of"}, {"o", 5},
                                {"aug", false}}}}}};
  CHECK_THROWS_AS(graphs_from_json(doc, vocab), DataError);
}

TEST_CASE("checkpoint round-trip preserves every weight") {
  const Vocab vocab = testutil::test_vocab(4);
  GcnConfig gcn;
  gcn.embed_dim = 6;
  gcn.hidden_dim = 8;
  gcn.n_layers = 2;
  gcn.seed = 9;
  const HeadConfig heads{5, 7};
  const ModelParams params = init_params(gcn, heads, vocab);

  const json doc = checkpoint_to_json(params, vocab);
  Vocab loaded_vocab;
  const ModelParams loaded = checkpoint_from_json(doc, loaded_vocab);
  CHECK(loaded.values == params.values);
  CHECK(loaded_vocab.object_categories == vocab.object_categories);
  CHECK(loaded.gcn.embed_dim == 6);
  CHECK(loaded.heads.triplet_mask_side == 7);
}

TEST_CASE("checkpoint shape validation") {
  const Vocab vocab = testutil::test_vocab(4);
  GcnConfig gcn;
  gcn.embed_dim = 6;
  gcn.hidden_dim = 8;
  gcn.n_layers = 1;
  const HeadConfig heads{4, 4};
  const ModelParams params = init_params(gcn, heads, vocab);
  json doc = checkpoint_to_json(params, vocab);

  SUBCASE("tampered segment shape") {
    doc["segments"][0]["rows"] = 99;
    Vocab v;
    CHECK_THROWS_AS(checkpoint_from_json(doc, v), DataError);
  }
  SUBCASE("tampered value count") {
    doc["segments"][2]["values"].push_back(0.0);
    Vocab v;
    CHECK_THROWS_AS(checkpoint_from_json(doc, v), DataError);
  }
  SUBCASE("vocab/config inconsistency") {
    doc["vocab"]["categories"] = {"only_one"};
    Vocab v;
    CHECK_THROWS_AS(checkpoint_from_json(doc, v), DataError);
  }
  SUBCASE("unknown version") {
    doc["version"] = 42;
    Vocab v;
    CHECK_THROWS_AS(checkpoint_from_json(doc, v), DataError);
  }
}

TEST_CASE("metrics json carries combined and base-only relation scores") {
  MetricsReport report;
  report.mean_iou = 0.75;
  report.relation_score = 0.6;
  report.relation_score_base = 0.65;
  report.relation_defined = true;
  report.per_scene_iou = {0.7, 0.8};
  report.per_scene_relation = {0.5, 0.7};
  report.per_scene_relation_base = {0.6, 0.7};

  const json doc = metrics_to_json(report);
  CHECK(doc["mean_iou"] == 0.75);
  CHECK(doc["relation_score"] == 0.6);
  CHECK(doc["relation_score_base"] == 0.65);
  CHECK(doc["per_scene"].size() == 2);
}

TEST_CASE("history csv format") {
  std::vector<EpochStats> history(2);
  history[0].epoch = 1;
  history[0].mean_loss = 1.5;
  history[1].epoch = 2;
  history[1].mean_loss = 0.75;
  history[1].mean_iou = 0.5;
  history[1].relation_score = 0.25;

  const fs::path path = fs::temp_directory_path() / "sglayout_hist.csv";
  write_history_csv(history, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "epoch,loss,miou,relscore");
  std::getline(in, line);
  CHECK(line == "1,1.5,,");
  std::getline(in, line);
  CHECK(line == "2,0.75,0.5,0.25");
  fs::remove(path);
}

TEST_CASE("probe report json uses category names") {
  const Vocab vocab = testutil::test_vocab(3);
  ProbeReport report;
  report.source = "triplet";
  report.mean_accuracy = 0.5;
  report.per_class_accuracy = {{0, 0.25}, {2, 0.75}};
  report.excluded_classes = {1};
  const json doc = probe_report_to_json(report, vocab);
  CHECK(doc["per_class_accuracy"]["cat0"] == 0.25);
  CHECK(doc["per_class_accuracy"]["cat2"] == 0.75);
  CHECK(doc["excluded_classes"][0] == "cat1");
  CHECK(doc["svm"]["C"] == 1.0);
}

TEST_CASE("cluster tree json schema") {
  ClusterTree tree;
  tree.n_leaves = 3;
  tree.merges = {{0, 1, 0.5}, {3, 2, 1.25}};
  tree.leaf_order = {2, 0, 1};
  const json doc = cluster_tree_to_json(tree, {"a", "b", "c"});
  CHECK(doc["merges"].size() == 2);
  CHECK(doc["merges"][0][0] == 0);
  CHECK(doc["merges"][0][2] == 0.5);
  CHECK(doc["leaf_order"] == json({2, 0, 1}));
  CHECK(doc["leaf_categories"][0] == "a");
}
