#include "sglayout/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <string>

#include "sglayout/errors.hpp"

namespace sglayout {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

const json& field(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end())
    throw DataError(where + ": missing field '" + key + "'");
  return *it;
}

}  // namespace

json scenes_to_json(const std::vector<Scene>& scenes, const Vocab& vocab) {
  json out;
  out["scenes"] = json::array();
  for (const auto& scene : scenes) {
    json js;
    js["objects"] = json::array();
    for (const auto& obj : scene.objects) {
      json jo;
      jo["category"] = vocab.object_categories.at(obj.category);
      jo["box"] = {obj.box.x0, obj.box.y0, obj.box.x1, obj.box.y1};
      jo["mask"] = {{"side", obj.mask.side}, {"cells", obj.mask.cells}};
      js["objects"].push_back(std::move(jo));
    }
    out["scenes"].push_back(std::move(js));
  }
  return out;
}

std::vector<Scene> scenes_from_json(const json& doc, const Vocab& vocab) {
  std::vector<Scene> scenes;
  const json& arr = field(doc, "scenes", "scene file");
  if (!arr.is_array()) throw DataError("scene file: 'scenes' is not an array");
  for (std::size_t si = 0; si < arr.size(); ++si) {
    const std::string where = "scene " + std::to_string(si);
    Scene scene;
    const json& objects = field(arr[si], "objects", where);
    if (!objects.is_array())
      throw DataError(where + ": 'objects' is not an array");
    for (std::size_t oi = 0; oi < objects.size(); ++oi) {
      const std::string otag = where + " object " + std::to_string(oi);
      const json& jo = objects[oi];
      ObjectInstance obj;

      const json& jc = field(jo, "category", otag);
      if (!jc.is_string()) throw DataError(otag + ": 'category' must be a string");
      obj.category = vocab.category_index(jc.get<std::string>());
      if (obj.category < 0)
        throw DataError(otag + ": unknown category '" +
                        jc.get<std::string>() + "'");

      const json& jb = field(jo, "box", otag);
      if (!jb.is_array() || jb.size() != 4)
        throw DataError(otag + ": 'box' must be [x0,y0,x1,y1]");
      obj.box = Box{jb[0].get<double>(), jb[1].get<double>(),
                    jb[2].get<double>(), jb[3].get<double>()};
      if (!obj.box.valid()) throw DataError(otag + ": invalid box");

      if (jo.contains("mask")) {
        const json& jm = jo["mask"];
        obj.mask.side = field(jm, "side", otag + " mask").get<int>();
        const json& cells = field(jm, "cells", otag + " mask");
        if (obj.mask.side < 1 || !cells.is_array() ||
            cells.size() != static_cast<std::size_t>(obj.mask.side) * obj.mask.side)
          throw DataError(otag + ": mask cells do not match side*side");
        for (const auto& c : cells) {
          const int v = c.get<int>();
          if (v != 0 && v != 1)
            throw DataError(otag + ": mask cell outside {0,1}");
          obj.mask.cells.push_back(static_cast<std::uint8_t>(v));
        }
      } else {
        obj.mask = MaskGrid::filled(1, 1);
      }
      scene.objects.push_back(std::move(obj));
    }
    scenes.push_back(std::move(scene));
  }
  return scenes;
}

json graphs_to_json(const std::vector<SceneGraph>& graphs, const Vocab& vocab) {
  json out;
  out["graphs"] = json::array();
  for (const auto& g : graphs) {
    json jg;
    jg["nodes"] = json::array();
    for (const int c : g.node_categories)
      jg["nodes"].push_back(vocab.object_categories.at(c));
    jg["edges"] = json::array();
    for (std::size_t ei = 0; ei < g.edges.size(); ++ei) {
      const auto& e = g.edges[ei];
      jg["edges"].push_back({{"s", e.subject},
                             {"p", vocab.predicates.at(e.predicate)},
                             {"o", e.object},
                             {"aug", g.augmented[ei] != 0}});
    }
    out["graphs"].push_back(std::move(jg));
  }
  return out;
}

std::vector<SceneGraph> graphs_from_json(const json& doc, const Vocab& vocab) {
  std::vector<SceneGraph> graphs;
  const json& arr = field(doc, "graphs", "graph file");
  if (!arr.is_array()) throw DataError("graph file: 'graphs' is not an array");
  for (std::size_t gi = 0; gi < arr.size(); ++gi) {
    const std::string where = "graph " + std::to_string(gi);
    SceneGraph g;
    for (const auto& jn : field(arr[gi], "nodes", where)) {
      const int c = vocab.category_index(jn.get<std::string>());
      if (c < 0)
        throw DataError(where + ": unknown category '" +
                        jn.get<std::string>() + "'");
      g.node_categories.push_back(c);
    }
    for (const auto& je : field(arr[gi], "edges", where)) {
      Triplet e;
      e.subject = field(je, "s", where).get<int>();
      e.object = field(je, "o", where).get<int>();
      const std::string pname = field(je, "p", where).get<std::string>();
      e.predicate = vocab.predicate_index(pname);
      if (e.predicate < 0)
        throw DataError(where + ": unknown predicate '" + pname + "'");
      g.edges.push_back(e);
      g.augmented.push_back(field(je, "aug", where).get<bool>() ? 1 : 0);
    }
    validate_graph(g, vocab);
    graphs.push_back(std::move(g));
  }
  return graphs;
}

json checkpoint_to_json(const ModelParams& params, const Vocab& vocab) {
  json out;
  out["format"] = "sglayout.checkpoint";
  out["version"] = 1;
  out["vocab"] = {{"categories", vocab.object_categories},
                  {"predicates", vocab.predicates}};
  out["gcn"] = {{"embed_dim", params.gcn.embed_dim},
                {"hidden_dim", params.gcn.hidden_dim},
                {"n_layers", params.gcn.n_layers},
                {"init_scale", params.gcn.init_scale},
                {"seed", params.gcn.seed}};
  out["heads"] = {{"object_mask_side", params.heads.object_mask_side},
                  {"triplet_mask_side", params.heads.triplet_mask_side}};
  out["segments"] = json::array();
  for (const auto& s : params.segments) {
    const double* data = params.values.data() + s.offset;
    out["segments"].push_back(
        {{"name", s.name},
         {"rows", s.rows},
         {"cols", s.cols},
         {"values", std::vector<double>(data, data + s.count())}});
  }
  return out;
}

ModelParams checkpoint_from_json(const json& doc, Vocab& vocab_out) {
  if (field(doc, "format", "checkpoint").get<std::string>() !=
      "sglayout.checkpoint")
    throw DataError("checkpoint: unrecognized format tag");
  if (field(doc, "version", "checkpoint").get<int>() != 1)
    throw DataError("checkpoint: unsupported version");

  const json& jv = field(doc, "vocab", "checkpoint");
  Vocab vocab;
  vocab.object_categories =
      field(jv, "categories", "checkpoint vocab").get<std::vector<std::string>>();
  vocab.predicates =
      field(jv, "predicates", "checkpoint vocab").get<std::vector<std::string>>();
  vocab.validate();

  const json& jg = field(doc, "gcn", "checkpoint");
  GcnConfig gcn;
  gcn.embed_dim = field(jg, "embed_dim", "checkpoint gcn").get<int>();
  gcn.hidden_dim = field(jg, "hidden_dim", "checkpoint gcn").get<int>();
  gcn.n_layers = field(jg, "n_layers", "checkpoint gcn").get<int>();
  gcn.init_scale = field(jg, "init_scale", "checkpoint gcn").get<double>();
  gcn.seed = field(jg, "seed", "checkpoint gcn").get<std::uint64_t>();

  const json& jh = field(doc, "heads", "checkpoint");
  HeadConfig heads;
  heads.object_mask_side =
      field(jh, "object_mask_side", "checkpoint heads").get<int>();
  heads.triplet_mask_side =
      field(jh, "triplet_mask_side", "checkpoint heads").get<int>();

  ModelParams params = init_params(gcn, heads, vocab);
  const json& segments = field(doc, "segments", "checkpoint");
  if (segments.size() != params.segments.size())
    throw DataError("checkpoint: segment count does not match the vocab/config");
  for (std::size_t i = 0; i < params.segments.size(); ++i) {
    const auto& expected = params.segments[i];
    const json& js = segments[i];
    const std::string name = field(js, "name", "checkpoint segment").get<std::string>();
    if (name != expected.name)
      throw DataError("checkpoint: segment '" + name + "' out of order (expected '" +
                      expected.name + "')");
    if (field(js, "rows", name).get<int>() != expected.rows ||
        field(js, "cols", name).get<int>() != expected.cols)
      throw DataError("checkpoint: segment '" + name + "' shape mismatch");
    const auto values = field(js, "values", name).get<std::vector<double>>();
    if (values.size() != expected.count())
      throw DataError("checkpoint: segment '" + name + "' value count mismatch");
    std::copy(values.begin(), values.end(),
              params.values.begin() + expected.offset);
  }
  vocab_out = std::move(vocab);
  return params;
}

json metrics_to_json(const MetricsReport& report) {
  json out;
  out["mean_iou"] = report.mean_iou;
  out["relation_defined"] = report.relation_defined;
  if (report.relation_defined) {
    out["relation_score"] = report.relation_score;
    out["relation_score_base"] = report.relation_score_base;
  } else {
    out["relation_score"] = nullptr;
    out["relation_score_base"] = nullptr;
  }
  out["n_scenes"] = report.per_scene_iou.size();
  out["per_scene"] = json::array();
  for (std::size_t i = 0; i < report.per_scene_iou.size(); ++i) {
    json row;
    row["iou"] = report.per_scene_iou[i];
    if (report.per_scene_relation[i] >= 0.0)
      row["relation_score"] = report.per_scene_relation[i];
    if (report.per_scene_relation_base[i] >= 0.0)
      row["relation_score_base"] = report.per_scene_relation_base[i];
    out["per_scene"].push_back(std::move(row));
  }
  return out;
}

json probe_report_to_json(const ProbeReport& report, const Vocab& vocab) {
  json out;
  out["source"] = report.source;
  out["mean_accuracy"] = report.mean_accuracy;
  out["per_class_accuracy"] = json::object();
  for (const auto& [cls, acc] : report.per_class_accuracy)
    out["per_class_accuracy"][vocab.object_categories.at(cls)] = acc;
  out["excluded_classes"] = json::array();
  for (const int cls : report.excluded_classes)
    out["excluded_classes"].push_back(vocab.object_categories.at(cls));
  out["n_train"] = report.n_train;
  out["n_test"] = report.n_test;
  out["svm"] = {{"C", report.config.C},
                {"epochs", report.config.epochs},
                {"test_fraction", report.config.test_fraction},
                {"split_seed", report.config.split_seed}};
  return out;
}

json cluster_tree_to_json(const ClusterTree& tree,
                          const std::vector<std::string>& leaf_names) {
  json out;
  out["merges"] = json::array();
  for (const auto& m : tree.merges)
    out["merges"].push_back({m.a, m.b, m.height});
  out["leaf_order"] = tree.leaf_order;
  out["leaf_categories"] = leaf_names;
  return out;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_json_file(const json& doc, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << doc.dump(2) << "\n";
  if (!out) throw IoError("write failed for " + path.string());
}

void write_history_csv(const std::vector<EpochStats>& history,
                       const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "epoch,loss,miou,relscore\n";
  for (const auto& row : history) {
    out << row.epoch << ',' << fmt(row.mean_loss) << ',';
    if (row.mean_iou) out << fmt(*row.mean_iou);
    out << ',';
    if (row.relation_score) out << fmt(*row.relation_score);
    out << "\n";
  }
  if (!out) throw IoError("write failed for " + path.string());
}

void write_distance_csv(const std::vector<std::string>& names,
                        const std::vector<std::vector<double>>& dist,
                        const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "category";
  for (const auto& n : names) out << ',' << n;
  out << "\n";
  for (std::size_t i = 0; i < dist.size(); ++i) {
    out << names[i];
    for (const double d : dist[i]) out << ',' << fmt(d);
    out << "\n";
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace sglayout
