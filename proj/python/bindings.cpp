#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "sglayout/errors.hpp"
#include "sglayout/gcn.hpp"
#include "sglayout/graphbuild.hpp"
#include "sglayout/pipeline.hpp"

namespace py = pybind11;
using namespace sglayout;

namespace {

py::object json_to_py(const json& j) {
  switch (j.type()) {
    case json::value_t::null:
      return py::none();
    case json::value_t::boolean:
      return py::bool_(j.get<bool>());
    case json::value_t::number_integer:
      return py::int_(j.get<long long>());
    case json::value_t::number_unsigned:
      return py::int_(j.get<unsigned long long>());
    case json::value_t::number_float:
      return py::float_(j.get<double>());
    case json::value_t::string:
      return py::str(j.get<std::string>());
    case json::value_t::array: {
      py::list out;
      for (const auto& item : j) out.append(json_to_py(item));
      return out;
    }
    case json::value_t::object: {
      py::dict out;
      for (const auto& [key, value] : j.items())
        out[py::str(key)] = json_to_py(value);
      return out;
    }
    default:
      return py::none();
  }
}

Box box_from_list(const std::vector<double>& v) {
  if (v.size() != 4)
    throw DataError("box must be [x0, y0, x1, y1]");
  return Box{v[0], v[1], v[2], v[3]};
}

RunConfig make_config(const std::string& config_text,
                      const std::vector<std::string>& overrides) {
  RunConfig cfg = config_text.empty() ? default_run_config()
                                      : parse_run_config_text(config_text);
  apply_overrides(cfg, overrides);
  apply_variant(cfg);
  return cfg;
}

struct PyDataset {
  RunConfig cfg;
  Vocab vocab;
  Dataset data;
  GenStats stats;
};

struct PyModel {
  RunConfig cfg;
  Vocab vocab;
  ModelParams params;
  std::vector<EpochStats> history;
};

}  // namespace

PYBIND11_MODULE(_sglayout, m) {
  m.doc() = "Scene-graph layout pipeline: synthetic scenes, GCN embeddings, "
            "triplet-supervised layout prediction, metrics and probes.";

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<DataError>(m, "DataError");
  py::register_exception<NumericalError>(m, "NumericalError");

  m.def("box_area",
        [](const std::vector<double>& b) { return box_area(box_from_list(b)); },
        py::arg("box"));
  m.def(
      "box_iou",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        return box_iou(box_from_list(a), box_from_list(b));
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "union_box",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        const Box u = union_box(box_from_list(a), box_from_list(b));
        return std::vector<double>{u.x0, u.y0, u.x1, u.y1};
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "assign_predicate",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        const int p = assign_predicate(box_from_list(a), box_from_list(b));
        return Vocab::make({"x"}).predicates.at(p);
      },
      py::arg("a"), py::arg("b"),
      "Name of the base geometric relation 'a <predicate> b'.");
  m.def("default_config_keys", []() {
    return json_to_py(json{{"variant", "triplet_da"}, {"seed", 1}});
  });

  py::class_<PyDataset>(m, "Dataset")
      .def_static(
          "generate",
          [](const std::string& config_text,
             const std::vector<std::string>& overrides) {
            PyDataset d;
            d.cfg = make_config(config_text, overrides);
            d.vocab = vocab_from(d.cfg);
            d.data = build_dataset(d.cfg, &d.stats);
            return d;
          },
          py::arg("config_text") = "", py::arg("overrides") = std::vector<std::string>{})
      .def_property_readonly(
          "n_scenes",
          [](const PyDataset& d) { return d.data.scenes.size(); })
      .def_property_readonly(
          "n_augmented_edges",
          [](const PyDataset& d) { return d.stats.n_aug_edges; })
      .def("scenes",
           [](const PyDataset& d) {
             return json_to_py(scenes_to_json(d.data.scenes, d.vocab));
           })
      .def("graphs", [](const PyDataset& d) {
        return json_to_py(graphs_to_json(d.data.graphs, d.vocab));
      });

  py::class_<PyModel>(m, "Model")
      .def_static(
          "train",
          [](const PyDataset& dataset) {
            PyModel model;
            model.cfg = dataset.cfg;
            model.vocab = dataset.vocab;
            TrainResult result = run_training(dataset.cfg, dataset.data, dataset.vocab);
            model.params = std::move(result.params);
            model.history = std::move(result.history);
            return model;
          },
          py::arg("dataset"))
      .def_property_readonly("variant",
                             [](const PyModel& m_) { return m_.cfg.variant; })
      .def("loss_curve",
           [](const PyModel& m_) {
             std::vector<double> losses;
             losses.reserve(m_.history.size());
             for (const auto& row : m_.history) losses.push_back(row.mean_loss);
             return losses;
           })
      .def(
          "evaluate",
          [](const PyModel& m_, const PyDataset& dataset) {
            return json_to_py(
                metrics_to_json(run_eval(m_.params, dataset.data, m_.cfg)));
          },
          py::arg("dataset"))
      .def(
          "probe",
          [](const PyModel& m_, const PyDataset& dataset) {
            LabelledEmbeddings emb =
                collect_embeddings(dataset.data.graphs, m_.params, m_.cfg.variant);
            return json_to_py(
                probe_report_to_json(linear_probe(emb, m_.cfg.probe), m_.vocab));
          },
          py::arg("dataset"))
      .def(
          "predict",
          [](const PyModel& m_, const PyDataset& dataset, std::size_t index) {
            if (index >= dataset.data.graphs.size())
              throw DataError("scene index out of range");
            const LayoutPrediction p =
                predict_layout(dataset.data.graphs[index], m_.params);
            py::list boxes;
            for (const auto& b : p.boxes)
              boxes.append(std::vector<double>{b.x0, b.y0, b.x1, b.y1});
            py::dict out;
            out["boxes"] = boxes;
            out["n_edges"] = p.superboxes.size();
            return out;
          },
          py::arg("dataset"), py::arg("index"))
      .def(
          "embed",
          [](const PyModel& m_, const PyDataset& dataset, std::size_t index) {
            if (index >= dataset.data.graphs.size())
              throw DataError("scene index out of range");
            return object_embeddings(dataset.data.graphs[index], m_.params);
          },
          py::arg("dataset"), py::arg("index"));

  m.attr("__version__") = "0.1.0";
}
