#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "classifieds/error.hpp"
#include "classifieds/evaluation.hpp"
#include "classifieds/ingest.hpp"
#include "classifieds/keywords.hpp"
#include "classifieds/pipeline.hpp"
#include "classifieds/synthetic.hpp"

namespace py = pybind11;
using namespace classifieds;

namespace {

py::object to_python(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

py::array_t<double> as_array(const std::vector<double>& v) {
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

TextConfig text_config(std::size_t ngram_max, double df_min, double df_max) {
  TextConfig cfg;
  cfg.ngram_max = ngram_max;
  cfg.df_min_fraction = df_min;
  cfg.df_max_fraction = df_max;
  cfg.validate();
  return cfg;
}

RegressorSpec stage1_spec(const std::string& kind, std::uint64_t seed) {
  RegressorSpec spec;
  spec.kind = parse_regressor_kind(kind);
  spec.seed = seed;
  return spec;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Two-stage price regression for real-estate classifieds";

  static py::exception<Error> error(m, "ClassifiedsError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::handle(error)(e.what());
      exc.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  py::class_<ClassifiedRecord>(m, "Record")
      .def(py::init([](std::string title, std::string description, std::int64_t beds,
                       std::int64_t baths, std::int64_t size, std::string location,
                       std::int64_t price) {
             return ClassifiedRecord{std::move(title), std::move(description), beds, baths,
                                     size, std::move(location), price};
           }),
           py::arg("title") = "", py::arg("description") = "", py::arg("beds") = 0,
           py::arg("baths") = 0, py::arg("size") = 0, py::arg("location") = "",
           py::arg("price") = 0)
      .def_readwrite("title", &ClassifiedRecord::title)
      .def_readwrite("description", &ClassifiedRecord::description)
      .def_readwrite("beds", &ClassifiedRecord::beds)
      .def_readwrite("baths", &ClassifiedRecord::baths)
      .def_readwrite("size", &ClassifiedRecord::size)
      .def_readwrite("location", &ClassifiedRecord::location)
      .def_readwrite("price", &ClassifiedRecord::price)
      .def(py::self == py::self)
      .def("__repr__", [](const ClassifiedRecord& r) {
        return "Record(beds=" + std::to_string(r.beds) + ", price=" + std::to_string(r.price) +
               ", location='" + r.location + "')";
      });

  m.def("read_records", [](const std::filesystem::path& path) { return read_records(path).records; },
        py::arg("path"), "Read a .csv or .jsonl file; malformed rows are skipped.");
  m.def("write_csv",
        [](const std::filesystem::path& path, const std::vector<ClassifiedRecord>& records) {
          write_csv(path, records);
        },
        py::arg("path"), py::arg("records"));

  m.def("clean",
        [](const std::vector<ClassifiedRecord>& records, const std::string& category) {
          CleaningStats stats;
          auto kept = clean(records, parse_category(category), {}, &stats);
          py::dict counts;
          counts["input"] = stats.input;
          counts["after_dedup"] = stats.after_dedup;
          counts["after_threshold"] = stats.after_threshold;
          return py::make_tuple(std::move(kept), counts);
        },
        py::arg("records"), py::arg("category") = "apartment-rent",
        "Returns (cleaned records, counts after each step).");

  m.def("synthesize",
        [](std::size_t records, std::uint64_t seed, double sigma, bool null_effect,
           const std::string& category) {
          SynthConfig cfg;
          cfg.records = records;
          cfg.seed = seed;
          cfg.noise_sigma = sigma;
          cfg.null_effect = null_effect;
          cfg.category = parse_category(category);
          const auto corpus = generate_synthetic(cfg);
          py::dict planted;
          for (const auto& k : corpus.keywords) planted[py::str(k.term)] = k.effect;
          return py::make_tuple(corpus.records, planted);
        },
        py::arg("records") = 2000, py::arg("seed") = 42, py::arg("sigma") = 5000.0,
        py::arg("null_effect") = false, py::arg("category") = "apartment-rent",
        "Returns (records, {keyword: planted effect}).");

  m.def("rmse", [](const std::vector<double>& p, const std::vector<double>& a) { return rmse(p, a); },
        py::arg("predicted"), py::arg("actual"));
  m.def("pearson",
        [](const std::vector<double>& p, const std::vector<double>& a) { return pearson(p, a); },
        py::arg("predicted"), py::arg("actual"));

  py::class_<TwoStageModel>(m, "Model")
      .def_static(
          "fit",
          [](const std::vector<ClassifiedRecord>& records, const std::string& stage1,
             std::uint64_t seed, std::size_t ngram_max, double df_min, double df_max) {
            py::gil_scoped_release release;
            return fit_two_stage(records, stage1_spec(stage1, seed),
                                 text_config(ngram_max, df_min, df_max));
          },
          py::arg("records"), py::arg("stage1") = "lr", py::arg("seed") = 42,
          py::arg("ngram_max") = 2, py::arg("df_min") = 0.01, py::arg("df_max") = 0.5)
      .def_static("load", &load_model, py::arg("path"))
      .def("save", [](const TwoStageModel& m, const std::filesystem::path& p) { save_model(m, p); },
           py::arg("path"))
      .def_property_readonly("stage1_kind",
                             [](const TwoStageModel& m) { return std::string(to_string(m.stage1.kind())); })
      .def_property_readonly("terms", [](const TwoStageModel& m) { return m.kept_text_columns; })
      .def("predict",
           [](const TwoStageModel& m, const std::vector<ClassifiedRecord>& r) {
             return as_array(predict_two_stage(m, r));
           })
      .def("predict_stage1",
           [](const TwoStageModel& m, const std::vector<ClassifiedRecord>& r) {
             return as_array(predict_stage1_only(m, r));
           })
      .def("stage2_component",
           [](const TwoStageModel& m, const std::vector<ClassifiedRecord>& r) {
             return as_array(stage2_component(m, r));
           })
      .def("keywords",
           [](const TwoStageModel& m, std::size_t top) { return to_python(to_json(keyword_table(m, top))); },
           py::arg("top") = 10)
      .def("highlight",
           [](const TwoStageModel& m, const ClassifiedRecord& r) {
             py::list out;
             for (const auto& t : highlight(m, r).tokens) {
               out.append(py::make_tuple(t.text, py::make_tuple(t.color.r, t.color.g, t.color.b),
                                         t.score));
             }
             return out;
           },
           py::arg("record"), "List of (token, (r, g, b), score).")
      .def("highlight_html",
           [](const TwoStageModel& m, const ClassifiedRecord& r) { return render_html(highlight(m, r)); },
           py::arg("record"));

  m.def("cross_validate",
        [](const std::vector<ClassifiedRecord>& records, const std::string& stage1,
           const std::string& category, std::size_t folds, std::uint64_t seed,
           std::size_t threads) {
          CrossValidationOptions options;
          options.folds = folds;
          options.seed = seed;
          options.threads = threads;
          EvaluationReport report;
          {
            py::gil_scoped_release release;
            report = cross_validate(records, parse_category(category), stage1_spec(stage1, seed),
                                    {}, options);
          }
          return to_python(to_json(report));
        },
        py::arg("records"), py::arg("stage1") = "lr", py::arg("category") = "apartment-rent",
        py::arg("folds") = 10, py::arg("seed") = 42, py::arg("threads") = 0);
}
