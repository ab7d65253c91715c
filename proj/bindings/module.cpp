#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "spellnet/checkpoint.hpp"
#include "spellnet/cli.hpp"
#include "spellnet/confusion.hpp"
#include "spellnet/m2.hpp"
#include "spellnet/nested_rnn.hpp"
#include "spellnet/perturb.hpp"
#include "spellnet/tensor.hpp"
#include "spellnet/text.hpp"

namespace py = pybind11;
using namespace spellnet;

namespace {

Mat mat_from_numpy(const py::array_t<float, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2) throw std::invalid_argument("expected a 2-D array");
  Mat m(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)));
  std::copy(a.data(), a.data() + m.size(), m.v.begin());
  return m;
}

py::array_t<float> numpy_from_mat(const Mat& m) {
  py::array_t<float> out({m.rows, m.cols});
  std::copy(m.v.begin(), m.v.end(), out.mutable_data());
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "spellnet core: nested-RNN spelling correction pipeline";

  m.def(
      "run",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli_run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run a CLI subcommand in-process; returns (exit_code, stdout, stderr).");

  m.def(
      "softmax_rows",
      [](const py::array_t<float, py::array::c_style | py::array::forcecast>& x) {
        return numpy_from_mat(softmax_rows(mat_from_numpy(x)));
      },
      py::arg("x"));

  m.def(
      "matmul",
      [](const py::array_t<float, py::array::c_style | py::array::forcecast>& a,
         const py::array_t<float, py::array::c_style | py::array::forcecast>& b) {
        return numpy_from_mat(matmul(mat_from_numpy(a), mat_from_numpy(b)));
      },
      py::arg("a"), py::arg("b"));

  m.def(
      "extract_edits",
      [](const std::vector<std::string>& src, const std::vector<std::string>& hyp) {
        std::vector<py::tuple> out;
        for (const auto& e : extract_edits(src, hyp))
          out.push_back(py::make_tuple(e.start, e.end, e.replacement));
        return out;
      },
      py::arg("source"), py::arg("hypothesis"),
      "Token-level Levenshtein edits as (start, end, replacement) tuples.");

  m.def(
      "score",
      [](const std::vector<std::vector<std::tuple<int, int, std::string>>>& hyp,
         const std::vector<std::vector<std::tuple<int, int, std::string>>>& gold) {
        auto conv = [](const std::vector<std::vector<std::tuple<int, int, std::string>>>& sets) {
          std::vector<std::vector<Edit>> out;
          for (const auto& s : sets) {
            std::vector<Edit> es;
            for (const auto& [a, b, r] : s) es.push_back({a, b, r});
            out.push_back(std::move(es));
          }
          return out;
        };
        const ScoreReport rep = score_edits(conv(hyp), conv(gold));
        py::dict d;
        d["tp"] = rep.tp;
        d["fp"] = rep.fp;
        d["fn"] = rep.fn;
        d["p"] = rep.p;
        d["r"] = rep.r;
        d["f05"] = rep.f05;
        return d;
      },
      py::arg("hypothesis"), py::arg("gold"));

  py::class_<NestedRnnModel>(m, "Corrector")
      .def(py::init([](const std::string& path) {
             return nested_from_checkpoint(load_checkpoint(path));
           }),
           py::arg("checkpoint_path"))
      .def(
          "correct_tokens",
          [](const NestedRnnModel& model, const std::vector<std::string>& tokens) {
            return correct_sentence(model, tokens);
          },
          py::arg("tokens"))
      .def(
          "correct_line",
          [](const NestedRnnModel& model, const std::string& line) {
            const auto tokens = split_tokens(line);
            return tokens.empty() ? std::string() : join_tokens(correct_sentence(model, tokens));
          },
          py::arg("line"))
      .def_property_readonly("word_vocab_size",
                             [](const NestedRnnModel& model) { return model.words.size(); });
}
