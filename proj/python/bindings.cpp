// Copyright 2026 The dialplan Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Python bindings for the planner: catalogs, prior parsing, the Q head and
// whole mock runs.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dialplan/action_prior.hpp"
#include "dialplan/checkpoint.hpp"
#include "dialplan/config.hpp"
#include "dialplan/errors.hpp"
#include "dialplan/metrics.hpp"
#include "dialplan/runner.hpp"
#include "dialplan/tasks.hpp"
#include "dialplan/value_model.hpp"

namespace py = pybind11;
using namespace dialplan;

namespace {

TaskId task_arg(const std::string& name) { return task_from_string(name); }

py::dict metrics_dict(const MetricsReport& m) {
  py::dict d;
  d["at"] = m.at;
  d["sr"] = m.sr;
  d["sl_avg"] = m.sl_avg ? py::cast(*m.sl_avg) : py::none();
  d["n_episodes"] = m.n_episodes;
  return d;
}

std::vector<int> indices_of(const CandidateSet& set) { return set.indices; }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of the dialplan package";

  py::register_exception<Error>(m, "DialplanError", PyExc_RuntimeError);

  m.def("tasks", [] {
    std::vector<std::string> out;
    for (TaskId t : all_tasks()) out.emplace_back(to_string(t));
    return out;
  });

  m.def("catalog", [](const std::string& task) {
    std::vector<std::pair<int, std::string>> out;
    for (const Action& a : builtin_catalog(task_arg(task)).actions()) out.emplace_back(a.index, a.name);
    return out;
  }, py::arg("task"));

  m.def("verdict_options", [](const std::string& task) {
    py::list out;
    for (const VerdictOption& v : builtin_profile(task_arg(task)).verdict_map) {
      py::dict d;
      d["text"] = v.text;
      d["reward"] = v.reward;
      d["terminal"] = std::string(to_string(v.terminal));
      d["reward_from_deal"] = v.reward_from_deal;
      out.append(d);
    }
    return out;
  }, py::arg("task"));

  m.def("parse_topk_list", [](const std::string& raw, const std::string& task, int k) {
    return indices_of(parse_topk_list(raw, builtin_catalog(task_arg(task)), k));
  }, py::arg("raw"), py::arg("task"), py::arg("k") = 4);

  m.def("project", [](const std::string& text, const std::string& task) {
    return project(text, ProjectionTable::builtin(builtin_profile(task_arg(task))));
  }, py::arg("text"), py::arg("task"));

  m.def("estimate_prior_beam",
        [](const std::vector<std::pair<std::string, double>>& beams, const std::string& task) {
          std::vector<Continuation> cs;
          for (const auto& [text, lp] : beams) cs.push_back({text, lp});
          const auto table = ProjectionTable::builtin(builtin_profile(task_arg(task)));
          return estimate_prior_beam(cs, table).weights;
        },
        py::arg("beams"), py::arg("task"));

  m.def("softmax", [](const std::vector<double>& s) { return softmax(s); }, py::arg("scores"));

  py::class_<HashEncoder>(m, "HashEncoder")
      .def(py::init<std::size_t, std::uint64_t>(), py::arg("dim") = kDefaultEncoderDim,
           py::arg("seed") = 0)
      .def_property_readonly("dim", &HashEncoder::dim)
      .def("encode", [](HashEncoder& e, const std::string& state_text, const std::string& action) {
        return e.encode(pair_input(state_text), pair_action(action));
      }, py::arg("state_text"), py::arg("action"));

  py::class_<QHeadParams>(m, "QHead")
      .def_static("init", [](std::size_t d, std::size_t h1, std::size_t h2, std::uint64_t seed) {
        Rng rng(seed);
        return QHeadParams::init(d, h1, h2, rng);
      }, py::arg("dim"), py::arg("hidden1"), py::arg("hidden2"), py::arg("seed") = 0)
      .def_static("load", &load_checkpoint, py::arg("path"))
      .def("save", [](const QHeadParams& p, const std::string& path) { save_checkpoint(p, path); },
           py::arg("path"))
      .def_property_readonly("step", [](const QHeadParams& p) { return p.step; })
      .def_property_readonly("input_dim", [](const QHeadParams& p) { return p.online.input_dim(); })
      .def_property_readonly("parameter_count",
                             [](const QHeadParams& p) { return p.online.parameter_count(); })
      .def("q_value", [](const QHeadParams& p, HashEncoder& enc, const std::string& state_text,
                         const std::string& action, bool use_target) {
        return q_forward(p, encode_pair(state_text, action, enc), use_target);
      }, py::arg("encoder"), py::arg("state_text"), py::arg("action"),
         py::arg("use_target") = false)
      .def("__eq__", [](const QHeadParams& a, const QHeadParams& b) { return a == b; });

  // Train then evaluate against the configured backend. The config is the
  // same JSON the command-line tool reads.
  m.def("simulate", [](const std::string& config_json, const std::string& checkpoint_out) {
    RunConfig c = parse_run_config(config_json);
    c.validate();
    py::dict out;
    {
      py::gil_scoped_release release;
      auto encoder = make_encoder(c.encoder);
      Runner runner(c, *encoder, make_gateway_factory(c, profile_for(c)));
      const auto cases = cases_for_run(c);
      QHeadParams params = c.checkpoint_in.empty() ? fresh_params(c) : load_checkpoint(c.checkpoint_in);
      const RunOutput train = runner.train(cases, params);
      const RunOutput eval = runner.evaluate(cases, params, c.eval_episodes);
      if (!checkpoint_out.empty()) save_checkpoint(params, checkpoint_out);
      py::gil_scoped_acquire acquire;
      out["updates"] = train.updates;
      out["losses"] = train.losses;
      out["train"] = metrics_dict(train.metrics);
      out["eval"] = metrics_dict(eval.metrics);
    }
    return out;
  }, py::arg("config_json"), py::arg("checkpoint_out") = "");
}
