// Copyright 2026 The Catflow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "catflow/cli.hpp"

using namespace catflow;
using namespace catflow::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json minimal(const std::string& experiment = "simulate") {
  return {{"experiment", experiment},
          {"model", {{"k", 1}, {"alpha", 0.0}, {"kappa", 1.0}, {"na", 6}, {"nb", 3}}}};
}

bool has_error(const ParseResult& r, const std::string& needle) {
  for (const auto& e : r.errors)
    if (e.find(needle) != std::string::npos) return true;
  return false;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("catflow_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("minimal config gets defaults") {
  const ParseResult r = parse_config(minimal().dump());
  REQUIRE(r.ok());
  const RunConfig& c = *r.config;
  CHECK(c.experiment == Experiment::Simulate);
  CHECK(c.integrator.dt == 0.0);
  CHECK(c.integrator.method == IntegrationMethod::Rk4Fixed);
  CHECK(c.initial_state.kind == InitialStateSpec::Kind::Fock);
  CHECK(c.output_dir == "catflow_out/simulate");
  const json j = c.to_json();
  CHECK(j["model"]["na"] == 6);
  CHECK(parse_config(j).ok());
}

TEST_CASE("validation errors are collected") {
  json d = minimal();
  d["model"]["k"] = 0;
  ParseResult r = parse_config(d);
  CHECK_FALSE(r.ok());
  CHECK(has_error(r, "k must be >= 1"));

  d["model"]["kappa"] = -1.0;
  d["bogus"] = 1;
  r = parse_config(d);
  CHECK(r.errors.size() >= 3);
  CHECK(has_error(r, "k must be >= 1"));
  CHECK(has_error(r, "kappa must be > 0"));
  CHECK(has_error(r, "unknown key 'bogus'"));

  json e = minimal();
  e["model"].erase("nb");
  e["integrator"] = {{"stepsize", 0.1}};
  r = parse_config(e);
  CHECK(has_error(r, "missing required field 'model.nb'"));
  CHECK(has_error(r, "unknown key 'integrator.stepsize'"));

  CHECK(has_error(parse_config(minimal("sweep-kappa")), "sweep.kappas"));
  CHECK(has_error(parse_config(std::string("{not json")), "malformed JSON"));
  CHECK(has_error(parse_config(json{{"model", minimal()["model"]}}), "missing required field 'experiment'"));

  json s = minimal();
  s["model"]["na"] = "six";
  CHECK(has_error(parse_config(s), "model.na: expected an integer"));
}

TEST_CASE("overrides") {
  json d = minimal();
  apply_override(d, "model.kappa=4");
  apply_override(d, "integrator.method=rk4_adaptive");
  apply_override(d, "sweep.kappas=[4,8]");
  CHECK(d["model"]["kappa"] == 4);
  CHECK(d["integrator"]["method"] == "rk4_adaptive");
  CHECK(d["sweep"]["kappas"].size() == 2);
  CHECK_THROWS_AS(apply_override(d, "novalue"), Error);
  CHECK_THROWS_AS(apply_override(d, "model.k.x=1"), Error);
  const ParseResult r = parse_config(d);
  REQUIRE(r.ok());
  CHECK(r.config->model.kappa == 4.0);
}

TEST_CASE("initial states") {
  json d = minimal();
  d["initial_state"] = {{"kind", "coherent"}, {"re", 0.5}, {"im", 0.0}};
  RunConfig c = *parse_config(d).config;
  const CatModel m = build_model(c.model);
  const DensityMatrix rho = make_initial_state(c, m);
  CHECK(rho.dims() == m.dims());
  CHECK(std::abs(rho.matrix().trace() - 1.0) < 1e-12);

  d["initial_state"] = {{"kind", "cat_perturbed"}, {"epsilon", 0.1}};
  d["seed"] = 42;
  c = *parse_config(d).config;
  const DensityMatrix a1 = make_initial_mode_a_state(c);
  const DensityMatrix a2 = make_initial_mode_a_state(c);
  CHECK((a1.matrix() - a2.matrix()).norm() == 0.0);

  d["initial_state"] = {{"kind", "fock"}, {"n", 9}};
  CHECK(has_error(parse_config(d), "initial_state.n"));
  d["initial_state"] = {{"kind", "squeezed"}};
  CHECK(has_error(parse_config(d), "initial_state.kind"));
}

TEST_CASE("simulate writes artifacts and is reproducible") {
  const fs::path out = scratch("simulate");
  json d = minimal();
  d["model"] = {{"k", 2}, {"alpha", 0.7}, {"kappa", 2.0}, {"na", 12}, {"nb", 4}};
  d["integrator"] = {{"t_max", 2.0}, {"record_every", 20}};
  d["output_dir"] = out.string();
  const RunConfig c = *parse_config(d).config;
  std::ostringstream log;
  REQUIRE(run(c, log) == 0);
  for (const char* f : {"manifest.json", "series.csv", "report.json", "mass.svg", "energy.svg"})
    CHECK(fs::exists(out / f));
  const json manifest = json::parse(slurp(out / "manifest.json"));
  CHECK(manifest["status"] == "ok");
  CHECK(manifest["config"]["integrator"]["dt"].get<double>() > 0.0);
  CHECK(manifest.contains("version"));
  const json report = json::parse(slurp(out / "report.json"));
  CHECK(report["max_mass_decrease"].get<double>() <= 1e-7);

  const std::string first = slurp(out / "series.csv");
  // Rerun from the manifest's resolved config.
  const RunConfig again = *parse_config(manifest["config"]).config;
  REQUIRE(run(again, log) == 0);
  CHECK(slurp(out / "series.csv") == first);
  fs::remove_all(out);
}

TEST_CASE("failures produce a machine-readable record") {
  const fs::path out = scratch("breach");
  json d = minimal();
  d["model"] = {{"k", 1}, {"alpha", 0.0}, {"kappa", 0.2}, {"na", 8}, {"nb", 2}};
  d["initial_state"] = {{"kind", "fock"}, {"n", 6}, {"m", 0}};
  d["integrator"] = {{"t_max", 2.0}};
  d["output_dir"] = out.string();
  std::ostringstream log;
  CHECK(run(*parse_config(d).config, log) != 0);
  const json failure = json::parse(slurp(out / "failure.json"));
  CHECK(failure["kind"] == "truncation-breach");
  CHECK(json::parse(slurp(out / "manifest.json"))["status"] == "error");
  fs::remove_all(out);
}

TEST_CASE("density-check reports full interior rank for k = 1") {
  const fs::path out = scratch("density");
  json d = minimal("density-check");
  d["model"] = {{"k", 1}, {"alpha", 0.0}, {"kappa", 1.0}, {"na", 10}, {"nb", 5}};
  d["density"] = {{"interior_na", 7}, {"interior_nb", 3}, {"single_mode_interior", 6}};
  d["output_dir"] = out.string();
  std::ostringstream log;
  REQUIRE(run(*parse_config(d).config, log) == 0);
  const json report = json::parse(slurp(out / "report.json"));
  CHECK(report["joint"]["full_rank"] == true);
  CHECK(report["joint"]["achieved_rank"] == 21);
  CHECK(fs::exists(out / "spectra.svg"));
  fs::remove_all(out);
}

TEST_CASE("remaining experiments run") {
  struct Case {
    const char* experiment;
    json model;
    json extra;
  };
  const std::vector<Case> cases = {
      {"lyapunov-check", {{"k", 1}, {"alpha", 0.0}, {"kappa", 1.0}, {"na", 10}, {"nb", 5}}, json::object()},
      {"block-check", {{"k", 1}, {"alpha", 0.0}, {"kappa", 1.0}, {"na", 8}, {"nb", 4}}, json::object()},
      {"ns-witness", {{"k", 2}, {"alpha", 0.7}, {"kappa", 1.0}, {"na", 8}, {"nb", 2}}, json::object()},
      {"adiabatic-compare",
       {{"k", 1}, {"alpha", 0.5}, {"kappa", 4.0}, {"na", 10}, {"nb", 4}},
       {{"integrator", {{"t_max", 0.5}, {"record_every", 10}}}}},
      {"sweep-kappa",
       {{"k", 1}, {"alpha", 0.5}, {"kappa", 4.0}, {"na", 10}, {"nb", 4}},
       {{"integrator", {{"t_max", 0.5}, {"record_every", 10}}}, {"sweep", {{"kappas", {4.0, 8.0}}}}}},
  };
  for (const Case& c : cases) {
    INFO(c.experiment);
    const fs::path out = scratch(c.experiment);
    json d = minimal(c.experiment);
    d["model"] = c.model;
    for (const auto& [k, v] : c.extra.items()) d[k] = v;
    d["output_dir"] = out.string();
    const ParseResult r = parse_config(d);
    REQUIRE(r.ok());
    std::ostringstream log;
    CHECK(run(*r.config, log) == 0);
    CHECK(fs::exists(out / "report.json"));
    CHECK(fs::exists(out / "series.csv"));
    CHECK(fs::exists(out / "manifest.json"));
    fs::remove_all(out);
  }
}

TEST_CASE("sweep output is independent of the worker count") {
  json d = minimal("sweep-kappa");
  d["model"] = {{"k", 1}, {"alpha", 0.5}, {"kappa", 4.0}, {"na", 8}, {"nb", 4}};
  d["integrator"] = {{"t_max", 0.3}, {"record_every", 10}};
  d["sweep"] = {{"kappas", {4.0, 6.0, 8.0}}};
  std::string series[2];
  for (int w = 0; w < 2; ++w) {
    const fs::path out = scratch("sweep" + std::to_string(w));
    d["output_dir"] = out.string();
    setenv("CATFLOW_WORKERS", w == 0 ? "1" : "3", 1);
    std::ostringstream log;
    REQUIRE(run(*parse_config(d).config, log) == 0);
    series[w] = slurp(out / "series.csv");
    fs::remove_all(out);
  }
  unsetenv("CATFLOW_WORKERS");
  CHECK(series[0] == series[1]);
  CHECK(worker_count() >= 1);
}

TEST_CASE("experiment names") {
  CHECK(experiment_names().size() == 7);
  for (const auto& n : experiment_names()) CHECK(to_string(*experiment_from_string(n)) == n);
  CHECK_FALSE(experiment_from_string("nope").has_value());
}
