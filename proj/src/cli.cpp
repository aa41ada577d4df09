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
#include "catflow/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <numbers>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "catflow/adiabatic.hpp"
#include "catflow/bargmann.hpp"
#include "catflow/density_probe.hpp"
#include "catflow/diagnostics.hpp"
#include "catflow/svg.hpp"
#include "catflow/version.hpp"

namespace catflow::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct ExperimentName {
  Experiment e;
  const char* name;
};

constexpr ExperimentName kExperiments[] = {
    {Experiment::Simulate, "simulate"},
    {Experiment::SweepKappa, "sweep-kappa"},
    {Experiment::DensityCheck, "density-check"},
    {Experiment::LyapunovCheck, "lyapunov-check"},
    {Experiment::AdiabaticCompare, "adiabatic-compare"},
    {Experiment::BlockCheck, "block-check"},
    {Experiment::NsWitness, "ns-witness"},
};

}  // namespace

std::string_view to_string(Experiment e) {
  for (const auto& x : kExperiments)
    if (x.e == e) return x.name;
  return "unknown";
}

std::optional<Experiment> experiment_from_string(std::string_view s) {
  for (const auto& x : kExperiments)
    if (s == x.name) return x.e;
  return std::nullopt;
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& x : kExperiments) v.emplace_back(x.name);
    return v;
  }();
  return names;
}

namespace {

const char* kind_name(InitialStateSpec::Kind k) {
  switch (k) {
    case InitialStateSpec::Kind::Fock: return "fock";
    case InitialStateSpec::Kind::Coherent: return "coherent";
    case InitialStateSpec::Kind::CatPerturbed: return "cat_perturbed";
  }
  return "fock";
}

// Reads one JSON object, recording every problem instead of stopping.
class Section {
 public:
  Section(const json* obj, std::string path, std::vector<std::string>& errors,
          std::set<std::string> allowed)
      : obj_(obj), path_(std::move(path)), errors_(errors) {
    if (!obj_) return;
    if (!obj_->is_object()) {
      errors_.push_back(where("") + " must be an object");
      obj_ = nullptr;
      return;
    }
    for (const auto& [key, value] : obj_->items()) {
      (void)value;
      if (!allowed.count(key)) errors_.push_back("unknown key '" + where(key) + "'");
    }
  }

  bool present() const { return obj_ != nullptr; }

  const json* child(const std::string& key) const {
    if (!obj_) return nullptr;
    auto it = obj_->find(key);
    return it == obj_->end() ? nullptr : &*it;
  }

  std::string where(const std::string& key) const {
    if (path_.empty()) return key;
    return key.empty() ? path_ : path_ + "." + key;
  }

  void integer(const std::string& key, int& out, bool required = false) const {
    const json* v = lookup(key, required);
    if (!v) return;
    if (!v->is_number_integer()) {
      errors_.push_back(where(key) + ": expected an integer");
      return;
    }
    out = v->get<int>();
  }

  void unsigned64(const std::string& key, std::uint64_t& out) const {
    const json* v = lookup(key, false);
    if (!v) return;
    if (!v->is_number_integer() || v->get<long long>() < 0) {
      errors_.push_back(where(key) + ": expected a non-negative integer");
      return;
    }
    out = v->get<std::uint64_t>();
  }

  void number(const std::string& key, double& out, bool required = false) const {
    const json* v = lookup(key, required);
    if (!v) return;
    if (!v->is_number()) {
      errors_.push_back(where(key) + ": expected a number");
      return;
    }
    out = v->get<double>();
  }

  void boolean(const std::string& key, bool& out) const {
    const json* v = lookup(key, false);
    if (!v) return;
    if (!v->is_boolean()) {
      errors_.push_back(where(key) + ": expected true or false");
      return;
    }
    out = v->get<bool>();
  }

  void string(const std::string& key, std::string& out, bool required = false) const {
    const json* v = lookup(key, required);
    if (!v) return;
    if (!v->is_string()) {
      errors_.push_back(where(key) + ": expected a string");
      return;
    }
    out = v->get<std::string>();
  }

  void numbers(const std::string& key, std::vector<double>& out, bool required = false) const {
    const json* v = lookup(key, required);
    if (!v) return;
    if (!v->is_array() || v->empty() ||
        !std::all_of(v->begin(), v->end(), [](const json& x) { return x.is_number(); })) {
      errors_.push_back(where(key) + ": expected a non-empty array of numbers");
      return;
    }
    out.clear();
    for (const auto& x : *v) out.push_back(x.get<double>());
  }

 private:
  const json* lookup(const std::string& key, bool required) const {
    const json* v = child(key);
    if (!v && required) errors_.push_back("missing required field '" + where(key) + "'");
    return v;
  }

  const json* obj_;
  std::string path_;
  std::vector<std::string>& errors_;
};

}  // namespace

json RunConfig::to_json() const {
  json j;
  j["experiment"] = std::string(cli::to_string(experiment));
  j["model"] = {{"k", model.k},
                {"alpha", model.alpha},
                {"kappa", model.kappa},
                {"na", model.dims.na},
                {"nb", model.dims.nb}};
  j["integrator"] = {{"dt", integrator.dt},
                     {"t_max", integrator.t_max},
                     {"method", std::string(catflow::to_string(integrator.method))},
                     {"rel_tol", integrator.rel_tol},
                     {"record_every", integrator.record_every},
                     {"snapshot_states", integrator.snapshot_states},
                     {"leakage_ceiling", integrator.leakage_ceiling}};
  json init = {{"kind", kind_name(initial_state.kind)}};
  switch (initial_state.kind) {
    case InitialStateSpec::Kind::Fock:
      init["n"] = initial_state.n;
      init["m"] = initial_state.m;
      break;
    case InitialStateSpec::Kind::Coherent:
      init["re"] = initial_state.z.real();
      init["im"] = initial_state.z.imag();
      break;
    case InitialStateSpec::Kind::CatPerturbed:
      init["epsilon"] = initial_state.epsilon;
      break;
  }
  j["initial_state"] = init;
  j["output_dir"] = output_dir;
  j["seed"] = seed;
  if (!sweep.kappas.empty()) j["sweep"] = {{"kappas", sweep.kappas}};
  j["density"] = {{"budget", density.budget},
                  {"interior_na", density.interior_na},
                  {"interior_nb", density.interior_nb},
                  {"single_mode_budget", density.single_mode_budget},
                  {"single_mode_interior", density.single_mode_interior},
                  {"threshold", density.threshold}};
  j["lyapunov"] = {{"mu_grid", lyapunov.mu_grid},
                   {"c2_min", lyapunov.c2_min},
                   {"c2_max", lyapunov.c2_max},
                   {"c2_count", lyapunov.c2_count},
                   {"interior_margin", lyapunov.interior_margin}};
  j["block"] = {{"times", block.times}};
  j["witness"] = {{"ambient_dim", witness.ambient_dim}, {"zero_order", witness.zero_order}};
  return j;
}

ParseResult parse_config(const json& doc) {
  std::vector<std::string> errors;
  RunConfig cfg;
  Section top(&doc, "", errors,
              {"experiment", "model", "integrator", "initial_state", "output_dir", "seed", "sweep",
               "density", "lyapunov", "block", "witness"});
  if (!top.present()) return {std::nullopt, errors};

  std::string exp_name;
  top.string("experiment", exp_name, true);
  if (!exp_name.empty()) {
    if (auto e = experiment_from_string(exp_name)) {
      cfg.experiment = *e;
    } else {
      errors.push_back("experiment: unknown experiment '" + exp_name + "'");
    }
  }

  // Model.
  const json* model_doc = top.child("model");
  if (!model_doc) errors.push_back("missing required field 'model'");
  Section model(model_doc, "model", errors, {"k", "alpha", "kappa", "na", "nb"});
  if (model.present()) {
    int na = 0, nb = 0;
    model.integer("k", cfg.model.k, true);
    model.number("alpha", cfg.model.alpha, true);
    model.number("kappa", cfg.model.kappa, true);
    model.integer("na", na, true);
    model.integer("nb", nb, true);
    const bool have_dims = model.child("na") && model.child("nb");
    if (cfg.model.k < 1) errors.push_back("model.k: k must be >= 1");
    if (!(cfg.model.kappa > 0.0)) errors.push_back("model.kappa: kappa must be > 0");
    if (have_dims) {
      if (na <= cfg.model.k) errors.push_back("model.na: na must exceed k");
      if (nb < 2) errors.push_back("model.nb: nb must be >= 2");
      if (na >= 1 && nb >= 1) cfg.model.dims = FockDims(na, nb);
    }
  }

  // Integrator.
  Section integ(top.child("integrator"), "integrator", errors,
                {"dt", "t_max", "method", "rel_tol", "record_every", "snapshot_states",
                 "leakage_ceiling"});
  std::string method = std::string(catflow::to_string(cfg.integrator.method));
  integ.number("dt", cfg.integrator.dt);
  integ.number("t_max", cfg.integrator.t_max);
  integ.string("method", method);
  integ.number("rel_tol", cfg.integrator.rel_tol);
  integ.integer("record_every", cfg.integrator.record_every);
  integ.boolean("snapshot_states", cfg.integrator.snapshot_states);
  integ.number("leakage_ceiling", cfg.integrator.leakage_ceiling);
  try {
    cfg.integrator.method = integration_method_from_string(method);
  } catch (const Error& e) {
    errors.push_back(std::string("integrator.method: ") + e.what());
  }
  if (!(cfg.integrator.t_max > 0.0)) errors.push_back("integrator.t_max: must be > 0");
  if (cfg.integrator.dt < 0.0) errors.push_back("integrator.dt: must be > 0 (or 0 for the default rule)");
  if (cfg.integrator.dt > cfg.integrator.t_max) errors.push_back("integrator.dt: must not exceed t_max");
  if (!(cfg.integrator.rel_tol > 0.0 && cfg.integrator.rel_tol <= 1e-2)) {
    errors.push_back("integrator.rel_tol: must lie in (0, 1e-2]");
  }
  if (cfg.integrator.record_every < 1) errors.push_back("integrator.record_every: must be >= 1");
  if (!(cfg.integrator.leakage_ceiling > 0.0)) {
    errors.push_back("integrator.leakage_ceiling: must be > 0");
  }

  // Initial state.
  Section init(top.child("initial_state"), "initial_state", errors,
               {"kind", "n", "m", "re", "im", "epsilon"});
  if (init.present()) {
    std::string kind = "fock";
    init.string("kind", kind, true);
    double re = 0.0, im = 0.0;
    if (kind == "fock") {
      cfg.initial_state.kind = InitialStateSpec::Kind::Fock;
      init.integer("n", cfg.initial_state.n);
      init.integer("m", cfg.initial_state.m);
      if (cfg.initial_state.n < 0 || cfg.initial_state.n >= cfg.model.dims.na) {
        errors.push_back("initial_state.n: must lie in [0, na)");
      }
      if (cfg.initial_state.m < 0 || cfg.initial_state.m >= cfg.model.dims.nb) {
        errors.push_back("initial_state.m: must lie in [0, nb)");
      }
    } else if (kind == "coherent") {
      cfg.initial_state.kind = InitialStateSpec::Kind::Coherent;
      init.number("re", re);
      init.number("im", im);
      cfg.initial_state.z = Complex(re, im);
    } else if (kind == "cat_perturbed") {
      cfg.initial_state.kind = InitialStateSpec::Kind::CatPerturbed;
      init.number("epsilon", cfg.initial_state.epsilon);
      if (cfg.initial_state.epsilon < 0.0) errors.push_back("initial_state.epsilon: must be >= 0");
    } else {
      errors.push_back("initial_state.kind: expected fock, coherent or cat_perturbed");
    }
  }

  top.string("output_dir", cfg.output_dir);
  if (cfg.output_dir.empty()) cfg.output_dir = "catflow_out/" + std::string(to_string(cfg.experiment));
  top.unsigned64("seed", cfg.seed);

  Section sweep(top.child("sweep"), "sweep", errors, {"kappas"});
  if (cfg.experiment == Experiment::SweepKappa && !sweep.present()) {
    errors.push_back("missing required field 'sweep.kappas'");
  }
  sweep.numbers("kappas", cfg.sweep.kappas, cfg.experiment == Experiment::SweepKappa);
  for (double k : cfg.sweep.kappas)
    if (!(k > 0.0)) errors.push_back("sweep.kappas: every kappa must be > 0");

  Section dens(top.child("density"), "density", errors,
               {"budget", "interior_na", "interior_nb", "single_mode_budget",
                "single_mode_interior", "threshold"});
  dens.integer("budget", cfg.density.budget);
  dens.integer("interior_na", cfg.density.interior_na);
  dens.integer("interior_nb", cfg.density.interior_nb);
  dens.integer("single_mode_budget", cfg.density.single_mode_budget);
  dens.integer("single_mode_interior", cfg.density.single_mode_interior);
  dens.number("threshold", cfg.density.threshold);
  if (cfg.density.budget < 0 || cfg.density.single_mode_budget < 0) {
    errors.push_back("density: budgets must be >= 0");
  }
  if (!(cfg.density.threshold > 0.0 && cfg.density.threshold < 1.0)) {
    errors.push_back("density.threshold: must lie in (0, 1)");
  }

  Section lyap(top.child("lyapunov"), "lyapunov", errors,
               {"mu_grid", "c2_min", "c2_max", "c2_count", "interior_margin"});
  lyap.numbers("mu_grid", cfg.lyapunov.mu_grid);
  lyap.number("c2_min", cfg.lyapunov.c2_min);
  lyap.number("c2_max", cfg.lyapunov.c2_max);
  lyap.integer("c2_count", cfg.lyapunov.c2_count);
  lyap.integer("interior_margin", cfg.lyapunov.interior_margin);
  for (double mu : cfg.lyapunov.mu_grid)
    if (mu < 0.0) errors.push_back("lyapunov.mu_grid: mu must be >= 0");
  if (!(cfg.lyapunov.c2_min > 0.0 && cfg.lyapunov.c2_max >= cfg.lyapunov.c2_min)) {
    errors.push_back("lyapunov: need 0 < c2_min <= c2_max");
  }
  if (cfg.lyapunov.c2_count < 1) errors.push_back("lyapunov.c2_count: must be >= 1");
  if (cfg.lyapunov.interior_margin != 0 && cfg.lyapunov.interior_margin < 2 * cfg.model.k) {
    errors.push_back("lyapunov.interior_margin: must be >= 2k");
  }

  Section block(top.child("block"), "block", errors, {"times"});
  block.numbers("times", cfg.block.times);
  for (double t : cfg.block.times)
    if (t < 0.0) errors.push_back("block.times: times must be >= 0");

  Section wit(top.child("witness"), "witness", errors, {"ambient_dim", "zero_order"});
  wit.integer("ambient_dim", cfg.witness.ambient_dim);
  wit.integer("zero_order", cfg.witness.zero_order);
  if (cfg.witness.zero_order < 0) errors.push_back("witness.zero_order: must be >= 0");
  if (cfg.experiment == Experiment::NsWitness) {
    if (cfg.model.alpha == 0.0) errors.push_back("model.alpha: ns-witness needs alpha != 0");
    if (cfg.witness.ambient_dim <= cfg.model.k + cfg.witness.zero_order) {
      errors.push_back("witness.ambient_dim: must exceed k + zero_order");
    }
  }
  if (cfg.experiment == Experiment::SweepKappa || cfg.experiment == Experiment::AdiabaticCompare) {
    if (cfg.initial_state.kind == InitialStateSpec::Kind::Fock && cfg.initial_state.m != 0) {
      errors.push_back("initial_state.m: adiabatic runs need the buffer in vacuum (m = 0)");
    }
  }

  if (!errors.empty()) return {std::nullopt, errors};
  return {cfg, {}};
}

ParseResult parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    return {std::nullopt, {std::string("malformed JSON: ") + e.what()}};
  }
  return parse_config(doc);
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw Error(ErrorKind::Config, "override '" + assignment + "' is not of the form key=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  if (!doc.is_object()) doc = json::object();
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw Error(ErrorKind::Config, "override key '" + key + "' has an empty part");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    json& next = (*node)[part];
    if (next.is_null()) next = json::object();
    if (!next.is_object()) {
      throw Error(ErrorKind::Config, "override key '" + key + "' descends into a non-object");
    }
    node = &next;
    start = dot + 1;
  }
}

DensityMatrix make_initial_mode_a_state(const RunConfig& cfg) {
  const int na = cfg.model.dims.na;
  const FockDims adims(na, 1);
  const InitialStateSpec& s = cfg.initial_state;
  switch (s.kind) {
    case InitialStateSpec::Kind::Fock:
      if (s.m != 0) throw Error(ErrorKind::InvalidArgument, "buffer must start in vacuum");
      return DensityMatrix::pure(Ket::basis(Space::A, adims, s.n));
    case InitialStateSpec::Kind::Coherent: {
      const CoherentState c = coherent_state(s.z, na);
      return DensityMatrix::pure(Ket(Space::A, adims, c.ket.amplitudes()));
    }
    case InitialStateSpec::Kind::CatPerturbed: {
      const KernelBasis kb = kernel_basis(cfg.model);
      std::mt19937_64 rng(cfg.seed);
      std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
      Vector v = kb.vectors[0].amplitudes();
      v(cfg.model.k) += s.epsilon * std::polar(1.0, phase(rng));
      return DensityMatrix::pure(Ket(Space::A, adims, v));
    }
  }
  throw Error(ErrorKind::InvalidArgument, "unknown initial state");
}

DensityMatrix make_initial_state(const RunConfig& cfg, const CatModel& model) {
  if (cfg.initial_state.kind == InitialStateSpec::Kind::Fock) {
    return DensityMatrix::pure(Ket::basis(model.dims(), cfg.initial_state.n, cfg.initial_state.m));
  }
  return lift_to_joint(make_initial_mode_a_state(cfg), model.dims().nb);
}

int worker_count() {
  if (const char* env = std::getenv("CATFLOW_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<int>(v);
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

namespace {

json spectrum_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

json span_json(const SpanReport& r) {
  return {{"target_dim", r.target_dim},
          {"achieved_rank", r.achieved_rank},
          {"full_rank", r.achieved_rank >= r.target_dim},
          {"status", std::string(to_string(r.status))},
          {"degree_budget", r.degree_budget},
          {"threshold", r.threshold},
          {"generated_dim", r.generated_dim},
          {"reach_degree", r.reach_degree},
          {"rank_by_degree", r.rank_by_degree},
          {"class_ranks", r.class_ranks},
          {"class_targets", r.class_targets},
          {"residual_spectrum", spectrum_json(r.residual_spectrum)}};
}

json stats_json(const IntegrationStats& s) {
  return {{"steps", s.steps},
          {"rejected", s.rejected},
          {"max_trace_drift", s.max_trace_drift},
          {"max_hermiticity_drift", s.max_hermiticity_drift},
          {"min_step", s.min_step},
          {"max_step", s.max_step}};
}

class Output {
 public:
  explicit Output(const fs::path& dir) : dir_(dir) { fs::create_directories(dir_); }

  std::ofstream open(const std::string& name) {
    files_.push_back(name);
    std::ofstream os(dir_ / name);
    if (!os) throw Error(ErrorKind::Config, "cannot write " + (dir_ / name).string());
    return os;
  }

  void write_json(const std::string& name, const json& j) { open(name) << j.dump(2) << '\n'; }

  const std::vector<std::string>& files() const { return files_; }
  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

void write_csv_row(std::ostream& os, const std::vector<double>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
  os << '\n';
}

json run_simulate(const RunConfig& cfg, Output& out, IntegratorConfig& resolved) {
  const CatModel model = build_model(cfg.model);
  resolved = resolve(cfg.integrator, model.generator());
  const EnergyObservables e = energy_observables(model);
  const Operator nb = model.b().adjoint() * model.b();
  const std::vector<Observer> obs{{"mass_HL", model.projector()}, {"V", e.V}, {"W", e.W}, {"nb", nb}};
  const Trajectory traj = evolve(model, make_initial_state(cfg, model), resolved, obs);
  {
    auto os = out.open("series.csv");
    write_trajectory_csv(traj, os);
  }
  const std::vector<double> mass = traj.real_series("mass_HL");
  {
    auto os = out.open("mass.svg");
    svg::line_plot(os, {"Mass on H_L", "t", "Tr(rho Pi_L)"}, {{"mass", traj.times, mass}});
  }
  {
    auto os = out.open("energy.svg");
    svg::line_plot(os, {"Energy observables", "t", "expectation"},
                   {{"V", traj.times, traj.real_series("V")},
                    {"W", traj.times, traj.real_series("W")},
                    {"b^dag b", traj.times, traj.real_series("nb")}});
  }
  Trajectory last;
  last.times = {traj.times.back()};
  last.snapshots = {*traj.final_state};
  const LimitEstimate lim = extrapolate_limit(last, model);
  return {{"final_mass", mass.back()},
          {"max_mass_decrease", max_decrease(mass)},
          {"max_leakage", *std::max_element(traj.leakage.begin(), traj.leakage.end())},
          {"final_min_eigenvalue", traj.final_state->min_eigenvalue()},
          {"distance_to_limit", lim.final_distance},
          {"limit_off_manifold_mass", lim.off_manifold_mass},
          {"integration", stats_json(traj.stats)}};
}

json run_sweep(const RunConfig& cfg, Output& out, IntegratorConfig& resolved, std::ostream& log) {
  const DensityMatrix rho_a0 = make_initial_mode_a_state(cfg);
  const std::vector<double>& kappas = cfg.sweep.kappas;
  const int workers = std::min<int>(worker_count(), static_cast<int>(kappas.size()));
  log << "sweep-kappa: " << kappas.size() << " points on " << workers << " worker(s)\n";
  const fs::path points = out.dir() / "points";
  fs::create_directories(points);

  std::vector<AdiabaticPoint> results(kappas.size());
  std::vector<std::string> failures(kappas.size());
  std::vector<ErrorKind> failure_kinds(kappas.size(), ErrorKind::IntegrationDiverged);
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (std::size_t i = next++; i < kappas.size(); i = next++) {
      try {
        ModelParams p = cfg.model;
        p.kappa = kappas[i];
        results[i] = adiabatic_point(p, rho_a0, cfg.integrator);
        std::ofstream os(points / ("point_" + std::to_string(i) + ".csv"));
        os << std::setprecision(17) << "kappa,t,error,buffer_excitation\n";
        const auto& c = results[i].comparison;
        for (std::size_t j = 0; j < c.times.size(); ++j)
          write_csv_row(os, {kappas[i], c.times[j], c.error[j], c.buffer_excitation[j]});
      } catch (const Error& e) {
        failures[i] = e.what();
        failure_kinds[i] = e.kind();
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < kappas.size(); ++i) {
    if (!failures[i].empty()) {
      throw Error(failure_kinds[i],
                  "sweep point kappa=" + std::to_string(kappas[i]) + " failed: " + failures[i]);
    }
  }
  // Merge in grid order.
  {
    auto os = out.open("series.csv");
    os << "kappa,t,error,buffer_excitation\n";
    for (std::size_t i = 0; i < kappas.size(); ++i) {
      std::ifstream is(points / ("point_" + std::to_string(i) + ".csv"));
      std::string line;
      std::getline(is, line);
      while (std::getline(is, line)) os << line << '\n';
    }
  }
  ModelParams first = cfg.model;
  first.kappa = kappas.front();
  resolved = resolve(cfg.integrator, build_model(first).generator());

  std::vector<double> final_error;
  for (const auto& r : results) final_error.push_back(r.comparison.error.back());
  bool decreasing = true;
  for (std::size_t i = 1; i < final_error.size(); ++i)
    decreasing = decreasing && final_error[i] < final_error[i - 1];
  json rep = {{"kappas", kappas},
              {"t", cfg.integrator.t_max},
              {"final_error", final_error},
              {"strictly_decreasing", decreasing}};
  if (kappas.size() >= 2 &&
      std::all_of(final_error.begin(), final_error.end(), [](double v) { return v > 0.0; })) {
    rep["loglog_slope"] = loglog_slope(kappas, final_error);
  }
  auto os = out.open("adiabatic_error.svg");
  svg::PlotSpec spec{"Adiabatic error at final time", "kappa", "error", true, true, true};
  svg::line_plot(os, spec, {{"error", kappas, final_error}});
  return rep;
}

json run_density(const RunConfig& cfg, Output& out) {
  const CatModel model = build_model(cfg.model);
  const int k = cfg.model.k;
  const DensitySettings& d = cfg.density;
  const FockDims interior(d.interior_na > 0 ? d.interior_na : cfg.model.dims.na - 2 * k,
                          d.interior_nb > 0 ? d.interior_nb : cfg.model.dims.nb - 2);
  const SpanReport joint = generate_joint_span(model, d.budget, interior, d.threshold);
  const int smi = d.single_mode_interior > 0 ? d.single_mode_interior : cfg.model.dims.na - 2 * k;
  const SpanReport ela = span_single_mode(cfg.model, SpanVariant::ELa, d.single_mode_budget, smi, d.threshold);
  const SpanReport both =
      span_single_mode(cfg.model, SpanVariant::ELaPlusELsharp, d.single_mode_budget, smi, d.threshold);
  {
    auto os = out.open("series.csv");
    os << std::setprecision(17) << "index,joint,ela,ela_plus_elsharp\n";
    const Eigen::Index n = std::max({joint.residual_spectrum.size(), ela.residual_spectrum.size(),
                                     both.residual_spectrum.size()});
    auto at = [](const Eigen::VectorXd& v, Eigen::Index i) {
      return i < v.size() ? v(i) : std::nan("");
    };
    for (Eigen::Index i = 0; i < n; ++i) {
      write_csv_row(os, {static_cast<double>(i), at(joint.residual_spectrum, i),
                         at(ela.residual_spectrum, i), at(both.residual_spectrum, i)});
    }
  }
  {
    auto os = out.open("spectra.svg");
    auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
    svg::PlotSpec spec{"Singular values on the interior", "index", "singular value", false, true};
    svg::bar_chart(os, spec,
                   {{"joint", {}, vec(joint.residual_spectrum)},
                    {"ELa", {}, vec(ela.residual_spectrum)},
                    {"ELa+ELsharp", {}, vec(both.residual_spectrum)}});
  }
  return {{"interior", {interior.na, interior.nb}},
          {"joint", span_json(joint)},
          {"single_mode_interior", smi},
          {"ela", span_json(ela)},
          {"ela_plus_elsharp", span_json(both)}};
}

json run_lyapunov(const RunConfig& cfg, Output& out) {
  const CatModel model = build_model(cfg.model);
  const LyapunovSettings& l = cfg.lyapunov;
  const int margin = l.interior_margin > 0 ? l.interior_margin : 2 * cfg.model.k;
  const std::vector<double> grid = geometric_grid(l.c2_min, l.c2_max, l.c2_count);
  const CertificateReport best = lyapunov_certificate_scan(model, l.mu_grid, margin, grid);
  json per_mu = json::array();
  for (double mu : l.mu_grid) {
    const CertificateReport r = lyapunov_certificate(model, {mu, margin}, grid);
    per_mu.push_back({{"mu", mu}, {"feasible", r.feasible}, {"c1", r.c1}, {"c2", r.c2},
                      {"bound", r.feasible ? r.bound() : std::nan("")}});
  }
  {
    auto os = out.open("series.csv");
    os << std::setprecision(17) << "c2,c1,bound\n";
    for (std::size_t i = 0; i < best.c2_grid.size(); ++i)
      write_csv_row(os, {best.c2_grid[i], best.c1_values[i], best.c1_values[i] / best.c2_grid[i]});
  }
  {
    std::vector<double> bound;
    for (std::size_t i = 0; i < best.c2_grid.size(); ++i)
      bound.push_back(best.c1_values[i] / best.c2_grid[i]);
    auto os = out.open("certificate.svg");
    svg::line_plot(os, {"Certificate C1/C2 against C2", "C2", "C1/C2", true, false, true},
                   {{"mu=" + std::to_string(best.mu), best.c2_grid, bound}});
  }
  const std::vector<int> interior = lyapunov_interior(model, {best.mu, margin});
  return {{"mu", best.mu},
          {"c1", best.c1},
          {"c2", best.c2},
          {"bound", best.bound()},
          {"min_eig", best.min_eig},
          {"feasible", best.feasible},
          {"interior_dim", best.interior_dim},
          {"interior_margin", margin},
          {"x_min", best.x_min},
          {"x_max", best.x_max},
          {"y_max", best.y_max},
          {"w_relative_bound_eps_0.5", w_relative_bound(model, 0.5, interior)},
          {"per_mu", per_mu}};
}

json run_adiabatic(const RunConfig& cfg, Output& out, IntegratorConfig& resolved) {
  const AdiabaticPoint p = adiabatic_point(cfg.model, make_initial_mode_a_state(cfg), cfg.integrator);
  resolved = resolve(cfg.integrator, build_model(cfg.model).generator());
  const auto& c = p.comparison;
  {
    auto os = out.open("series.csv");
    os << std::setprecision(17) << "t,error,buffer_excitation\n";
    for (std::size_t j = 0; j < c.times.size(); ++j)
      write_csv_row(os, {c.times[j], c.error[j], c.buffer_excitation[j]});
  }
  {
    auto os = out.open("adiabatic_error_t.svg");
    svg::line_plot(os, {"Distance to the reduced model", "t", "trace distance"},
                   {{"error", c.times, c.error}, {"b^dag b", c.times, c.buffer_excitation}});
  }
  return {{"kappa", cfg.model.kappa},
          {"kappa_tilde", 4.0 / cfg.model.kappa},
          {"final_error", c.error.back()},
          {"max_error", *std::max_element(c.error.begin(), c.error.end())},
          {"final_buffer_excitation", c.buffer_excitation.back()}};
}

json run_block(const RunConfig& cfg, Output& out, IntegratorConfig& resolved) {
  const CatModel model = build_model(cfg.model);
  resolved = resolve(cfg.integrator, model.generator());
  json reports = json::array();
  std::vector<double> ts, cmin;
  auto os = out.open("series.csv");
  os << std::setprecision(17)
     << "t,diagonal_defect,off_diagonal,complement_min_eig,min_eig,max_eig,absorption_min_eig\n";
  for (double t : cfg.block.times) {
    const BlockReport r = block_positivity_check(model, t, cfg.integrator);
    write_csv_row(os, {t, r.diagonal_defect, r.off_diagonal, r.complement_min_eig, r.min_eig,
                       r.max_eig, r.absorption_min_eig});
    reports.push_back({{"t", t},
                       {"diagonal_defect", r.diagonal_defect},
                       {"off_diagonal", r.off_diagonal},
                       {"complement_min_eig", r.complement_min_eig},
                       {"complement_dim", r.complement_dim},
                       {"min_eig", r.min_eig},
                       {"max_eig", r.max_eig},
                       {"absorption_min_eig", r.absorption_min_eig}});
    ts.push_back(t);
    cmin.push_back(r.complement_min_eig);
  }
  auto plot = out.open("complement_min_eig.svg");
  svg::line_plot(plot, {"Complement block minimum eigenvalue", "t", "min eig", false, false, true},
                 {{"complement", ts, cmin}});
  return {{"checks", reports}};
}

json run_witness(const RunConfig& cfg, Output& out) {
  const ExpPolynomial f = cat_exp_polynomial(cfg.model.k, cfg.model.alpha, cfg.witness.zero_order);
  const WitnessReport r = newman_shapiro_witness(f, cfg.witness.ambient_dim);
  {
    auto os = out.open("series.csv");
    os << std::setprecision(17) << "index,residual_singular_value\n";
    for (Eigen::Index i = 0; i < r.spectrum.size(); ++i)
      write_csv_row(os, {static_cast<double>(i), r.spectrum(i)});
  }
  {
    auto os = out.open("spectrum.svg");
    svg::PlotSpec spec{"Residual spectrum of the multiples of f", "index", "singular value", false, true};
    svg::bar_chart(os, spec,
                   {{"residual", {}, std::vector<double>(r.spectrum.data(), r.spectrum.data() + r.spectrum.size())}});
  }
  return {{"function", r.label},
          {"ambient_dim", r.ambient_dim},
          {"subspace_dim", r.subspace_dim},
          {"complement_dim", r.complement_dim},
          {"expected_dim", r.expected_dim},
          {"principal_angles", spectrum_json(r.angles)},
          {"max_angle", r.max_angle},
          {"passed", r.passed}};
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  Output out{fs::path(cfg.output_dir)};
  IntegratorConfig resolved = cfg.integrator;
  json report;
  int status = 0;
  try {
    switch (cfg.experiment) {
      case Experiment::Simulate: report = run_simulate(cfg, out, resolved); break;
      case Experiment::SweepKappa: report = run_sweep(cfg, out, resolved, log); break;
      case Experiment::DensityCheck: report = run_density(cfg, out); break;
      case Experiment::LyapunovCheck: report = run_lyapunov(cfg, out); break;
      case Experiment::AdiabaticCompare: report = run_adiabatic(cfg, out, resolved); break;
      case Experiment::BlockCheck: report = run_block(cfg, out, resolved); break;
      case Experiment::NsWitness: report = run_witness(cfg, out); break;
    }
    out.write_json("report.json", report);
  } catch (const Error& e) {
    out.write_json("failure.json", {{"status", "error"},
                                    {"kind", std::string(to_string(e.kind()))},
                                    {"message", e.what()},
                                    {"experiment", std::string(to_string(cfg.experiment))}});
    log << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    status = 2;
  } catch (const std::exception& e) {
    out.write_json("failure.json", {{"status", "error"},
                                    {"kind", "internal"},
                                    {"message", e.what()},
                                    {"experiment", std::string(to_string(cfg.experiment))}});
    log << "error: " << e.what() << '\n';
    status = 2;
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json resolved_cfg = cfg.to_json();
  resolved_cfg["integrator"]["dt"] = resolved.dt;
  std::vector<std::string> files = out.files();
  files.push_back("manifest.json");
  out.write_json("manifest.json", {{"tool", "catflow"},
                                   {"version", kVersion},
                                   {"experiment", std::string(to_string(cfg.experiment))},
                                   {"status", status == 0 ? "ok" : "error"},
                                   {"config", resolved_cfg},
                                   {"requested_dt", cfg.integrator.dt},
                                   {"wall_time_seconds", wall},
                                   {"outputs", files}});
  if (status == 0) log << "wrote " << files.size() << " files to " << cfg.output_dir << '\n';
  return status;
}

}  // namespace catflow::cli
