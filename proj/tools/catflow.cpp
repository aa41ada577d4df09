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
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "catflow/cli.hpp"
#include "catflow/error.hpp"

int main(int argc, char** argv) {
  using catflow::cli::experiment_names;
  CLI::App app{"catflow: numerical lab for the bipartite cat-qubit Lindblad equation"};
  std::string experiment;
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  bool dump = false;
  app.add_option("experiment", experiment, "Experiment to run")
      ->required()
      ->check(CLI::IsMember(experiment_names()));
  app.add_option("-c,--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
  app.add_option("-s,--set", overrides, "Override a field, e.g. --set model.kappa=4");
  app.add_option("-o,--out", out_dir, "Output directory");
  app.add_flag("--print-config", dump, "Print the resolved configuration and exit");
  CLI11_PARSE(app, argc, argv);

  nlohmann::json doc = nlohmann::json::object();
  if (!config_path.empty()) {
    std::ifstream is(config_path);
    std::stringstream ss;
    ss << is.rdbuf();
    try {
      doc = nlohmann::json::parse(ss.str());
    } catch (const nlohmann::json::parse_error& e) {
      std::cerr << "config error: malformed JSON in " << config_path << ": " << e.what() << '\n';
      return 1;
    }
  }
  try {
    for (const auto& o : overrides) catflow::cli::apply_override(doc, o);
  } catch (const catflow::Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  }
  if (doc.is_object() && doc.contains("experiment") && doc["experiment"] != experiment) {
    std::cerr << "note: command-line experiment '" << experiment << "' replaces '"
              << doc["experiment"].dump() << "' from the config file\n";
  }
  if (doc.is_object()) doc["experiment"] = experiment;
  if (!out_dir.empty() && doc.is_object()) doc["output_dir"] = out_dir;

  const auto parsed = catflow::cli::parse_config(doc);
  if (!parsed.ok()) {
    for (const auto& e : parsed.errors) std::cerr << "config error: " << e << '\n';
    return 1;
  }
  if (dump) {
    std::cout << parsed.config->to_json().dump(2) << '\n';
    return 0;
  }
  return catflow::cli::run(*parsed.config, std::cerr);
}
