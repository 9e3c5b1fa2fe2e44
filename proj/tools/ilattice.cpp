/*
   Copyright 2026 The ilattice Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/


#include "ilattice/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ilat::cli::ConfigError("--config", "cannot read '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

}  // namespace

int main(int argc, char** argv) {
  using namespace ilat::cli;
  CLI::App app{"Interpolative lattice pricer for multi-asset American and European options"};
  std::string config_path;
  std::string job;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::string out_path;
  std::string export_dir;
  bool print_config = false;
  app.add_option("job", job, "price, bounds, benchmark or rate-check (overrides the config's job)")
      ->check(CLI::IsMember({"price", "bounds", "benchmark", "rate-check"}));
  app.add_option("-c,--config", config_path, "JSON run configuration")->required();
  app.add_option("--set", overrides, "Override one config leaf, e.g. --set fit.patience=10");
  app.add_option("--seed", seed, "Master seed (overrides the config)");
  app.add_option("--workers", workers, "Worker threads (results do not depend on it)");
  app.add_option("-o,--out", out_path, "Write the CSV summary to this file");
  app.add_option("--export", export_dir, "Write slice surfaces and a manifest to this directory (price job)");
  app.add_flag("--print-config", print_config, "Print the validated configuration with defaults and exit");
  CLI11_PARSE(app, argc, argv);

  try {
    if (!job.empty()) overrides.push_back("job=\"" + job + "\"");
    if (seed) overrides.push_back("seed=" + std::to_string(*seed));
    if (workers) overrides.push_back("workers=" + std::to_string(*workers));
    const RunConfig cfg = parse_config(read_file(config_path), overrides);
    if (print_config) {
      std::cout << dump_config(cfg);
      return kOk;
    }
    std::optional<std::filesystem::path> dir;
    if (!export_dir.empty()) dir = export_dir;
    const Report rep = run_job(cfg, dir);
    std::cout << rep.text;
    if (!out_path.empty()) {
      std::ofstream out(out_path);
      if (!out) {
        std::cerr << "error: --out: cannot write '" << out_path << "'\n";
        return kConfigError;
      }
      out << rep.csv();
    }
    return rep.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ilat::FitFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericalFailure;
  }
}
