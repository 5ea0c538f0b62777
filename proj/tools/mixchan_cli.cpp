// Copyright 2026 The mixchan Authors
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


#include <cstdint>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "mixchan/mixchan.hpp"

#ifndef MIXCHAN_VERSION_STRING
#define MIXCHAN_VERSION_STRING "unknown"
#endif

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 2;
constexpr int kFailed = 3;

struct Common {
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<double> grid_step;
  std::string format = "both";
  unsigned threads = 0;
};

void add_common(CLI::App* cmd, Common& c, bool outputs) {
  cmd->add_option("--seed", c.seed, "Override the random seed");
  cmd->add_option("--threads", c.threads, "Worker threads (0 = hardware concurrency)")->check(CLI::Range(0U, 1024U));
  if (outputs) {
    cmd->add_option("--out-dir", c.out_dir, "Output directory (default: $MIXCHAN_OUT_DIR or ./out)");
    cmd->add_option("--grid-step", c.grid_step, "Override the time-grid step")->check(CLI::PositiveNumber);
    cmd->add_option("--format", c.format, "csv, json or both")->check(CLI::IsMember({"csv", "json", "both"}));
  }
}

mixchan::RunOptions run_options(const Common& c) {
  mixchan::RunOptions opts;
  if (!c.out_dir.empty()) {
    opts.out_dir = c.out_dir;
  } else if (const char* env = std::getenv("MIXCHAN_OUT_DIR"); env != nullptr && *env != '\0') {
    opts.out_dir = env;
  } else {
    opts.out_dir = "out";
  }
  opts.format = c.format == "csv"    ? mixchan::OutputFormat::csv
                : c.format == "json" ? mixchan::OutputFormat::json
                                     : mixchan::OutputFormat::both;
  opts.par.threads = c.threads;
  opts.version = MIXCHAN_VERSION_STRING;
  return opts;
}

mixchan::Json apply_overrides(mixchan::Json config, const Common& c) {
  if (c.seed) {
    config["seed"] = *c.seed;
  }
  if (c.grid_step) {
    if (!config.contains("grid") || !config["grid"].is_object()) {
      throw mixchan::ConfigError("--grid-step needs a grid section", "/grid");
    }
    config["grid"]["step"] = *c.grid_step;
  }
  return config;
}

int run_one(const mixchan::Scenario& sc, const Common& c) {
  const auto result = mixchan::run_scenario(sc, run_options(c));
  for (const auto& f : result.files) {
    std::cout << "wrote " << f.string() << '\n';
  }
  const auto& m = result.summary["measure"];
  std::cout << sc.name << ": measure " << m["value"].get<double>() << " on [" << sc.grid_start << ", "
            << sc.grid_end << "]";
  if (result.summary.contains("optimized_measure")) {
    std::cout << ", optimized " << result.summary["optimized_measure"]["value"].get<double>();
  }
  std::cout << ", checks " << (result.passed ? "passed" : "FAILED") << '\n';
  return result.passed ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixtures of quantum channels: distinguishability, non-Markovianity and information flow"};
  app.set_version_flag("--version", std::string("mixchan ") + MIXCHAN_VERSION_STRING);
  app.require_subcommand(1);

  Common common;
  std::string config_path;
  std::string suite;
  std::string preset;

  auto* run = app.add_subcommand("run", "Run a scenario described by a JSON config file");
  run->add_option("config", config_path, "Path to the JSON config")->required();
  add_common(run, common, true);

  auto* verify = app.add_subcommand("verify", "Run a built-in verification suite");
  std::vector<std::string> suites = mixchan::suite_names();
  suites.push_back("all");
  verify->add_option("suite", suite, "cpt, additivity, subadditivity, lemma, bounds, microscopic, montecarlo or all")
      ->required()
      ->check(CLI::IsMember(suites));
  add_common(verify, common, false);

  auto* reproduce = app.add_subcommand("reproduce-paper", "Run one built-in preset, or all of them");
  reproduce->add_option("preset", preset, "Preset name (default: all)");
  add_common(reproduce, common, true);

  auto* list = app.add_subcommand("list-presets", "List the built-in presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*list) {
      for (const auto& p : mixchan::presets()) {
        std::cout << p.name << "\n    " << p.description << '\n';
      }
      return kOk;
    }
    if (*run) {
      const mixchan::Scenario base = mixchan::load_scenario(config_path);
      return run_one(mixchan::scenario_from_json(apply_overrides(base.config, common)), common);
    }
    if (*reproduce) {
      std::vector<const mixchan::Preset*> chosen;
      if (preset.empty()) {
        for (const auto& p : mixchan::presets()) {
          chosen.push_back(&p);
        }
      } else {
        chosen.push_back(&mixchan::find_preset(preset));
      }
      int status = kOk;
      for (const auto* p : chosen) {
        const int s = run_one(mixchan::scenario_from_json(apply_overrides(p->config, common)), common);
        status = std::max(status, s);
      }
      return status;
    }
    if (*verify) {
      const std::uint64_t seed = common.seed.value_or(20240917);
      mixchan::Parallelism par;
      par.threads = common.threads;
      std::vector<std::string> names = suite == "all" ? mixchan::suite_names() : std::vector<std::string>{suite};
      std::size_t failed = 0;
      std::size_t total = 0;
      for (const auto& name : names) {
        const auto rep = mixchan::run_suite(name, seed, par);
        mixchan::print_report(std::cout, rep);
        failed += rep.failed_checks();
        total += rep.checks.size();
      }
      std::cout << "total: " << total - failed << "/" << total << " checks passed (seed " << seed << ")\n";
      return failed == 0 ? kOk : kFailed;
    }
  } catch (const mixchan::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailed;
  }
  return kUsage;
}
