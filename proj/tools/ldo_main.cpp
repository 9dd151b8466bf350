/* Copyright 2026 The LDO Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ldo/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Local-density-aware occupancy ground truth tools"};
  app.require_subcommand(1);

  ldo::cli::GenerateRequest generate;
  std::string generate_config;
  auto* gen = app.add_subcommand("generate", "Build an LDOC occupancy file from a scene manifest");
  gen->add_option("--manifest", generate.manifest, "Scene manifest (JSON)")->required();
  gen->add_option("--config", generate_config, "Pipeline config (JSON); defaults if omitted");
  gen->add_option("--out", generate.out, "Output LDOC file")->required();
  gen->add_option("--jobs", generate.jobs, "Worker threads")->capture_default_str();

  std::string stats_occ;
  std::string stats_config;
  double bin_size = 0.5;
  auto* stats = app.add_subcommand("stats", "Summarize an LDOC file");
  stats->add_option("--occ", stats_occ, "LDOC file")->required();
  stats->add_option("--bin-size", bin_size, "Height histogram bin (m)")->capture_default_str();
  stats->add_option("--config", stats_config, "Config providing the height intervals");

  std::string pred, gt;
  int classes = 0;
  auto* metrics = app.add_subcommand("metrics", "SC IoU and SSC mIoU of a prediction");
  metrics->add_option("--pred", pred, "Predicted LDOC file")->required();
  metrics->add_option("--gt", gt, "Ground-truth LDOC file")->required();
  metrics->add_option("--classes", classes, "Class count including EMPTY")
      ->required()
      ->check(CLI::Range(1, 65535));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ldo::cli::kExitUsage;
  }

  auto optional_path = [](const std::string& s) -> std::optional<std::filesystem::path> {
    if (s.empty()) return std::nullopt;
    return std::filesystem::path(s);
  };

  if (*gen) {
    generate.config = optional_path(generate_config);
    return ldo::cli::RunGenerate(generate, std::cout, std::cerr);
  }
  if (*stats) {
    return ldo::cli::RunStats(stats_occ, bin_size, optional_path(stats_config), std::cout, std::cerr);
  }
  return ldo::cli::RunMetrics(pred, gt, static_cast<std::uint16_t>(classes), std::cout, std::cerr);
}
