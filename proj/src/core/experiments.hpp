// Copyright 2026 circle-ifs developers
// SPDX-License-Identifier: Apache-2.0
//
// Config-driven commands shared by the C API and the command-line tool.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "json_io.hpp"

namespace cifs {

struct ExperimentConfig {
  std::vector<LiftMap> generators;
  std::optional<SequenceModel> model;
  std::uint64_t seed = 0;
  Json params = Json::object();
  std::string label;

  IFS ifs() const { return IFS(generators, label); }
  SequenceModel model_or_uniform() const;
};

ExperimentConfig parse_config(const Json& j);

enum ExitCode { kExitOk = 0, kExitConfig = 1, kExitVerification = 2, kExitSearch = 3 };
int exit_code_for(ErrorKind kind);

struct CommandResult {
  int exit_code = kExitOk;
  std::string output;  // JSON, JSON lines or CSV
  std::string error;
};

/// Options: "seed" overrides the config seed; "check" + "certificate" select
/// certificate checking; "size" + "command" (+ optional "certificate") drive perturb.
CommandResult run_command(const std::string& command, const Json& config, const Json& options);

const std::vector<std::string>& command_names();

}  // namespace cifs
