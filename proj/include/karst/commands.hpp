#pragma once

#include "karst/config.hpp"

namespace karst {

/// Batch entry points backing the CLI subcommands. Each writes its result
/// files into cfg.output_dir and returns a process exit code
/// (0 ok, 1 checks failed, 2 usage/config error).
int cmd_mesh(const RunConfig& cfg);
int cmd_solve(const RunConfig& cfg);
int cmd_estimate(const RunConfig& cfg);
int cmd_adapt(const RunConfig& cfg);
int cmd_verify(const RunConfig& cfg);

}  // namespace karst
