#pragma once

#include <string>

#include "config.hpp"

namespace subcol::cli {

// Exit codes shared by every subcommand.
constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

int cmd_generate(const ExperimentConfig& cfg);
int cmd_train(const ExperimentConfig& cfg);
int cmd_verify(const ExperimentConfig& cfg);
int cmd_cluster(const ExperimentConfig& cfg);
int cmd_report(const ExperimentConfig& cfg);

/// Maps the library exception taxonomy onto exit codes and prints the error.
int run_guarded(int (*cmd)(const ExperimentConfig&), const ExperimentConfig& cfg);

/// Trace CSV used by cmd_train / cmd_report.
void write_trace_csv(const std::string& path, const TrainTrace& trace);
TrainTrace read_trace_csv(const std::string& path);

}  // namespace subcol::cli
