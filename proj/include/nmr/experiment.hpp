#pragma once

#include <map>
#include <string>
#include <vector>

#include "nmr/spin_system.hpp"

namespace nmr {

enum class RunMode { ideal, pulse, pulse_decoherence };

RunMode parse_run_mode(const std::string& text);  // "ideal" | "pulse" | "pulse+decoherence"
std::string run_mode_name(RunMode mode);

// Config files are JSON: molecule path, experiment name, mode, out_dir,
// numeric params (x0, a, iterations, f, r, theta_deg, storage_k, ...), and
// a circuit path for custom runs. Paths are resolved against the config's
// own directory.
struct ExperimentConfig {
  std::string molecule_path;
  std::string experiment;  // dj | grover3 | loglab | cooling | order5 | shor15 | twobitcode | custom
  RunMode mode = RunMode::ideal;
  std::string out_dir = ".";
  std::map<std::string, double> params;
  std::string circuit_path;  // custom experiment only
  bool check = false;        // verify verdicts against built-in expectations
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text, const std::string& base_dir);

// Exit codes: 0 success, 1 check-mode verdict mismatch, 2 missing file,
// 3 invariant violation.
struct RunResult {
  int exit_code = 0;
  std::string verdict;
  std::string summary;                 // full summary text (also written to out_dir)
  std::vector<std::string> artifacts;  // paths written, in emission order
};

RunResult run_experiment(const ExperimentConfig& config);

RunResult sweep_experiment(const ExperimentConfig& config, const std::string& parameter,
                           const std::vector<double>& values);

}  // namespace nmr
