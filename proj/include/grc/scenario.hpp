#pragma once

#include "grc/hamiltonian_reduction.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace grc {

inline constexpr const char* kEngineVersion = "grc 1.0.0";

struct ScenarioTask {
  std::string name;
  bool expect_fail = false;
  int line = 0;
};

struct AlgebroidBlock {
  int m0 = 0, rank = 0;
  std::vector<std::vector<GradedPoly>> anchor;
  std::vector<GradedPoly> structure;
};

/// Either reduction data (module, psi, mu) or an explicit action (dgla, phi, rho, mu).
struct HamBlock {
  LieAlgebra g;
  bool explicit_action = false;
  std::vector<Matrix> module;
  std::vector<GradedPoly> psi;
  DGLA2Data dgla;
  std::vector<GradedPoly> phi, rho;
  std::vector<GradedPoly> mu;
};

struct ScenarioFile {
  std::string path;
  std::string label;
  std::uint64_t digest = 0;
  std::uint64_t seed = 1;
  std::optional<CourantScenario> scenario;
  std::optional<AlgebroidBlock> algebroid;
  std::optional<GeometricCoisoData> coiso;
  std::optional<std::vector<GradedPoly>> coiso_P;  // explicit degree-2 ideal generators
  std::optional<HamBlock> ham;
  std::optional<std::vector<GradedPoly>> dirac_L;
  std::optional<GradedPoly> J;
  std::vector<ScenarioTask> tasks;
};

/// Task names understood by run_scenario.
const std::vector<std::string>& task_names();

/// Parse errors carry "line L, column C"; semantic errors name the block.
ScenarioFile parse_scenario_text(const std::string& text, const std::string& path = "<input>");
ScenarioFile parse_scenario(const std::string& path);

std::uint64_t fnv1a(const std::string& bytes);

struct RunOptions {
  std::optional<std::uint64_t> seed;
  int samples = 5;     // random points on top of origin and unit points
  int max_degree = 2;  // coefficient degree of random sections
};

struct TaskResult {
  std::string name;
  bool expect_fail = false;
  bool verdict = false;
  std::string error_kind;  // empty, domain, input or internal
  std::vector<std::string> lines;

  /// 0 when the verdict matches the expectation, otherwise the exit code it forces.
  int code() const;
};

struct ScenarioReport {
  std::string label, path;
  std::uint64_t digest = 0, seed = 0;
  RunOptions options;
  std::vector<TaskResult> tasks;

  int exit_code() const;
  std::string text() const;
};

/// Runs the tasks of the file, or only those named in `only` when it is non-empty.
ScenarioReport run_scenario(const ScenarioFile& file, const RunOptions& options,
                            const std::vector<std::string>& only = {});

/// Builds the action of a hamiltonian block; reduction data goes through from_reduction_data.
HamAction ham_action(const ScenarioFile& file);

}  // namespace grc
