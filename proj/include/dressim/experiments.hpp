#ifndef DRESSIM_EXPERIMENTS_HPP
#define DRESSIM_EXPERIMENTS_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dressim/config.hpp"
#include "dressim/tomo.hpp"

namespace dressim {

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> row_labels;  // optional leading label column
    std::string label_column;
};

struct ResultBundle {
    std::map<std::string, Table> tables;
    nlohmann::json records;
};

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Execute the scenario end to end (schedule -> evolve -> analysis/tomo/rb).
ResultBundle run_scenario(const Scenario& s);

/// Fixture-specific assertions for `check` mode and the acceptance suite.
std::vector<CheckResult> check_scenario(const Scenario& s, const ResultBundle& b);

/// Write tables and records under `dir`; returns the manifest (file -> hash).
std::map<std::string, std::string> emit_results(const ResultBundle& b, const std::string& dir,
                                                const std::string& format);

std::uint64_t fnv1a64(const std::string& bytes);

// --- building blocks shared with tests ---

/// exp(i theta X kron X).
Mat ideal_entangling_gate(double theta);

/// The noisy conditional-phase gate as a channel on the two-qubit space
/// (three-level systems are embedded and truncated; lost population shows up
/// as a trace deficit).
Channel gate_channel(const Scenario& s, double tau, bool parallel_traj = false);

/// QPT process fidelity of the scenario's gate against its ideal unitary.
double gate_process_fidelity(const Scenario& s);

/// Trajectory-averaged final state of a schedule (pairwise-summed, so the
/// result is identical for any execution order).
DensityMatrix average_final_state(const SystemSpec& system, const Schedule& schedule,
                                  const LindbladSpec& lindblad, const NoiseModel& noise,
                                  int n_traj, const EvolveOptions& opts,
                                  const DensityMatrix& rho0);

}  // namespace dressim

#endif
