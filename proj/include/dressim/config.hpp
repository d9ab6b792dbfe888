#ifndef DRESSIM_CONFIG_HPP
#define DRESSIM_CONFIG_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dressim/evolve.hpp"
#include "dressim/model.hpp"
#include "dressim/noise.hpp"

namespace dressim {

enum class ExperimentKind {
    coherence,
    storage_qpt,
    gate_populations,
    gate_qpt,
    rb,
    error_budget,
    predict,
    idler_tphi,
};

std::string experiment_name(ExperimentKind kind);

/// A fully resolved experiment description: all frequencies in rad/s, all
/// times in seconds. Configs carry units in key names (_mhz, _ghz, _us, _ns)
/// and are converted once at ingestion; unknown keys are rejected.
struct Scenario {
    ExperimentKind experiment = ExperimentKind::coherence;
    std::string name;

    std::vector<QubitParams> qubits;
    CouplingSpec coupling;
    std::vector<DriveTone> drives;
    NoiseModel noise;
    EvolveOptions evolve;
    int n_traj = 1;
    std::uint64_t seed = 1;

    struct Coherence {
        std::vector<std::string> variants{"free", "echo", "1q_dd"};
        double tau_max = 7e-6;
        int tau_points = 64;
        double omega_r = 0.0;            // rad/s
        std::optional<double> tphi_echo; // per-protocol Lindblad dephasing, s
        std::optional<double> tphi_dd;
        std::optional<double> tphi_2q_dd_1;
        std::optional<double> tphi_2q_dd_2;
        std::optional<int> n_traj_free, n_traj_echo, n_traj_dd;
    } coherence;

    struct Storage {
        std::string variant = "1q_dd";   // free | echo | 1q_dd
        std::vector<double> taus;        // s
    } storage;

    struct Gate {
        std::string model = "full";      // full | effective (dressed-frame)
        std::optional<double> tau;       // s; default pi/(2 |lambda|)
        double max_duration = 600e-9;    // populations sweep end, s
        int sample_points = 121;
        std::vector<std::string> inputs{"00", "01"};
        bool include_corrections = false;
    } gate;

    struct Rb {
        std::string set = "pauli";       // pauli | clifford
        std::vector<int> m_grid{1, 2, 4, 8, 16, 32, 64};
        int k = 30;
    } rb;

    struct Idler {
        double fidelity = 0.0;
        double gate_len = 0.0;           // s
        std::optional<double> expected_tphi;  // s, for check mode
    } idler;

    std::string out_dir = "out";
    std::string format = "csv";
};

/// Parse and validate a config document. Throws std::invalid_argument with a
/// path-qualified message on unknown keys, bad units, or constraint
/// violations.
Scenario validate_config(const nlohmann::json& doc);
Scenario validate_config_text(const std::string& text);

/// Serialize back to the exact config schema (units restored). Validating the
/// output reproduces the Scenario.
nlohmann::json scenario_to_json(const Scenario& s);

std::vector<std::string> fixture_names();
std::string fixture_text(const std::string& name);
Scenario load_fixture(const std::string& name);

}  // namespace dressim

#endif
