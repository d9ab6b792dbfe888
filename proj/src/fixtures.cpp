#include <map>
#include <stdexcept>

#include "dressim/config.hpp"

namespace dressim {

namespace {

// Device and protocol fixtures. Frequencies are linear (MHz/GHz), converted
// to angular units at parse time.
const std::map<std::string, std::string>& registry() {
    static const std::map<std::string, std::string> fixtures = {
        {"fig1_coherence", R"JSON({
  "experiment": "coherence",
  "name": "fig1_coherence",
  "system": {"qubits": [{"t1_us": 31.6, "levels": 2}]},
  "drives": [{"rabi_mhz": 3.6}],
  "noise": {"kind": "quasistatic_gaussian", "t2star_us": 4.2, "seed": 42},
  "evolve": {"rtol": 1e-7, "atol": 1e-12, "max_step_ns": 1000, "n_traj": 2000, "master_seed": 7},
  "coherence": {
    "variants": ["free", "echo", "1q_dd"],
    "tau_max_us": 24.0,
    "tau_points": 64,
    "omega_r_mhz": 1.0,
    "tphi_echo_us": 20.2,
    "tphi_dd_us": 35.9,
    "n_traj_echo": 64,
    "n_traj_dd": 128
  }
})JSON"},
        {"fig2_storage", R"JSON({
  "experiment": "storage_qpt",
  "name": "fig2_storage",
  "system": {"qubits": [{"t1_us": 31.6, "tphi_us": 35.9, "levels": 2}]},
  "drives": [{"rabi_mhz": 3.6}],
  "evolve": {"rtol": 1e-8, "atol": 1e-12, "n_traj": 1, "master_seed": 7},
  "storage": {"variant": "1q_dd", "taus_us": [0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0]}
})JSON"},
        {"q1_q2_gate", R"JSON({
  "experiment": "gate_qpt",
  "name": "q1_q2_gate",
  "system": {
    "qubits": [
      {"t1_us": 31.6, "tphi_us": 65.6, "levels": 2},
      {"t1_us": 19.7, "tphi_us": 73.9, "levels": 2}
    ],
    "coupling": {"lambda_mhz": -1.2}
  },
  "drives": [{"rabi_mhz": 3.6}, {"rabi_mhz": 6.9}],
  "evolve": {"rtol": 1e-8, "atol": 1e-12, "master_seed": 7},
  "gate": {"model": "effective"}
})JSON"},
        {"gate_3level", R"JSON({
  "experiment": "gate_qpt",
  "name": "gate_3level",
  "system": {
    "qubits": [
      {"t1_us": 31.6, "tphi_us": 65.6, "levels": 3, "anharmonicity_ghz": 0.25},
      {"t1_us": 19.7, "tphi_us": 73.9, "levels": 3, "anharmonicity_ghz": 0.25}
    ],
    "coupling": {"lambda_mhz": -1.2}
  },
  "drives": [{"rabi_mhz": 14.4}, {"rabi_mhz": 19.2}],
  "evolve": {"rtol": 1e-7, "atol": 1e-12, "master_seed": 7}
})JSON"},
        {"fig3_populations", R"JSON({
  "experiment": "gate_populations",
  "name": "fig3_populations",
  "system": {
    "qubits": [
      {"t1_us": 31.6, "tphi_us": 65.6, "levels": 2},
      {"t1_us": 19.7, "tphi_us": 73.9, "levels": 2}
    ],
    "coupling": {"lambda_mhz": -1.2}
  },
  "drives": [{"rabi_mhz": 3.6}, {"rabi_mhz": 6.9}],
  "evolve": {"rtol": 1e-8, "atol": 1e-12, "master_seed": 7},
  "gate": {"max_duration_ns": 600, "sample_points": 121, "inputs": ["00", "01"]}
})JSON"},
        {"fig3_2qdd_ramsey", R"JSON({
  "experiment": "coherence",
  "name": "fig3_2qdd_ramsey",
  "system": {
    "qubits": [
      {"t1_us": 31.6, "tphi_us": 65.6, "levels": 2},
      {"t1_us": 19.7, "tphi_us": 73.9, "levels": 2}
    ],
    "coupling": {"lambda_mhz": -1.2}
  },
  "drives": [{"rabi_mhz": 3.6}, {"rabi_mhz": 6.9}],
  "evolve": {"rtol": 1e-7, "atol": 1e-12, "n_traj": 1, "master_seed": 7},
  "coherence": {"variants": ["2q_dd"], "tau_max_us": 40.0, "tau_points": 56, "omega_r_mhz": 1.0}
})JSON"},
        {"fig4_rb_pauli", R"JSON({
  "experiment": "rb",
  "name": "fig4_rb_pauli",
  "system": {
    "qubits": [
      {"t1_us": 31.6, "tphi_us": 65.6, "levels": 2},
      {"t1_us": 19.7, "tphi_us": 73.9, "levels": 2}
    ],
    "coupling": {"lambda_mhz": -1.2}
  },
  "drives": [{"rabi_mhz": 14.4}, {"rabi_mhz": 19.2}],
  "evolve": {"rtol": 1e-8, "atol": 1e-12, "master_seed": 7},
  "rb": {"set": "pauli", "m_grid": [1, 2, 4, 8, 16, 32, 64], "k": 30}
})JSON"},
        {"fig4_rb_clifford", R"JSON({
  "experiment": "rb",
  "name": "fig4_rb_clifford",
  "system": {
    "qubits": [
      {"t1_us": 31.6, "tphi_us": 65.6, "levels": 2},
      {"t1_us": 19.7, "tphi_us": 73.9, "levels": 2}
    ],
    "coupling": {"lambda_mhz": -1.2}
  },
  "drives": [{"rabi_mhz": 14.4}, {"rabi_mhz": 19.2}],
  "evolve": {"rtol": 1e-8, "atol": 1e-12, "master_seed": 7},
  "rb": {"set": "clifford", "m_grid": [1, 2, 4, 8, 16, 32, 64], "k": 30}
})JSON"},
        {"table_s1_qa_qb", R"JSON({
  "experiment": "gate_qpt",
  "name": "table_s1_qa_qb",
  "system": {
    "qubits": [
      {"t1_us": 32.5, "tphi_us": 78.7, "levels": 3, "anharmonicity_ghz": 0.25},
      {"t1_us": 21.5, "tphi_us": 45.0, "levels": 3, "anharmonicity_ghz": 0.25}
    ],
    "coupling": {"lambda_mhz": -1.1865}
  },
  "drives": [{"rabi_mhz": 14.238}, {"rabi_mhz": 18.984}],
  "evolve": {"rtol": 1e-7, "atol": 1e-12, "master_seed": 7},
  "gate": {"tau_ns": 210.7}
})JSON"},
        {"predict_improved", R"JSON({
  "experiment": "predict",
  "name": "predict_improved",
  "system": {
    "qubits": [
      {"t1_us": 50.0, "tphi_us": 100.0, "levels": 3, "anharmonicity_ghz": 0.5},
      {"t1_us": 50.0, "tphi_us": 100.0, "levels": 3, "anharmonicity_ghz": 0.5}
    ],
    "coupling": {"lambda_mhz": 3.0}
  },
  "drives": [{"rabi_mhz": 12.4}, {"rabi_mhz": 24.6}],
  "evolve": {"rtol": 1e-7, "atol": 1e-12, "master_seed": 7}
})JSON"},
        {"error_budget_q1_q2", R"JSON({
  "experiment": "error_budget",
  "name": "error_budget_q1_q2",
  "system": {
    "qubits": [
      {"t1_us": 31.6, "tphi_us": 65.6, "levels": 3, "anharmonicity_ghz": 0.25},
      {"t1_us": 19.7, "tphi_us": 73.9, "levels": 3, "anharmonicity_ghz": 0.25}
    ],
    "coupling": {"lambda_mhz": -1.2}
  },
  "drives": [{"rabi_mhz": 14.4}, {"rabi_mhz": 19.2}],
  "evolve": {"rtol": 1e-7, "atol": 1e-12, "master_seed": 7}
})JSON"},
        {"idler_qa", R"JSON({
  "experiment": "idler_tphi",
  "name": "idler_qa",
  "system": {"qubits": [{"t1_us": 32.5, "levels": 2}]},
  "idler": {"fidelity": 0.9843, "gate_len_ns": 210.7, "expected_tphi_us": 8.3}
})JSON"},
        {"idler_qb", R"JSON({
  "experiment": "idler_tphi",
  "name": "idler_qb",
  "system": {"qubits": [{"t1_us": 21.5, "levels": 2}]},
  "idler": {"fidelity": 0.9884, "gate_len_ns": 210.7, "expected_tphi_us": 15.5}
})JSON"},
    };
    return fixtures;
}

}  // namespace

std::vector<std::string> fixture_names() {
    std::vector<std::string> names;
    for (const auto& [name, text] : registry()) names.push_back(name);
    return names;
}

std::string fixture_text(const std::string& name) {
    auto it = registry().find(name);
    if (it == registry().end())
        throw std::invalid_argument("unknown fixture '" + name + "'");
    return it->second;
}

Scenario load_fixture(const std::string& name) {
    return validate_config_text(fixture_text(name));
}

}  // namespace dressim
