#ifndef DRESSIM_RB_HPP
#define DRESSIM_RB_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dressim/operators.hpp"
#include "dressim/tomo.hpp"

namespace dressim {

struct GateSetElement {
    std::string label;
    Mat u;
};

/// A benchmarking gate set. clifford1q holds 24 elements closed under
/// composition up to global phase; pauli1q holds {I, X_pi, Y_pi, Z_pi}.
/// Two-qubit sets are per-qubit tensor products.
struct GateSet {
    enum class Kind { clifford1q, pauli1q, clifford2q_product, pauli2q_product };
    Kind kind;
    int n_qubits = 1;
    std::vector<GateSetElement> elements;
};

GateSet clifford_group_1q();
GateSet pauli_set_1q();
GateSet tensor_square(const GateSet& base);  // per-qubit product set on 2 qubits

/// Index of `u` in the set, matching up to global phase; -1 when absent.
int find_in_set(const GateSet& set, const Mat& u, double tol = 1e-9);

struct RbSequence {
    int m = 0;
    std::vector<int> gate_indices;       // random layers, drawn from the set
    bool interleaved = false;
    Mat recovery;                        // closing single-qubit layer or inverse
    int recovery_target_uses = 0;        // target applications before `recovery`
    std::string recovery_label;          // set label, "local_layer" or "ideal_inverse"
};

/// k random sequences of m gates (the interleaved variant inserts the target
/// after each random layer), each closed so the ideal composition is the
/// identity up to global phase. Two-qubit recoveries are decomposed as a
/// single-qubit layer with up to two target applications when possible, and
/// fall back to the exact ideal inverse (labelled) otherwise.
std::vector<RbSequence> build_rb_sequences(const GateSet& set, int m, int k,
                                           const Mat* interleave, std::uint64_t seed);

struct SurvivalPoint {
    int m = 0;
    double mean = 0.0;
    double stderr_mean = 0.0;
};

/// Ground-state survival versus sequence length. Random layers and recoveries
/// are ideal instantaneous unitaries; the interleaved gate is applied through
/// `noisy_gate` when given (a superoperator from the simulated schedule) and
/// as the ideal unitary otherwise.
std::vector<SurvivalPoint> run_rb(const GateSet& set, const std::vector<int>& m_grid, int k,
                                  const Mat* interleave_ideal, const Mat* noisy_gate_superop,
                                  std::uint64_t seed, bool parallel = true);

}  // namespace dressim

#endif
