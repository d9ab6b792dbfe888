#ifndef DRESSIM_TOMO_HPP
#define DRESSIM_TOMO_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dressim/operators.hpp"

namespace dressim {

/// Process matrix in the n-qubit Pauli basis, ordered II, IX, IY, IZ, XI, ...
/// (lexicographic, leftmost qubit slowest).
struct ChiMatrix {
    Mat mat;
    int n_qubits = 1;

    int dim() const { return static_cast<int>(mat.rows()); }
};

std::vector<Mat> pauli_basis(int n_qubits);
std::vector<std::string> pauli_labels(int n_qubits);

/// A channel as a black box on density matrices of fixed dimension.
using Channel = std::function<DensityMatrix(const DensityMatrix&)>;

/// The six preparation gates {I, +X_pi/2, -X_pi/2, +Y_pi/2, -Y_pi/2, X_pi}.
std::vector<std::pair<std::string, Mat>> preparation_gates_1q();

/// Tensor products of the single-qubit preparation gates: 6^n entries.
std::vector<Mat> preparation_set(int n_qubits);

/// Pauli expectations of a state. Exact when `shots` is absent; binomially
/// sampled at the given shot count otherwise.
std::vector<double> simulate_measurements(const DensityMatrix& state,
                                          const std::vector<Mat>& observables,
                                          std::optional<int> shots = std::nullopt,
                                          std::uint64_t seed = 0);

/// Linear-inversion state tomography from the full Pauli expectation vector
/// (identity first), followed by PSD projection at fixed trace. A sub-unit
/// identity expectation (leaky channel output) is preserved.
DensityMatrix qst(const std::vector<double>& pauli_expectations, int n_qubits);

/// Process tomography over the informationally complete preparation set,
/// solved by linear inversion and Hermitian-PSD projected.
ChiMatrix qpt(const Channel& channel, int n_qubits,
              std::optional<int> shots = std::nullopt, std::uint64_t seed = 0,
              bool parallel = true);

/// chi of a unitary: rank-1 outer product of its Pauli coefficient vector.
ChiMatrix chi_of_unitary(const Mat& u);

/// F = tr(chi_a chi_b), real in [0, 1] for physical inputs.
double process_fidelity(const ChiMatrix& chi_a, const ChiMatrix& chi_b);

/// Average gate fidelity from process fidelity: (d F_pro + 1) / (d + 1).
double average_from_process_fidelity(double f_pro, int dim);

/// Hermitize, clip negative eigenvalues, rescale to the original trace.
Mat project_psd(const Mat& a);

/// Column-major superoperator of a channel, built from matrix-unit responses.
Mat channel_superop(const Channel& channel, const std::vector<int>& dims);
DensityMatrix apply_superop(const Mat& superop, const DensityMatrix& rho);

}  // namespace dressim

#endif
