#include "dressim/tomo.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "dressim/noise.hpp"

namespace dressim {

std::vector<Mat> pauli_basis(int n_qubits) {
    const Mat p[4] = {pauli(Pauli::I).mat, pauli(Pauli::X).mat, pauli(Pauli::Y).mat,
                      pauli(Pauli::Z).mat};
    int count = 1;
    for (int i = 0; i < n_qubits; ++i) count *= 4;
    std::vector<Mat> out;
    out.reserve(count);
    for (int idx = 0; idx < count; ++idx) {
        Mat m = Mat::Identity(1, 1);
        int rem = idx;
        int div = count / 4;
        for (int q = 0; q < n_qubits; ++q) {
            m = kron(m, p[(rem / div) % 4]);
            div /= 4;
        }
        out.push_back(std::move(m));
    }
    return out;
}

std::vector<std::string> pauli_labels(int n_qubits) {
    const char* names = "IXYZ";
    int count = 1;
    for (int i = 0; i < n_qubits; ++i) count *= 4;
    std::vector<std::string> out;
    out.reserve(count);
    for (int idx = 0; idx < count; ++idx) {
        std::string s;
        int div = count / 4;
        int rem = idx;
        for (int q = 0; q < n_qubits; ++q) {
            s.push_back(names[(rem / div) % 4]);
            div /= 4;
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<std::pair<std::string, Mat>> preparation_gates_1q() {
    const Mat x = pauli(Pauli::X).mat;
    const Mat y = pauli(Pauli::Y).mat;
    return {
        {"I", identity(2)},
        {"+X/2", matrix_exp(x, M_PI / 4.0)},
        {"-X/2", matrix_exp(x, -M_PI / 4.0)},
        {"+Y/2", matrix_exp(y, M_PI / 4.0)},
        {"-Y/2", matrix_exp(y, -M_PI / 4.0)},
        {"X", matrix_exp(x, M_PI / 2.0)},
    };
}

std::vector<Mat> preparation_set(int n_qubits) {
    auto gates = preparation_gates_1q();
    std::vector<Mat> out{Mat::Identity(1, 1)};
    for (int q = 0; q < n_qubits; ++q) {
        std::vector<Mat> next;
        next.reserve(out.size() * gates.size());
        for (const auto& base : out)
            for (const auto& [label, g] : gates) next.push_back(kron(base, g));
        out = std::move(next);
    }
    return out;
}

std::vector<double> simulate_measurements(const DensityMatrix& state,
                                          const std::vector<Mat>& observables,
                                          std::optional<int> shots, std::uint64_t seed) {
    if (shots && *shots < 1) throw std::invalid_argument("simulate_measurements: shots must be >= 1");
    std::vector<double> out;
    out.reserve(observables.size());
    for (size_t i = 0; i < observables.size(); ++i) {
        double exact = std::real((observables[i] * state.mat).trace());
        if (!shots) {
            out.push_back(exact);
        } else {
            double p = std::clamp(0.5 * (1.0 + exact), 0.0, 1.0);
            std::mt19937_64 eng(mix_seed(seed, i, 0xb0b));
            std::binomial_distribution<int> bin(*shots, p);
            out.push_back(2.0 * bin(eng) / *shots - 1.0);
        }
    }
    return out;
}

Mat project_psd(const Mat& a) {
    Mat herm = 0.5 * (a + a.adjoint());
    double orig_trace = std::real(herm.trace());
    Eigen::SelfAdjointEigenSolver<Mat> es(herm);
    Eigen::VectorXd vals = es.eigenvalues();
    for (Eigen::Index i = 0; i < vals.size(); ++i) vals(i) = std::max(vals(i), 0.0);
    double clipped_trace = vals.sum();
    if (clipped_trace > 0.0 && orig_trace > 0.0) vals *= orig_trace / clipped_trace;
    return es.eigenvectors() * vals.asDiagonal().toDenseMatrix().cast<cx>() *
           es.eigenvectors().adjoint();
}

DensityMatrix qst(const std::vector<double>& pauli_expectations, int n_qubits) {
    auto basis = pauli_basis(n_qubits);
    if (pauli_expectations.size() != basis.size())
        throw std::invalid_argument("qst: need the complete Pauli expectation set");
    const int d = 1 << n_qubits;
    Mat rho = Mat::Zero(d, d);
    for (size_t m = 0; m < basis.size(); ++m) rho += pauli_expectations[m] * basis[m];
    rho /= static_cast<double>(d);
    rho = project_psd(rho);
    // renormalize to a unit-trace state: population outside the computational
    // subspace is rescaled away, matching readout-corrected probabilities
    double tr = std::real(rho.trace());
    if (tr > 0.0) rho /= tr;
    return DensityMatrix(std::move(rho), std::vector<int>(n_qubits, 2));
}

namespace {

Eigen::Map<const Vec> vec_of(const Mat& m) {
    return Eigen::Map<const Vec>(m.data(), m.size());
}

}  // namespace

ChiMatrix qpt(const Channel& channel, int n_qubits, std::optional<int> shots,
              std::uint64_t seed, bool parallel) {
    const int d = 1 << n_qubits;
    const std::vector<int> dims(n_qubits, 2);
    auto preps = preparation_set(n_qubits);
    auto basis = pauli_basis(n_qubits);
    const int n_preps = static_cast<int>(preps.size());

    Vec zero = basis_ket(d, 0);
    std::vector<Mat> outputs(n_preps);
    std::vector<Mat> inputs(n_preps);

    auto run_one = [&](int k) {
        Vec psi = preps[k] * zero;
        DensityMatrix rho_in = density_from_ket(psi, dims);
        DensityMatrix rho_out = channel(rho_in);
        auto expect = simulate_measurements(rho_out, basis, shots, mix_seed(seed, k, 0xc0de));
        outputs[k] = qst(expect, n_qubits).mat;
        inputs[k] = rho_in.mat;
    };

    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int k = 0; k < n_preps; ++k) run_one(k);
    } else {
        for (int k = 0; k < n_preps; ++k) run_one(k);
    }

    // least-squares superoperator from input/output vectorizations
    Mat x(d * d, n_preps), y(d * d, n_preps);
    for (int k = 0; k < n_preps; ++k) {
        x.col(k) = vec_of(inputs[k]);
        y.col(k) = vec_of(outputs[k]);
    }
    Mat superop = x.transpose()
                      .colPivHouseholderQr()
                      .solve(y.transpose())
                      .transpose();  // solves S X = Y for S

    // chi_{mn} = tr[(P_n^* kron P_m)^dag S] / d^2
    const int dd = d * d;
    Mat chi(dd, dd);
    for (int m = 0; m < dd; ++m)
        for (int n = 0; n < dd; ++n) {
            Mat b = kron(basis[n].conjugate(), basis[m]);
            chi(m, n) = (b.adjoint() * superop).trace() / static_cast<double>(dd);
        }

    ChiMatrix out{project_psd(chi), n_qubits};
    return out;
}

ChiMatrix chi_of_unitary(const Mat& u) {
    const int d = static_cast<int>(u.rows());
    int n = 0;
    while ((1 << n) < d) ++n;
    if ((1 << n) != d) throw std::invalid_argument("chi_of_unitary: dimension must be a power of 2");
    auto basis = pauli_basis(n);
    Vec c(basis.size());
    for (size_t m = 0; m < basis.size(); ++m)
        c(m) = (basis[m].adjoint() * u).trace() / static_cast<double>(d);
    return ChiMatrix{c * c.adjoint(), n};
}

double process_fidelity(const ChiMatrix& chi_a, const ChiMatrix& chi_b) {
    if (chi_a.dim() != chi_b.dim())
        throw std::invalid_argument("process_fidelity: dimension mismatch");
    return std::real((chi_a.mat * chi_b.mat).trace());
}

double average_from_process_fidelity(double f_pro, int dim) {
    return (dim * f_pro + 1.0) / (dim + 1.0);
}

Mat channel_superop(const Channel& channel, const std::vector<int>& dims) {
    const int d = product_of(dims);
    Mat s(d * d, d * d);
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i) {
            Mat unit = Mat::Zero(d, d);
            unit(i, j) = 1.0;
            DensityMatrix out = channel(DensityMatrix(unit, dims));
            s.col(j * d + i) = vec_of(out.mat);
        }
    return s;
}

DensityMatrix apply_superop(const Mat& superop, const DensityMatrix& rho) {
    const int d = rho.dim();
    Vec v = superop * vec_of(rho.mat);
    Mat m = Eigen::Map<const Mat>(v.data(), d, d);
    return DensityMatrix(std::move(m), rho.dims);
}

}  // namespace dressim
