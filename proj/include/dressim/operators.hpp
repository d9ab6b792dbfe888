#ifndef DRESSIM_OPERATORS_HPP
#define DRESSIM_OPERATORS_HPP

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace dressim {

using cx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline constexpr cx I_UNIT{0.0, 1.0};

/// Dense operator on a tensor-product Hilbert space. `dims` lists the
/// subsystem dimensions; their product equals the matrix dimension.
struct Operator {
    Mat mat;
    std::vector<int> dims;

    Operator() = default;
    Operator(Mat m, std::vector<int> d);

    int dim() const { return static_cast<int>(mat.rows()); }
};

/// Quantum state rho: trace-one Hermitian PSD matrix with subsystem dims.
struct DensityMatrix {
    Mat mat;
    std::vector<int> dims;

    DensityMatrix() = default;
    DensityMatrix(Mat m, std::vector<int> d);

    int dim() const { return static_cast<int>(mat.rows()); }
    double trace_error() const { return std::abs(mat.trace() - cx(1.0)); }
};

enum class Pauli { I, X, Y, Z };

struct LadderOps {
    Operator lowering;  // removes one excitation, matrix element sqrt(k)
    Operator raising;
};

int product_of(const std::vector<int>& dims);

Mat kron(const Mat& a, const Mat& b);
Mat kron_all(const std::vector<Mat>& factors);

Mat identity(int d);
Vec basis_ket(int d, int k);
Mat projector(int d, int k);

bool is_hermitian(const Mat& a, double tol = 1e-12);
bool is_unitary(const Mat& a, double tol = 1e-9);

/// Standard 2x2 Pauli matrix in the basis {|0>, |1>}, with Z = |0><0| - |1><1|.
Operator pauli(Pauli which);

/// Bosonic-weighted ladder pair on d levels: lowering maps |k> to sqrt(k)|k-1>.
/// For d = 2 the lowering operator is |0><1|.
LadderOps ladder(int d);

/// Embed a local operator at `site` of a tensor product, identity elsewhere.
Operator embed(const Operator& local_op, int site, const std::vector<int>& dims);
Mat embed(const Mat& local_op, int site, const std::vector<int>& dims);

/// Unitary whose columns are the dressed states
/// |+_phi> = (|0> + e^{i phi}|1>)/sqrt(2), |-_phi> = (|0> - e^{i phi}|1>)/sqrt(2).
Operator dressed_basis(double phi);

/// exp(-i A t) for Hermitian A, via eigendecomposition.
Operator matrix_exp(const Operator& a, double t);
Mat matrix_exp(const Mat& a, double t);

/// Number operator diag(0, 1, ..., d-1).
Mat number_op(int d);

/// Diagonal dephasing operator I - 2n, equal to Z for d = 2; off-diagonal
/// decay rates then scale with the squared level-index difference.
Mat dephasing_op(int d);

DensityMatrix density_from_ket(const Vec& psi, const std::vector<int>& dims);

/// Restrict a state to the lowest `new_dims` levels of each subsystem
/// (e.g. qutrit pair -> qubit pair). Trace may drop below one; the deficit is
/// the leaked population.
DensityMatrix truncate_levels(const DensityMatrix& rho, const std::vector<int>& new_dims);

/// Embed a state of truncated subsystems back into larger ones (zero padding).
DensityMatrix embed_levels(const DensityMatrix& rho, const std::vector<int>& new_dims);

double min_eigenvalue(const Mat& hermitian);

}  // namespace dressim

#endif
