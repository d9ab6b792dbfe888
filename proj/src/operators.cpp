#include "dressim/operators.hpp"

#include <cmath>
#include <stdexcept>

namespace dressim {

int product_of(const std::vector<int>& dims) {
    int p = 1;
    for (int d : dims) p *= d;
    return p;
}

Operator::Operator(Mat m, std::vector<int> d) : mat(std::move(m)), dims(std::move(d)) {
    if (mat.rows() != mat.cols())
        throw std::invalid_argument("Operator: matrix must be square");
    if (product_of(dims) != mat.rows())
        throw std::invalid_argument("Operator: product of dims must equal matrix dimension");
}

DensityMatrix::DensityMatrix(Mat m, std::vector<int> d) : mat(std::move(m)), dims(std::move(d)) {
    if (mat.rows() != mat.cols())
        throw std::invalid_argument("DensityMatrix: matrix must be square");
    if (product_of(dims) != mat.rows())
        throw std::invalid_argument("DensityMatrix: product of dims must equal matrix dimension");
}

Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Mat kron_all(const std::vector<Mat>& factors) {
    if (factors.empty()) return Mat::Identity(1, 1);
    Mat out = factors[0];
    for (size_t i = 1; i < factors.size(); ++i) out = kron(out, factors[i]);
    return out;
}

Mat identity(int d) { return Mat::Identity(d, d); }

Vec basis_ket(int d, int k) {
    Vec v = Vec::Zero(d);
    v(k) = 1.0;
    return v;
}

Mat projector(int d, int k) {
    Mat p = Mat::Zero(d, d);
    p(k, k) = 1.0;
    return p;
}

bool is_hermitian(const Mat& a, double tol) {
    double scale = a.norm();
    if (scale == 0.0) return true;
    return (a - a.adjoint()).norm() <= tol * scale;
}

bool is_unitary(const Mat& a, double tol) {
    Mat g = a.adjoint() * a;
    return (g - Mat::Identity(a.rows(), a.cols())).norm() <= tol;
}

Operator pauli(Pauli which) {
    Mat m(2, 2);
    switch (which) {
        case Pauli::I: m << 1, 0, 0, 1; break;
        case Pauli::X: m << 0, 1, 1, 0; break;
        case Pauli::Y: m << 0, -I_UNIT, I_UNIT, 0; break;
        case Pauli::Z: m << 1, 0, 0, -1; break;
    }
    return Operator(std::move(m), {2});
}

LadderOps ladder(int d) {
    if (d < 2) throw std::invalid_argument("ladder: need at least 2 levels");
    Mat low = Mat::Zero(d, d);
    for (int k = 1; k < d; ++k) low(k - 1, k) = std::sqrt(static_cast<double>(k));
    Mat raise = low.adjoint();
    return {Operator(std::move(low), {d}), Operator(std::move(raise), {d})};
}

Mat embed(const Mat& local_op, int site, const std::vector<int>& dims) {
    if (site < 0 || site >= static_cast<int>(dims.size()))
        throw std::invalid_argument("embed: site out of range");
    if (local_op.rows() != dims[site])
        throw std::invalid_argument("embed: local operator dimension does not match dims[site]");
    std::vector<Mat> factors;
    factors.reserve(dims.size());
    for (int s = 0; s < static_cast<int>(dims.size()); ++s)
        factors.push_back(s == site ? local_op : identity(dims[s]));
    return kron_all(factors);
}

Operator embed(const Operator& local_op, int site, const std::vector<int>& dims) {
    return Operator(embed(local_op.mat, site, dims), dims);
}

Operator dressed_basis(double phi) {
    const double s = 1.0 / std::sqrt(2.0);
    Mat u(2, 2);
    cx e = std::exp(I_UNIT * phi);
    u << s, s, s * e, -s * e;
    return Operator(std::move(u), {2});
}

Mat matrix_exp(const Mat& a, double t) {
    if (!a.allFinite()) throw std::invalid_argument("matrix_exp: non-finite entries");
    if (!is_hermitian(a, 1e-10))
        throw std::invalid_argument("matrix_exp: input must be Hermitian");
    Eigen::SelfAdjointEigenSolver<Mat> es(a);
    const auto& vals = es.eigenvalues();
    const Mat& vecs = es.eigenvectors();
    Vec phases(vals.size());
    for (Eigen::Index i = 0; i < vals.size(); ++i)
        phases(i) = std::exp(-I_UNIT * vals(i) * t);
    return vecs * phases.asDiagonal() * vecs.adjoint();
}

Operator matrix_exp(const Operator& a, double t) {
    return Operator(matrix_exp(a.mat, t), a.dims);
}

Mat number_op(int d) {
    Mat n = Mat::Zero(d, d);
    for (int k = 0; k < d; ++k) n(k, k) = static_cast<double>(k);
    return n;
}

Mat dephasing_op(int d) {
    return identity(d) - 2.0 * number_op(d);
}

DensityMatrix density_from_ket(const Vec& psi, const std::vector<int>& dims) {
    return DensityMatrix(psi * psi.adjoint(), dims);
}

namespace {

// Enumerate full-space indices whose per-subsystem digits all fit new_dims.
std::vector<int> kept_indices(const std::vector<int>& dims, const std::vector<int>& new_dims) {
    const int d = product_of(dims);
    std::vector<int> kept;
    for (int idx = 0; idx < d; ++idx) {
        int rem = idx;
        bool ok = true;
        for (int s = static_cast<int>(dims.size()) - 1; s >= 0; --s) {
            int digit = rem % dims[s];
            rem /= dims[s];
            if (digit >= new_dims[s]) { ok = false; break; }
        }
        if (ok) kept.push_back(idx);
    }
    return kept;
}

}  // namespace

DensityMatrix truncate_levels(const DensityMatrix& rho, const std::vector<int>& new_dims) {
    if (new_dims.size() != rho.dims.size())
        throw std::invalid_argument("truncate_levels: rank mismatch");
    auto kept = kept_indices(rho.dims, new_dims);
    Mat out(kept.size(), kept.size());
    for (size_t i = 0; i < kept.size(); ++i)
        for (size_t j = 0; j < kept.size(); ++j)
            out(i, j) = rho.mat(kept[i], kept[j]);
    return DensityMatrix(std::move(out), new_dims);
}

DensityMatrix embed_levels(const DensityMatrix& rho, const std::vector<int>& new_dims) {
    if (new_dims.size() != rho.dims.size())
        throw std::invalid_argument("embed_levels: rank mismatch");
    auto kept = kept_indices(new_dims, rho.dims);
    Mat out = Mat::Zero(product_of(new_dims), product_of(new_dims));
    for (size_t i = 0; i < kept.size(); ++i)
        for (size_t j = 0; j < kept.size(); ++j)
            out(kept[i], kept[j]) = rho.mat(i, j);
    return DensityMatrix(std::move(out), new_dims);
}

double min_eigenvalue(const Mat& hermitian) {
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitian, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

}  // namespace dressim
