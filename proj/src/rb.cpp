#include "dressim/rb.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "dressim/noise.hpp"
#include "dressim/schedule.hpp"

namespace dressim {

namespace {

bool equal_up_to_phase(const Mat& a, const Mat& b, double tol) {
    if (a.rows() != b.rows()) return false;
    cx ip = (a.adjoint() * b).trace();
    return std::abs(std::abs(ip) - static_cast<double>(a.rows())) < tol;
}

}  // namespace

GateSet clifford_group_1q() {
    const Mat gx = x_rotation(std::numbers::pi / 2.0);
    const Mat gy = y_rotation(std::numbers::pi / 2.0);

    GateSet set;
    set.kind = GateSet::Kind::clifford1q;
    set.n_qubits = 1;
    set.elements.push_back({"", identity(2)});

    // breadth-first closure over {X/2, Y/2} words, deduplicated up to phase
    size_t head = 0;
    while (head < set.elements.size()) {
        auto cur = set.elements[head];
        for (auto& [suffix, gen] : {std::pair<std::string, const Mat&>{"X", gx}, {"Y", gy}}) {
            Mat cand = gen * cur.u;
            bool known = false;
            for (const auto& e : set.elements)
                if (equal_up_to_phase(e.u, cand, 1e-9)) {
                    known = true;
                    break;
                }
            if (!known) set.elements.push_back({cur.label + suffix, std::move(cand)});
        }
        ++head;
    }
    set.elements[0].label = "I";
    return set;
}

GateSet pauli_set_1q() {
    GateSet set;
    set.kind = GateSet::Kind::pauli1q;
    set.n_qubits = 1;
    set.elements.push_back({"I", identity(2)});
    set.elements.push_back({"X", x_rotation(std::numbers::pi)});
    set.elements.push_back({"Y", y_rotation(std::numbers::pi)});
    set.elements.push_back({"Z", matrix_exp(pauli(Pauli::Z).mat, std::numbers::pi / 2.0)});
    return set;
}

GateSet tensor_square(const GateSet& base) {
    GateSet set;
    set.kind = base.kind == GateSet::Kind::clifford1q ? GateSet::Kind::clifford2q_product
                                                      : GateSet::Kind::pauli2q_product;
    set.n_qubits = 2;
    for (const auto& a : base.elements)
        for (const auto& b : base.elements)
            set.elements.push_back({a.label + ":" + b.label, kron(a.u, b.u)});
    return set;
}

int find_in_set(const GateSet& set, const Mat& u, double tol) {
    for (size_t i = 0; i < set.elements.size(); ++i)
        if (equal_up_to_phase(set.elements[i].u, u, tol)) return static_cast<int>(i);
    return -1;
}

namespace {

// Operator Schmidt decomposition test: m (4x4) is a1 kron a2 iff the
// (row-block, col-block) reshuffle has rank one.
bool factor_local(const Mat& m, Mat& a1, Mat& a2, double tol = 1e-9) {
    if (m.rows() != 4) return false;
    Mat r(4, 4);
    for (int i1 = 0; i1 < 2; ++i1)
        for (int j1 = 0; j1 < 2; ++j1)
            for (int i2 = 0; i2 < 2; ++i2)
                for (int j2 = 0; j2 < 2; ++j2)
                    r(2 * i1 + j1, 2 * i2 + j2) = m(2 * i1 + i2, 2 * j1 + j2);
    Eigen::JacobiSVD<Mat> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (svd.singularValues()(1) > tol) return false;
    double s = svd.singularValues()(0);
    Vec u = svd.matrixU().col(0) * std::sqrt(s);
    Vec v = svd.matrixV().col(0).conjugate() * std::sqrt(s);
    a1 = Eigen::Map<const Mat>(u.data(), 2, 2).transpose();
    a2 = Eigen::Map<const Mat>(v.data(), 2, 2).transpose();
    return true;
}

struct Recovery {
    Mat local;          // single-qubit layer (full-space matrix)
    int target_uses;    // interleaved-gate applications before the layer
    std::string label;
};

Recovery close_sequence(const GateSet& set, const Mat& composite, const Mat* interleave) {
    const int d = static_cast<int>(composite.rows());
    Mat inverse = composite.adjoint();

    int idx = find_in_set(set, inverse);
    if (idx >= 0) return {set.elements[idx].u, 0, set.elements[idx].label};

    if (d == 2 || !interleave)
        return {inverse, 0, "ideal_inverse"};

    // try recovery = local layer after t target applications
    Mat acc = composite;
    for (int t = 0; t <= 2; ++t) {
        if (t > 0) acc = (*interleave) * acc;
        Mat candidate = acc.adjoint();
        Mat a1, a2;
        if (factor_local(candidate, a1, a2)) {
            Mat local = kron(a1, a2);
            if ((local - candidate).norm() < 1e-9) return {std::move(local), t, "local_layer"};
        }
    }
    return {inverse, 0, "ideal_inverse"};
}

}  // namespace

std::vector<RbSequence> build_rb_sequences(const GateSet& set, int m, int k,
                                           const Mat* interleave, std::uint64_t seed) {
    if (m < 1 || k < 1) throw std::invalid_argument("build_rb_sequences: m and k must be >= 1");
    const int d = static_cast<int>(set.elements.front().u.rows());

    std::vector<RbSequence> out;
    out.reserve(k);
    for (int j = 0; j < k; ++j) {
        std::mt19937_64 eng(mix_seed(seed, j, 0x5e9));
        std::uniform_int_distribution<int> pick(0, static_cast<int>(set.elements.size()) - 1);

        RbSequence seq;
        seq.m = m;
        seq.interleaved = interleave != nullptr;
        Mat v = Mat::Identity(d, d);
        for (int i = 0; i < m; ++i) {
            int g = pick(eng);
            seq.gate_indices.push_back(g);
            v = set.elements[g].u * v;
            if (interleave) v = (*interleave) * v;
        }

        Recovery rec = close_sequence(set, v, interleave);
        seq.recovery = rec.local;
        seq.recovery_target_uses = rec.target_uses;
        seq.recovery_label = rec.label;

        // closure invariant: recovery composed with the sequence is identity
        Mat total = v;
        for (int t = 0; t < rec.target_uses; ++t) total = (*interleave) * total;
        total = rec.local * total;
        if (!equal_up_to_phase(total, Mat::Identity(d, d), 1e-9))
            throw std::runtime_error("build_rb_sequences: recovery failed to close the sequence");

        out.push_back(std::move(seq));
    }
    return out;
}

std::vector<SurvivalPoint> run_rb(const GateSet& set, const std::vector<int>& m_grid, int k,
                                  const Mat* interleave_ideal, const Mat* noisy_gate_superop,
                                  std::uint64_t seed, bool parallel) {
    const int d = static_cast<int>(set.elements.front().u.rows());
    std::vector<int> dims(d == 4 ? 2 : 1, 2);
    const DensityMatrix rho0 = density_from_ket(basis_ket(d, 0), dims);

    auto apply_gate = [&](Mat& rho) {
        if (noisy_gate_superop) {
            DensityMatrix r = apply_superop(*noisy_gate_superop, DensityMatrix(rho, dims));
            rho = r.mat;
        } else if (interleave_ideal) {
            rho = (*interleave_ideal) * rho * interleave_ideal->adjoint();
        }
    };

    std::vector<SurvivalPoint> out;
    for (int m : m_grid) {
        auto seqs = build_rb_sequences(set, m, k, interleave_ideal, mix_seed(seed, m, 0x9b));
        std::vector<double> survival(k, 0.0);

        auto run_one = [&](int j) {
            const RbSequence& seq = seqs[j];
            Mat rho = rho0.mat;
            for (int i = 0; i < seq.m; ++i) {
                const Mat& g = set.elements[seq.gate_indices[i]].u;
                rho = g * rho * g.adjoint();
                if (seq.interleaved) apply_gate(rho);
            }
            for (int t = 0; t < seq.recovery_target_uses; ++t) apply_gate(rho);
            rho = seq.recovery * rho * seq.recovery.adjoint();
            survival[j] = std::real(rho(0, 0));
        };

        if (parallel) {
#pragma omp parallel for schedule(dynamic)
            for (int j = 0; j < k; ++j) run_one(j);
        } else {
            for (int j = 0; j < k; ++j) run_one(j);
        }

        double mean = 0.0;
        for (double s : survival) mean += s;
        mean /= k;
        double var = 0.0;
        for (double s : survival) var += (s - mean) * (s - mean);
        double se = k > 1 ? std::sqrt(var / (k - 1.0) / k) : 0.0;
        out.push_back({m, mean, se});
    }
    return out;
}

}  // namespace dressim
