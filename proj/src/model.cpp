#include "dressim/model.hpp"

#include <cmath>
#include <stdexcept>

namespace dressim {

double CouplingSpec::lambda_value() const {
    double v = 0.0;
    if (lambda) {
        v = *lambda;
    } else if (dispersive) {
        if (dispersive->delta == 0.0)
            throw std::invalid_argument("CouplingSpec: dispersive delta must be nonzero");
        v = -dispersive->g1 * dispersive->g2 / dispersive->delta;
    } else {
        throw std::invalid_argument("CouplingSpec: neither lambda nor dispersive parameters set");
    }
    return v + lambda_direct;
}

std::optional<std::string> CouplingSpec::validity_warning() const {
    if (!dispersive) return std::nullopt;
    double bound = std::abs(dispersive->delta) / 5.0;
    if (std::abs(dispersive->g1) > bound || std::abs(dispersive->g2) > bound)
        return "dispersive couplings exceed delta/5; lambda = -g1 g2/delta is a weak-coupling result";
    return std::nullopt;
}

Mat drive_op(int d, double rabi, double phase) {
    auto l = ladder(d);
    cx e = std::exp(-I_UNIT * phase);
    Mat m = rabi * (e * l.lowering.mat + std::conj(e) * l.raising.mat);
    return m;
}

Mat sz_phi(double phi) {
    return std::cos(phi) * pauli(Pauli::X).mat + std::sin(phi) * pauli(Pauli::Y).mat;
}

Operator h1(double k, const DriveTone& drive) {
    // (K/2)(|1><1| - |0><0|) is -K/2 times the conventional Z.
    Mat m = -(k / 2.0) * pauli(Pauli::Z).mat + drive_op(2, drive.rabi, drive.phase);
    return Operator(std::move(m), {2});
}

Operator h1_eff(double k, double rabi) {
    if (rabi == 0.0) throw std::invalid_argument("h1_eff: rabi must be nonzero");
    double shift = k * k / (8.0 * rabi) + rabi;
    Mat m = shift * pauli(Pauli::Z).mat;  // dressed basis: S_z is diagonal
    return Operator(std::move(m), {2});
}

double h1_phase_error(double k, double rabi, double tau) {
    return -k * k * tau / (4.0 * rabi);
}

Operator h2(const CouplingSpec& coupling, const DriveTone& drive1, const DriveTone& drive2) {
    const std::vector<int> dims{2, 2};
    auto l = ladder(2);
    const Mat sp = l.lowering.mat;  // sigma^+ = |0><1|
    const Mat sm = l.raising.mat;   // sigma^- = |1><0|
    double lam = coupling.lambda_value();
    Mat swap = kron(sp, sm);
    Mat m = lam * (swap + Mat(swap.adjoint()));
    m += embed(drive_op(2, drive1.rabi, drive1.phase), 0, dims);
    m += embed(drive_op(2, drive2.rabi, drive2.phase), 1, dims);
    return Operator(std::move(m), dims);
}

Operator h2_eff(const CouplingSpec& coupling, double rabi1, double rabi2, double phi) {
    const std::vector<int> dims{2, 2};
    double lam = coupling.lambda_value();
    Mat sz = sz_phi(phi);
    Mat m = (lam / 2.0) * kron(sz, sz);
    m += rabi1 * embed(sz, 0, dims) + rabi2 * embed(sz, 1, dims);
    return Operator(std::move(m), dims);
}

Operator h_full(const QubitParams& q1, const QubitParams& q2, int resonator_levels,
                double delta, const std::vector<DriveTone>& drives, double lambda_direct) {
    if (resonator_levels < 2)
        throw std::invalid_argument("h_full: resonator needs at least 2 levels");
    const std::vector<int> dims{q1.levels, q2.levels, resonator_levels};
    if (product_of(dims) > 200)
        throw std::invalid_argument("h_full: Hilbert space dimension exceeds 200");

    const QubitParams* qs[2] = {&q1, &q2};
    const int d = product_of(dims);
    Mat m = Mat::Zero(d, d);

    // Resonator detuned +delta from the common qubit frame.
    m += delta * embed(number_op(resonator_levels), 2, dims);
    auto res = ladder(resonator_levels);

    for (int j = 0; j < 2; ++j) {
        const QubitParams& q = *qs[j];
        // Anharmonic ladder: -(eta/2) n(n-1) puts |2> at -eta.
        Mat n = number_op(q.levels);
        m += embed(Mat(-(q.anharmonicity / 2.0) * n * (n - identity(q.levels))), j, dims);
        if (q.g != 0.0) {
            auto ql = ladder(q.levels);
            Mat exch = embed(res.raising.mat, 2, dims) * embed(ql.lowering.mat, j, dims);
            m += q.g * (exch + Mat(exch.adjoint()));
        }
        if (j < static_cast<int>(drives.size())) {
            const DriveTone& dr = drives[j];
            m += embed(drive_op(q.levels, dr.rabi, dr.phase), j, dims);
            if (dr.detuning != 0.0)
                m += dr.detuning * embed(number_op(q.levels), j, dims);
        }
    }

    if (lambda_direct != 0.0) {
        auto l1 = ladder(q1.levels);
        auto l2 = ladder(q2.levels);
        Mat swap = embed(l1.lowering.mat, 0, dims) * embed(l2.raising.mat, 1, dims);
        m += lambda_direct * (swap + Mat(swap.adjoint()));
    }

    return Operator(std::move(m), dims);
}

EffectiveCoupling effective_coupling(double g1, double g2, double delta) {
    if (delta == 0.0) throw std::invalid_argument("effective_coupling: delta must be nonzero");
    return {-g1 * g2 / delta, -g1 * g1 / delta, -g2 * g2 / delta};
}

double crosstalk_stark_shift(double omega_c, double detuning) {
    if (detuning == 0.0) throw std::invalid_argument("crosstalk_stark_shift: detuning must be nonzero");
    return omega_c * omega_c / detuning;
}

std::vector<DriveTone> apply_drive_crosstalk(const std::vector<DriveTone>& drives, const Mat& c) {
    const int n = static_cast<int>(drives.size());
    if (c.rows() != n || c.cols() != n)
        throw std::invalid_argument("apply_drive_crosstalk: matrix size must match drive count");
    std::vector<DriveTone> out = drives;
    for (int j = 0; j < n; ++j) {
        cx amp(0.0, 0.0);
        for (int k = 0; k < n; ++k)
            amp += c(j, k) * drives[k].rabi * std::exp(-I_UNIT * drives[k].phase);
        out[j].rabi = std::abs(amp);
        out[j].phase = out[j].rabi > 0.0 ? -std::arg(amp) : drives[j].phase;
    }
    return out;
}

}  // namespace dressim
