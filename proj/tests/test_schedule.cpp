#include <doctest.h>

#include <cmath>

#include "dressim/evolve.hpp"
#include "dressim/schedule.hpp"

using namespace dressim;

namespace {

constexpr double kTwoPi = 2.0 * M_PI;
const double kInf = std::numeric_limits<double>::infinity();

SystemSpec one_qubit() {
    SystemSpec s;
    s.qubits.push_back(QubitParams{});
    return s;
}

SystemSpec two_qubits(double lambda) {
    SystemSpec s;
    s.qubits.push_back(QubitParams{});
    s.qubits.push_back(QubitParams{});
    s.coupling.lambda = lambda;
    return s;
}

double final_p1(const SystemSpec& sys, const Schedule& sched, const NoiseTrajectory* traj) {
    Mat u = propagate_unitary(sys, sched, traj);
    Vec psi = u * basis_ket(sys.dim(), 0);
    return std::norm(psi(1));
}

}  // namespace

TEST_SUITE("schedule") {

TEST_CASE("schedule invariants hold for every builder") {
    DriveTone tone;
    tone.rabi = kTwoPi * 3.6e6;
    for (const Schedule& s :
         {ramsey_sequence(RamseyVariant::free_decay, 3e-6, kTwoPi * 1e6, 0.0),
          ramsey_sequence(RamseyVariant::spin_echo, 3e-6, kTwoPi * 1e6, 0.0),
          ramsey_sequence(RamseyVariant::one_q_dd, 3e-6, kTwoPi * 1e6, tone.rabi),
          storage_sequence(5e-6, RamseyVariant::one_q_dd, tone),
          storage_sequence(5e-6, RamseyVariant::spin_echo, tone),
          idler_sequence(210.7e-9)}) {
        double total = 0.0;
        for (const auto& seg : s.segments) {
            CHECK(seg.duration >= 0.0);
            total += seg.duration;
        }
        CHECK(s.total_duration() == doctest::Approx(total));
        CHECK_NOTHROW(s.validate());
    }
}

TEST_CASE("zero-delay Ramsey returns the qubit inverted") {
    Schedule s = ramsey_sequence(RamseyVariant::free_decay, 0.0, kTwoPi * 1e6, 0.0);
    CHECK(final_p1(one_qubit(), s, nullptr) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("free-decay fringe oscillates at omega_r for constant detuning") {
    // P1(tau) follows 1/2 + 1/2 cos((omega_r - K) tau + phi0) shape; verify
    // against the propagator at several tau for K = 0
    double omega_r = kTwoPi * 1e6;
    SystemSpec sys = one_qubit();
    for (double tau : {0.25e-6, 0.5e-6, 0.75e-6, 1.0e-6}) {
        Schedule s = ramsey_sequence(RamseyVariant::free_decay, tau, omega_r, 0.0);
        double p1 = final_p1(sys, s, nullptr);
        CHECK(p1 == doctest::Approx(0.5 + 0.5 * std::cos(omega_r * tau)).epsilon(1e-9));
    }
}

TEST_CASE("spin echo refocuses any constant detuning") {
    double omega_r = kTwoPi * 1e6;
    SystemSpec sys = one_qubit();
    double tau = 2e-6;
    Schedule s = ramsey_sequence(RamseyVariant::spin_echo, tau, omega_r, 0.0);
    double base = final_p1(sys, s, nullptr);
    for (double k_mhz : {0.05, 0.1, 0.2, -0.15}) {
        NoiseTrajectory traj;
        traj.constant_k = {kTwoPi * k_mhz * 1e6};
        CHECK(std::abs(final_p1(sys, s, &traj) - base) < 1e-6);
    }
}

TEST_CASE("removing the phase flip restores first-order sensitivity") {
    double omega = kTwoPi * 3.6e6;
    double k = 0.05 * omega;
    double tau = kTwoPi * 50.0 / omega;
    SystemSpec sys = one_qubit();
    NoiseTrajectory traj;
    traj.constant_k = {k};

    auto residual_phase = [&](bool flip) {
        Schedule sched;
        sched.n_sites = 1;
        Segment seg;
        seg.duration = tau;
        seg.detunings = {0.0};
        DriveTone tone;
        tone.rabi = omega;
        if (flip) tone.phase_flip_at = tau / 2.0;
        seg.drives = {tone};
        sched.segments.push_back(seg);
        Mat d = dressed_basis(0.0).mat;
        Mat v = d.adjoint() * propagate_unitary(sys, sched, &traj) * d;
        return std::abs(std::remainder(std::arg(v(0, 0)) - std::arg(v(1, 1)), 2.0 * M_PI));
    };
    CHECK(residual_phase(true) / residual_phase(false) < 0.05);
}

TEST_CASE("one_q_dd keeps the prepared state protected") {
    // with the drive on and a constant K, final P1 stays near the K = 0 value
    double omega_r = kTwoPi * 1e6;
    double omega = kTwoPi * 3.6e6;
    SystemSpec sys = one_qubit();
    double tau = 3e-6;
    Schedule s = ramsey_sequence(RamseyVariant::one_q_dd, tau, omega_r, omega);
    double base = final_p1(sys, s, nullptr);
    NoiseTrajectory traj;
    traj.constant_k = {0.05 * omega};
    CHECK(std::abs(final_p1(sys, s, &traj) - base) < 5e-3);
}

TEST_CASE("gate duration from the coupling") {
    CHECK(uphase_duration(-kTwoPi * 1.2e6) == doctest::Approx(208.33e-9).epsilon(1e-4));
    CHECK(uphase_duration(kTwoPi * 3e6) == doctest::Approx(83.33e-9).epsilon(1e-4));
    CHECK(uphase_duration(kTwoPi * 2.4e6) == doctest::Approx(uphase_duration(kTwoPi * 1.2e6) / 2.0));
    CHECK_THROWS_AS(uphase_duration(0.0), std::invalid_argument);
}

TEST_CASE("gate sequence on the effective model reproduces exp(i pi/4 XX)") {
    CouplingSpec c;
    c.lambda = -kTwoPi * 1.2e6;
    double tau = uphase_duration(*c.lambda);

    // effective model: evolve h2_eff piecewise with the synchronized flips
    Mat ha = h2_eff(c, kTwoPi * 3.6e6, kTwoPi * 6.9e6, 0.0).mat;
    Mat hb = h2_eff(c, kTwoPi * 3.6e6, kTwoPi * 6.9e6, M_PI).mat;
    Mat u = matrix_exp(hb, tau / 2.0) * matrix_exp(ha, tau / 2.0);

    Mat xx = kron(pauli(Pauli::X).mat, pauli(Pauli::X).mat);
    Mat want = matrix_exp(xx, -M_PI / 4.0);  // exp(i pi/4 XX)
    cx phase = (want.adjoint() * u).trace();
    phase /= std::abs(phase);
    CHECK((u - phase * want).norm() < 1e-9);
}

TEST_CASE("gate sequence leakage and exchange from |00>") {
    SystemSpec sys = two_qubits(-kTwoPi * 1.2e6);
    DriveTone d1, d2;
    d1.rabi = kTwoPi * 3.6e6;
    d2.rabi = kTwoPi * 6.9e6;

    double max_leak = 0.0, max_p11 = 0.0;
    for (int i = 1; i <= 60; ++i) {
        double duration = 500e-9 * i / 60.0;
        Schedule s = gate_sequence(sys.coupling, d1, d2, duration);
        Mat u = propagate_unitary(sys, s, nullptr);
        Vec psi = u * basis_ket(4, 0);
        max_leak = std::max(max_leak, std::norm(psi(1)) + std::norm(psi(2)));
        max_p11 = std::max(max_p11, std::norm(psi(3)));
    }
    CHECK(max_leak <= 0.15);
    CHECK(max_p11 >= 0.7);
}

TEST_CASE("gate sequence from |01> shows anticorrelated swap populations") {
    SystemSpec sys = two_qubits(-kTwoPi * 1.2e6);
    DriveTone d1, d2;
    d1.rabi = kTwoPi * 3.6e6;
    d2.rabi = kTwoPi * 6.9e6;

    std::vector<double> p01s, p10s;
    for (int i = 1; i <= 60; ++i) {
        double duration = 500e-9 * i / 60.0;
        Schedule s = gate_sequence(sys.coupling, d1, d2, duration);
        Vec psi = propagate_unitary(sys, s, nullptr) * basis_ket(4, 1);
        p01s.push_back(std::norm(psi(1)));
        p10s.push_back(std::norm(psi(2)));
    }
    double m1 = 0.0, m2 = 0.0;
    for (size_t i = 0; i < p01s.size(); ++i) {
        m1 += p01s[i];
        m2 += p10s[i];
    }
    m1 /= p01s.size();
    m2 /= p10s.size();
    double num = 0.0, v1 = 0.0, v2 = 0.0;
    for (size_t i = 0; i < p01s.size(); ++i) {
        num += (p01s[i] - m1) * (p10s[i] - m2);
        v1 += (p01s[i] - m1) * (p01s[i] - m1);
        v2 += (p10s[i] - m2) * (p10s[i] - m2);
    }
    CHECK(num / std::sqrt(v1 * v2) < -0.8);
}

TEST_CASE("dressed-phase corrections turn the gate into a conditional phase") {
    // with the corrections appended, the dressed-basis propagator is
    // diag(e^{i 4 theta}, 1, 1, 1) up to a global phase
    CouplingSpec c;
    c.lambda = -kTwoPi * 1.2e6;
    double tau = uphase_duration(*c.lambda);
    double theta = -*c.lambda * tau / 2.0;

    Mat ha = h2_eff(c, kTwoPi * 3.6e6, kTwoPi * 6.9e6, 0.0).mat;
    Mat hb = h2_eff(c, kTwoPi * 3.6e6, kTwoPi * 6.9e6, M_PI).mat;
    Mat u = matrix_exp(hb, tau / 2.0) * matrix_exp(ha, tau / 2.0);
    Schedule s = gate_sequence(c, DriveTone{}, DriveTone{}, tau, 0.0, true);
    for (const auto& g : s.instant_gates)
        u = embed(g.unitary, g.site, {2, 2}) * u;

    Mat d = kron(dressed_basis(0.0).mat, dressed_basis(0.0).mat);
    Mat v = d.adjoint() * u * d;
    cx global = v(1, 1);
    CHECK(std::abs(v(0, 0) / global - std::exp(I_UNIT * 4.0 * theta)) < 1e-9);
    CHECK(std::abs(v(2, 2) / global - cx(1.0)) < 1e-9);
    CHECK(std::abs(v(3, 3) / global - cx(1.0)) < 1e-9);
}

TEST_CASE("storage sequence at tau = 0 is the identity process") {
    DriveTone tone;
    tone.rabi = kTwoPi * 3.6e6;
    SystemSpec sys = one_qubit();
    for (auto variant : {RamseyVariant::free_decay, RamseyVariant::spin_echo,
                         RamseyVariant::one_q_dd}) {
        Schedule s = storage_sequence(0.0, variant, tone);
        Mat u = propagate_unitary(sys, s, nullptr);
        cx phase = u(0, 0) / std::abs(u(0, 0));
        CHECK((u - phase * identity(2)).norm() < 1e-12);
    }
}

TEST_CASE("storage echo closes back to the identity frame") {
    SystemSpec sys = one_qubit();
    Schedule s = storage_sequence(4e-6, RamseyVariant::spin_echo, DriveTone{});
    NoiseTrajectory traj;
    traj.constant_k = {kTwoPi * 0.2e6};
    Mat u = propagate_unitary(sys, s, &traj);
    cx phase = u(0, 0) / std::abs(u(0, 0));
    CHECK((u - phase * identity(2)).norm() < 1e-6);
}

TEST_CASE("two-qubit DD Ramsey: ideal case keeps unit contrast") {
    SystemSpec sys = two_qubits(-kTwoPi * 1.2e6);
    DriveTone d1, d2;
    d1.rabi = kTwoPi * 3.6e6;
    d2.rabi = kTwoPi * 6.9e6;
    double omega_r = kTwoPi * 1e6;

    // sweep tau over one fringe period; the oscillation must span [0, 1]
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i <= 20; ++i) {
        double tau = 1e-6 * i / 20.0 + 2e-6;
        Schedule s = two_q_dd_ramsey(tau, 0, +1, sys.coupling, d1, d2, omega_r);
        Mat u = propagate_unitary(sys, s, nullptr);
        Vec psi = u * basis_ket(4, 0);
        std::vector<int> dims{2, 2};
        Mat p1 = embed(projector(2, 1), 0, dims);
        double v = std::real((psi.adjoint() * p1 * psi)(0));
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(hi > 0.97);
    CHECK(lo < 0.03);
}

TEST_CASE("swapping the spectator dressed state flips the conditional phase rate") {
    // effective model: phase of the target dressed coherence advances at
    // +lambda/2 for |+> spectator and -lambda/2 for |->
    CouplingSpec c;
    c.lambda = -kTwoPi * 1.2e6;
    double w1 = kTwoPi * 3.6e6, w2 = kTwoPi * 6.9e6;
    double tau = 80e-9;

    auto conditional_phase = [&](int sign) {
        Mat ha = h2_eff(c, w1, w2, 0.0).mat;
        Mat hb = h2_eff(c, w1, w2, M_PI).mat;
        Mat u = matrix_exp(hb, tau / 2.0) * matrix_exp(ha, tau / 2.0);
        Mat d = kron(dressed_basis(0.0).mat, dressed_basis(0.0).mat);
        Mat v = d.adjoint() * u * d;
        // spectator fixed: block (target+, spectator s) vs (target-, spectator s)
        int col = sign > 0 ? 0 : 1;
        return std::remainder(std::arg(v(col, col)) - std::arg(v(2 + col, 2 + col)), 2.0 * M_PI);
    };
    double plus = conditional_phase(+1);
    double minus = conditional_phase(-1);
    CHECK(plus == doctest::Approx(-*c.lambda * tau).epsilon(1e-9));
    CHECK(minus == doctest::Approx(*c.lambda * tau).epsilon(1e-9));
}

TEST_CASE("idler sequence") {
    Schedule s = idler_sequence(210.7e-9);
    CHECK(s.total_duration() == doctest::Approx(210.7e-9));
    SystemSpec sys = one_qubit();
    Mat u = propagate_unitary(sys, s, nullptr);
    CHECK((u - identity(2)).norm() < 1e-12);
    CHECK_THROWS_AS(idler_sequence(0.0), std::invalid_argument);
}

TEST_CASE("serialization round trip") {
    DriveTone tone;
    tone.rabi = kTwoPi * 3.6e6;
    Schedule s = storage_sequence(5e-6, RamseyVariant::one_q_dd, tone);
    std::string text = schedule_to_text(s);
    Schedule back = schedule_from_text(text);
    CHECK(back.n_sites == s.n_sites);
    REQUIRE(back.segments.size() == s.segments.size());
    CHECK(back.segments[0].duration == doctest::Approx(s.segments[0].duration));
    REQUIRE(back.segments[0].drives[0].has_value());
    CHECK(back.segments[0].drives[0]->rabi == doctest::Approx(tone.rabi));
    CHECK(*back.segments[0].drives[0]->phase_flip_at == doctest::Approx(2.5e-6));
    CHECK(schedule_to_text(back) == text);
}

TEST_CASE("builder guards") {
    CHECK_THROWS_AS(ramsey_sequence(RamseyVariant::free_decay, -1.0, 0.0, 0.0),
                    std::invalid_argument);
    CouplingSpec c;
    c.lambda = 1.0;
    CHECK_THROWS_AS(gate_sequence(c, DriveTone{}, DriveTone{}, 0.0), std::invalid_argument);
}

}  // TEST_SUITE
