#include <doctest.h>

#include <cmath>

#include "dressim/evolve.hpp"

using namespace dressim;

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

SystemSpec one_qubit(double t1, double tphi) {
    SystemSpec s;
    QubitParams q;
    q.t1 = t1;
    q.tphi = tphi;
    s.qubits.push_back(q);
    return s;
}

Schedule idle_schedule(double tau, int n_sites = 1) {
    Schedule sched;
    sched.n_sites = n_sites;
    Segment seg;
    seg.duration = tau;
    seg.drives.assign(n_sites, std::nullopt);
    seg.detunings.assign(n_sites, 0.0);
    sched.segments.push_back(seg);
    return sched;
}

const double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST_SUITE("evolve") {

TEST_CASE("collapse operator rates") {
    // T1 relaxation: |1> population decays at 1/T1
    double t1 = 31.6e-6;
    SystemSpec sys = one_qubit(t1, kInf);
    auto lindblad = system_collapse(sys);
    CHECK(lindblad.ops.size() == 1);

    DensityMatrix rho1 = density_from_ket(basis_ket(2, 0), {2});
    rho1.mat.setZero();
    rho1.mat(1, 1) = 1.0;
    std::vector<double> times{5e-6, 15e-6, 30e-6};
    auto res = propagate_lindblad(rho1, sys, idle_schedule(30e-6), lindblad, nullptr,
                                  {{"p1", projector(2, 1)}}, times, {});
    for (size_t i = 0; i < times.size(); ++i)
        CHECK(std::abs(res.observables["p1"][i] - std::exp(-times[i] / t1)) < 1e-4);
}

TEST_CASE("coherence decay rate combines T1 and Tphi") {
    // rho01 decays at 1/(2 T1) + 1/Tphi
    Vec plus(2);
    plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    DensityMatrix rho = density_from_ket(plus, {2});
    double tau = 12e-6;

    SUBCASE("pure relaxation") {
        double t1 = 31.6e-6;
        SystemSpec sys = one_qubit(t1, kInf);
        auto res = propagate_lindblad(rho, sys, idle_schedule(tau), system_collapse(sys), nullptr,
                                      {}, {}, {});
        double coh = std::abs(res.final_state->mat(0, 1));
        CHECK(coh == doctest::Approx(0.5 * std::exp(-tau / (2.0 * t1))).epsilon(1e-3));
    }
    SUBCASE("pure dephasing") {
        double tphi = 20.2e-6;
        SystemSpec sys = one_qubit(kInf, tphi);
        auto res = propagate_lindblad(rho, sys, idle_schedule(tau), system_collapse(sys), nullptr,
                                      {{"p1", projector(2, 1)}}, {tau}, {});
        double coh = std::abs(res.final_state->mat(0, 1));
        CHECK(coh == doctest::Approx(0.5 * std::exp(-tau / tphi)).epsilon(1e-3));
        // populations untouched by pure dephasing
        CHECK(res.observables["p1"][0] == doctest::Approx(0.5).epsilon(1e-9));
    }
    SUBCASE("combined rate 1/(2 T1) + 1/Tphi") {
        double t1 = 31.6e-6, tphi = 20.2e-6;
        SystemSpec sys = one_qubit(t1, tphi);
        auto res = propagate_lindblad(rho, sys, idle_schedule(tau), system_collapse(sys), nullptr,
                                      {}, {}, {});
        double rate = 1.0 / (2.0 * t1) + 1.0 / tphi;
        double coh = std::abs(res.final_state->mat(0, 1));
        CHECK(coh == doctest::Approx(0.5 * std::exp(-tau * rate)).epsilon(1e-3));
    }
}

TEST_CASE("propagate_unitary basics") {
    SystemSpec sys = one_qubit(kInf, kInf);

    SUBCASE("empty schedule is the identity") {
        Schedule empty;
        empty.n_sites = 1;
        CHECK((propagate_unitary(sys, empty) - identity(2)).norm() < 1e-15);
    }

    SUBCASE("resonant pulse of area pi/2 inverts the population") {
        double omega = kTwoPi * 3.6e6;
        Schedule sched = idle_schedule(M_PI / (2.0 * omega));
        DriveTone tone;
        tone.rabi = omega;
        sched.segments[0].drives[0] = tone;
        Mat u = propagate_unitary(sys, sched);
        CHECK(is_unitary(u, 1e-9));
        CHECK(std::norm(u(1, 0)) == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("rotary echo cancels the quasi-static dressed phase") {
    double omega = kTwoPi * 3.6e6;
    double k = 0.05 * omega;
    double tau = kTwoPi * 50.0 / omega;  // Omega tau = 100 pi
    SystemSpec sys = one_qubit(kInf, kInf);

    auto dressed_phase = [&](bool flip) {
        Schedule sched = idle_schedule(tau);
        DriveTone tone;
        tone.rabi = omega;
        if (flip) tone.phase_flip_at = tau / 2.0;
        sched.segments[0].drives[0] = tone;
        NoiseTrajectory traj;
        traj.constant_k = {k};
        Mat u = propagate_unitary(sys, sched, &traj);
        Mat d = dressed_basis(0.0).mat;
        Mat v = d.adjoint() * u * d;
        return std::remainder(std::arg(v(0, 0)) - std::arg(v(1, 1)), 2.0 * M_PI);
    };

    double expected = k * k * tau / (4.0 * omega);
    double unflipped = std::abs(dressed_phase(false));
    double flipped = std::abs(dressed_phase(true));
    CHECK(unflipped == doctest::Approx(expected).epsilon(0.10));
    CHECK(flipped <= 0.05 * expected);
}

TEST_CASE("closed system matches the unitary path") {
    double omega = kTwoPi * 2.4e6;
    Schedule sched = idle_schedule(300e-9);
    DriveTone tone;
    tone.rabi = omega;
    tone.phase = 0.6;
    tone.phase_flip_at = 120e-9;
    sched.segments[0].drives[0] = tone;
    sched.instant_gates.push_back({0, 0, pauli(Pauli::X).mat, "X"});

    SystemSpec sys = one_qubit(kInf, kInf);
    Vec psi(2);
    psi << std::sqrt(0.3), std::sqrt(0.7);
    DensityMatrix rho0 = density_from_ket(psi, {2});

    Mat u = propagate_unitary(sys, sched);
    Mat want = u * rho0.mat * u.adjoint();
    auto res = propagate_lindblad(rho0, sys, sched, {}, nullptr, {}, {}, {});
    CHECK((res.final_state->mat - want).norm() < 1e-7);
}

TEST_CASE("physicality is tracked along the integration") {
    SystemSpec sys = one_qubit(31.6e-6, 20e-6);
    Schedule sched = idle_schedule(10e-6);
    DriveTone tone;
    tone.rabi = kTwoPi * 3.6e6;
    sched.segments[0].drives[0] = tone;
    Vec plus(2);
    plus << 1.0 / std::sqrt(2.0), cx(0.0, 1.0 / std::sqrt(2.0));
    std::vector<double> times;
    for (int i = 1; i <= 20; ++i) times.push_back(10e-6 * i / 20.0);
    auto res = propagate_lindblad(density_from_ket(plus, {2}), sys, sched, system_collapse(sys),
                                  nullptr, {}, times, {});
    CHECK(res.max_trace_err < 1e-7);
    CHECK(res.max_herm_err < 1e-9);
    CHECK(res.min_eigenvalue > -1e-6);
}

TEST_CASE("step-halving convergence") {
    SystemSpec sys = one_qubit(31.6e-6, 20e-6);
    Schedule sched = idle_schedule(5e-6);
    DriveTone tone;
    tone.rabi = kTwoPi * 3.6e6;
    tone.phase_flip_at = 2.5e-6;
    sched.segments[0].drives[0] = tone;
    Vec plus(2);
    plus << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
    std::vector<double> times;
    for (int i = 1; i <= 10; ++i) times.push_back(5e-6 * i / 10.0);

    EvolveOptions loose, tight;
    loose.rtol = 1e-8;
    tight.rtol = 1e-10;
    auto a = propagate_lindblad(density_from_ket(plus, {2}), sys, sched, system_collapse(sys),
                                nullptr, {{"p1", projector(2, 1)}}, times, loose);
    auto b = propagate_lindblad(density_from_ket(plus, {2}), sys, sched, system_collapse(sys),
                                nullptr, {{"p1", projector(2, 1)}}, times, tight);
    for (size_t i = 0; i < times.size(); ++i)
        CHECK(std::abs(a.observables["p1"][i] - b.observables["p1"][i]) < 1e-6);
}

TEST_CASE("trajectory averaging") {
    SystemSpec sys = one_qubit(31.6e-6, kInf);
    Schedule sched = idle_schedule(4e-6);
    Vec plus(2);
    plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    DensityMatrix rho0 = density_from_ket(plus, {2});
    std::vector<double> times{1e-6, 2e-6, 4e-6};
    std::vector<std::pair<std::string, Mat>> obs{{"x", pauli(Pauli::X).mat}};

    SUBCASE("single trajectory without noise equals the direct path") {
        NoiseModel none;
        auto avg = average_trajectories(rho0, sys, sched, system_collapse(sys), none, 1, obs,
                                        times, {});
        auto direct = propagate_lindblad(rho0, sys, sched, system_collapse(sys), nullptr, obs,
                                         times, {});
        for (size_t i = 0; i < times.size(); ++i)
            CHECK(avg.observables["x"][i] == direct.observables["x"][i]);
    }

    SUBCASE("parallel and serial averages agree bit for bit") {
        NoiseModel noise;
        noise.kind = NoiseModel::Kind::quasistatic_gaussian;
        noise.sigma = sigma_from_t2star(4.2e-6);
        noise.seed = 5;
        EvolveOptions opts;
        opts.master_seed = 17;
        auto par = average_trajectories(rho0, sys, sched, system_collapse(sys), noise, 64, obs,
                                        times, opts);
        auto ser = average_trajectories_serial(rho0, sys, sched, system_collapse(sys), noise, 64,
                                               obs, times, opts);
        for (size_t i = 0; i < times.size(); ++i) {
            CHECK(par.observables["x"][i] == ser.observables["x"][i]);
            CHECK(par.observable_stderr["x"][i] == ser.observable_stderr["x"][i]);
        }
    }

    SUBCASE("quasi-static averaging shows the Gaussian envelope") {
        NoiseModel noise;
        noise.kind = NoiseModel::Kind::quasistatic_gaussian;
        noise.sigma = sigma_from_t2star(4.2e-6);
        noise.seed = 11;
        SystemSpec clean = one_qubit(kInf, kInf);
        auto avg = average_trajectories(rho0, clean, sched, {}, noise, 2000, obs, times, {});
        for (size_t i = 0; i < times.size(); ++i) {
            double want = std::exp(-0.5 * noise.sigma * noise.sigma * times[i] * times[i]);
            CHECK(avg.observables["x"][i] == doctest::Approx(want).epsilon(0.05));
        }
    }

    SUBCASE("standard error shrinks like 1/sqrt(n)") {
        NoiseModel noise;
        noise.kind = NoiseModel::Kind::quasistatic_gaussian;
        noise.sigma = sigma_from_t2star(4.2e-6);
        noise.seed = 23;
        auto a = average_trajectories(rho0, sys, sched, {}, noise, 256, obs, times, {});
        auto b = average_trajectories(rho0, sys, sched, {}, noise, 512, obs, times, {});
        double ratio = a.observable_stderr["x"][2] / b.observable_stderr["x"][2];
        CHECK(ratio == doctest::Approx(std::sqrt(2.0)).epsilon(0.30));
    }
}

TEST_CASE("one-over-f noise enters through piecewise-constant holds") {
    NoiseModel noise;
    noise.kind = NoiseModel::Kind::one_over_f;
    noise.amplitude = 5e4;
    noise.f_min = 1e3;
    noise.f_max = 1e6;
    noise.seed = 3;
    NoiseTrajectory traj = make_trajectory(noise, 1, 0);
    CHECK(traj.has_tones());

    SystemSpec sys = one_qubit(kInf, kInf);
    Schedule sched = idle_schedule(1e-6);
    Mat u = propagate_unitary(sys, sched, &traj);
    CHECK(is_unitary(u, 1e-9));
    // pure detuning trajectory keeps the propagator diagonal
    CHECK(std::abs(u(0, 1)) < 1e-12);
}

TEST_CASE("dimension mismatches are rejected") {
    SystemSpec sys = one_qubit(kInf, kInf);
    DensityMatrix rho0 = density_from_ket(basis_ket(4, 0), {2, 2});
    CHECK_THROWS_AS(
        propagate_lindblad(rho0, sys, idle_schedule(1e-6), {}, nullptr, {}, {}, {}),
        std::invalid_argument);
}

}  // TEST_SUITE
