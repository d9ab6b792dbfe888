// Compares the OpenMP trajectory/tomography kernels against the serial
// reference paths and verifies that the results agree bit for bit.

#include <chrono>
#include <cstdio>
#include <cstring>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dressim/evolve.hpp"
#include "dressim/experiments.hpp"
#include "dressim/tomo.hpp"

using namespace dressim;

namespace {

double now() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

}  // namespace

int main(int argc, char** argv) {
    int n_traj = 768;
    if (argc > 1) n_traj = std::atoi(argv[1]);

#ifdef _OPENMP
    std::printf("threads: %d, trajectories: %d\n", omp_get_max_threads(), n_traj);
#else
    std::printf("threads: 1 (no OpenMP), trajectories: %d\n", n_traj);
#endif

    // workload 1: quasi-static trajectory averaging of a Ramsey idle
    {
        SystemSpec sys{{QubitParams{31.6e-6, 20.2e-6, 0.0, 2, 0.0}}, {}};
        Schedule sched;
        sched.n_sites = 1;
        Segment seg;
        seg.duration = 6e-6;
        seg.drives = {std::nullopt};
        seg.detunings = {0.0};
        sched.segments.push_back(seg);

        NoiseModel noise;
        noise.kind = NoiseModel::Kind::quasistatic_gaussian;
        noise.sigma = sigma_from_t2star(4.2e-6);
        noise.seed = 9;

        Vec plus(2);
        plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
        DensityMatrix rho0 = density_from_ket(plus, {2});
        std::vector<double> times;
        for (int i = 1; i <= 48; ++i) times.push_back(6e-6 * i / 48.0);
        std::vector<std::pair<std::string, Mat>> obs{{"x", pauli(Pauli::X).mat}};
        LindbladSpec lb = system_collapse(sys);

        double t0 = now();
        auto serial = average_trajectories_serial(rho0, sys, sched, lb, noise, n_traj, obs,
                                                  times, {});
        double t1 = now();
        auto parallel = average_trajectories(rho0, sys, sched, lb, noise, n_traj, obs, times, {});
        double t2 = now();

        bool identical = true;
        for (size_t i = 0; i < times.size(); ++i)
            identical = identical && serial.observables["x"][i] == parallel.observables["x"][i];
        std::printf("trajectory averaging:  serial %6.2f s   openmp %6.2f s   speedup %.2fx   %s\n",
                    t1 - t0, t2 - t1, (t1 - t0) / (t2 - t1),
                    identical ? "bit-identical" : "MISMATCH");
        if (!identical) return 1;
    }

    // workload 2: two-qubit gate process tomography (36 preparations)
    {
        Scenario s = load_fixture("q1_q2_gate");
        s.gate.model = "full";
        double tau = uphase_duration(s.coupling.lambda_value());
        Channel ch = gate_channel(s, tau);

        double t0 = now();
        ChiMatrix serial = qpt(ch, 2, std::nullopt, 0, false);
        double t1 = now();
        ChiMatrix parallel = qpt(ch, 2, std::nullopt, 0, true);
        double t2 = now();

        bool identical = (serial.mat - parallel.mat).norm() == 0.0;
        std::printf("gate tomography:       serial %6.2f s   openmp %6.2f s   speedup %.2fx   %s\n",
                    t1 - t0, t2 - t1, (t1 - t0) / (t2 - t1),
                    identical ? "bit-identical" : "MISMATCH");
        if (!identical) return 1;
    }
    return 0;
}
