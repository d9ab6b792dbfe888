#ifndef DRESSIM_NOISE_HPP
#define DRESSIM_NOISE_HPP

#include <cstdint>
#include <vector>

namespace dressim {

/// Stochastic qubit-frequency detuning K_j(t). Samplers are stateless given
/// (seed, trajectory index, site), so trajectories are reproducible under any
/// execution order.
struct NoiseModel {
    enum class Kind { none, quasistatic_gaussian, one_over_f };
    Kind kind = Kind::none;
    double sigma = 0.0;       // quasi-static std dev, rad/s
    double amplitude = 0.0;   // 1/f PSD amplitude A in A^2/f, rad/s
    double f_min = 100.0;     // Hz
    double f_max = 1e6;       // Hz
    std::uint64_t seed = 0;
};

/// sigma = sqrt(2)/T2*, so the trajectory-averaged Ramsey envelope decays as
/// exp(-sigma^2 tau^2 / 2) = exp(-(tau/T2*)^2).
double sigma_from_t2star(double t2star);

/// n i.i.d. Gaussian draws, mean 0, std sigma (one per trajectory index).
std::vector<double> sample_quasistatic(const NoiseModel& model, int n);

double quasistatic_draw(const NoiseModel& model, std::uint64_t traj_index, int site);

/// Sum of random-phase sinusoids on a log-spaced frequency grid, 40 tones per
/// decade, with tone variances integrating the A^2/f band.
struct OneOverFTones {
    std::vector<double> freq;   // Hz
    std::vector<double> amp;    // rad/s
    std::vector<double> phase;  // radians

    double eval(double t) const;
};

OneOverFTones make_one_over_f(const NoiseModel& model, std::uint64_t traj_index, int site);

/// Trajectory sampled on a uniform grid: value i covers [i dt, (i+1) dt).
std::vector<double> sample_one_over_f(const NoiseModel& model, double dt, int steps,
                                      std::uint64_t traj_index = 0, int site = 0);

/// Deterministic stream-splitting hash for (seed, trajectory, site).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t traj_index, std::uint64_t site);

}  // namespace dressim

#endif
