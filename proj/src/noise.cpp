#include "dressim/noise.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace dressim {

double sigma_from_t2star(double t2star) {
    if (!(t2star > 0.0)) throw std::invalid_argument("sigma_from_t2star: t2star must be positive");
    return std::sqrt(2.0) / t2star;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t traj_index, std::uint64_t site) {
    // splitmix64 over the packed tuple
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (traj_index + 1) + 0xbf58476d1ce4e5b9ULL * (site + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double quasistatic_draw(const NoiseModel& model, std::uint64_t traj_index, int site) {
    if (model.kind != NoiseModel::Kind::quasistatic_gaussian)
        throw std::invalid_argument("quasistatic_draw: noise kind is not quasistatic_gaussian");
    std::mt19937_64 eng(mix_seed(model.seed, traj_index, static_cast<std::uint64_t>(site)));
    std::normal_distribution<double> gauss(0.0, 1.0);
    return model.sigma * gauss(eng);
}

std::vector<double> sample_quasistatic(const NoiseModel& model, int n) {
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = quasistatic_draw(model, i, 0);
    return out;
}

double OneOverFTones::eval(double t) const {
    double k = 0.0;
    for (size_t i = 0; i < freq.size(); ++i)
        k += amp[i] * std::cos(2.0 * std::numbers::pi * freq[i] * t + phase[i]);
    return k;
}

OneOverFTones make_one_over_f(const NoiseModel& model, std::uint64_t traj_index, int site) {
    if (model.kind != NoiseModel::Kind::one_over_f)
        throw std::invalid_argument("make_one_over_f: noise kind is not one_over_f");
    if (!(model.f_min > 0.0) || !(model.f_max > model.f_min))
        throw std::invalid_argument("make_one_over_f: need 0 < f_min < f_max");

    constexpr double tones_per_decade = 40.0;
    const double decades = std::log10(model.f_max / model.f_min);
    const int n_tones = std::max(1, static_cast<int>(std::ceil(decades * tones_per_decade)));
    const double dlog = decades / n_tones;  // log10 width per tone

    OneOverFTones tones;
    tones.freq.resize(n_tones);
    tones.amp.resize(n_tones);
    tones.phase.resize(n_tones);

    std::mt19937_64 eng(mix_seed(model.seed ^ 0x5bf03635ULL, traj_index, static_cast<std::uint64_t>(site)));
    std::uniform_real_distribution<double> uni(0.0, 2.0 * std::numbers::pi);

    for (int i = 0; i < n_tones; ++i) {
        double lo = std::log10(model.f_min) + i * dlog;
        tones.freq[i] = std::pow(10.0, lo + 0.5 * dlog);
        // variance of tone = integral of A^2/f over its band = A^2 ln(10) dlog
        double var = model.amplitude * model.amplitude * std::numbers::ln10 * dlog;
        tones.amp[i] = std::sqrt(2.0 * var);
        tones.phase[i] = uni(eng);
    }
    return tones;
}

std::vector<double> sample_one_over_f(const NoiseModel& model, double dt, int steps,
                                      std::uint64_t traj_index, int site) {
    auto tones = make_one_over_f(model, traj_index, site);
    std::vector<double> out(steps);
    for (int i = 0; i < steps; ++i) out[i] = tones.eval((i + 0.5) * dt);
    return out;
}

}  // namespace dressim
