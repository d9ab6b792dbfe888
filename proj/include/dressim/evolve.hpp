#ifndef DRESSIM_EVOLVE_HPP
#define DRESSIM_EVOLVE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dressim/model.hpp"
#include "dressim/noise.hpp"
#include "dressim/operators.hpp"
#include "dressim/schedule.hpp"

namespace dressim {

/// The physical system a schedule acts on: one or two qubits (optionally
/// three-level) plus the swap coupling used when a segment activates it.
struct SystemSpec {
    std::vector<QubitParams> qubits;
    CouplingSpec coupling;

    std::vector<int> dims() const;
    int dim() const { return product_of(dims()); }
};

/// One stochastic detuning realization, per site: a constant part plus an
/// optional tone sum held piecewise-constant on a sub-step grid.
struct NoiseTrajectory {
    std::vector<double> constant_k;       // rad/s per site; empty means zero
    std::vector<OneOverFTones> tones;     // per site; empty means none
    double hold_dt = 1e-9;                // s

    bool has_tones() const { return !tones.empty(); }
    double k(int site, double t) const;
};

NoiseTrajectory make_trajectory(const NoiseModel& model, int n_sites, std::uint64_t traj_index);

/// Collapse operators with rates folded in (L = sqrt(rate) op), embedded on
/// the full space.
struct LindbladSpec {
    std::vector<Mat> ops;
};

/// Relaxation at rate 1/T1 (sqrt(k)-weighted lowering) plus pure dephasing at
/// rate 1/(2 Tphi) on I - 2n, so the 0-1 coherence decays at 1/(2T1) + 1/Tphi.
LindbladSpec collapse_ops(const QubitParams& params, int site, const std::vector<int>& dims);
LindbladSpec system_collapse(const SystemSpec& system);

struct EvolveOptions {
    double rtol = 1e-8;
    double atol = 1e-12;
    double max_step = 1e-6;        // s
    std::uint64_t master_seed = 0;
    bool parallel = true;          // trajectory-level OpenMP
    bool keep_states = false;
};

struct EvolutionResult {
    std::vector<double> times;
    std::map<std::string, std::vector<double>> observables;
    std::map<std::string, std::vector<double>> observable_stderr;  // trajectory averaging only
    std::vector<DensityMatrix> states;       // populated when keep_states
    std::optional<DensityMatrix> final_state;
    double max_trace_err = 0.0;
    double max_herm_err = 0.0;
    double min_eigenvalue = 0.0;
};

/// Ordered product of segment propagators and instant gates; unitary within
/// 1e-9 for Hermitian segment Hamiltonians.
Mat propagate_unitary(const SystemSpec& system, const Schedule& schedule,
                      const NoiseTrajectory* traj = nullptr);

/// Integrates the Lindblad master equation with an adaptive Dormand-Prince
/// 4(5) pair on the density matrix, forcing step boundaries at segment edges,
/// drive phase flips, noise hold boundaries, and sample times.
EvolutionResult propagate_lindblad(const DensityMatrix& rho0, const SystemSpec& system,
                                   const Schedule& schedule, const LindbladSpec& lindblad,
                                   const NoiseTrajectory* traj,
                                   const std::vector<std::pair<std::string, Mat>>& observables,
                                   const std::vector<double>& sample_times,
                                   const EvolveOptions& opts = {});

/// Mean of observables over independent noise realizations. Trajectory i is
/// seeded by (master_seed, i); the reduction is pairwise, so results are
/// identical across any degree of parallelism.
EvolutionResult average_trajectories(const DensityMatrix& rho0, const SystemSpec& system,
                                     const Schedule& schedule, const LindbladSpec& lindblad,
                                     const NoiseModel& noise, int n_traj,
                                     const std::vector<std::pair<std::string, Mat>>& observables,
                                     const std::vector<double>& sample_times,
                                     const EvolveOptions& opts = {});

/// Plain-loop reference implementation; must agree bit-for-bit with the
/// parallel version (exercised by tests and the benchmark).
EvolutionResult average_trajectories_serial(const DensityMatrix& rho0, const SystemSpec& system,
                                            const Schedule& schedule, const LindbladSpec& lindblad,
                                            const NoiseModel& noise, int n_traj,
                                            const std::vector<std::pair<std::string, Mat>>& observables,
                                            const std::vector<double>& sample_times,
                                            const EvolveOptions& opts = {});

/// Hamiltonian of one schedule segment at absolute time t (phase flips and
/// noise applied). Exposed for tests.
Mat segment_hamiltonian(const SystemSpec& system, const Segment& seg, double t_in_segment,
                        const NoiseTrajectory* traj, double t_abs);

}  // namespace dressim

#endif
