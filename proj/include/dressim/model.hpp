#ifndef DRESSIM_MODEL_HPP
#define DRESSIM_MODEL_HPP

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "dressim/operators.hpp"

namespace dressim {

inline constexpr double kInfTime = std::numeric_limits<double>::infinity();

/// All energies are angular frequencies (rad/s), hbar == 1. Dynamics live in
/// the frame rotating at the common on-resonance qubit frequency.
struct QubitParams {
    double t1 = kInfTime;             // energy relaxation time, s
    double tphi = kInfTime;           // pure dephasing time, s
    double anharmonicity = 0.0;       // eta >= 0, level |2> sits at -eta, rad/s
    int levels = 2;                   // 2 or 3
    double g = 0.0;                   // coupling to the bus resonator, rad/s
};

struct DriveTone {
    double rabi = 0.0;                        // Omega, rad/s
    double phase = 0.0;                       // phi, radians
    double detuning = 0.0;                    // drive frame offset, rad/s
    std::optional<double> phase_flip_at;      // pi phase reversal time within segment, s
};

/// Qubit-qubit swap coupling, either given directly or derived from the
/// dispersive parameters lambda = -g1 g2 / delta.
struct CouplingSpec {
    std::optional<double> lambda;     // rad/s, signed
    struct Dispersive {
        double g1 = 0.0, g2 = 0.0, delta = 0.0;  // rad/s
    };
    std::optional<Dispersive> dispersive;
    double lambda_direct = 0.0;       // optional additive direct coupling, rad/s

    double lambda_value() const;
    /// Non-fatal validity checks (dispersive regime, |g| <= delta/5).
    std::optional<std::string> validity_warning() const;
};

struct EffectiveCoupling {
    double lambda;    // -g1 g2 / delta
    double stark1;    // -g1^2 / delta
    double stark2;    // -g2^2 / delta
};

/// Drive term Omega (e^{-i phi}|0><1| + e^{i phi}|1><0|) on d levels, with the
/// bosonic sqrt(k) weights on upper transitions. Flip operators follow the
/// dressed-basis-friendly convention sigma^+ = |0><1|; predictions are
/// convention independent (pinned by a unit test).
Mat drive_op(int d, double rabi, double phase);

/// S_z,phi = |+_phi><+_phi| - |-_phi><-_phi| = cos(phi) X + sin(phi) Y.
Mat sz_phi(double phi);

/// Single driven qubit in its rotating frame:
/// (K/2)(|1><1| - |0><0|) + Omega (e^{-i phi} sigma^+ + e^{i phi} sigma^-).
Operator h1(double k, const DriveTone& drive);

/// Adiabatic dressed-state Hamiltonian (K^2/(8 Omega) + Omega) S_z, expressed
/// in the dressed basis where it is diagonal.
Operator h1_eff(double k, double rabi);

/// Dressed-state phase error accumulated over [0, tau] for constant K:
/// epsilon = -K^2 tau / (4 Omega).
double h1_phase_error(double k, double rabi, double tau);

/// Two driven qubits with swap coupling (two-level sites):
/// lambda sigma1^+ sigma2^- + h.c. + sum_j Omega_j (e^{-i phi_j} sigma_j^+ + h.c.).
Operator h2(const CouplingSpec& coupling, const DriveTone& drive1, const DriveTone& drive2);

/// Effective dressed-frame Hamiltonian
/// (lambda/2) S_z,phi,1 S_z,phi,2 + sum_j Omega_j S_z,phi,j  (computational basis).
Operator h2_eff(const CouplingSpec& coupling, double rabi1, double rabi2, double phi);

/// Tripartite qubit-qubit-resonator Hamiltonian in the common qubit frame.
/// Subsystem order [q1, q2, resonator]; both qubits red-detuned from the
/// resonator by delta (the resonator term is +delta a^dag a).
Operator h_full(const QubitParams& q1, const QubitParams& q2, int resonator_levels,
                double delta, const std::vector<DriveTone>& drives,
                double lambda_direct = 0.0);

EffectiveCoupling effective_coupling(double g1, double g2, double delta);

/// Stark shift coefficient |Omega_c|^2 / Delta multiplying (|1><1| - |0><0|),
/// from an off-resonant crosstalk drive.
double crosstalk_stark_shift(double omega_c, double detuning);

/// Microwave crosstalk as a complex mixing matrix on the drive tones: the
/// effective complex amplitude on site j becomes sum_k C(j,k) Omega_k
/// e^{-i phi_k}. Detunings and flip markers stay with the site's own tone.
std::vector<DriveTone> apply_drive_crosstalk(const std::vector<DriveTone>& drives, const Mat& c);

}  // namespace dressim

#endif
