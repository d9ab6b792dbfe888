#ifndef DRESSIM_SCHEDULE_HPP
#define DRESSIM_SCHEDULE_HPP

#include <optional>
#include <string>
#include <vector>

#include "dressim/model.hpp"
#include "dressim/operators.hpp"

namespace dressim {

/// One piecewise-constant control interval: per-site drive tone (or none),
/// per-site detuning, and whether the swap coupling is switched on. With
/// effective_dressed the segment evolves under the adiabatic dressed-frame
/// Hamiltonian (lambda/2) S_z1 S_z2 + sum Omega_j S_z,j instead of the bare
/// drive + swap terms.
struct Segment {
    double duration = 0.0;                         // s
    std::vector<std::optional<DriveTone>> drives;  // one entry per site
    std::vector<double> detunings;                 // rad/s per site
    bool coupling_active = false;
    bool effective_dressed = false;
};

/// Ideal zero-duration unitary applied at a segment boundary.
/// after_segment = -1 places the gate before the first segment.
struct InstantGate {
    int after_segment = -1;
    int site = 0;
    Mat unitary;
    std::string label;
};

struct Schedule {
    int n_sites = 1;
    std::vector<Segment> segments;
    std::vector<InstantGate> instant_gates;

    double total_duration() const;
    void validate() const;  // throws on negative durations / bad gate indices
};

enum class RamseyVariant { free_decay, spin_echo, one_q_dd };

/// pi/2 rotation about the equatorial axis at angle `axis` (axis 0 = X).
Mat half_pi_rotation(double axis);
Mat x_rotation(double angle);
Mat y_rotation(double angle);

/// Ramsey interferometry on one site: X_pi/2, a protected or free interval of
/// length tau, then a pi/2 analysis pulse about the axis at theta = omega_r tau.
/// one_q_dd drives continuously at drive_rabi with a pi phase flip at tau/2;
/// the drive phase is aligned with the prepared dressed state.
Schedule ramsey_sequence(RamseyVariant variant, double tau, double omega_r, double drive_rabi);

/// tau = pi / (2 |lambda|), the conditional-phase gate duration.
double uphase_duration(double lambda);

/// Two-qubit conditional-phase gate interval: coupling on, both drives on with
/// synchronized pi phase flips at tau/2. Optional frame-alignment Z rotation on
/// qubit 1 before the interval (analytically 0 in the shared rotating frame).
/// With include_corrections the single-qubit dressed-phase corrections
/// exp(i theta S_z,phi,j) that map the bare gate onto a controlled-phase gate
/// are appended as instant gates.
Schedule gate_sequence(const CouplingSpec& coupling, const DriveTone& drive1,
                       const DriveTone& drive2, double tau,
                       double z_correction_phase = 0.0,
                       bool include_corrections = false,
                       bool effective_model = false);

/// Storage interval for process tomography. Echo applies X_pi at tau/2 and at
/// tau (net identity); one_q_dd drives with a flip at tau/2. Preparation and
/// tomography rotations are applied by the tomography driver around this.
Schedule storage_sequence(double tau, std::optional<RamseyVariant> variant,
                          const DriveTone& drive);

/// Ramsey on `target` with both qubits at the gate point: coupling active,
/// both drives on with flips at tau/2, spectator prepared in a dressed state
/// (+1 for |+_phi>, -1 for |-_phi>).
Schedule two_q_dd_ramsey(double tau, int target, int spectator_sign,
                         const CouplingSpec& coupling, const DriveTone& drive_target,
                         const DriveTone& drive_spectator, double omega_r);

/// Single-qubit idle at the gate point for the duration of the two-qubit gate.
Schedule idler_sequence(double duration);

std::string schedule_to_text(const Schedule& s);
Schedule schedule_from_text(const std::string& text);

}  // namespace dressim

#endif
