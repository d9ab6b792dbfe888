#include "dressim/schedule.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

namespace dressim {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double Schedule::total_duration() const {
    double t = 0.0;
    for (const auto& s : segments) t += s.duration;
    return t;
}

void Schedule::validate() const {
    for (const auto& s : segments) {
        if (s.duration < 0.0) throw std::invalid_argument("Schedule: negative segment duration");
        if (static_cast<int>(s.drives.size()) != n_sites ||
            static_cast<int>(s.detunings.size()) != n_sites)
            throw std::invalid_argument("Schedule: per-site arrays must match n_sites");
        for (const auto& d : s.drives) {
            if (d && d->phase_flip_at &&
                (*d->phase_flip_at < 0.0 || *d->phase_flip_at > s.duration))
                throw std::invalid_argument("Schedule: phase flip outside its segment");
        }
    }
    for (const auto& g : instant_gates) {
        if (g.after_segment < -1 || g.after_segment >= static_cast<int>(segments.size()))
            throw std::invalid_argument("Schedule: instant gate index out of range");
        if (g.site < 0 || g.site >= n_sites)
            throw std::invalid_argument("Schedule: instant gate site out of range");
    }
}

Mat half_pi_rotation(double axis) {
    Mat gen = std::cos(axis) * pauli(Pauli::X).mat + std::sin(axis) * pauli(Pauli::Y).mat;
    return matrix_exp(gen, kPi / 4.0);
}

Mat x_rotation(double angle) {
    return matrix_exp(pauli(Pauli::X).mat, angle / 2.0);
}

Mat y_rotation(double angle) {
    return matrix_exp(pauli(Pauli::Y).mat, angle / 2.0);
}

namespace {

Segment idle_segment(double duration, int n_sites) {
    Segment s;
    s.duration = duration;
    s.drives.assign(n_sites, std::nullopt);
    s.detunings.assign(n_sites, 0.0);
    return s;
}

}  // namespace

Schedule ramsey_sequence(RamseyVariant variant, double tau, double omega_r, double drive_rabi) {
    if (!(tau >= 0.0)) throw std::invalid_argument("ramsey_sequence: tau must be >= 0");
    Schedule sched;
    sched.n_sites = 1;
    sched.instant_gates.push_back({-1, 0, half_pi_rotation(0.0), "Xpi/2"});

    switch (variant) {
        case RamseyVariant::free_decay:
            sched.segments.push_back(idle_segment(tau, 1));
            break;
        case RamseyVariant::spin_echo:
            sched.segments.push_back(idle_segment(tau / 2.0, 1));
            sched.instant_gates.push_back({0, 0, x_rotation(kPi), "Xpi"});
            sched.segments.push_back(idle_segment(tau / 2.0, 1));
            break;
        case RamseyVariant::one_q_dd: {
            Segment s = idle_segment(tau, 1);
            DriveTone tone;
            tone.rabi = drive_rabi;
            tone.phase = -kPi / 2.0;  // aligned with the state prepared by Xpi/2
            tone.phase_flip_at = tau / 2.0;
            s.drives[0] = tone;
            sched.segments.push_back(std::move(s));
            break;
        }
    }

    double theta = omega_r * tau;
    sched.instant_gates.push_back({static_cast<int>(sched.segments.size()) - 1, 0,
                                   half_pi_rotation(theta), "theta_pi/2"});
    sched.validate();
    return sched;
}

double uphase_duration(double lambda) {
    if (lambda == 0.0) throw std::invalid_argument("uphase_duration: lambda must be nonzero");
    return kPi / (2.0 * std::abs(lambda));
}

Schedule gate_sequence(const CouplingSpec& coupling, const DriveTone& drive1,
                       const DriveTone& drive2, double tau, double z_correction_phase,
                       bool include_corrections, bool effective_model) {
    if (!(tau > 0.0)) throw std::invalid_argument("gate_sequence: tau must be positive");
    Schedule sched;
    sched.n_sites = 2;

    if (z_correction_phase != 0.0) {
        Mat zrot = matrix_exp(pauli(Pauli::Z).mat, z_correction_phase / 2.0);
        sched.instant_gates.push_back({-1, 0, zrot, "frame_align_z"});
    }

    Segment s = idle_segment(tau, 2);
    s.coupling_active = true;
    s.effective_dressed = effective_model;
    DriveTone t1 = drive1;
    DriveTone t2 = drive2;
    t1.phase_flip_at = tau / 2.0;
    t2.phase_flip_at = tau / 2.0;
    s.drives[0] = t1;
    s.drives[1] = t2;
    sched.segments.push_back(std::move(s));

    if (include_corrections) {
        double theta = -coupling.lambda_value() * tau / 2.0;
        for (int site = 0; site < 2; ++site) {
            double phi = site == 0 ? drive1.phase : drive2.phase;
            Mat corr = matrix_exp(sz_phi(phi), -theta);  // exp(i theta S_z,phi)
            sched.instant_gates.push_back({0, site, corr, "dressed_z_correction"});
        }
    }
    sched.validate();
    return sched;
}

Schedule storage_sequence(double tau, std::optional<RamseyVariant> variant,
                          const DriveTone& drive) {
    if (!(tau >= 0.0)) throw std::invalid_argument("storage_sequence: tau must be >= 0");
    Schedule sched;
    sched.n_sites = 1;

    if (!variant || *variant == RamseyVariant::free_decay) {
        sched.segments.push_back(idle_segment(tau, 1));
    } else if (*variant == RamseyVariant::spin_echo) {
        // X_pi at tau/2 refocuses static detuning; the closing X_pi restores
        // the frame so the ideal storage process is the identity.
        sched.segments.push_back(idle_segment(tau / 2.0, 1));
        sched.instant_gates.push_back({0, 0, x_rotation(kPi), "Xpi"});
        sched.segments.push_back(idle_segment(tau / 2.0, 1));
        sched.instant_gates.push_back({1, 0, x_rotation(kPi), "Xpi"});
    } else {
        Segment s = idle_segment(tau, 1);
        DriveTone tone = drive;
        tone.phase_flip_at = tau / 2.0;
        s.drives[0] = tone;
        sched.segments.push_back(std::move(s));
    }
    sched.validate();
    return sched;
}

Schedule two_q_dd_ramsey(double tau, int target, int spectator_sign,
                         const CouplingSpec& coupling, const DriveTone& drive_target,
                         const DriveTone& drive_spectator, double omega_r) {
    (void)coupling;
    if (target < 0 || target > 1) throw std::invalid_argument("two_q_dd_ramsey: target must be 0 or 1");
    const int spectator = 1 - target;
    Schedule sched;
    sched.n_sites = 2;

    // Both drives share the phase aligned with the state the Xpi/2 prepares.
    const double phi = -kPi / 2.0;

    sched.instant_gates.push_back({-1, target, half_pi_rotation(0.0), "Xpi/2"});
    Mat prep = dressed_basis(phi + (spectator_sign < 0 ? kPi : 0.0)).mat;
    sched.instant_gates.push_back({-1, spectator, prep, "dressed_prep"});

    Segment s = idle_segment(tau, 2);
    s.coupling_active = true;
    DriveTone tt = drive_target;
    DriveTone ts = drive_spectator;
    tt.phase = phi;
    ts.phase = phi;
    tt.phase_flip_at = tau / 2.0;
    ts.phase_flip_at = tau / 2.0;
    s.drives[target] = tt;
    s.drives[spectator] = ts;
    sched.segments.push_back(std::move(s));

    sched.instant_gates.push_back({0, target, half_pi_rotation(omega_r * tau), "theta_pi/2"});
    sched.validate();
    return sched;
}

Schedule idler_sequence(double duration) {
    if (!(duration > 0.0)) throw std::invalid_argument("idler_sequence: duration must be positive");
    Schedule sched;
    sched.n_sites = 1;
    sched.segments.push_back(idle_segment(duration, 1));
    sched.validate();
    return sched;
}

// --- serialization: durations in ns, Rabi/detunings in MHz, phases in rad ---

namespace {

nlohmann::json mat_to_json(const Mat& m) {
    nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json rrow = nlohmann::json::array(), irow = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            rrow.push_back(m(i, j).real());
            irow.push_back(m(i, j).imag());
        }
        re.push_back(rrow);
        im.push_back(irow);
    }
    return {{"re", re}, {"im", im}};
}

Mat mat_from_json(const nlohmann::json& j) {
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    Mat m(re.size(), re.empty() ? 0 : re[0].size());
    for (size_t i = 0; i < re.size(); ++i)
        for (size_t k = 0; k < re[i].size(); ++k)
            m(i, k) = cx(re[i][k].get<double>(), im[i][k].get<double>());
    return m;
}

}  // namespace

std::string schedule_to_text(const Schedule& sched) {
    nlohmann::json j;
    j["n_sites"] = sched.n_sites;
    j["segments"] = nlohmann::json::array();
    for (const auto& s : sched.segments) {
        nlohmann::json js;
        js["duration_ns"] = s.duration * 1e9;
        js["coupling_active"] = s.coupling_active;
        if (s.effective_dressed) js["effective_dressed"] = true;
        js["detunings_mhz"] = nlohmann::json::array();
        for (double d : s.detunings) js["detunings_mhz"].push_back(d / (kTwoPi * 1e6));
        js["drives"] = nlohmann::json::array();
        for (const auto& d : s.drives) {
            if (!d) {
                js["drives"].push_back(nullptr);
            } else {
                nlohmann::json jd;
                jd["rabi_mhz"] = d->rabi / (kTwoPi * 1e6);
                jd["phase_rad"] = d->phase;
                jd["detuning_mhz"] = d->detuning / (kTwoPi * 1e6);
                if (d->phase_flip_at) jd["phase_flip_at_ns"] = *d->phase_flip_at * 1e9;
                js["drives"].push_back(jd);
            }
        }
        j["segments"].push_back(js);
    }
    j["instant_gates"] = nlohmann::json::array();
    for (const auto& g : sched.instant_gates) {
        nlohmann::json jg;
        jg["after_segment"] = g.after_segment;
        jg["site"] = g.site;
        jg["label"] = g.label;
        jg["unitary"] = mat_to_json(g.unitary);
        j["instant_gates"].push_back(jg);
    }
    return j.dump(2);
}

Schedule schedule_from_text(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    Schedule sched;
    sched.n_sites = j.at("n_sites").get<int>();
    for (const auto& js : j.at("segments")) {
        Segment s;
        s.duration = js.at("duration_ns").get<double>() * 1e-9;
        s.coupling_active = js.at("coupling_active").get<bool>();
        s.effective_dressed = js.value("effective_dressed", false);
        for (const auto& d : js.at("detunings_mhz")) s.detunings.push_back(d.get<double>() * kTwoPi * 1e6);
        for (const auto& jd : js.at("drives")) {
            if (jd.is_null()) {
                s.drives.push_back(std::nullopt);
            } else {
                DriveTone t;
                t.rabi = jd.at("rabi_mhz").get<double>() * kTwoPi * 1e6;
                t.phase = jd.at("phase_rad").get<double>();
                t.detuning = jd.at("detuning_mhz").get<double>() * kTwoPi * 1e6;
                if (jd.contains("phase_flip_at_ns"))
                    t.phase_flip_at = jd.at("phase_flip_at_ns").get<double>() * 1e-9;
                s.drives.push_back(t);
            }
        }
        sched.segments.push_back(std::move(s));
    }
    for (const auto& jg : j.at("instant_gates")) {
        InstantGate g;
        g.after_segment = jg.at("after_segment").get<int>();
        g.site = jg.at("site").get<int>();
        g.label = jg.at("label").get<std::string>();
        g.unitary = mat_from_json(jg.at("unitary"));
        sched.instant_gates.push_back(std::move(g));
    }
    sched.validate();
    return sched;
}

}  // namespace dressim
