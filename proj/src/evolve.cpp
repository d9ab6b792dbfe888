#include "dressim/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dressim {

namespace {
constexpr double kPi = std::numbers::pi;
}

std::vector<int> SystemSpec::dims() const {
    std::vector<int> d;
    d.reserve(qubits.size());
    for (const auto& q : qubits) d.push_back(q.levels);
    return d;
}

double NoiseTrajectory::k(int site, double t) const {
    double v = 0.0;
    if (site < static_cast<int>(constant_k.size())) v += constant_k[site];
    if (site < static_cast<int>(tones.size())) {
        // piecewise-constant hold: evaluate at the hold-window midpoint
        double w = std::floor(t / hold_dt);
        v += tones[site].eval((w + 0.5) * hold_dt);
    }
    return v;
}

NoiseTrajectory make_trajectory(const NoiseModel& model, int n_sites, std::uint64_t traj_index) {
    NoiseTrajectory traj;
    switch (model.kind) {
        case NoiseModel::Kind::none:
            break;
        case NoiseModel::Kind::quasistatic_gaussian:
            traj.constant_k.resize(n_sites);
            for (int s = 0; s < n_sites; ++s)
                traj.constant_k[s] = quasistatic_draw(model, traj_index, s);
            break;
        case NoiseModel::Kind::one_over_f:
            traj.tones.reserve(n_sites);
            for (int s = 0; s < n_sites; ++s)
                traj.tones.push_back(make_one_over_f(model, traj_index, s));
            break;
    }
    return traj;
}

LindbladSpec collapse_ops(const QubitParams& params, int site, const std::vector<int>& dims) {
    if (!(params.t1 > 0.0) || !(params.tphi > 0.0))
        throw std::invalid_argument("collapse_ops: T1 and Tphi must be positive");
    LindbladSpec spec;
    const int d = dims.at(site);
    if (std::isfinite(params.t1)) {
        Mat low = ladder(d).lowering.mat;
        spec.ops.push_back(std::sqrt(1.0 / params.t1) * embed(low, site, dims));
    }
    if (std::isfinite(params.tphi)) {
        spec.ops.push_back(std::sqrt(1.0 / (2.0 * params.tphi)) * embed(dephasing_op(d), site, dims));
    }
    return spec;
}

LindbladSpec system_collapse(const SystemSpec& system) {
    LindbladSpec all;
    auto dims = system.dims();
    for (int s = 0; s < static_cast<int>(system.qubits.size()); ++s) {
        auto part = collapse_ops(system.qubits[s], s, dims);
        for (auto& op : part.ops) all.ops.push_back(std::move(op));
    }
    return all;
}

namespace {

// Swap coupling lambda (b1^dag b2 + h.c.) generalized to the site level counts.
Mat coupling_term(const SystemSpec& system, const std::vector<int>& dims) {
    if (dims.size() != 2)
        throw std::invalid_argument("coupling_active requires a two-site system");
    double lam = system.coupling.lambda_value();
    Mat sw = embed(ladder(dims[0]).raising.mat, 0, dims) *
             embed(ladder(dims[1]).lowering.mat, 1, dims);
    return lam * (sw + Mat(sw.adjoint()));
}

struct Window {
    double t0, t1;   // absolute times
    Mat h;
};

struct GateEvent {
    double t;        // absolute time
    Mat u;           // full-space unitary
};

// Flatten a schedule into constant-Hamiltonian windows and gate events.
struct Compiled {
    std::vector<Window> windows;
    std::vector<GateEvent> gates;
    double total = 0.0;
};

Compiled compile(const SystemSpec& system, const Schedule& schedule, const NoiseTrajectory* traj) {
    schedule.validate();
    auto dims = system.dims();
    if (schedule.n_sites != static_cast<int>(dims.size()))
        throw std::invalid_argument("schedule/system site count mismatch");

    Compiled out;
    double t = 0.0;
    auto emit_gates = [&](int boundary) {
        for (const auto& g : schedule.instant_gates)
            if (g.after_segment == boundary)
                out.gates.push_back({t, embed(g.unitary, g.site, dims)});
    };

    emit_gates(-1);
    for (int si = 0; si < static_cast<int>(schedule.segments.size()); ++si) {
        const Segment& seg = schedule.segments[si];
        if (seg.duration > 0.0) {
            // boundaries: segment edges, each drive's phase flip, noise holds
            std::vector<double> cuts{0.0, seg.duration};
            for (const auto& d : seg.drives)
                if (d && d->phase_flip_at && *d->phase_flip_at > 0.0 &&
                    *d->phase_flip_at < seg.duration)
                    cuts.push_back(*d->phase_flip_at);
            if (traj && traj->has_tones()) {
                double dt = traj->hold_dt;
                for (double x = std::ceil(t / dt) * dt - t; x < seg.duration; x += dt)
                    if (x > 0.0) cuts.push_back(x);
            }
            std::sort(cuts.begin(), cuts.end());
            cuts.erase(std::unique(cuts.begin(), cuts.end(),
                                   [](double a, double b) { return std::abs(a - b) < 1e-18; }),
                       cuts.end());
            for (size_t c = 0; c + 1 < cuts.size(); ++c) {
                double mid = 0.5 * (cuts[c] + cuts[c + 1]);
                Mat h = segment_hamiltonian(system, seg, mid, traj, t + mid);
                if (!h.allFinite())
                    throw std::invalid_argument("segment Hamiltonian has non-finite entries");
                out.windows.push_back({t + cuts[c], t + cuts[c + 1], std::move(h)});
            }
        }
        t += seg.duration;
        emit_gates(si);
    }
    out.total = t;
    return out;
}

}  // namespace

Mat segment_hamiltonian(const SystemSpec& system, const Segment& seg, double t_in_segment,
                        const NoiseTrajectory* traj, double t_abs) {
    auto dims = system.dims();
    const int d = product_of(dims);
    Mat h = Mat::Zero(d, d);

    auto flipped_phase = [&](const DriveTone& drive) {
        double phase = drive.phase;
        if (drive.phase_flip_at && t_in_segment >= *drive.phase_flip_at) phase += kPi;
        return phase;
    };

    if (seg.effective_dressed) {
        // adiabatic dressed-frame model (two-level sites only)
        if (dims.size() != 2 || dims[0] != 2 || dims[1] != 2)
            throw std::invalid_argument("effective_dressed needs two two-level sites");
        if (!seg.drives[0] || !seg.drives[1])
            throw std::invalid_argument("effective_dressed needs both drives set");
        Mat sz1 = sz_phi(flipped_phase(*seg.drives[0]));
        Mat sz2 = sz_phi(flipped_phase(*seg.drives[1]));
        if (seg.coupling_active)
            h += (system.coupling.lambda_value() / 2.0) * kron(sz1, sz2);
        h += seg.drives[0]->rabi * embed(sz1, 0, dims) +
             seg.drives[1]->rabi * embed(sz2, 1, dims);
        for (int s = 0; s < 2; ++s) {
            double det = seg.detunings.empty() ? 0.0 : seg.detunings[s];
            if (traj) det += traj->k(s, t_abs);
            if (det != 0.0) h += det * embed(number_op(2), s, dims);
        }
        return h;
    }

    for (int s = 0; s < static_cast<int>(dims.size()); ++s) {
        double det = seg.detunings.empty() ? 0.0 : seg.detunings[s];
        if (traj) det += traj->k(s, t_abs);
        const auto& drive = seg.drives[s];
        if (drive) {
            h += embed(drive_op(dims[s], drive->rabi, flipped_phase(*drive)), s, dims);
            det += drive->detuning;
        }
        if (det != 0.0) h += det * embed(number_op(dims[s]), s, dims);
        double eta = system.qubits[s].anharmonicity;
        if (dims[s] > 2 && eta != 0.0) {
            Mat n = number_op(dims[s]);
            h += embed(Mat(-(eta / 2.0) * n * (n - identity(dims[s]))), s, dims);
        }
    }
    if (seg.coupling_active) h += coupling_term(system, dims);
    return h;
}

Mat propagate_unitary(const SystemSpec& system, const Schedule& schedule,
                      const NoiseTrajectory* traj) {
    auto compiled = compile(system, schedule, traj);
    const int d = system.dim();
    Mat u = Mat::Identity(d, d);

    // merge windows and gates in time order; gates at a boundary go after the
    // window ending there, in listing order
    size_t wi = 0, gi = 0;
    while (wi < compiled.windows.size() || gi < compiled.gates.size()) {
        bool take_gate;
        if (gi >= compiled.gates.size()) take_gate = false;
        else if (wi >= compiled.windows.size()) take_gate = true;
        else take_gate = compiled.gates[gi].t <= compiled.windows[wi].t0 + 1e-18;
        if (take_gate) {
            u = compiled.gates[gi].u * u;
            ++gi;
        } else {
            const auto& w = compiled.windows[wi];
            u = matrix_exp(w.h, w.t1 - w.t0) * u;
            ++wi;
        }
    }
    return u;
}

namespace {

// Dormand-Prince 5(4) coefficients
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

class LindbladRhs {
  public:
    explicit LindbladRhs(const std::vector<Mat>& collapse, int dim) {
        for (const auto& l : collapse) {
            ls_.push_back(l);
            ldag_.push_back(l.adjoint());
            ldl_.push_back(l.adjoint() * l);
        }
        tmp_.resize(dim, dim);
    }

    void set_hamiltonian(const Mat* h) { h_ = h; }

    void operator()(const Mat& rho, Mat& out) {
        tmp_.noalias() = (*h_) * rho;
        out.noalias() = -I_UNIT * tmp_;
        tmp_.noalias() = rho * (*h_);
        out.noalias() += I_UNIT * tmp_;
        for (size_t k = 0; k < ls_.size(); ++k) {
            tmp_.noalias() = ls_[k] * rho;
            out.noalias() += tmp_ * ldag_[k];
            tmp_.noalias() = ldl_[k] * rho;
            out.noalias() -= 0.5 * tmp_;
            tmp_.noalias() = rho * ldl_[k];
            out.noalias() -= 0.5 * tmp_;
        }
    }

    double timescale_bound(const Mat& h) const {
        double s = h.cwiseAbs().rowwise().sum().maxCoeff();
        for (const auto& m : ldl_) s += m.cwiseAbs().rowwise().sum().maxCoeff();
        return s;
    }

  private:
    const Mat* h_ = nullptr;
    std::vector<Mat> ls_, ldag_, ldl_;
    Mat tmp_;
};

struct Stepper {
    explicit Stepper(int d) {
        for (auto* m : {&k1, &k2, &k3, &k4, &k5, &k6, &k7, &ytmp, &y5}) m->resize(d, d);
        first = true;
    }

    // one accepted RK step from t with suggested size h (already clamped to
    // the window); returns the size actually used and updates h_next
    double step(LindbladRhs& f, Mat& y, double h, double rtol, double atol, double& h_next) {
        while (true) {
            if (first) {
                f(y, k1);
                first = false;
            }
            ytmp = y + h * (a21 * k1);
            f(ytmp, k2);
            ytmp = y + h * (a31 * k1 + a32 * k2);
            f(ytmp, k3);
            ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
            f(ytmp, k4);
            ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
            f(ytmp, k5);
            ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
            f(ytmp, k6);
            y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            f(y5, k7);

            double err_raw =
                (h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7)).norm();
            double scale = atol + rtol * std::max(y.norm(), y5.norm());
            double err = err_raw / scale;

            if (err <= 1.0) {
                y.swap(y5);
                k1.swap(k7);  // FSAL
                double grow = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
                h_next = h * std::clamp(grow, 0.2, 5.0);
                return h;
            }
            double shrink = std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
            h *= shrink;
            if (!(h > 1e-22))
                throw std::runtime_error("lindblad integrator: step size underflow");
        }
    }

    void invalidate_fsal() { first = true; }

    Mat k1, k2, k3, k4, k5, k6, k7, ytmp, y5;
    bool first;
};

}  // namespace

EvolutionResult propagate_lindblad(const DensityMatrix& rho0, const SystemSpec& system,
                                   const Schedule& schedule, const LindbladSpec& lindblad,
                                   const NoiseTrajectory* traj,
                                   const std::vector<std::pair<std::string, Mat>>& observables,
                                   const std::vector<double>& sample_times,
                                   const EvolveOptions& opts) {
    const int d = system.dim();
    if (rho0.dim() != d) throw std::invalid_argument("propagate_lindblad: state dimension mismatch");
    for (const auto& [name, op] : observables)
        if (op.rows() != d) throw std::invalid_argument("propagate_lindblad: observable dimension mismatch");

    auto compiled = compile(system, schedule, traj);
    std::vector<double> samples = sample_times;
    std::sort(samples.begin(), samples.end());

    EvolutionResult res;
    res.min_eigenvalue = 1.0;
    for (const auto& [name, op] : observables) res.observables[name] = {};

    Mat rho = rho0.mat;
    LindbladRhs rhs(lindblad.ops, d);
    Stepper stepper(d);
    double h_next = opts.max_step;
    const double tiny = 1e-15 * std::max(1.0, compiled.total);

    auto record = [&](double t) {
        res.times.push_back(t);
        for (const auto& [name, op] : observables)
            res.observables[name].push_back(std::real((op * rho).trace()));
        if (opts.keep_states) res.states.emplace_back(rho, system.dims());
        res.max_trace_err = std::max(res.max_trace_err, std::abs(rho.trace() - cx(1.0)));
        res.max_herm_err = std::max(res.max_herm_err, (rho - Mat(rho.adjoint())).norm());
        res.min_eigenvalue = std::min(res.min_eigenvalue, min_eigenvalue(Mat(0.5 * (rho + rho.adjoint()))));
    };

    size_t si = 0;  // next sample
    size_t wi = 0;  // next window
    size_t gi = 0;  // next gate

    // Samples at a boundary are taken after the gates at that boundary. The
    // compile() walk orders gates after the window ending at their time and
    // before the window starting there; the merge below preserves that.
    while (wi < compiled.windows.size() || gi < compiled.gates.size()) {
        bool take_gate;
        if (gi >= compiled.gates.size()) take_gate = false;
        else if (wi >= compiled.windows.size()) take_gate = true;
        else take_gate = compiled.gates[gi].t <= compiled.windows[wi].t0 + tiny;

        if (take_gate) {
            while (si < samples.size() && samples[si] < compiled.gates[gi].t - tiny) {
                record(samples[si]);
                ++si;
            }
            rho = compiled.gates[gi].u * rho * compiled.gates[gi].u.adjoint();
            stepper.invalidate_fsal();
            ++gi;
            continue;
        }

        const Window& w = compiled.windows[wi];
        while (si < samples.size() && samples[si] <= w.t0 + tiny) {
            record(samples[si]);
            ++si;
        }
        rhs.set_hamiltonian(&w.h);
        stepper.invalidate_fsal();
        double bound = rhs.timescale_bound(w.h);
        double h_cap = bound > 0.0 ? 2.0 / bound : w.t1 - w.t0;
        double t = w.t0;
        while (t < w.t1 - tiny) {
            double target = w.t1;
            if (si < samples.size() && samples[si] > t + tiny && samples[si] < target)
                target = samples[si];
            double h = std::min({h_next, opts.max_step, h_cap, target - t});
            double used = stepper.step(rhs, rho, h, opts.rtol, opts.atol, h_next);
            t += used;
            while (si < samples.size() && samples[si] <= t + tiny && samples[si] < w.t1 - tiny) {
                record(samples[si]);
                ++si;
            }
        }
        ++wi;
    }

    // remaining samples (at or beyond the schedule end; state is final)
    while (si < samples.size()) {
        record(samples[si]);
        ++si;
    }

    res.final_state = DensityMatrix(rho, system.dims());
    return res;
}

namespace {

// deterministic pairwise reduction over trajectory-indexed slots
std::vector<double> pairwise_sum(std::vector<std::vector<double>> rows) {
    if (rows.empty()) return {};
    size_t n = rows.size();
    while (n > 1) {
        size_t half = (n + 1) / 2;
        for (size_t i = 0; i + half < n; ++i) {
            auto& a = rows[i];
            const auto& b = rows[i + half];
            for (size_t j = 0; j < a.size(); ++j) a[j] += b[j];
        }
        n = half;
    }
    return rows[0];
}

}  // namespace

static EvolutionResult average_impl(const DensityMatrix& rho0, const SystemSpec& system,
                                    const Schedule& schedule, const LindbladSpec& lindblad,
                                    const NoiseModel& noise, int n_traj,
                                    const std::vector<std::pair<std::string, Mat>>& observables,
                                    const std::vector<double>& sample_times,
                                    const EvolveOptions& opts, bool parallel) {
    if (n_traj < 1) throw std::invalid_argument("average_trajectories: n_traj must be >= 1");
    const int n_sites = static_cast<int>(system.qubits.size());

    std::vector<std::vector<std::vector<double>>> per_obs(observables.size());
    for (auto& v : per_obs) v.resize(n_traj);
    std::vector<double> trace_errs(n_traj, 0.0), herm_errs(n_traj, 0.0), min_eigs(n_traj, 1.0);

    EvolveOptions traj_opts = opts;
    traj_opts.keep_states = false;

    auto run_one = [&](int i) {
        NoiseTrajectory traj = make_trajectory(noise, n_sites, mix_seed(opts.master_seed, i, 0xa11));
        auto r = propagate_lindblad(rho0, system, schedule, lindblad,
                                    noise.kind == NoiseModel::Kind::none ? nullptr : &traj,
                                    observables, sample_times, traj_opts);
        for (size_t o = 0; o < observables.size(); ++o)
            per_obs[o][i] = std::move(r.observables[observables[o].first]);
        trace_errs[i] = r.max_trace_err;
        herm_errs[i] = r.max_herm_err;
        min_eigs[i] = r.min_eigenvalue;
    };

    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < n_traj; ++i) run_one(i);
    } else {
        for (int i = 0; i < n_traj; ++i) run_one(i);
    }

    EvolutionResult out;
    out.times = sample_times;
    std::sort(out.times.begin(), out.times.end());
    out.min_eigenvalue = 1.0;
    for (int i = 0; i < n_traj; ++i) {
        out.max_trace_err = std::max(out.max_trace_err, trace_errs[i]);
        out.max_herm_err = std::max(out.max_herm_err, herm_errs[i]);
        out.min_eigenvalue = std::min(out.min_eigenvalue, min_eigs[i]);
    }

    for (size_t o = 0; o < observables.size(); ++o) {
        auto mean = pairwise_sum(per_obs[o]);
        for (auto& v : mean) v /= n_traj;
        if (n_traj > 1) {
            std::vector<std::vector<double>> sq(per_obs[o].size());
            for (int i = 0; i < n_traj; ++i) {
                sq[i].resize(mean.size());
                for (size_t j = 0; j < mean.size(); ++j) {
                    double dlt = per_obs[o][i][j] - mean[j];
                    sq[i][j] = dlt * dlt;
                }
            }
            auto var = pairwise_sum(std::move(sq));
            std::vector<double> se(var.size());
            for (size_t j = 0; j < var.size(); ++j)
                se[j] = std::sqrt(var[j] / (n_traj - 1.0) / n_traj);
            out.observable_stderr[observables[o].first] = std::move(se);
        }
        out.observables[observables[o].first] = std::move(mean);
    }
    return out;
}

EvolutionResult average_trajectories(const DensityMatrix& rho0, const SystemSpec& system,
                                     const Schedule& schedule, const LindbladSpec& lindblad,
                                     const NoiseModel& noise, int n_traj,
                                     const std::vector<std::pair<std::string, Mat>>& observables,
                                     const std::vector<double>& sample_times,
                                     const EvolveOptions& opts) {
    return average_impl(rho0, system, schedule, lindblad, noise, n_traj, observables,
                        sample_times, opts, opts.parallel);
}

EvolutionResult average_trajectories_serial(const DensityMatrix& rho0, const SystemSpec& system,
                                            const Schedule& schedule, const LindbladSpec& lindblad,
                                            const NoiseModel& noise, int n_traj,
                                            const std::vector<std::pair<std::string, Mat>>& observables,
                                            const std::vector<double>& sample_times,
                                            const EvolveOptions& opts) {
    return average_impl(rho0, system, schedule, lindblad, noise, n_traj, observables,
                        sample_times, opts, false);
}

}  // namespace dressim
