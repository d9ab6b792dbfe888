#include "dressim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

#include "dressim/evolve.hpp"
#include "dressim/schedule.hpp"
#include "dressim/tomo.hpp"

namespace dressim {

std::vector<double> lm_fit(const std::function<double(double, const std::vector<double>&)>& model,
                           const std::vector<double>& t, const std::vector<double>& y,
                           std::vector<double> p0, double* ssr_out,
                           std::vector<double>* stderr_out) {
    const int n = static_cast<int>(t.size());
    const int np = static_cast<int>(p0.size());
    if (n < np) throw std::invalid_argument("lm_fit: fewer points than parameters");

    auto residuals = [&](const std::vector<double>& p, Eigen::VectorXd& r) {
        for (int i = 0; i < n; ++i) r(i) = model(t[i], p) - y[i];
    };

    Eigen::VectorXd r(n), r_try(n);
    residuals(p0, r);
    double ssr = r.squaredNorm();
    double lambda = 1e-3;
    Eigen::MatrixXd jac(n, np);

    for (int iter = 0; iter < 200; ++iter) {
        // forward-difference Jacobian with parameter-scaled steps
        for (int j = 0; j < np; ++j) {
            double h = 1e-7 * std::max(std::abs(p0[j]), 1e-12);
            auto p = p0;
            p[j] += h;
            for (int i = 0; i < n; ++i) jac(i, j) = (model(t[i], p) - (r(i) + y[i])) / h;
        }
        Eigen::MatrixXd jtj = jac.transpose() * jac;
        Eigen::VectorXd jtr = jac.transpose() * r;

        bool improved = false;
        for (int tries = 0; tries < 12; ++tries) {
            Eigen::MatrixXd damped = jtj;
            for (int j = 0; j < np; ++j)
                damped(j, j) += lambda * std::max(jtj(j, j), 1e-30);
            Eigen::VectorXd delta = damped.ldlt().solve(jtr);
            auto p_try = p0;
            for (int j = 0; j < np; ++j) p_try[j] -= delta(j);
            residuals(p_try, r_try);
            double ssr_try = r_try.squaredNorm();
            if (ssr_try < ssr) {
                p0 = p_try;
                r = r_try;
                improved = true;
                bool converged = (ssr - ssr_try) <= 1e-14 * (ssr + 1e-30);
                ssr = ssr_try;
                lambda = std::max(lambda * 0.3, 1e-12);
                if (converged) iter = 200;
                break;
            }
            lambda *= 10.0;
        }
        if (!improved) break;
    }

    if (ssr_out) *ssr_out = ssr;
    if (stderr_out) {
        stderr_out->assign(np, 0.0);
        for (int j = 0; j < np; ++j) {
            double h = 1e-7 * std::max(std::abs(p0[j]), 1e-12);
            auto p = p0;
            p[j] += h;
            for (int i = 0; i < n; ++i) jac(i, j) = (model(t[i], p) - (r(i) + y[i])) / h;
        }
        Eigen::MatrixXd jtj = jac.transpose() * jac;
        double dof = std::max(1, n - np);
        Eigen::MatrixXd cov = jtj.ldlt().solve(Eigen::MatrixXd::Identity(np, np)) * (ssr / dof);
        for (int j = 0; j < np; ++j)
            (*stderr_out)[j] = std::sqrt(std::max(cov(j, j), 0.0));
    }
    return p0;
}

FitResult fit_ramsey(const std::vector<double>& tau, const std::vector<double>& p1,
                     RamseyFitKind kind, double t1_fixed) {
    if (tau.size() != p1.size()) throw std::invalid_argument("fit_ramsey: size mismatch");
    if (tau.size() < 20) throw std::invalid_argument("fit_ramsey: need at least 20 points");

    const double span = *std::max_element(tau.begin(), tau.end());
    const bool gaussian = kind == RamseyFitKind::gaussian_free;

    auto model = [&](double t, const std::vector<double>& p) {
        double inv_t1 = std::isfinite(t1_fixed) ? 1.0 / (2.0 * t1_fixed) : 0.0;
        double env = gaussian ? std::exp(-t * inv_t1 - (t / p[0]) * (t / p[0]))
                              : std::exp(-t / p[0]);
        return 0.5 + 0.5 * env * std::cos(p[1] * t + p[2]);
    };

    // frequency scale from zero crossings of p1 - 0.5
    int crossings = 0;
    for (size_t i = 1; i < p1.size(); ++i)
        if ((p1[i - 1] - 0.5) * (p1[i] - 0.5) < 0.0) ++crossings;
    double omega0 = crossings > 0 ? std::numbers::pi * crossings / span
                                  : 2.0 * std::numbers::pi / span;

    double best_ssr = std::numeric_limits<double>::infinity();
    std::vector<double> best_p;
    std::vector<double> best_se;
    for (double fw : {1.0, 0.75, 1.25, 0.5, 1.5}) {
        for (double phi0 : {0.0, std::numbers::pi}) {
            std::vector<double> p0{span / 2.0, fw * omega0, phi0};
            double ssr = 0.0;
            std::vector<double> se;
            try {
                auto p = lm_fit(model, tau, p1, p0, &ssr, &se);
                if (p[0] > 0.0 && ssr < best_ssr) {
                    best_ssr = ssr;
                    best_p = p;
                    best_se = se;
                }
            } catch (const std::exception&) {
                // singular start; other starts cover it
            }
        }
    }
    if (best_p.empty()) throw std::runtime_error("fit_ramsey: no start converged");

    // (omega, phi0) -> (-omega, -phi0) is an exact model symmetry; pin omega >= 0
    if (best_p[1] < 0.0) {
        best_p[1] = -best_p[1];
        best_p[2] = -best_p[2];
    }
    best_p[2] = std::remainder(best_p[2], 2.0 * std::numbers::pi);

    FitResult out;
    out.model_tag = gaussian ? "ramsey_gaussian_free" : "ramsey_exponential";
    const char* tname = gaussian ? "t2star" : "td";
    out.params[tname] = best_p[0];
    out.params["omega_r"] = best_p[1];
    out.params["phi0"] = best_p[2];
    out.stderrs[tname] = best_se[0];
    out.stderrs["omega_r"] = best_se[1];
    out.stderrs["phi0"] = best_se[2];
    out.residual_rms = std::sqrt(best_ssr / tau.size());
    return out;
}

double tphi_from_td(double td, double t1) {
    if (!(td > 0.0)) throw std::invalid_argument("tphi_from_td: td must be positive");
    double rate = 1.0 / td - (std::isfinite(t1) ? 1.0 / (2.0 * t1) : 0.0);
    if (rate <= 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / rate;
}

double td_from_tphi(double tphi, double t1) {
    double rate = (std::isfinite(t1) ? 1.0 / (2.0 * t1) : 0.0) +
                  (std::isfinite(tphi) ? 1.0 / tphi : 0.0);
    if (rate <= 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / rate;
}

namespace {

struct DecayFit {
    double a, p, b;
    double ssr;
};

DecayFit fit_decay(const std::vector<std::pair<int, double>>& data) {
    std::vector<double> m, y;
    for (auto& [mm, yy] : data) {
        m.push_back(mm);
        y.push_back(yy);
    }
    auto model = [](double t, const std::vector<double>& p) {
        return p[0] * std::pow(p[2], t) + p[1];
    };
    double b0 = y.back();
    double a0 = y.front() - b0;
    if (std::abs(a0) < 1e-9) a0 = 1e-3;
    // crude decay-rate estimate from endpoint ratio
    double p0 = 0.99;
    if (std::abs(y.front() - b0) > 1e-12 && std::abs(y.back() - b0) / std::abs(y.front() - b0) < 1.0) {
        double ratio = std::max(std::abs(y.back() - b0) / std::abs(y.front() - b0), 1e-6);
        p0 = std::pow(ratio, 1.0 / std::max(1.0, m.back() - m.front()));
    }
    double best_ssr = std::numeric_limits<double>::infinity();
    std::vector<double> best;
    for (double ps : {p0, 0.999, 0.99, 0.9}) {
        double ssr;
        try {
            auto p = lm_fit(model, m, y, {a0, b0, ps}, &ssr, nullptr);
            if (ssr < best_ssr) {
                best_ssr = ssr;
                best = p;
            }
        } catch (const std::exception&) {
        }
    }
    if (best.empty()) throw std::runtime_error("fit_rb: decay fit failed");
    return {best[0], best[2], best[1], best_ssr};
}

}  // namespace

FitResult fit_rb(const std::vector<std::pair<int, double>>& reference,
                 const std::vector<std::pair<int, double>>* interleaved, int dim) {
    if (reference.size() < 3) throw std::invalid_argument("fit_rb: need >= 3 sequence lengths");

    FitResult out;
    out.model_tag = "rb_decay";
    bool ref_constant = true;
    for (auto& [m, y] : reference)
        if (std::abs(y - reference.front().second) > 1e-12) ref_constant = false;

    DecayFit ref;
    if (ref_constant && std::abs(reference.front().second - 1.0) < 1e-12) {
        ref = {0.0, 1.0, 1.0, 0.0};  // ideal layers: flat unit survival
    } else {
        ref = fit_decay(reference);
    }
    if (!(ref.p > 0.0) || ref.p > 1.0 + 1e-9)
        throw std::runtime_error("fit_rb: reference depolarization outside (0, 1]");
    if (ref.a < -1e-6) throw std::runtime_error("fit_rb: degenerate (rising) reference curve");
    ref.p = std::min(ref.p, 1.0);

    double dd = dim;
    out.params["p_ref"] = ref.p;
    out.params["a_ref"] = ref.a;
    out.params["b_ref"] = ref.b;
    out.params["f_avg_ref"] = 1.0 - (dd - 1.0) * (1.0 - ref.p) / dd;
    out.residual_rms = std::sqrt(ref.ssr / reference.size());

    if (interleaved) {
        if (interleaved->size() < 3)
            throw std::invalid_argument("fit_rb: need >= 3 interleaved lengths");
        DecayFit intl = fit_decay(*interleaved);
        if (!(intl.p > 0.0) || intl.p > 1.0 + 1e-9)
            throw std::runtime_error("fit_rb: interleaved depolarization outside (0, 1]");
        intl.p = std::min(intl.p, 1.0);
        out.params["p_int"] = intl.p;
        out.params["a_int"] = intl.a;
        out.params["b_int"] = intl.b;
        out.params["fidelity"] = 1.0 - (dd - 1.0) / dd * (1.0 - intl.p / ref.p);
    }
    return out;
}

ErrorBudget error_budget(const std::function<double(const BudgetToggles&)>& gate_error) {
    ErrorBudget out;
    out.total_error = gate_error({true, true, true});
    double without_t1 = gate_error({false, true, true});
    double without_tphi = gate_error({true, false, true});
    double without_leak = gate_error({true, true, false});
    if (out.total_error > 0.0) {
        out.fractions["t1"] = (out.total_error - without_t1) / out.total_error;
        out.fractions["tphi"] = (out.total_error - without_tphi) / out.total_error;
        out.fractions["leakage"] = (out.total_error - without_leak) / out.total_error;
    } else {
        out.fractions["t1"] = out.fractions["tphi"] = out.fractions["leakage"] = 0.0;
    }
    out.residual = 1.0 - out.fractions["t1"] - out.fractions["tphi"] - out.fractions["leakage"];
    return out;
}

namespace {

double idler_process_fidelity(double tphi, double t1, double gate_len) {
    SystemSpec system;
    QubitParams q;
    q.t1 = t1;
    q.tphi = tphi;
    system.qubits.push_back(q);
    Schedule sched = idler_sequence(gate_len);
    LindbladSpec lindblad = system_collapse(system);
    EvolveOptions opts;
    opts.parallel = false;

    Channel channel = [&](const DensityMatrix& rho) {
        auto r = propagate_lindblad(rho, system, sched, lindblad, nullptr, {}, {}, opts);
        return *r.final_state;
    };
    ChiMatrix chi = qpt(channel, 1, std::nullopt, 0, false);
    return process_fidelity(chi, chi_of_unitary(identity(2)));
}

}  // namespace

double tphi_from_idler_fidelity(double f_idler, double t1, double gate_len) {
    if (!(f_idler > 0.0) || !(f_idler < 1.0))
        throw std::invalid_argument("tphi_from_idler_fidelity: fidelity must lie in (0, 1)");

    double f_cap = idler_process_fidelity(std::numeric_limits<double>::infinity(), t1, gate_len);
    if (f_idler >= f_cap)
        throw std::invalid_argument(
            "tphi_from_idler_fidelity: fidelity exceeds the T1-only limit; inconsistent inputs");

    double lo = 1e-3 * gate_len;
    double hi = 1e7 * gate_len;
    if (idler_process_fidelity(lo, t1, gate_len) > f_idler)
        throw std::invalid_argument("tphi_from_idler_fidelity: fidelity below the search window");

    while (hi / lo > 1.01) {
        double mid = std::sqrt(lo * hi);
        if (idler_process_fidelity(mid, t1, gate_len) < f_idler) lo = mid;
        else hi = mid;
    }
    return std::sqrt(lo * hi);
}

}  // namespace dressim
