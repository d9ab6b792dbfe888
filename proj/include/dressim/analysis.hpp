#ifndef DRESSIM_ANALYSIS_HPP
#define DRESSIM_ANALYSIS_HPP

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dressim {

struct FitResult {
    std::string model_tag;
    std::map<std::string, double> params;
    std::map<std::string, double> stderrs;
    double residual_rms = 0.0;
};

enum class RamseyFitKind { gaussian_free, exponential };

/// Fit P1(tau) = 0.5 + 0.5 env(tau) cos(omega_r tau + phi0), with
/// env = exp[-tau/(2 T1) - (tau/T2*)^2] (gaussian_free, T1 a fixed input) or
/// env = exp(-tau/Td) (exponential). Damped least squares with multi-start
/// over the oscillation frequency (initialized by zero-crossing counting).
FitResult fit_ramsey(const std::vector<double>& tau, const std::vector<double>& p1,
                     RamseyFitKind kind, double t1_fixed);

/// Tphi from 1/Td = 1/(2 T1) + 1/Tphi. Returns +infinity when td >= 2 t1
/// (dephasing-free marker).
double tphi_from_td(double td, double t1);
double td_from_tphi(double tphi, double t1);

/// Fit P(m) = A p^m + B for the reference (and optionally the interleaved)
/// survival curve. Reports p_ref, f_avg_ref = 1 - (d-1)(1-p_ref)/d, and with
/// an interleaved curve the gate fidelity 1 - (d-1)/d (1 - p_int/p_ref).
FitResult fit_rb(const std::vector<std::pair<int, double>>& reference,
                 const std::vector<std::pair<int, double>>* interleaved, int dim);

struct BudgetToggles {
    bool t1_on = true;
    bool tphi_on = true;
    bool leakage_on = true;
};

struct ErrorBudget {
    double total_error = 0.0;
    std::map<std::string, double> fractions;  // t1, tphi, leakage
    double residual = 0.0;                    // interaction remainder
};

/// Toggling attribution: fraction_c = (E_all_on - E_without_c) / E_all_on;
/// fractions plus the interaction residual sum to one by construction.
ErrorBudget error_budget(const std::function<double(const BudgetToggles&)>& gate_error);

/// Invert the idler-gate fidelity to the pure dephasing time: monotone
/// bisection over Tphi until the simulated idle-channel process fidelity
/// (Lindblad over gate_len at the given T1) matches f_idler to 1 percent.
double tphi_from_idler_fidelity(double f_idler, double t1, double gate_len);

/// Generic damped least squares (Levenberg-Marquardt with numeric Jacobian).
/// Returns the best parameters; ssr/covdiag outputs are optional.
std::vector<double> lm_fit(const std::function<double(double, const std::vector<double>&)>& model,
                           const std::vector<double>& t, const std::vector<double>& y,
                           std::vector<double> p0, double* ssr_out = nullptr,
                           std::vector<double>* stderr_out = nullptr);

}  // namespace dressim

#endif
