#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "dressim/analysis.hpp"

using namespace dressim;

namespace {

constexpr double kTwoPi = 2.0 * M_PI;
const double kInf = std::numeric_limits<double>::infinity();

std::vector<double> tau_grid(double tmax, int n) {
    std::vector<double> out;
    for (int i = 1; i <= n; ++i) out.push_back(tmax * i / n);
    return out;
}

double ramsey_model(double t, double t_env, double omega, double phi0, double t1, bool gaussian) {
    double env = gaussian ? std::exp(-t / (2.0 * t1) - (t / t_env) * (t / t_env))
                          : std::exp(-t / t_env);
    return 0.5 + 0.5 * env * std::cos(omega * t + phi0);
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("gaussian Ramsey fit recovers exact synthetic parameters") {
    double t2star = 4.2e-6, t1 = 31.6e-6, omega = kTwoPi * 1.0e6, phi0 = 0.4;
    auto taus = tau_grid(8e-6, 80);
    std::vector<double> p1;
    for (double t : taus) p1.push_back(ramsey_model(t, t2star, omega, phi0, t1, true));

    FitResult fit = fit_ramsey(taus, p1, RamseyFitKind::gaussian_free, t1);
    CHECK(fit.params.at("t2star") == doctest::Approx(t2star).epsilon(1e-6));
    CHECK(fit.params.at("omega_r") == doctest::Approx(omega).epsilon(1e-6));
    CHECK(fit.residual_rms < 1e-9);
}

TEST_CASE("exponential Ramsey fit recovers Td") {
    double td = 15.3e-6, omega = kTwoPi * 1.0e6, phi0 = -0.2;
    auto taus = tau_grid(30e-6, 120);
    std::vector<double> p1;
    for (double t : taus) p1.push_back(ramsey_model(t, td, omega, phi0, kInf, false));

    FitResult fit = fit_ramsey(taus, p1, RamseyFitKind::exponential, 31.6e-6);
    CHECK(fit.params.at("td") == doctest::Approx(td).epsilon(1e-6));
}

TEST_CASE("Ramsey fit across random parameter draws") {
    std::mt19937_64 eng(19);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
        double t2 = (2.0 + 8.0 * uni(eng)) * 1e-6;
        double t1 = (20.0 + 30.0 * uni(eng)) * 1e-6;
        double omega = kTwoPi * (0.5 + 1.5 * uni(eng)) * 1e6;
        double phi0 = kTwoPi * (uni(eng) - 0.5);
        auto taus = tau_grid(2.5 * t2, 90);
        std::vector<double> p1;
        for (double t : taus) p1.push_back(ramsey_model(t, t2, omega, phi0, t1, true));
        FitResult fit = fit_ramsey(taus, p1, RamseyFitKind::gaussian_free, t1);
        CHECK(fit.params.at("t2star") == doctest::Approx(t2).epsilon(1e-5));
    }
}

TEST_CASE("fit_ramsey input guards") {
    auto taus = tau_grid(1e-6, 10);
    std::vector<double> p1(10, 0.5);
    CHECK_THROWS_AS(fit_ramsey(taus, p1, RamseyFitKind::exponential, kInf),
                    std::invalid_argument);
}

TEST_CASE("Tphi from Td") {
    CHECK(tphi_from_td(15.3e-6, 31.6e-6) == doctest::Approx(20.2e-6).epsilon(0.005));
    CHECK(tphi_from_td(32.2e-6, 31.6e-6) == doctest::Approx(65.6e-6).epsilon(0.01));
    CHECK(std::isinf(tphi_from_td(2.0 * 31.6e-6, 31.6e-6)));
    CHECK(std::isinf(tphi_from_td(70e-6, 31.6e-6)));
    CHECK_THROWS_AS(tphi_from_td(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("Td/Tphi relation round trip") {
    for (double tphi : {5e-6, 20.2e-6, 65.6e-6, 200e-6}) {
        double td = td_from_tphi(tphi, 31.6e-6);
        CHECK(tphi_from_td(td, 31.6e-6) == doctest::Approx(tphi).epsilon(1e-12));
    }
}

TEST_CASE("RB fit: perfect gates") {
    std::vector<std::pair<int, double>> ref;
    for (int m : {1, 2, 4, 8, 16, 32}) ref.emplace_back(m, 1.0);
    FitResult fit = fit_rb(ref, nullptr, 2);
    CHECK(fit.params.at("p_ref") == doctest::Approx(1.0));
    CHECK(fit.params.at("f_avg_ref") == doctest::Approx(1.0));
}

TEST_CASE("RB fit: synthetic depolarizing pair") {
    auto curve = [](double a, double p, double b, int m) { return a * std::pow(p, m) + b; };
    std::vector<std::pair<int, double>> ref, intl;
    for (int m : {1, 2, 4, 8, 16, 32, 64, 128}) {
        ref.emplace_back(m, curve(0.75, 0.99, 0.25, m));
        intl.emplace_back(m, curve(0.75, 0.97, 0.25, m));
    }
    FitResult fit = fit_rb(ref, &intl, 4);
    CHECK(fit.params.at("p_ref") == doctest::Approx(0.99).epsilon(1e-6));
    CHECK(fit.params.at("p_int") == doctest::Approx(0.97).epsilon(1e-6));
    double want = 1.0 - 0.75 * (1.0 - 0.97 / 0.99);
    CHECK(fit.params.at("fidelity") == doctest::Approx(want).epsilon(1e-6));
    CHECK(want == doctest::Approx(0.98485).epsilon(1e-4));
}

TEST_CASE("RB fit is SPAM independent") {
    auto curve = [](double a, double p, double b, int m) { return a * std::pow(p, m) + b; };
    std::vector<std::pair<int, double>> a, b;
    for (int m : {1, 3, 6, 10, 20, 40}) {
        a.emplace_back(m, curve(0.70, 0.985, 0.26, m));
        b.emplace_back(m, curve(0.50, 0.985, 0.40, m));
    }
    FitResult fa = fit_rb(a, nullptr, 2);
    FitResult fb = fit_rb(b, nullptr, 2);
    CHECK(fa.params.at("p_ref") == doctest::Approx(fb.params.at("p_ref")).epsilon(1e-6));
}

TEST_CASE("RB fit guards") {
    std::vector<std::pair<int, double>> two{{1, 0.9}, {2, 0.8}};
    CHECK_THROWS_AS(fit_rb(two, nullptr, 2), std::invalid_argument);

    std::vector<std::pair<int, double>> rising;
    for (int m : {1, 2, 4, 8}) rising.emplace_back(m, 0.5 + 0.01 * m);
    CHECK_THROWS(fit_rb(rising, nullptr, 2));
}

TEST_CASE("error budget closes to one by construction") {
    auto fake_error = [](const BudgetToggles& t) {
        double e = 0.001;  // coherent floor
        if (t.t1_on) e += 0.009;
        if (t.tphi_on) e += 0.003;
        if (t.leakage_on) e += 0.017;
        return e;
    };
    ErrorBudget b = error_budget(fake_error);
    CHECK(b.total_error == doctest::Approx(0.030));
    CHECK(b.fractions.at("t1") == doctest::Approx(0.3));
    CHECK(b.fractions.at("tphi") == doctest::Approx(0.1));
    CHECK(b.fractions.at("leakage") == doctest::Approx(0.017 / 0.030));
    double sum = b.fractions.at("t1") + b.fractions.at("tphi") + b.fractions.at("leakage") +
                 b.residual;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("error budget with everything off") {
    auto fake_error = [](const BudgetToggles&) { return 0.0; };
    ErrorBudget b = error_budget(fake_error);
    CHECK(b.total_error == 0.0);
    CHECK(b.fractions.at("t1") == 0.0);
    CHECK(b.fractions.at("tphi") == 0.0);
}

TEST_CASE("idler fidelity inversion reproduces the fixture dephasing times") {
    // closed-form cross-check: the idle-channel process fidelity is
    // (1 + e^{-tau/T1} + 2 e^{-tau/Td})/4, so the target values are known
    double tphi_a = tphi_from_idler_fidelity(0.9843, 32.5e-6, 210.7e-9);
    CHECK(tphi_a == doctest::Approx(8.3e-6).epsilon(0.20));
    double tphi_b = tphi_from_idler_fidelity(0.9884, 21.5e-6, 210.7e-9);
    CHECK(tphi_b == doctest::Approx(15.5e-6).epsilon(0.20));
}

TEST_CASE("idler fidelity is monotone in the dephasing time") {
    // a larger achieved fidelity must invert to a longer Tphi
    double lo = tphi_from_idler_fidelity(0.9820, 32.5e-6, 210.7e-9);
    double hi = tphi_from_idler_fidelity(0.9870, 32.5e-6, 210.7e-9);
    CHECK(hi > lo);
}

TEST_CASE("idler inversion rejects unattainable fidelities") {
    // cap: with Tphi -> inf the fidelity is limited by T1 alone
    double t1 = 32.5e-6, tau = 210.7e-9;
    double cap = 0.25 * (1.0 + std::exp(-tau / t1) + 2.0 * std::exp(-tau / (2.0 * t1)));
    CHECK_THROWS_AS(tphi_from_idler_fidelity(cap + 1e-4, t1, tau), std::invalid_argument);
    CHECK_THROWS_AS(tphi_from_idler_fidelity(1.2, t1, tau), std::invalid_argument);
    CHECK_THROWS_AS(tphi_from_idler_fidelity(-0.1, t1, tau), std::invalid_argument);
}

}  // TEST_SUITE
