#include "dressim/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <set>
#include <stdexcept>

namespace dressim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw std::invalid_argument("config: " + path + ": " + msg);
}

void check_allowed(const nlohmann::json& j, const std::string& path,
                   const std::set<std::string>& allowed) {
    if (!j.is_object()) fail(path, "expected an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) fail(path + "." + it.key(), "unknown key");
}

double get_num(const nlohmann::json& j, const std::string& path, const std::string& key) {
    if (!j.contains(key)) fail(path + "." + key, "missing required key");
    if (!j.at(key).is_number()) fail(path + "." + key, "expected a number");
    return j.at(key).get<double>();
}

double get_num_or(const nlohmann::json& j, const std::string& path, const std::string& key,
                  double fallback) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    if (!j.at(key).is_number()) fail(path + "." + key, "expected a number");
    return j.at(key).get<double>();
}

std::optional<double> get_opt(const nlohmann::json& j, const std::string& path,
                              const std::string& key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    if (!j.at(key).is_number()) fail(path + "." + key, "expected a number");
    return j.at(key).get<double>();
}

double mhz(double v) { return v * kTwoPi * 1e6; }
double ghz(double v) { return v * kTwoPi * 1e9; }
double us(double v) { return v * 1e-6; }
double ns(double v) { return v * 1e-9; }

// serialized unit values are rounded to 12 significant digits so that a
// validate -> serialize -> validate cycle is exactly idempotent
double round12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::strtod(buf, nullptr);
}

QubitParams parse_qubit(const nlohmann::json& j, const std::string& path) {
    check_allowed(j, path, {"t1_us", "tphi_us", "levels", "anharmonicity_ghz", "g_mhz"});
    QubitParams q;
    double t1 = get_num_or(j, path, "t1_us", std::numeric_limits<double>::infinity());
    double tphi = get_num_or(j, path, "tphi_us", std::numeric_limits<double>::infinity());
    if (!(t1 > 0.0)) fail(path + ".t1_us", "must be positive");
    if (!(tphi > 0.0)) fail(path + ".tphi_us", "must be positive");
    q.t1 = std::isfinite(t1) ? us(t1) : t1;
    q.tphi = std::isfinite(tphi) ? us(tphi) : tphi;
    q.levels = static_cast<int>(get_num_or(j, path, "levels", 2));
    if (q.levels != 2 && q.levels != 3) fail(path + ".levels", "must be 2 or 3");
    q.anharmonicity = ghz(get_num_or(j, path, "anharmonicity_ghz", 0.0));
    if (q.anharmonicity < 0.0) fail(path + ".anharmonicity_ghz", "must be >= 0");
    q.g = mhz(get_num_or(j, path, "g_mhz", 0.0));
    return q;
}

CouplingSpec parse_coupling(const nlohmann::json& j, const std::string& path) {
    check_allowed(j, path, {"lambda_mhz", "g1_mhz", "g2_mhz", "delta_mhz", "lambda_direct_mhz"});
    CouplingSpec c;
    if (j.contains("lambda_mhz")) {
        c.lambda = mhz(get_num(j, path, "lambda_mhz"));
    }
    if (j.contains("g1_mhz") || j.contains("g2_mhz") || j.contains("delta_mhz")) {
        CouplingSpec::Dispersive d;
        d.g1 = mhz(get_num(j, path, "g1_mhz"));
        d.g2 = mhz(get_num(j, path, "g2_mhz"));
        d.delta = mhz(get_num(j, path, "delta_mhz"));
        if (d.delta == 0.0) fail(path + ".delta_mhz", "must be nonzero");
        c.dispersive = d;
    }
    c.lambda_direct = mhz(get_num_or(j, path, "lambda_direct_mhz", 0.0));
    if (!c.lambda && !c.dispersive)
        fail(path, "needs lambda_mhz or g1_mhz/g2_mhz/delta_mhz");
    return c;
}

DriveTone parse_drive(const nlohmann::json& j, const std::string& path) {
    check_allowed(j, path, {"rabi_mhz", "phase_rad", "detuning_mhz"});
    DriveTone d;
    d.rabi = mhz(get_num_or(j, path, "rabi_mhz", 0.0));
    if (d.rabi < 0.0) fail(path + ".rabi_mhz", "must be >= 0");
    d.phase = get_num_or(j, path, "phase_rad", 0.0);
    d.detuning = mhz(get_num_or(j, path, "detuning_mhz", 0.0));
    return d;
}

NoiseModel parse_noise(const nlohmann::json& j, const std::string& path) {
    check_allowed(j, path,
                  {"kind", "sigma_mhz", "t2star_us", "amplitude_mhz", "f_min_hz", "f_max_hz", "seed"});
    NoiseModel n;
    std::string kind = j.value("kind", "none");
    if (kind == "none") n.kind = NoiseModel::Kind::none;
    else if (kind == "quasistatic_gaussian") n.kind = NoiseModel::Kind::quasistatic_gaussian;
    else if (kind == "one_over_f") n.kind = NoiseModel::Kind::one_over_f;
    else fail(path + ".kind", "must be none, quasistatic_gaussian, or one_over_f");

    if (j.contains("t2star_us")) {
        double t2 = get_num(j, path, "t2star_us");
        if (!(t2 > 0.0)) fail(path + ".t2star_us", "must be positive");
        n.sigma = sigma_from_t2star(us(t2));
        if (j.contains("sigma_mhz")) fail(path, "give sigma_mhz or t2star_us, not both");
    } else if (j.contains("sigma_mhz")) {
        n.sigma = mhz(get_num(j, path, "sigma_mhz"));
        if (n.sigma < 0.0) fail(path + ".sigma_mhz", "must be >= 0");
    }
    n.amplitude = mhz(get_num_or(j, path, "amplitude_mhz", 0.0));
    n.f_min = get_num_or(j, path, "f_min_hz", 100.0);
    n.f_max = get_num_or(j, path, "f_max_hz", 1e6);
    if (n.kind == NoiseModel::Kind::one_over_f && !(n.f_min > 0.0 && n.f_max > n.f_min))
        fail(path, "one_over_f needs 0 < f_min_hz < f_max_hz");
    n.seed = static_cast<std::uint64_t>(get_num_or(j, path, "seed", 0.0));
    return n;
}

}  // namespace

std::string experiment_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::coherence: return "coherence";
        case ExperimentKind::storage_qpt: return "storage_qpt";
        case ExperimentKind::gate_populations: return "gate_populations";
        case ExperimentKind::gate_qpt: return "gate_qpt";
        case ExperimentKind::rb: return "rb";
        case ExperimentKind::error_budget: return "error_budget";
        case ExperimentKind::predict: return "predict";
        case ExperimentKind::idler_tphi: return "idler_tphi";
    }
    return "?";
}

namespace {

Scenario validate_config_impl(const nlohmann::json& doc) {
    if (!doc.is_object() || doc.empty())
        fail("(root)", "empty document; required keys: experiment, system");
    check_allowed(doc, "(root)",
                  {"experiment", "name", "seed", "system", "drives", "noise", "evolve",
                   "coherence", "storage", "gate", "rb", "idler", "output"});
    if (!doc.contains("experiment")) fail("experiment", "missing required key");
    if (!doc.contains("system")) fail("system", "missing required key");

    Scenario s;
    std::string exp = doc.at("experiment").get<std::string>();
    bool found = false;
    for (auto kind : {ExperimentKind::coherence, ExperimentKind::storage_qpt,
                      ExperimentKind::gate_populations, ExperimentKind::gate_qpt,
                      ExperimentKind::rb, ExperimentKind::error_budget, ExperimentKind::predict,
                      ExperimentKind::idler_tphi})
        if (experiment_name(kind) == exp) {
            s.experiment = kind;
            found = true;
        }
    if (!found) fail("experiment", "unknown experiment '" + exp + "'");

    s.name = doc.value("name", "");
    s.seed = static_cast<std::uint64_t>(get_num_or(doc, "(root)", "seed", 1.0));

    const auto& sys = doc.at("system");
    check_allowed(sys, "system", {"qubits", "coupling", "drive_crosstalk"});
    if (!sys.contains("qubits") || !sys.at("qubits").is_array() || sys.at("qubits").empty())
        fail("system.qubits", "need a nonempty qubit list");
    int qi = 0;
    for (const auto& q : sys.at("qubits"))
        s.qubits.push_back(parse_qubit(q, "system.qubits[" + std::to_string(qi++) + "]"));
    if (s.qubits.size() > 2) fail("system.qubits", "at most two qubits");
    if (sys.contains("coupling")) s.coupling = parse_coupling(sys.at("coupling"), "system.coupling");

    if (doc.contains("drives")) {
        int di = 0;
        for (const auto& d : doc.at("drives"))
            s.drives.push_back(parse_drive(d, "drives[" + std::to_string(di++) + "]"));
        if (s.drives.size() > s.qubits.size()) fail("drives", "more drives than qubits");
    }
    while (s.drives.size() < s.qubits.size()) s.drives.push_back(DriveTone{});

    // optional microwave-crosstalk mixing, folded into the tones at ingestion
    if (sys.contains("drive_crosstalk")) {
        const auto& jc = sys.at("drive_crosstalk");
        const int n = static_cast<int>(s.drives.size());
        if (static_cast<int>(jc.size()) != n)
            fail("system.drive_crosstalk", "matrix must match the drive count");
        Mat c(n, n);
        for (int i = 0; i < n; ++i) {
            if (static_cast<int>(jc[i].size()) != n)
                fail("system.drive_crosstalk", "matrix must be square");
            for (int k = 0; k < n; ++k) {
                const auto& e = jc[i][k];
                if (!e.is_array() || e.size() != 2)
                    fail("system.drive_crosstalk", "entries are [re, im] pairs");
                c(i, k) = cx(e[0].get<double>(), e[1].get<double>());
            }
        }
        s.drives = apply_drive_crosstalk(s.drives, c);
    }

    if (doc.contains("noise")) s.noise = parse_noise(doc.at("noise"), "noise");

    if (doc.contains("evolve")) {
        const auto& e = doc.at("evolve");
        check_allowed(e, "evolve", {"rtol", "atol", "max_step_ns", "n_traj", "master_seed"});
        s.evolve.rtol = get_num_or(e, "evolve", "rtol", 1e-8);
        s.evolve.atol = get_num_or(e, "evolve", "atol", 1e-12);
        if (!(s.evolve.rtol > 0.0)) fail("evolve.rtol", "must be positive");
        s.evolve.max_step = ns(get_num_or(e, "evolve", "max_step_ns", 1000.0));
        s.n_traj = static_cast<int>(get_num_or(e, "evolve", "n_traj", 1.0));
        if (s.n_traj < 1) fail("evolve.n_traj", "must be >= 1");
        s.evolve.master_seed = static_cast<std::uint64_t>(get_num_or(e, "evolve", "master_seed", 0.0));
    }

    if (doc.contains("coherence")) {
        const auto& c = doc.at("coherence");
        check_allowed(c, "coherence",
                      {"variants", "tau_max_us", "tau_points", "omega_r_mhz", "tphi_echo_us",
                       "tphi_dd_us", "n_traj_free", "n_traj_echo", "n_traj_dd"});
        if (c.contains("variants")) {
            s.coherence.variants.clear();
            for (const auto& v : c.at("variants")) {
                std::string name = v.get<std::string>();
                if (name != "free" && name != "echo" && name != "1q_dd" && name != "2q_dd")
                    fail("coherence.variants", "unknown variant '" + name + "'");
                s.coherence.variants.push_back(name);
            }
        }
        s.coherence.tau_max = us(get_num_or(c, "coherence", "tau_max_us", 7.0));
        if (!(s.coherence.tau_max > 0.0)) fail("coherence.tau_max_us", "must be positive");
        s.coherence.tau_points = static_cast<int>(get_num_or(c, "coherence", "tau_points", 64.0));
        if (s.coherence.tau_points < 20) fail("coherence.tau_points", "must be >= 20 for the fits");
        s.coherence.omega_r = mhz(get_num_or(c, "coherence", "omega_r_mhz", 1.0));
        if (auto v = get_opt(c, "coherence", "tphi_echo_us")) s.coherence.tphi_echo = us(*v);
        if (auto v = get_opt(c, "coherence", "tphi_dd_us")) s.coherence.tphi_dd = us(*v);
        if (auto v = get_opt(c, "coherence", "n_traj_free")) s.coherence.n_traj_free = static_cast<int>(*v);
        if (auto v = get_opt(c, "coherence", "n_traj_echo")) s.coherence.n_traj_echo = static_cast<int>(*v);
        if (auto v = get_opt(c, "coherence", "n_traj_dd")) s.coherence.n_traj_dd = static_cast<int>(*v);
    }

    if (doc.contains("storage")) {
        const auto& st = doc.at("storage");
        check_allowed(st, "storage", {"variant", "taus_us"});
        s.storage.variant = st.value("variant", "1q_dd");
        if (s.storage.variant != "free" && s.storage.variant != "echo" && s.storage.variant != "1q_dd")
            fail("storage.variant", "must be free, echo, or 1q_dd");
        if (st.contains("taus_us"))
            for (const auto& t : st.at("taus_us")) {
                double v = t.get<double>();
                if (v < 0.0) fail("storage.taus_us", "must be >= 0");
                s.storage.taus.push_back(us(v));
            }
    }

    if (doc.contains("gate")) {
        const auto& g = doc.at("gate");
        check_allowed(g, "gate",
                      {"model", "tau_ns", "max_duration_ns", "sample_points", "inputs",
                       "include_corrections"});
        s.gate.model = g.value("model", "full");
        if (s.gate.model != "full" && s.gate.model != "effective")
            fail("gate.model", "must be full or effective");
        if (auto v = get_opt(g, "gate", "tau_ns")) {
            if (!(*v > 0.0)) fail("gate.tau_ns", "must be positive");
            s.gate.tau = ns(*v);
        }
        s.gate.max_duration = ns(get_num_or(g, "gate", "max_duration_ns", 600.0));
        s.gate.sample_points = static_cast<int>(get_num_or(g, "gate", "sample_points", 121.0));
        if (s.gate.sample_points < 2) fail("gate.sample_points", "must be >= 2");
        if (g.contains("inputs")) {
            s.gate.inputs.clear();
            for (const auto& in : g.at("inputs")) {
                std::string v = in.get<std::string>();
                if (v != "00" && v != "01" && v != "10" && v != "11")
                    fail("gate.inputs", "must be 00, 01, 10 or 11");
                s.gate.inputs.push_back(v);
            }
        }
        s.gate.include_corrections = g.value("include_corrections", false);
    }

    if (doc.contains("rb")) {
        const auto& r = doc.at("rb");
        check_allowed(r, "rb", {"set", "m_grid", "k"});
        s.rb.set = r.value("set", "pauli");
        if (s.rb.set != "pauli" && s.rb.set != "clifford")
            fail("rb.set", "must be pauli or clifford");
        if (r.contains("m_grid")) {
            s.rb.m_grid.clear();
            for (const auto& m : r.at("m_grid")) {
                int v = m.get<int>();
                if (v < 1) fail("rb.m_grid", "lengths must be >= 1");
                s.rb.m_grid.push_back(v);
            }
            if (s.rb.m_grid.size() < 3) fail("rb.m_grid", "need at least 3 lengths");
        }
        s.rb.k = static_cast<int>(get_num_or(r, "rb", "k", 30.0));
        if (s.rb.k < 1) fail("rb.k", "must be >= 1");
    }

    if (doc.contains("idler")) {
        const auto& i = doc.at("idler");
        check_allowed(i, "idler", {"fidelity", "gate_len_ns", "expected_tphi_us"});
        s.idler.fidelity = get_num_or(i, "idler", "fidelity", 0.0);
        if (s.experiment == ExperimentKind::idler_tphi &&
            !(s.idler.fidelity > 0.0 && s.idler.fidelity < 1.0))
            fail("idler.fidelity", "must lie in (0, 1)");
        s.idler.gate_len = ns(get_num_or(i, "idler", "gate_len_ns", 0.0));
        if (auto v = get_opt(i, "idler", "expected_tphi_us")) s.idler.expected_tphi = us(*v);
    }

    if (doc.contains("output")) {
        const auto& o = doc.at("output");
        check_allowed(o, "output", {"dir", "format"});
        s.out_dir = o.value("dir", "out");
        s.format = o.value("format", "csv");
        if (s.format != "csv" && s.format != "structured")
            fail("output.format", "must be csv or structured");
    }

    // cross checks
    if (s.experiment == ExperimentKind::gate_populations || s.experiment == ExperimentKind::gate_qpt ||
        s.experiment == ExperimentKind::rb || s.experiment == ExperimentKind::error_budget ||
        s.experiment == ExperimentKind::predict) {
        if (s.qubits.size() != 2) fail("system.qubits", "two-qubit experiment needs two qubits");
        if (!s.coupling.lambda && !s.coupling.dispersive)
            fail("system.coupling", "two-qubit experiment needs a coupling");
    }
    for (const auto& v : s.coherence.variants)
        if (v == "2q_dd" && (s.qubits.size() != 2 || (!s.coupling.lambda && !s.coupling.dispersive)))
            fail("coherence.variants", "2q_dd needs two qubits and a coupling");
    if (s.experiment == ExperimentKind::idler_tphi && !(s.idler.gate_len > 0.0))
        fail("idler.gate_len_ns", "required for idler_tphi");
    if (s.experiment == ExperimentKind::storage_qpt && s.storage.taus.empty())
        fail("storage.taus_us", "required for storage_qpt");

    return s;
}

}  // namespace

Scenario validate_config(const nlohmann::json& doc) {
    try {
        return validate_config_impl(doc);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("config: malformed value: ") + e.what());
    }
}

Scenario validate_config_text(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("config: not valid JSON: ") + e.what());
    }
    return validate_config(doc);
}

nlohmann::json scenario_to_json(const Scenario& s) {
    nlohmann::json j;
    j["experiment"] = experiment_name(s.experiment);
    if (!s.name.empty()) j["name"] = s.name;
    j["seed"] = s.seed;

    nlohmann::json qubits = nlohmann::json::array();
    for (const auto& q : s.qubits) {
        nlohmann::json jq;
        if (std::isfinite(q.t1)) jq["t1_us"] = round12(q.t1 * 1e6);
        if (std::isfinite(q.tphi)) jq["tphi_us"] = round12(q.tphi * 1e6);
        jq["levels"] = q.levels;
        if (q.anharmonicity != 0.0) jq["anharmonicity_ghz"] = round12(q.anharmonicity / (kTwoPi * 1e9));
        if (q.g != 0.0) jq["g_mhz"] = round12(q.g / (kTwoPi * 1e6));
        qubits.push_back(jq);
    }
    j["system"]["qubits"] = qubits;
    if (s.coupling.lambda || s.coupling.dispersive) {
        nlohmann::json jc;
        if (s.coupling.lambda) jc["lambda_mhz"] = round12(*s.coupling.lambda / (kTwoPi * 1e6));
        if (s.coupling.dispersive) {
            jc["g1_mhz"] = round12(s.coupling.dispersive->g1 / (kTwoPi * 1e6));
            jc["g2_mhz"] = round12(s.coupling.dispersive->g2 / (kTwoPi * 1e6));
            jc["delta_mhz"] = round12(s.coupling.dispersive->delta / (kTwoPi * 1e6));
        }
        if (s.coupling.lambda_direct != 0.0)
            jc["lambda_direct_mhz"] = round12(s.coupling.lambda_direct / (kTwoPi * 1e6));
        j["system"]["coupling"] = jc;
    }

    nlohmann::json drives = nlohmann::json::array();
    for (const auto& d : s.drives) {
        nlohmann::json jd;
        jd["rabi_mhz"] = round12(d.rabi / (kTwoPi * 1e6));
        jd["phase_rad"] = d.phase;
        if (d.detuning != 0.0) jd["detuning_mhz"] = round12(d.detuning / (kTwoPi * 1e6));
        drives.push_back(jd);
    }
    j["drives"] = drives;

    nlohmann::json jn;
    switch (s.noise.kind) {
        case NoiseModel::Kind::none: jn["kind"] = "none"; break;
        case NoiseModel::Kind::quasistatic_gaussian: jn["kind"] = "quasistatic_gaussian"; break;
        case NoiseModel::Kind::one_over_f: jn["kind"] = "one_over_f"; break;
    }
    if (s.noise.sigma != 0.0) jn["sigma_mhz"] = round12(s.noise.sigma / (kTwoPi * 1e6));
    if (s.noise.amplitude != 0.0) jn["amplitude_mhz"] = round12(s.noise.amplitude / (kTwoPi * 1e6));
    jn["f_min_hz"] = s.noise.f_min;
    jn["f_max_hz"] = s.noise.f_max;
    jn["seed"] = s.noise.seed;
    j["noise"] = jn;

    j["evolve"] = {{"rtol", s.evolve.rtol},
                   {"atol", s.evolve.atol},
                   {"max_step_ns", round12(s.evolve.max_step * 1e9)},
                   {"n_traj", s.n_traj},
                   {"master_seed", s.evolve.master_seed}};

    nlohmann::json jc;
    jc["variants"] = s.coherence.variants;
    jc["tau_max_us"] = round12(s.coherence.tau_max * 1e6);
    jc["tau_points"] = s.coherence.tau_points;
    jc["omega_r_mhz"] = round12(s.coherence.omega_r / (kTwoPi * 1e6));
    if (s.coherence.tphi_echo) jc["tphi_echo_us"] = round12(*s.coherence.tphi_echo * 1e6);
    if (s.coherence.tphi_dd) jc["tphi_dd_us"] = round12(*s.coherence.tphi_dd * 1e6);
    if (s.coherence.n_traj_free) jc["n_traj_free"] = *s.coherence.n_traj_free;
    if (s.coherence.n_traj_echo) jc["n_traj_echo"] = *s.coherence.n_traj_echo;
    if (s.coherence.n_traj_dd) jc["n_traj_dd"] = *s.coherence.n_traj_dd;
    j["coherence"] = jc;

    if (!s.storage.taus.empty() || s.experiment == ExperimentKind::storage_qpt) {
        nlohmann::json js;
        js["variant"] = s.storage.variant;
        nlohmann::json taus = nlohmann::json::array();
        for (double t : s.storage.taus) taus.push_back(round12(t * 1e6));
        js["taus_us"] = taus;
        j["storage"] = js;
    }

    nlohmann::json jg;
    jg["model"] = s.gate.model;
    if (s.gate.tau) jg["tau_ns"] = round12(*s.gate.tau * 1e9);
    jg["max_duration_ns"] = round12(s.gate.max_duration * 1e9);
    jg["sample_points"] = s.gate.sample_points;
    jg["inputs"] = s.gate.inputs;
    jg["include_corrections"] = s.gate.include_corrections;
    j["gate"] = jg;

    j["rb"] = {{"set", s.rb.set}, {"m_grid", s.rb.m_grid}, {"k", s.rb.k}};

    if (s.experiment == ExperimentKind::idler_tphi) {
        nlohmann::json ji;
        ji["fidelity"] = s.idler.fidelity;
        ji["gate_len_ns"] = round12(s.idler.gate_len * 1e9);
        if (s.idler.expected_tphi) ji["expected_tphi_us"] = round12(*s.idler.expected_tphi * 1e6);
        j["idler"] = ji;
    }

    j["output"] = {{"dir", s.out_dir}, {"format", s.format}};
    return j;
}

}  // namespace dressim
