#include "swflow/cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <numbers>
#include <random>
#include <set>

#include "swflow/io.hpp"

namespace swflow {

using nlohmann::json;

namespace {

// Uniform deviates on [-1, 1) from the top 53 bits of mt19937_64, so the
// stream is identical across standard libraries.
class Uniform {
public:
    explicit Uniform(std::uint64_t seed) : gen_(seed) {}
    double operator()() { return static_cast<double>(gen_() >> 11) * 0x1.0p-52 - 1.0; }

private:
    std::mt19937_64 gen_;
};

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : j.items())
        if (!ok.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

double get_number(const json& j, const std::string& key, const std::string& where) {
    const auto& v = j.at(key);
    if (!v.is_number()) throw ConfigError(where + "." + key + " must be a number");
    return v.get<double>();
}

std::int64_t get_integer(const json& j, const std::string& key, const std::string& where) {
    const auto& v = j.at(key);
    if (!v.is_number_integer()) throw ConfigError(where + "." + key + " must be an integer");
    return v.get<std::int64_t>();
}

std::vector<std::int64_t> get_int_list(const json& v, const std::string& where) {
    if (!v.is_array()) throw ConfigError(where + " must be an array of integers");
    std::vector<std::int64_t> out;
    for (const auto& e : v) {
        if (!e.is_number_integer()) throw ConfigError(where + " must be an array of integers");
        out.push_back(e.get<std::int64_t>());
    }
    return out;
}

template <std::size_t N>
std::array<int, N> get_int_array(const json& v, const std::string& where) {
    const auto list = get_int_list(v, where);
    if (list.size() != N) throw ConfigError(where + " must have " + std::to_string(N) + " entries");
    std::array<int, N> out{};
    for (std::size_t i = 0; i < N; ++i) out[i] = static_cast<int>(list[i]);
    return out;
}

AbelianGroup parse_group(const json& j, const std::string& where) {
    check_keys(j, {"free_rank", "torsion"}, where);
    const auto rank = j.contains("free_rank") ? get_integer(j, "free_rank", where) : 0;
    std::vector<std::int64_t> torsion;
    if (j.contains("torsion")) torsion = get_int_list(j.at("torsion"), where + ".torsion");
    for (auto d : torsion)
        if (d < 2) throw ConfigError(where + ".torsion entries must be >= 2");
    if (rank < 0) throw ConfigError(where + ".free_rank must be >= 0");
    return AbelianGroup(static_cast<int>(rank), torsion);
}

std::vector<double> read_k_file(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read k_field file " + path.string());
    std::vector<double> values;
    double v;
    while (f >> v) values.push_back(v);
    if (!f.eof()) throw ConfigError("k_field file " + path.string() + " contains a non-numeric entry");
    return values;
}

bool command_needs_k(const std::string& c) {
    return c == "gradcheck" || c == "energy" || c == "minimize" || c == "saddle" || c == "convergence-study";
}

bool command_needs_lattice(const std::string& c) {
    return c == "check-identities" || c == "gradcheck" || c == "energy" || c == "minimize" || c == "saddle";
}

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json flux_json(const Flux& m) {
    return json(std::vector<int>(m.begin(), m.end()));
}

json energy_json(const EnergyBreakdown& e) {
    return to_json(e);
}

Configuration initial_configuration(const ExperimentConfig& cfg) {
    if (cfg.snapshot) {
        Snapshot snap = read_snapshot(*cfg.snapshot);
        if (cfg.has_lattice && !(snap.config.spec() == cfg.lattice))
            throw ConfigError("snapshot lattice does not match the configured lattice");
        return std::move(snap.config);
    }
    return seed_initial(cfg);
}

void write_minimize_artifacts(const std::filesystem::path& dir, const MinimizeReport& r, const std::string& trace) {
    write_trace_csv(dir / trace, r.trace);
}

json minimize_json(const MinimizeReport& r) {
    return {{"iterations", r.iterations},
            {"converged", r.converged},
            {"termination", to_string(r.termination)},
            {"energy", energy_json(r.energy)},
            {"residual_phi", r.residual_phi},
            {"residual_A", r.residual_A},
            {"sup_phi_sq", r.sup_phi_sq},
            {"linfty_bound_satisfied", r.linfty_bound_satisfied}};
}

int minimize_exit(const MinimizeReport& r) {
    switch (r.termination) {
        case Termination::Converged: return kExitOk;
        case Termination::Stagnated: return kExitNumeric;
        case Termination::MaxIterations: return kExitNotConverged;
    }
    return kExitNotConverged;
}

int run_check_identities(const ExperimentConfig& cfg, json& results) {
    const LatticeSpec& L = cfg.lattice;
    Uniform u(cfg.seed);
    IdentityReport worst{0.0, 0.0, 0.0};
    for (int i = 0; i < cfg.identity_samples; ++i) {
        SpinorField phi(L);
        for (auto& z : phi.psi) z = {u(), u()};
        Cochain F(L, 2);
        for (auto& v : F.values) v = u();
        const IdentityReport r = identity_suite(phi, F);
        worst.curvature_pairing = std::max(worst.curvature_pairing, r.curvature_pairing);
        worst.sigma_norm = std::max(worst.sigma_norm, r.sigma_norm);
        worst.sigma_eigen = std::max(worst.sigma_eigen, r.sigma_eigen);
    }
    const double tol = 1e-12;
    const bool pass = worst.worst() <= tol;
    results = {{"samples", cfg.identity_samples},
               {"curvature_pairing", worst.curvature_pairing},
               {"sigma_norm", worst.sigma_norm},
               {"sigma_eigen", worst.sigma_eigen},
               {"tolerance", tol},
               {"pass", pass}};
    return pass ? kExitOk : kExitNotConverged;
}

int run_gradcheck(const ExperimentConfig& cfg, json& results) {
    const Configuration c = initial_configuration(cfg);
    const LatticeSpec& L = c.spec();
    const ScalarCurvatureField k = make_k_field(cfg, L);
    const Evaluation ev = evaluate(c, k);
    const double vol = L.cell_volume();
    const double eps = cfg.gradcheck_step;
    // Directions are drawn from a stream offset from the seeding stream.
    Uniform u(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    double worst_phi = 0.0, worst_A = 0.0;
    json rows = json::array();
    for (int d = 0; d < cfg.gradcheck_directions; ++d) {
        std::vector<Complex> lam(c.spinor.psi.size());
        for (auto& z : lam) z = {u(), u()};
        std::vector<double> t(c.gauge.angles.size());
        for (auto& v : t) v = u();

        double an_phi = 0.0;
        for (std::size_t i = 0; i < lam.size(); ++i) an_phi += (std::conj(ev.residual_phi.psi[i]) * lam[i]).real();
        an_phi *= 2.0 * vol;
        double an_A = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) an_A += ev.residual_A.values[i] * t[i];
        an_A *= 0.5 * vol;

        auto shifted = [&](double s) {
            Configuration cp = c, ca = c;
            for (std::size_t i = 0; i < lam.size(); ++i) cp.spinor.psi[i] += s * lam[i];
            for (std::size_t i = 0; i < t.size(); ++i) ca.gauge.angles[i] += s * L.spacing(int(i % 4)) * t[i];
            return std::pair{energy_terms(cp, k).total, energy_terms(ca, k).total};
        };
        const auto [pp, pa] = shifted(eps);
        const auto [mp, ma] = shifted(-eps);
        const double fd_phi = (pp - mp) / (2.0 * eps);
        const double fd_A = (pa - ma) / (2.0 * eps);
        const double rel_phi = std::abs(fd_phi - an_phi) / std::max(std::abs(an_phi), 1e-300);
        const double rel_A = std::abs(fd_A - an_A) / std::max(std::abs(an_A), 1e-300);
        worst_phi = std::max(worst_phi, rel_phi);
        worst_A = std::max(worst_A, rel_A);
        rows.push_back({{"analytic_phi", an_phi}, {"fd_phi", fd_phi}, {"analytic_A", an_A}, {"fd_A", fd_A}});
    }
    const double tol = 1e-6;
    const bool pass = worst_phi <= tol && worst_A <= tol;
    results = {{"directions", cfg.gradcheck_directions},
               {"step", eps},
               {"max_relative_error_phi", worst_phi},
               {"max_relative_error_A", worst_A},
               {"tolerance", tol},
               {"pass", pass},
               {"samples", rows}};
    return pass ? kExitOk : kExitNotConverged;
}

int run_energy(const ExperimentConfig& cfg, json& results) {
    const Configuration c = initial_configuration(cfg);
    const ScalarCurvatureField k = make_k_field(cfg, c.spec());
    const EnergyBreakdown e = sw_energy(c, k);
    const FluxReport fr = chern_fluxes(c.gauge);
    const Evaluation ev = evaluate(c, k);
    const LinftyReport li = linfty_check(c.spinor, k);
    results = {{"energy", energy_json(e)},
               {"flux", flux_json(fr.m)},
               {"flux_distance", fr.max_distance},
               {"residual_phi", ev.residual_phi_norm},
               {"residual_A", ev.residual_A_norm},
               {"sup_phi_sq", li.sup_phi_sq},
               {"linfty", {{"sup_phi_sq", li.sup_phi_sq}, {"bound", li.bound}, {"satisfied", li.satisfied}}},
               {"max_plaquette_angle", max_plaquette_angle(c.gauge)},
               {"flux_gap_predictor", flux_gap_predictor(fr.m)},
               {"weitzenbock_residual", norm(c.spinor) > 0.0 ? json(weitzenbock_residual(c, k)) : json(nullptr)}};
    write_snapshot(cfg.output_dir / "final.swlatt", c, fr.m);
    return kExitOk;
}

int run_minimize(const ExperimentConfig& cfg, json& results) {
    const Configuration c0 = initial_configuration(cfg);
    const ScalarCurvatureField k = make_k_field(cfg, c0.spec());
    const MinimizeReport r = minimize(c0, k, cfg.optimizer);
    write_minimize_artifacts(cfg.output_dir, r, "trace.csv");
    const FluxReport fr = chern_fluxes(r.final_config.gauge);
    write_snapshot(cfg.output_dir / "final.swlatt", r.final_config, fr.m);
    results = minimize_json(r);
    results["flux"] = flux_json(fr.m);
    return minimize_exit(r);
}

int run_saddle(const ExperimentConfig& cfg, json& results) {
    Configuration cmin = initial_configuration(cfg);
    const ScalarCurvatureField k = make_k_field(cfg, cmin.spec());
    results = json::object();
    if (!cfg.snapshot) {
        const MinimizeReport r = minimize(cmin, k, cfg.optimizer);
        write_minimize_artifacts(cfg.output_dir, r, "trace.csv");
        results["minimize"] = minimize_json(r);
        if (!r.converged) return minimize_exit(r);
        cmin = r.final_config;
    }
    const SaddleReport s = saddle_search(cmin, k, cfg.winding, cfg.images, cfg.optimizer);
    {
        std::ofstream f(cfg.output_dir / "profile.csv", std::ios::trunc);
        f << "image,total,curvature_term,kinetic_term,quartic_term,coupling_term,first_order_total\n";
        for (std::size_t i = 0; i < s.profile.size(); ++i) {
            const auto& e = s.profile[i];
            f << i;
            for (double v : {e.total, e.curvature_term, e.kinetic_term, e.quartic_term, e.coupling_term,
                             e.first_order_total})
                f << ',' << format_double(v);
            f << '\n';
        }
    }
    const Configuration& cand = s.path[s.max_index];
    write_snapshot(cfg.output_dir / "final.swlatt", cand, chern_fluxes(cand.gauge).m);
    double emin = s.profile.front().total;
    json totals = json::array();
    for (const auto& e : s.profile) {
        emin = std::min(emin, e.total);
        totals.push_back(e.total);
    }
    results["images"] = s.images;
    results["winding"] = std::vector<int>(s.winding.begin(), s.winding.end());
    results["sweeps"] = s.sweeps;
    results["converged"] = s.converged;
    results["max_index"] = s.max_index;
    results["candidate"] = energy_json(s.candidate());
    results["candidate_residual_phi"] = s.residual_phi;
    results["candidate_residual_A"] = s.residual_A;
    results["path_residual"] = s.path_residual;
    results["profile_totals"] = totals;
    results["minimum_energy"] = emin;
    return s.converged ? kExitOk : kExitNotConverged;
}

int run_enumerate(const ExperimentConfig& cfg, json& results) {
    const auto classes = spinc_enumerate(*cfg.topology.form, cfg.topology.profile, cfg.topology.radius);
    json list = json::array();
    for (const auto& c : classes) list.push_back(c.alpha);
    results = {{"bound", attainment_bound(cfg.topology.profile)},
               {"radius", cfg.topology.radius},
               {"b2", cfg.topology.form->rank()},
               {"count", classes.size()},
               {"classes", list}};
    return kExitOk;
}

int run_homotopy(const ExperimentConfig& cfg, json& results) {
    const CohomologyProfile& p = cfg.topology.profile;
    json rows = json::array();
    for (int n : cfg.topology.ns) {
        const AbelianGroup g = homotopy_groups(p, n);
        rows.push_back({{"n", n},
                        {"group", g.to_string()},
                        {"free_rank", g.free_rank()},
                        {"torsion", g.torsion()},
                        {"torsion_only_h1", homotopy_torsion_flag(p, n)}});
    }
    const AbelianGroup p0 = pi_zero(p);
    results = {{"rows", rows},
               {"pi_zero", {{"group", p0.to_string()}, {"free_rank", p0.free_rank()}, {"torsion", p0.torsion()}}},
               {"table", render_homotopy_table(p, cfg.topology.ns)}};
    return kExitOk;
}

int run_convergence_study(const ExperimentConfig& cfg, json& results) {
    if (cfg.k_values) throw ConfigError("convergence-study needs a constant k_field");
    const auto lengths = cfg.has_lattice ? cfg.lattice.lengths() : std::array<double, kDim>{1, 1, 1, 1};
    json rows = json::array();
    int exit_code = kExitOk;
    std::vector<double> hs, totals;
    for (int n : cfg.study_sizes) {
        const LatticeSpec spec({n, n, n, n}, lengths);
        const MinimizeReport r = minimize(seed_initial(cfg, spec), make_k_field(cfg, spec), cfg.optimizer);
        write_trace_csv(cfg.output_dir / ("trace_N" + std::to_string(n) + ".csv"), r.trace);
        json row = minimize_json(r);
        row["N"] = n;
        row["h"] = spec.spacing(0);
        rows.push_back(row);
        hs.push_back(spec.spacing(0));
        totals.push_back(r.energy.total);
        if (!r.converged) exit_code = std::max(exit_code, minimize_exit(r));
    }
    results = {{"rows", rows}};
    if (cfg.study_reference) {
        const double ref = *cfg.study_reference;
        json errors = json::array(), orders = json::array();
        for (double t : totals) errors.push_back(std::abs(t - ref));
        for (std::size_t i = 0; i + 1 < totals.size(); ++i) {
            const double e1 = std::abs(totals[i] - ref), e2 = std::abs(totals[i + 1] - ref);
            const double exact = 1e-9 * std::max(1.0, std::abs(ref));
            if (e1 <= exact || e2 <= exact)
                orders.push_back(nullptr);
            else
                orders.push_back(std::log(e1 / e2) / std::log(hs[i] / hs[i + 1]));
        }
        results["reference"] = ref;
        results["errors"] = errors;
        results["observed_orders"] = orders;
    }
    return exit_code;
}

}  // namespace

json error_json(const std::string& kind, const std::string& message) {
    return {{"error", {{"kind", kind}, {"message", message}}}};
}

ExperimentConfig parse_config(const json& j, const std::filesystem::path& base_dir) {
    ExperimentConfig cfg;
    try {
        check_keys(j,
                   {"command", "lattice", "flux", "k_field", "perturbation", "optimizer", "topology", "saddle",
                    "identities", "gradcheck", "convergence_study", "snapshot", "seed", "output_dir"},
                   "config");
        if (!j.contains("command") || !j.at("command").is_string()) throw ConfigError("config.command is required");
        cfg.command = j.at("command").get<std::string>();
        const auto& names = command_names();
        if (std::find(names.begin(), names.end(), cfg.command) == names.end())
            throw ConfigError("unknown command '" + cfg.command + "'");

        if (j.contains("seed")) {
            const auto& s = j.at("seed");
            if (!s.is_number_integer() || (!s.is_number_unsigned() && s.get<std::int64_t>() < 0))
                throw ConfigError("config.seed must be a non-negative integer");
            cfg.seed = s.get<std::uint64_t>();
        }
        cfg.optimizer.seed = cfg.seed;
        if (j.contains("output_dir")) {
            if (!j.at("output_dir").is_string()) throw ConfigError("config.output_dir must be a string");
            cfg.output_dir = j.at("output_dir").get<std::string>();
        }
        if (j.contains("snapshot")) {
            if (!j.at("snapshot").is_string()) throw ConfigError("config.snapshot must be a path string");
            std::filesystem::path p = j.at("snapshot").get<std::string>();
            cfg.snapshot = p.is_relative() ? base_dir / p : p;
        }

        if (j.contains("lattice")) {
            const auto& l = j.at("lattice");
            check_keys(l, {"dims", "lengths"}, "lattice");
            if (!l.contains("dims")) throw ConfigError("lattice.dims is required");
            const auto dims = get_int_array<kDim>(l.at("dims"), "lattice.dims");
            std::array<double, kDim> lengths{1, 1, 1, 1};
            if (l.contains("lengths")) {
                const auto& lv = l.at("lengths");
                if (!lv.is_array() || lv.size() != kDim) throw ConfigError("lattice.lengths must have 4 entries");
                for (int i = 0; i < kDim; ++i) {
                    if (!lv[i].is_number()) throw ConfigError("lattice.lengths must be numbers");
                    lengths[i] = lv[i].get<double>();
                }
            }
            try {
                cfg.lattice = LatticeSpec(dims, lengths);
            } catch (const Error& e) {
                throw ConfigError(std::string("lattice: ") + e.what());
            }
            cfg.has_lattice = true;
        }

        if (j.contains("flux")) cfg.flux = get_int_array<kPlanes>(j.at("flux"), "flux");

        if (j.contains("k_field")) {
            const auto& kf = j.at("k_field");
            if (kf.is_number()) {
                cfg.k_constant = kf.get<double>();
                if (!std::isfinite(*cfg.k_constant)) throw ConfigError("k_field must be finite");
            } else {
                check_keys(kf, {"file"}, "k_field");
                if (!kf.contains("file") || !kf.at("file").is_string())
                    throw ConfigError("k_field must be a number or {\"file\": path}");
                std::filesystem::path p = kf.at("file").get<std::string>();
                cfg.k_values = read_k_file(p.is_relative() ? base_dir / p : p);
            }
        }

        if (j.contains("perturbation")) {
            const auto& p = j.at("perturbation");
            check_keys(p, {"gauge_amplitude", "spinor_amplitude"}, "perturbation");
            if (p.contains("gauge_amplitude"))
                cfg.perturbation.gauge_amplitude = get_number(p, "gauge_amplitude", "perturbation");
            if (p.contains("spinor_amplitude"))
                cfg.perturbation.spinor_amplitude = get_number(p, "spinor_amplitude", "perturbation");
            if (cfg.perturbation.gauge_amplitude < 0 || cfg.perturbation.spinor_amplitude < 0)
                throw ConfigError("perturbation amplitudes must be >= 0");
        }

        if (j.contains("optimizer")) {
            const auto& o = j.at("optimizer");
            check_keys(o,
                       {"initial_step", "armijo_shrink", "armijo_slope", "residual_tol", "max_iter",
                        "gauge_fix_every"},
                       "optimizer");
            auto& opt = cfg.optimizer;
            if (o.contains("initial_step")) opt.initial_step = get_number(o, "initial_step", "optimizer");
            if (o.contains("armijo_shrink")) opt.armijo_shrink = get_number(o, "armijo_shrink", "optimizer");
            if (o.contains("armijo_slope")) opt.armijo_slope = get_number(o, "armijo_slope", "optimizer");
            if (o.contains("residual_tol")) opt.residual_tol = get_number(o, "residual_tol", "optimizer");
            if (o.contains("max_iter")) opt.max_iter = static_cast<int>(get_integer(o, "max_iter", "optimizer"));
            if (o.contains("gauge_fix_every"))
                opt.gauge_fix_every = static_cast<int>(get_integer(o, "gauge_fix_every", "optimizer"));
            try {
                opt.validate();
            } catch (const Error& e) {
                throw ConfigError(e.what());
            }
        }

        if (j.contains("topology")) {
            const auto& t = j.at("topology");
            check_keys(t, {"Q", "w", "H1", "H2", "chi", "sigma", "vol", "k_min", "radius", "n"}, "topology");
            auto& p = cfg.topology.profile;
            if (t.contains("H1")) p.H1 = parse_group(t.at("H1"), "topology.H1");
            if (t.contains("H2")) p.H2 = parse_group(t.at("H2"), "topology.H2");
            if (t.contains("chi")) p.chi = static_cast<int>(get_integer(t, "chi", "topology"));
            if (t.contains("sigma")) p.sigma = static_cast<int>(get_integer(t, "sigma", "topology"));
            if (t.contains("vol")) p.vol = get_number(t, "vol", "topology");
            if (t.contains("k_min")) p.k_min = get_number(t, "k_min", "topology");
            try {
                p.validate();
            } catch (const Error& e) {
                throw ConfigError(e.what());
            }
            if (t.contains("radius")) {
                cfg.topology.radius = static_cast<int>(get_integer(t, "radius", "topology"));
                if (cfg.topology.radius < 0) throw ConfigError("topology.radius must be >= 0");
            }
            if (t.contains("n")) {
                cfg.topology.ns.clear();
                for (auto n : get_int_list(t.at("n"), "topology.n")) {
                    if (n < 1) throw ConfigError("topology.n entries must be >= 1 (pi_0 is always reported)");
                    cfg.topology.ns.push_back(static_cast<int>(n));
                }
            }
            if (t.contains("Q") != t.contains("w")) throw ConfigError("topology.Q and topology.w go together");
            if (t.contains("Q")) {
                const auto& qj = t.at("Q");
                if (!qj.is_array()) throw ConfigError("topology.Q must be a matrix");
                std::vector<std::vector<std::int64_t>> q;
                for (const auto& row : qj) q.push_back(get_int_list(row, "topology.Q row"));
                std::vector<int> w;
                for (auto v : get_int_list(t.at("w"), "topology.w")) w.push_back(static_cast<int>(((v % 2) + 2) % 2));
                try {
                    cfg.topology.form.emplace(std::move(q), std::move(w));
                } catch (const Error& e) {
                    throw ConfigError(e.what());
                }
            }
            if (cfg.command == "homotopy" && !(t.contains("H1") && t.contains("H2")))
                throw ConfigError("homotopy requires topology.H1 and topology.H2");
        }

        if (j.contains("saddle")) {
            const auto& s = j.at("saddle");
            check_keys(s, {"winding", "images"}, "saddle");
            if (s.contains("winding")) cfg.winding = get_int_array<kDim>(s.at("winding"), "saddle.winding");
            if (s.contains("images")) {
                cfg.images = static_cast<int>(get_integer(s, "images", "saddle"));
                if (cfg.images < 3) throw ConfigError("saddle.images must be >= 3");
            }
        }
        if (j.contains("identities")) {
            const auto& s = j.at("identities");
            check_keys(s, {"samples"}, "identities");
            if (s.contains("samples")) cfg.identity_samples = static_cast<int>(get_integer(s, "samples", "identities"));
            if (cfg.identity_samples < 1) throw ConfigError("identities.samples must be >= 1");
        }
        if (j.contains("gradcheck")) {
            const auto& g = j.at("gradcheck");
            check_keys(g, {"directions", "step"}, "gradcheck");
            if (g.contains("directions"))
                cfg.gradcheck_directions = static_cast<int>(get_integer(g, "directions", "gradcheck"));
            if (g.contains("step")) cfg.gradcheck_step = get_number(g, "step", "gradcheck");
            if (cfg.gradcheck_directions < 1 || !(cfg.gradcheck_step > 0))
                throw ConfigError("gradcheck needs directions >= 1 and step > 0");
        }
        if (j.contains("convergence_study")) {
            const auto& c = j.at("convergence_study");
            check_keys(c, {"sizes", "reference"}, "convergence_study");
            if (c.contains("sizes")) {
                cfg.study_sizes.clear();
                for (auto n : get_int_list(c.at("sizes"), "convergence_study.sizes")) {
                    if (n < 2) throw ConfigError("convergence_study.sizes entries must be >= 2");
                    cfg.study_sizes.push_back(static_cast<int>(n));
                }
            }
            if (c.contains("reference")) cfg.study_reference = get_number(c, "reference", "convergence_study");
        }

        // Command-specific requirements.
        const std::string& c = cfg.command;
        if (command_needs_lattice(c) && !cfg.has_lattice && !(cfg.snapshot && c != "check-identities"))
            throw ConfigError(c + " requires lattice (or a snapshot)");
        if (command_needs_k(c) && !cfg.k_constant && !cfg.k_values) throw ConfigError(c + " requires k_field");
        if ((c == "enumerate" || c == "homotopy") && !j.contains("topology"))
            throw ConfigError(c + " requires topology");
        if (c == "enumerate" && !cfg.topology.form) throw ConfigError("enumerate requires topology.Q and topology.w");
        if (c == "saddle" && !(j.contains("saddle") && j.at("saddle").contains("winding")))
            throw ConfigError("saddle requires saddle.winding");
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    cfg.echo = j;
    cfg.echo["seed"] = cfg.seed;
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config " + path.string());
    json j;
    try {
        j = json::parse(f);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j, path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

ScalarCurvatureField make_k_field(const ExperimentConfig& cfg, const LatticeSpec& spec) {
    if (cfg.k_values) {
        if (cfg.k_values->size() != spec.sites())
            throw ConfigError("k_field file has " + std::to_string(cfg.k_values->size()) + " values, lattice has " +
                              std::to_string(spec.sites()) + " sites");
        return ScalarCurvatureField(spec, *cfg.k_values);
    }
    if (!cfg.k_constant) throw ConfigError("k_field is required");
    return ScalarCurvatureField::constant(spec, *cfg.k_constant);
}

Configuration seed_initial(const ExperimentConfig& cfg) {
    return seed_initial(cfg, cfg.lattice);
}

Configuration seed_initial(const ExperimentConfig& cfg, const LatticeSpec& spec) {
    constexpr double kHalfPi = std::numbers::pi / 2.0;
    for (int p = 0; p < kPlanes; ++p) {
        const auto& pl = kPlaneList[p];
        const double angle = 2.0 * std::numbers::pi * cfg.flux[p] / (spec.dims()[pl.mu] * spec.dims()[pl.nu]);
        if (std::abs(angle) >= kHalfPi)
            throw BranchSafetyError("flux " + std::to_string(cfg.flux[p]) + " in plane " + std::to_string(p) +
                                    " gives plaquette angle >= pi/2; use a finer lattice");
    }
    Configuration c(constant_flux_field(spec, cfg.flux), SpinorField(spec));
    Uniform u(cfg.seed);
    if (cfg.perturbation.gauge_amplitude > 0.0)
        for (auto& a : c.gauge.angles) a += cfg.perturbation.gauge_amplitude * u();
    if (cfg.perturbation.spinor_amplitude > 0.0)
        for (auto& z : c.spinor.psi) {
            const double re = u();
            const double im = u();
            z += cfg.perturbation.spinor_amplitude * Complex(re, im);
        }
    if (max_plaquette_angle(c.gauge) >= kHalfPi)
        throw BranchSafetyError("perturbed plaquette angle reached pi/2; lower perturbation.gauge_amplitude");
    return c;
}

RunResult run(const ExperimentConfig& cfg) {
    RunResult out;
    std::filesystem::create_directories(cfg.output_dir);
    json results;
    try {
        const std::string& c = cfg.command;
        if (c == "check-identities")
            out.exit_code = run_check_identities(cfg, results);
        else if (c == "gradcheck")
            out.exit_code = run_gradcheck(cfg, results);
        else if (c == "energy")
            out.exit_code = run_energy(cfg, results);
        else if (c == "minimize")
            out.exit_code = run_minimize(cfg, results);
        else if (c == "saddle")
            out.exit_code = run_saddle(cfg, results);
        else if (c == "enumerate")
            out.exit_code = run_enumerate(cfg, results);
        else if (c == "homotopy")
            out.exit_code = run_homotopy(cfg, results);
        else if (c == "convergence-study")
            out.exit_code = run_convergence_study(cfg, results);
        else
            throw ConfigError("unknown command '" + c + "'");
    } catch (const ConfigError& e) {
        out.exit_code = kExitConfig;
        results = error_json("config", e.what());
    } catch (const BranchSafetyError& e) {
        out.exit_code = kExitConfig;
        results = error_json("branch_safety", e.what());
    } catch (const SpecMismatchError& e) {
        out.exit_code = kExitConfig;
        results = error_json("spec_mismatch", e.what());
    } catch (const SearchTooLargeError& e) {
        out.exit_code = kExitConfig;
        results = error_json("search_too_large", e.what());
    } catch (const SectorChangeError& e) {
        out.exit_code = kExitNumeric;
        results = error_json("sector_change", e.what());
    } catch (const PoissonSolveError& e) {
        out.exit_code = kExitNumeric;
        results = error_json("poisson", e.what());
        results["error"]["residual"] = e.residual();
    } catch (const Error& e) {
        out.exit_code = kExitNumeric;
        results = error_json("numeric", e.what());
    }

    out.report = {{"command", cfg.command},
                  {"config", cfg.echo},
                  {"results", results},
                  {"exit_code", out.exit_code},
                  {"versions", {{"swflow", kVersion}, {"snapshot_format", "SWLATT1"}}},
                  {"timestamp", timestamp_utc()}};
    std::ofstream f(cfg.output_dir / "report.json", std::ios::trunc);
    f << out.report.dump(2) << "\n";
    return out;
}

}  // namespace swflow
