#include "swflow/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "swflow/errors.hpp"

namespace swflow {

namespace {

constexpr double kStepFloor = 1e-12;
constexpr double kStepCeiling = 1e6;

// A tangent vector in metric coordinates (psi, Theta = a / h).
struct Direction {
    std::vector<Complex> psi;
    std::vector<double> theta;
};

double metric_inner(const Direction& a, const Direction& b, double vol) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.psi.size(); ++i) s += (std::conj(a.psi[i]) * b.psi[i]).real();
    for (std::size_t i = 0; i < a.theta.size(); ++i) s += a.theta[i] * b.theta[i];
    return s * vol;
}

void axpy(Direction& y, double s, const Direction& x) {
    for (std::size_t i = 0; i < y.psi.size(); ++i) y.psi[i] += s * x.psi[i];
    for (std::size_t i = 0; i < y.theta.size(); ++i) y.theta[i] += s * x.theta[i];
}

void scale(Direction& y, double s) {
    for (auto& v : y.psi) v *= s;
    for (auto& v : y.theta) v *= s;
}

Direction gradient(const Evaluation& ev) {
    Direction g{ev.residual_phi.psi, ev.residual_A.values};
    for (auto& v : g.psi) v *= 2.0;
    for (auto& v : g.theta) v *= 0.5;
    return g;
}

// c + s * d.
Configuration moved(const Configuration& c, const Direction& d, double s) {
    Configuration out = c;
    const LatticeSpec& L = c.spec();
    for (std::size_t i = 0; i < out.spinor.psi.size(); ++i) out.spinor.psi[i] += s * d.psi[i];
    for (std::size_t i = 0; i < out.gauge.angles.size(); ++i)
        out.gauge.angles[i] += s * L.spacing(static_cast<int>(i % 4)) * d.theta[i];
    return out;
}

// b - a in metric coordinates.
Direction difference(const Configuration& b, const Configuration& a) {
    const LatticeSpec& L = a.spec();
    Direction d{b.spinor.psi, b.gauge.angles};
    for (std::size_t i = 0; i < d.psi.size(); ++i) d.psi[i] -= a.spinor.psi[i];
    for (std::size_t i = 0; i < d.theta.size(); ++i)
        d.theta[i] = (d.theta[i] - a.gauge.angles[i]) / L.spacing(static_cast<int>(i % 4));
    return d;
}

// (1-t) a + t b.
Configuration blend(const Configuration& a, const Configuration& b, double t) {
    Configuration out = a;
    for (std::size_t i = 0; i < out.spinor.psi.size(); ++i)
        out.spinor.psi[i] = (1.0 - t) * a.spinor.psi[i] + t * b.spinor.psi[i];
    for (std::size_t i = 0; i < out.gauge.angles.size(); ++i)
        out.gauge.angles[i] = (1.0 - t) * a.gauge.angles[i] + t * b.gauge.angles[i];
    return out;
}

bool finite_energy(const Evaluation& ev) {
    return std::isfinite(ev.energy.total) && std::isfinite(ev.residual_phi_norm) && std::isfinite(ev.residual_A_norm);
}

TraceRow trace_row(int iteration, const Evaluation& ev) {
    const auto& e = ev.energy;
    return {iteration,          e.total,          e.curvature_term,    e.kinetic_term, e.quartic_term,
            e.coupling_term,    ev.residual_phi_norm, ev.residual_A_norm, ev.sup_phi_sq};
}

void check_sector(const std::vector<std::int32_t>& reference, const GaugeField& A, const std::string& where) {
    if (plaquette_branches(A) != reference)
        throw SectorChangeError(where + ": a plaquette angle crossed the branch cut (flux sector changed)");
}

bool converged(const Evaluation& ev, double tol) {
    return ev.residual_phi_norm <= tol && ev.residual_A_norm <= tol;
}

}  // namespace

void OptimizerConfig::validate() const {
    if (!(initial_step > 0.0) || !std::isfinite(initial_step)) throw Error("optimizer.initial_step must be > 0");
    if (!(armijo_shrink > 0.0 && armijo_shrink < 1.0)) throw Error("optimizer.armijo_shrink must lie in (0,1)");
    if (!(armijo_slope > 0.0 && armijo_slope < 1.0)) throw Error("optimizer.armijo_slope must lie in (0,1)");
    if (!(residual_tol > 0.0)) throw Error("optimizer.residual_tol must be > 0");
    if (max_iter <= 0) throw Error("optimizer.max_iter must be positive");
    if (gauge_fix_every < 0) throw Error("optimizer.gauge_fix_every must be >= 0");
}

const char* to_string(Termination t) {
    switch (t) {
        case Termination::Converged: return "converged";
        case Termination::MaxIterations: return "max_iterations";
        case Termination::Stagnated: return "stagnated";
    }
    return "unknown";
}

MinimizeReport minimize(const Configuration& c0, const ScalarCurvatureField& k, const OptimizerConfig& opts) {
    opts.validate();
    require_same_spec(c0.spec(), k.spec, "minimize");
    const double vol = c0.spec().cell_volume();
    const auto branches = plaquette_branches(c0.gauge);

    MinimizeReport report{.final_config = c0};
    Configuration& x = report.final_config;
    Evaluation ev = evaluate(x, k);
    if (!finite_energy(ev)) throw NonFiniteEnergyError("minimize: initial energy is not finite");
    report.trace.push_back(trace_row(0, ev));

    Direction g = gradient(ev);
    double step = opts.initial_step;
    int iter = 0;
    for (;;) {
        if (converged(ev, opts.residual_tol)) {
            report.termination = Termination::Converged;
            break;
        }
        if (iter >= opts.max_iter) {
            report.termination = Termination::MaxIterations;
            break;
        }
        const double gg = metric_inner(g, g, vol);
        double s = step;
        bool accepted = false;
        bool saw_finite = false;
        Configuration trial = x;
        Evaluation ev_trial = ev;
        while (s >= kStepFloor) {
            trial = moved(x, g, -s);
            ev_trial = evaluate(trial, k);
            if (finite_energy(ev_trial)) {
                saw_finite = true;
                if (ev_trial.energy.total <= ev.energy.total - opts.armijo_slope * s * gg) {
                    accepted = true;
                    break;
                }
            }
            s *= opts.armijo_shrink;
        }
        if (!accepted) {
            if (!saw_finite) throw NonFiniteEnergyError("minimize: energy is not finite along the descent direction");
            report.termination = Termination::Stagnated;
            break;
        }
        ++iter;
        check_sector(branches, trial.gauge, "minimize iteration " + std::to_string(iter));

        // Barzilai-Borwein (short) step for the next trial.
        Direction g_new = gradient(ev_trial);
        Direction dg = g_new;
        axpy(dg, -1.0, g);
        const double sy = s * -metric_inner(g, dg, vol);  // <dx, dg> with dx = -s g
        const double yy = metric_inner(dg, dg, vol);
        step = (sy > 0.0 && yy > 0.0) ? sy / yy : 2.0 * s;
        step = std::clamp(step, kStepFloor, kStepCeiling);

        x = std::move(trial);
        ev = std::move(ev_trial);
        g = std::move(g_new);
        if (opts.gauge_fix_every > 0 && iter % opts.gauge_fix_every == 0) {
            x = gauge_fix(x);
            ev = evaluate(x, k);
            g = gradient(ev);
        }
        report.trace.push_back(trace_row(iter, ev));
    }

    report.iterations = iter;
    report.converged = report.termination == Termination::Converged;
    report.energy = sw_energy(x, k);
    report.residual_phi = ev.residual_phi_norm;
    report.residual_A = ev.residual_A_norm;
    report.sup_phi_sq = ev.sup_phi_sq;
    report.linfty_bound_satisfied = linfty_check(x.spinor, k).satisfied;
    return report;
}

Configuration gauge_fix(const Configuration& c, const GaugeFixOptions& opts) {
    const LatticeSpec& L = c.spec();
    const std::size_t n = L.sites();
    std::array<double, kDim> w{};
    for (int mu = 0; mu < kDim; ++mu) w[mu] = 1.0 / (L.spacing(mu) * L.spacing(mu));

    auto laplace = [&](const std::vector<double>& v, std::vector<double>& out) {
        for (std::size_t s = 0; s < n; ++s) {
            double acc = 0.0;
            for (int mu = 0; mu < kDim; ++mu) acc += w[mu] * (2.0 * v[s] - v[L.up(s, mu)] - v[L.down(s, mu)]);
            out[s] = acc;
        }
    };
    auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
        return s;
    };

    std::vector<double> b(n);
    for (std::size_t s = 0; s < n; ++s) {
        double acc = 0.0;
        for (int mu = 0; mu < kDim; ++mu) acc += w[mu] * (c.gauge(s, mu) - c.gauge(L.down(s, mu), mu));
        b[s] = acc;
    }
    // The constant mode is the kernel; its component of b vanishes up to rounding.
    double mean = 0.0;
    for (double v : b) mean += v;
    mean /= static_cast<double>(n);
    for (double& v : b) v -= mean;

    const double bnorm = std::sqrt(dot(b, b));
    if (bnorm == 0.0) return c;

    const int max_iter = opts.max_iter > 0 ? opts.max_iter : static_cast<int>(10 * n);
    std::vector<double> chi(n, 0.0), r = b, p = b, q(n);
    double rr = dot(r, r);
    bool done = false;
    for (int it = 0; it < max_iter; ++it) {
        if (std::sqrt(rr) <= opts.tolerance * bnorm) {
            done = true;
            break;
        }
        laplace(p, q);
        const double alpha = rr / dot(p, q);
        for (std::size_t i = 0; i < n; ++i) {
            chi[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        const double rr_new = dot(r, r);
        const double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    }
    if (!done && std::sqrt(rr) > opts.tolerance * bnorm) {
        laplace(chi, q);
        double res = 0.0;
        for (std::size_t i = 0; i < n; ++i) res += (b[i] - q[i]) * (b[i] - q[i]);
        res = std::sqrt(res) / bnorm;
        throw PoissonSolveError("gauge_fix: Poisson solve did not converge (relative residual " +
                                    std::to_string(res) + ")",
                                res);
    }
    const double origin = chi[0];
    for (double& v : chi) v -= origin;
    return apply_gauge(GaugeTransform(L, std::move(chi)), c);
}

LinftyReport linfty_check(const SpinorField& phi, const ScalarCurvatureField& k, double tolerance) {
    require_same_spec(phi.spec, k.spec, "linfty_check");
    const double sup = max_abs_sq(phi);
    const double bound = std::max(0.0, -k.k_min);
    return {sup, bound, sup <= bound + tolerance};
}

SaddleReport saddle_search(const Configuration& cmin, const ScalarCurvatureField& k, const std::array<int, kDim>& n,
                           int images, const OptimizerConfig& opts) {
    opts.validate();
    require_same_spec(cmin.spec(), k.spec, "saddle_search");
    if (std::all_of(n.begin(), n.end(), [](int v) { return v == 0; }))
        throw ContractibleLoopError("saddle_search: winding n = 0 gives a contractible loop; use minimize instead");
    if (images < 3) throw Error("saddle_search: at least 3 images are required");

    const double vol = cmin.spec().cell_volume();
    const auto branches = plaquette_branches(cmin.gauge);
    const Configuration cend = apply_gauge(GaugeTransform::large(cmin.spec(), n), cmin);
    const double e0 = energy_terms(cmin, k).total;
    const double e1 = energy_terms(cend, k).total;
    if (std::abs(e0 - e1) > 1e-10)
        throw Error("saddle_search: loop endpoints are not gauge-equivalent (energy mismatch)");

    const int P = images;
    std::vector<Configuration> path;
    path.reserve(P);
    for (int j = 0; j < P; ++j) path.push_back(blend(cmin, cend, static_cast<double>(j) / (P - 1)));

    const double path_tol = 100.0 * opts.residual_tol;
    std::vector<double> steps(P, opts.initial_step);
    std::vector<Evaluation> evs;
    SaddleReport report;
    report.images = P;
    report.winding = n;
    int top = 0;  // max-energy interior image
    int sweep = 0;

    for (;; ++sweep) {
        evs.clear();
        for (const auto& c : path) {
            evs.push_back(evaluate(c, k));
            if (!finite_energy(evs.back())) throw NonFiniteEnergyError("saddle_search: non-finite image energy");
        }
        top = 1;
        for (int j = 2; j < P - 1; ++j)
            if (evs[j].energy.total > evs[top].energy.total) top = j;

        // Upwind tangents, then search directions: the gradient with its
        // tangential part removed.
        std::vector<Direction> tangents(P), dirs(P);
        double worst_perp = 0.0;
        for (int j = 1; j < P - 1; ++j) {
            const double ep = evs[j + 1].energy.total, e = evs[j].energy.total, em = evs[j - 1].energy.total;
            Direction fwd = difference(path[j + 1], path[j]);
            Direction bwd = difference(path[j], path[j - 1]);
            Direction t;
            if (ep > e && e > em) {
                t = std::move(fwd);
            } else if (ep < e && e < em) {
                t = std::move(bwd);
            } else {
                const double big = std::max(std::abs(ep - e), std::abs(em - e));
                const double small = std::min(std::abs(ep - e), std::abs(em - e));
                const bool fwd_major = ep > em;
                t = fwd;
                scale(t, fwd_major ? big : small);
                axpy(t, fwd_major ? small : big, bwd);
                if (big == 0.0) {
                    t = std::move(fwd);
                    axpy(t, 1.0, bwd);
                }
            }
            const double tn = std::sqrt(metric_inner(t, t, vol));
            if (tn > 0.0) scale(t, 1.0 / tn);
            Direction g = gradient(evs[j]);
            const double gt = metric_inner(g, t, vol);
            axpy(g, -gt, t);
            worst_perp = std::max(worst_perp, std::sqrt(metric_inner(g, g, vol)));
            dirs[j] = std::move(g);
            tangents[j] = std::move(t);
        }
        report.path_residual = worst_perp;
        if (converged(evs[top], opts.residual_tol) && worst_perp <= path_tol) {
            report.converged = true;
            break;
        }
        if (sweep >= opts.max_iter) break;

        for (int j = 1; j < P - 1; ++j) {
            const double dd = metric_inner(dirs[j], dirs[j], vol);
            if (dd == 0.0) continue;
            double s = steps[j];
            bool accepted = false;
            Configuration trial = path[j];
            Evaluation et = evs[j];
            while (s >= kStepFloor) {
                trial = moved(path[j], dirs[j], -s);
                et = evaluate(trial, k);
                if (finite_energy(et) && et.energy.total <= evs[j].energy.total - opts.armijo_slope * s * dd) {
                    accepted = true;
                    break;
                }
                s *= opts.armijo_shrink;
            }
            if (!accepted) {
                steps[j] = opts.initial_step;
                continue;
            }
            check_sector(branches, trial.gauge, "saddle_search sweep " + std::to_string(sweep));

            // Barzilai-Borwein step from the same projected field at the new point.
            Direction d_new = gradient(et);
            const double gt = metric_inner(d_new, tangents[j], vol);
            axpy(d_new, -gt, tangents[j]);
            Direction dg = std::move(d_new);
            axpy(dg, -1.0, dirs[j]);
            const double sy = -s * metric_inner(dirs[j], dg, vol);
            const double yy = metric_inner(dg, dg, vol);
            steps[j] = std::clamp(sy > 0.0 && yy > 0.0 ? sy / yy : 2.0 * s, kStepFloor, kStepCeiling);
            path[j] = std::move(trial);
        }

        // Equal-arclength redistribution.
        auto redistribute = [&](int lo, int hi) {
            if (hi - lo < 2) return;
            std::vector<double> arc(hi - lo + 1, 0.0);
            for (int j = lo + 1; j <= hi; ++j) {
                const Direction d = difference(path[j], path[j - 1]);
                arc[j - lo] = arc[j - lo - 1] + std::sqrt(metric_inner(d, d, vol));
            }
            const double total = arc.back();
            if (total == 0.0) return;
            std::vector<Configuration> fresh;
            for (int j = lo + 1; j < hi; ++j) {
                const double target = total * (j - lo) / (hi - lo);
                int seg = 1;
                while (seg < hi - lo && arc[seg] < target) ++seg;
                const double span = arc[seg] - arc[seg - 1];
                const double t = span > 0.0 ? (target - arc[seg - 1]) / span : 0.0;
                fresh.push_back(blend(path[lo + seg - 1], path[lo + seg], t));
            }
            for (int j = lo + 1; j < hi; ++j) path[j] = std::move(fresh[j - lo - 1]);
        };
        redistribute(0, P - 1);
    }

    report.sweeps = sweep;
    report.max_index = top;
    report.residual_phi = evs[top].residual_phi_norm;
    report.residual_A = evs[top].residual_A_norm;
    for (const auto& c : path) report.profile.push_back(sw_energy(c, k));
    report.path = std::move(path);
    return report;
}

}  // namespace swflow
