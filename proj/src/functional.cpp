#include "swflow/functional.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>

#include "swflow/errors.hpp"

namespace swflow {

namespace {

std::atomic<std::uint64_t> g_fo_count{0};
std::atomic<double> g_fo_min{std::numeric_limits<double>::infinity()};

void record_first_order(double v) {
    g_fo_count.fetch_add(1, std::memory_order_relaxed);
    double cur = g_fo_min.load(std::memory_order_relaxed);
    while (v < cur && !g_fo_min.compare_exchange_weak(cur, v, std::memory_order_relaxed)) {
    }
}

void require_k(const Configuration& c, const ScalarCurvatureField& k, const char* where) {
    require_same_spec(c.spec(), k.spec, where);
}

std::array<double, kPlanes> site_form(const Cochain& F, std::size_t s) {
    std::array<double, kPlanes> f;
    for (int p = 0; p < kPlanes; ++p) f[p] = F.values[6 * s + p];
    return f;
}

// Per-site integrands, summed with the fixed pairwise tree.
struct Densities {
    std::vector<double> curvature, kinetic, quartic, coupling;
    explicit Densities(std::size_t n) : curvature(n), kinetic(n), quartic(n), coupling(n) {}
};

EnergyBreakdown integrate(const Densities& d, double vol) {
    EnergyBreakdown e;
    e.curvature_term = 0.25 * pairwise_sum(d.curvature) * vol;
    e.kinetic_term = pairwise_sum(d.kinetic) * vol;
    e.quartic_term = 0.125 * pairwise_sum(d.quartic) * vol;
    e.coupling_term = 0.25 * pairwise_sum(d.coupling) * vol;
    e.total = e.curvature_term + e.kinetic_term + e.quartic_term + e.coupling_term;
    return e;
}

void fill_densities(const Configuration& c, const ScalarCurvatureField& k, const Cochain& F, Densities& d) {
    const LatticeSpec& L = c.spec();
    const auto n = static_cast<std::int64_t>(L.sites());
#pragma omp parallel for schedule(static) if (n > 8192)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto s = static_cast<std::size_t>(i);
        double f2 = 0.0;
        for (int p = 0; p < kPlanes; ++p) f2 += F.values[6 * s + p] * F.values[6 * s + p];
        double kin = 0.0;
        for (int mu = 0; mu < kDim; ++mu) {
            const auto df = forward_difference(c.gauge, c.spinor, s, mu);
            kin += std::norm(df[0]) + std::norm(df[1]);
        }
        const double r2 = std::norm(c.spinor.psi[2 * s]) + std::norm(c.spinor.psi[2 * s + 1]);
        d.curvature[s] = f2;
        d.kinetic[s] = kin;
        d.quartic[s] = r2 * r2;
        d.coupling[s] = k.k[s] * r2;
    }
}

}  // namespace

EnergyBreakdown energy_terms(const Configuration& c, const ScalarCurvatureField& k) {
    require_k(c, k, "sw_energy");
    Densities d(c.spec().sites());
    fill_densities(c, k, curvature(c.gauge), d);
    return integrate(d, c.spec().cell_volume());
}

EnergyBreakdown sw_energy(const Configuration& c, const ScalarCurvatureField& k) {
    EnergyBreakdown e = energy_terms(c, k);
    e.first_order_total = first_order_energy(c);
    e.topological_gap = e.total - e.first_order_total;
    return e;
}

FirstOrderResult first_order_residuals(const Configuration& c) {
    const LatticeSpec& L = c.spec();
    const Cochain F = curvature(c.gauge);
    Cochain residual(L, 2);
    std::vector<double> density(L.sites());
    for (std::size_t s = 0; s < L.sites(); ++s) {
        const Mat2 diff = selfdual_to_endo(site_form(F, s)) + Complex(-1.0) * sigma_matrix(c.spinor.at(s));
        density[s] = endo_inner(diff, diff);
        const auto f = endo_to_selfdual(diff);
        for (int p = 0; p < kPlanes; ++p) residual.values[6 * s + p] = f[p];
    }
    SpinorField dirac = dirac_plus(c.gauge, c.spinor);
    const double curv = pairwise_sum(density) * L.cell_volume();
    const double dir = real_inner(dirac, dirac);
    const double value = 0.5 * (curv + dir);
    record_first_order(value);
    return {value, std::move(residual), std::move(dirac)};
}

double first_order_energy(const Configuration& c) {
    return first_order_residuals(c).value;
}

FirstOrderAudit first_order_audit() {
    return {g_fo_count.load(), g_fo_min.load()};
}

void reset_first_order_audit() {
    g_fo_count = 0;
    g_fo_min = std::numeric_limits<double>::infinity();
}

SpinorField el_residual_phi(const Configuration& c, const ScalarCurvatureField& k) {
    require_k(c, k, "el_residual_phi");
    SpinorField out = covariant_laplacian(c.gauge, c.spinor);
    for (std::size_t s = 0; s < c.spec().sites(); ++s) {
        const double r2 = std::norm(c.spinor.psi[2 * s]) + std::norm(c.spinor.psi[2 * s + 1]);
        const double coef = 0.25 * (r2 + k.k[s]);
        out.psi[2 * s] += coef * c.spinor.psi[2 * s];
        out.psi[2 * s + 1] += coef * c.spinor.psi[2 * s + 1];
    }
    return out;
}

Cochain el_residual_A(const Configuration& c) {
    Cochain out = codifferential(curvature(c.gauge));
    const Cochain ps = phi_star(c.gauge, c.spinor);
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += 4.0 * ps.values[i];
    return out;
}

Evaluation evaluate(const Configuration& c, const ScalarCurvatureField& k) {
    require_k(c, k, "evaluate");
    const LatticeSpec& L = c.spec();
    const Cochain F = curvature(c.gauge);
    Densities d(L.sites());
    fill_densities(c, k, F, d);
    Evaluation ev{integrate(d, L.cell_volume()), el_residual_phi(c, k), codifferential(F), 0.0, 0.0, 0.0};
    const Cochain ps = phi_star(c.gauge, c.spinor);
    for (std::size_t i = 0; i < ev.residual_A.values.size(); ++i) ev.residual_A.values[i] += 4.0 * ps.values[i];
    ev.residual_phi_norm = norm(ev.residual_phi);
    ev.residual_A_norm = norm(ev.residual_A);
    ev.sup_phi_sq = max_abs_sq(c.spinor);
    return ev;
}

double IdentityReport::worst() const {
    return std::max({curvature_pairing, sigma_norm, sigma_eigen});
}

IdentityReport identity_suite(const SpinorField& phi, const Cochain& fplus) {
    require_same_spec(phi.spec, fplus.spec, "identity_suite");
    if (fplus.degree != 2) throw DegreeError("identity_suite expects a 2-cochain");
    const Cochain sd = selfdual_project(fplus, Duality::SelfDual);
    IdentityReport r{0.0, 0.0, 0.0};
    for (std::size_t s = 0; s < phi.spec.sites(); ++s) {
        const auto v = phi.at(s);
        const double r2 = std::norm(v[0]) + std::norm(v[1]);
        const Mat2 sigma = sigma_matrix(v);
        const auto f = site_form(sd, s);

        // <F+, sigma> through the 2-form inner product on the pulled-back sigma.
        const auto sigma_form = endo_to_selfdual(sigma);
        double lhs = 0.0;
        for (int p = 0; p < kPlanes; ++p) lhs += f[p] * sigma_form[p];
        const auto fphi = act(selfdual_to_endo(f), v);
        const double rhs = 0.5 * (std::conj(v[0]) * fphi[0] + std::conj(v[1]) * fphi[1]).real();
        r.curvature_pairing = std::max(r.curvature_pairing, std::abs(lhs - rhs));

        r.sigma_norm = std::max(r.sigma_norm, std::abs(endo_inner(sigma, sigma) - 0.25 * r2 * r2));

        const auto sp = act(sigma, v);
        for (int i = 0; i < 2; ++i) r.sigma_eigen = std::max(r.sigma_eigen, std::abs(sp[i] - 0.5 * r2 * v[i]));
    }
    return r;
}

double weitzenbock_residual(const Configuration& c, const ScalarCurvatureField& k) {
    require_k(c, k, "weitzenbock_residual");
    const double phinorm = norm(c.spinor);
    if (phinorm == 0.0) throw UndefinedRatioError("weitzenbock_residual: phi = 0");
    const LatticeSpec& L = c.spec();
    const Cochain F = curvature(c.gauge);
    SpinorField out = dirac_plus_adjoint(c.gauge, dirac_plus(c.gauge, c.spinor));
    const SpinorField lap = covariant_laplacian(c.gauge, c.spinor);
    for (std::size_t s = 0; s < L.sites(); ++s) {
        std::array<double, kPlanes> clover{};
        for (int p = 0; p < kPlanes; ++p) {
            const int mu = kPlaneList[p].mu, nu = kPlaneList[p].nu;
            const std::size_t sm = L.down(s, mu), sn = L.down(s, nu), smn = L.down(sm, nu);
            clover[p] = 0.25 * (F.values[6 * s + p] + F.values[6 * sm + p] + F.values[6 * sn + p] +
                                F.values[6 * smn + p]);
        }
        const auto v = c.spinor.at(s);
        const auto fv = act(clifford_action(clover), v);
        for (int i = 0; i < 2; ++i)
            out.psi[2 * s + i] -= lap.psi[2 * s + i] + 0.25 * k.k[s] * v[i] + fv[i];
    }
    return norm(out) / phinorm;
}

double topological_constant(const Configuration& c, const ScalarCurvatureField& k) {
    return sw_energy(c, k).topological_gap;
}

int flux_pairing(const Flux& m) {
    return m[0] * m[5] - m[1] * m[4] + m[2] * m[3];
}

double flux_gap_predictor(const Flux& m) {
    return -2.0 * std::numbers::pi * std::numbers::pi * flux_pairing(m);
}

}  // namespace swflow
