#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "swflow/errors.hpp"
#include "swflow/functional.hpp"

using namespace swflow;
using testing::kPi;
using testing::Rng;

namespace {

ScalarCurvatureField kconst(const LatticeSpec& L, double v) {
    return ScalarCurvatureField::constant(L, v);
}

// (1/2) |F+|^2 vol with F+ from the Levi-Civita star, for phi = 0.
double oracle_first_order_phi0(const Configuration& c) {
    const LatticeSpec& L = c.spec();
    const Cochain F = curvature(c.gauge);
    long double acc = 0;
    for (std::size_t s = 0; s < L.sites(); ++s) {
        std::array<double, 6> f{};
        for (int p = 0; p < 6; ++p) f[p] = F[6 * s + p];
        const auto star = testing::hodge_star(f);
        for (int p = 0; p < 6; ++p) acc += 0.25 * (f[p] + star[p]) * (f[p] + star[p]);
    }
    return 0.5 * static_cast<double>(acc) * L.cell_volume();
}

Configuration plane_wave(const LatticeSpec& L, int mode, Complex amp0, Complex amp1) {
    Configuration c(L);
    const double q = 2 * kPi * mode / L.lengths()[0];
    for (std::size_t s = 0; s < L.sites(); ++s) {
        const double x = L.coords(s)[0] * L.spacing(0);
        const Complex e = std::polar(1.0, q * x);
        c.spinor.psi[2 * s] = amp0 * e;
        c.spinor.psi[2 * s + 1] = amp1 * e;
    }
    return c;
}

}  // namespace

TEST_CASE("trivial configuration has zero energy") {
    const LatticeSpec L = LatticeSpec::cubic(4);
    const EnergyBreakdown e = sw_energy(Configuration(L), kconst(L, -1.0));
    CHECK(e.total == 0.0);
    CHECK(e.first_order_total == 0.0);
    CHECK(e.topological_gap == 0.0);
}

TEST_CASE("constant Ginzburg-Landau state") {
    // phi = (1,0), A = 0, k = -1: density 1/8 - 1/4 on the unit torus.
    const LatticeSpec L = LatticeSpec::cubic(4);
    Configuration c(L);
    for (std::size_t s = 0; s < L.sites(); ++s) c.spinor.psi[2 * s] = 1.0;
    const auto k = kconst(L, -1.0);
    const EnergyBreakdown e = energy_terms(c, k);
    CHECK(e.total == doctest::Approx(-0.125).epsilon(1e-15));
    CHECK(e.quartic_term == doctest::Approx(0.125));
    CHECK(e.coupling_term == doctest::Approx(-0.25));
    CHECK(norm(el_residual_phi(c, k)) < 1e-14);
    CHECK(norm(el_residual_A(c)) < 1e-14);
}

TEST_CASE("constant flux energies on the unit torus") {
    const LatticeSpec L = LatticeSpec::cubic(4);
    const auto k = kconst(L, 0.0);
    {
        const Configuration c(constant_flux_field(L, {1, 0, 0, 0, 0, 0}), SpinorField(L));
        const EnergyBreakdown e = sw_energy(c, k);
        CHECK(e.total == doctest::Approx(kPi * kPi).epsilon(1e-13));
        CHECK(e.first_order_total == doctest::Approx(kPi * kPi).epsilon(1e-13));
        CHECK(norm(el_residual_A(c)) < 1e-12);
    }
    {
        // Anti-self-dual: F+ = 0.
        const Configuration c(constant_flux_field(L, {1, 0, 0, 0, 0, -1}), SpinorField(L));
        const EnergyBreakdown e = sw_energy(c, k);
        CHECK(e.total == doctest::Approx(2 * kPi * kPi).epsilon(1e-13));
        CHECK(std::abs(e.first_order_total) < 1e-12);
        CHECK(e.topological_gap == doctest::Approx(flux_gap_predictor({1, 0, 0, 0, 0, -1})).epsilon(1e-12));
    }
    {
        const Configuration c(constant_flux_field(L, {1, 0, 0, 0, 0, 1}), SpinorField(L));
        const EnergyBreakdown e = sw_energy(c, k);
        CHECK(e.total == doctest::Approx(2 * kPi * kPi).epsilon(1e-13));
        CHECK(e.first_order_total == doctest::Approx(4 * kPi * kPi).epsilon(1e-13));
        CHECK(e.topological_gap == doctest::Approx(-2 * kPi * kPi).epsilon(1e-12));
        CHECK(flux_gap_predictor({1, 0, 0, 0, 0, 1}) == doctest::Approx(-2 * kPi * kPi));
    }
}

TEST_CASE("flux pairing") {
    CHECK(flux_pairing({1, 0, 0, 0, 0, 1}) == 1);
    CHECK(flux_pairing({0, 1, 0, 0, 1, 0}) == -1);
    CHECK(flux_pairing({0, 0, 2, 3, 0, 0}) == 6);
    CHECK(flux_pairing({1, 2, 3, 4, 5, 6}) == 6 - 10 + 12);
}

TEST_CASE("energy agrees with the coordinate oracle (property)") {
    Rng r(31);
    for (int trial = 0; trial < 20; ++trial) {
        const LatticeSpec L({r.integer(2, 5), r.integer(2, 5), r.integer(3, 5), r.integer(2, 4)},
                            {r.uniform(0.5, 2), r.uniform(0.5, 2), r.uniform(0.5, 2), r.uniform(0.5, 2)});
        const Configuration c = testing::random_config(L, {}, r, 0.8, 1.0);
        std::vector<double> kv(L.sites());
        for (auto& v : kv) v = r.uniform(-2, 1);
        const ScalarCurvatureField k(L, kv);
        const EnergyBreakdown e = energy_terms(c, k);
        const auto o = testing::oracle_energy(c, kv);
        CHECK(e.curvature_term == doctest::Approx(o.curvature).epsilon(1e-12));
        CHECK(e.kinetic_term == doctest::Approx(o.kinetic).epsilon(1e-12));
        CHECK(e.quartic_term == doctest::Approx(o.quartic).epsilon(1e-12));
        CHECK(e.coupling_term == doctest::Approx(o.coupling).epsilon(1e-12));
        CHECK(e.total == doctest::Approx(o.total()).epsilon(1e-12));
        CHECK(e.total == e.curvature_term + e.kinetic_term + e.quartic_term + e.coupling_term);
    }
}

TEST_CASE("first-order energy is non-negative and matches the phi = 0 oracle (property)") {
    Rng r(32);
    for (int trial = 0; trial < 20; ++trial) {
        const LatticeSpec L = LatticeSpec::cubic(r.integer(3, 5), r.uniform(0.5, 2));
        Flux m{};
        for (auto& v : m) v = r.integer(-1, 1);
        Configuration c = testing::random_config(L, m, r, 0.2, 1.0);
        CHECK(first_order_energy(c) >= 0.0);
        for (auto& z : c.spinor.psi) z = 0.0;
        CHECK(first_order_energy(c) == doctest::Approx(oracle_first_order_phi0(c)).epsilon(1e-12));
    }
}

TEST_CASE("energy is gauge invariant under small and large transforms (property)") {
    const LatticeSpec L = LatticeSpec::cubic(4);
    Rng r(33);
    const auto k = kconst(L, -1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const Configuration c = testing::random_config(L, {0, 0, 1, 0, 0, 0}, r, 0.2, 1.0);
        const Configuration cg = apply_gauge(testing::random_transform(L, r), c);
        const EnergyBreakdown a = sw_energy(c, k), b = sw_energy(cg, k);
        CHECK(b.total == doctest::Approx(a.total).epsilon(1e-12));
        CHECK(b.first_order_total == doctest::Approx(a.first_order_total).epsilon(1e-12));
    }
}

TEST_CASE("Euler-Lagrange residuals are the energy gradient") {
    const LatticeSpec L({4, 3, 3, 4}, {1.0, 0.8, 1.2, 1.0});
    Rng r(34);
    const Configuration c = testing::random_config(L, {1, 0, 0, 0, 0, 0}, r, 0.3, 1.0);
    std::vector<double> kv(L.sites());
    for (auto& v : kv) v = r.uniform(-1, 0.5);
    const ScalarCurvatureField k(L, kv);
    const SpinorField rp = el_residual_phi(c, k);
    const Cochain ra = el_residual_A(c);
    const double eps = 1e-5;
    for (int d = 0; d < 5; ++d) {
        const SpinorField lam = testing::random_spinor(L, r);
        const Cochain t = testing::random_cochain(L, 1, r);
        Configuration p = c, m = c, pa = c, ma = c;
        for (std::size_t i = 0; i < lam.psi.size(); ++i) {
            p.spinor.psi[i] += eps * lam.psi[i];
            m.spinor.psi[i] -= eps * lam.psi[i];
        }
        for (std::size_t i = 0; i < t.values.size(); ++i) {
            const double h = L.spacing(static_cast<int>(i % 4));
            pa.gauge.angles[i] += eps * h * t[i];
            ma.gauge.angles[i] -= eps * h * t[i];
        }
        const double fd_phi = (energy_terms(p, k).total - energy_terms(m, k).total) / (2 * eps);
        const double fd_A = (energy_terms(pa, k).total - energy_terms(ma, k).total) / (2 * eps);
        CHECK(fd_phi == doctest::Approx(2.0 * real_inner(rp, lam)).epsilon(1e-6));
        CHECK(fd_A == doctest::Approx(0.5 * inner_product(ra, t)).epsilon(1e-6));
    }
    const Evaluation ev = evaluate(c, k);
    CHECK(ev.residual_phi.psi == rp.psi);
    CHECK(ev.residual_A.values == ra.values);
    CHECK(ev.energy.total == energy_terms(c, k).total);
}

TEST_CASE("identity suite: worked examples and random samples") {
    const LatticeSpec L = LatticeSpec::cubic(2);
    SpinorField phi(L);
    for (std::size_t s = 0; s < L.sites(); ++s) {
        phi.psi[2 * s] = 1.0;
        phi.psi[2 * s + 1] = Complex(0, 2);
    }
    const IdentityReport zero = identity_suite(phi, Cochain(L, 2));
    CHECK(zero.worst() < 1e-15);
    Rng r(35);
    for (int i = 0; i < 20; ++i) {
        const IdentityReport rep = identity_suite(testing::random_spinor(L, r, 3.0), testing::random_cochain(L, 2, r));
        CHECK(rep.worst() <= 1e-12);
    }
    CHECK_THROWS_AS(identity_suite(phi, Cochain(L, 1)), DegreeError);
}

TEST_CASE("Weitzenbock residual: constant spinor and plane waves") {
    const LatticeSpec L = LatticeSpec::cubic(8);
    const auto k = kconst(L, 0.0);
    CHECK(weitzenbock_residual(plane_wave(L, 0, 1.0, Complex(0.5, 0.5)), k) < 1e-13);
    for (int mode = 1; mode <= 3; ++mode) {
        const double h = L.spacing(0), q = 2 * kPi * mode;
        const double expect = std::abs(std::pow(std::sin(q * h) / h, 2) - std::pow(2 * std::sin(q * h / 2) / h, 2));
        CHECK(weitzenbock_residual(plane_wave(L, mode, 1.0, Complex(0, -0.3)), k) ==
              doctest::Approx(expect).epsilon(1e-10));
    }
    CHECK_THROWS_AS(weitzenbock_residual(Configuration(L), k), UndefinedRatioError);
}

TEST_CASE("Weitzenbock residual decreases under refinement of a smooth field") {
    double prev = 1e300;
    for (int n : {4, 8, 16}) {
        const LatticeSpec L = LatticeSpec::cubic(n);
        const double w = weitzenbock_residual(testing::smooth_config(L), kconst(L, 0.0));
        CHECK(w < prev);
        prev = w;
    }
    CHECK(prev < 5.0);
}

TEST_CASE("first-order audit records every evaluation") {
    const auto before = first_order_audit();
    const LatticeSpec L = LatticeSpec::cubic(2);
    first_order_energy(Configuration(L));
    const auto after = first_order_audit();
    CHECK(after.evaluations == before.evaluations + 1);
    CHECK(after.minimum <= 0.0);
}
