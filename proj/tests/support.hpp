#pragma once

// Test-side generators and independent oracles. Nothing here calls the
// library's kernels; oracles recompute from coordinates and closed forms.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "swflow/fields.hpp"

namespace testing {

using swflow::Complex;
using swflow::Configuration;
using swflow::LatticeSpec;

inline constexpr double kPi = std::numbers::pi;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    double uniform(double lo = -1.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
    Complex complex(double amp = 1.0) { return {amp * uniform(), amp * uniform()}; }

private:
    std::mt19937_64 gen_;
};

inline swflow::Cochain random_cochain(const LatticeSpec& L, int degree, Rng& r) {
    swflow::Cochain c(L, degree);
    for (auto& v : c.values) v = r.uniform();
    return c;
}

inline swflow::SpinorField random_spinor(const LatticeSpec& L, Rng& r, double amp = 1.0) {
    swflow::SpinorField f(L);
    for (auto& z : f.psi) z = r.complex(amp);
    return f;
}

// Constant-flux background plus uniform link noise and a random spinor.
inline Configuration random_config(const LatticeSpec& L, const swflow::Flux& m, Rng& r, double link_amp = 0.1,
                                   double phi_amp = 0.5) {
    Configuration c(swflow::constant_flux_field(L, m), random_spinor(L, r, phi_amp));
    for (auto& a : c.gauge.angles) a += link_amp * r.uniform();
    return c;
}

inline swflow::GaugeTransform random_transform(const LatticeSpec& L, Rng& r, bool large = true) {
    std::vector<double> theta(L.sites());
    for (auto& t : theta) t = r.uniform(-kPi, kPi);
    std::array<int, 4> w{};
    if (large)
        for (auto& v : w) v = r.integer(-2, 2);
    swflow::GaugeTransform g(L, std::move(theta), w);
    // Add the winding ramp so theta really is the lift of exp(2 pi i n.x/L).
    const auto big = swflow::GaugeTransform::large(L, w);
    for (std::size_t s = 0; s < L.sites(); ++s) g.theta[s] += big.theta[s];
    return g;
}

// Smooth configuration sampled from fixed trigonometric formulas on the
// physical torus: a_mu(x) = h_mu * A_mu(x), phi(x) = (cos, sin) profile.
inline Configuration smooth_config(const LatticeSpec& L, double a_amp = 0.3, double phi_amp = 0.7) {
    Configuration c(L);
    for (std::size_t s = 0; s < L.sites(); ++s) {
        const auto x = L.coords(s);
        std::array<double, 4> y{};
        for (int mu = 0; mu < 4; ++mu) y[mu] = 2.0 * kPi * x[mu] / L.dims()[mu];
        for (int mu = 0; mu < 4; ++mu) {
            const double A = a_amp * std::sin(y[(mu + 1) % 4] + 0.3 * mu) * std::cos(y[(mu + 2) % 4]);
            c.gauge(s, mu) = L.spacing(mu) * A;
        }
        c.spinor.psi[2 * s] = phi_amp * Complex(1.0 + 0.3 * std::cos(y[0]), 0.2 * std::sin(y[1] + y[2]));
        c.spinor.psi[2 * s + 1] = phi_amp * Complex(0.4 * std::sin(y[3]), 0.5 * std::cos(y[0] - y[1]));
    }
    return c;
}

// Coordinate-based site lookup with explicit periodic wrap.
inline std::size_t site_at(const LatticeSpec& L, std::array<int, 4> x) {
    std::size_t s = 0, stride = 1;
    for (int mu = 0; mu < 4; ++mu) {
        const int n = L.dims()[mu];
        s += static_cast<std::size_t>(((x[mu] % n) + n) % n) * stride;
        stride *= static_cast<std::size_t>(n);
    }
    return s;
}

inline std::array<int, 4> shifted(std::array<int, 4> x, int mu, int by = 1) {
    x[mu] += by;
    return x;
}

// Independent evaluation of
//   (1/4) sum F^2 + sum |forward diff|^2 + (1/8)|phi|^4 + (1/4) k |phi|^2
// with F the remainder-wrapped plaquette angle over the plaquette area.
struct OracleEnergy {
    double curvature, kinetic, quartic, coupling;
    double total() const { return curvature + kinetic + quartic + coupling; }
};

inline OracleEnergy oracle_energy(const Configuration& c, const std::vector<double>& k) {
    const LatticeSpec& L = c.spec();
    const auto& d = L.dims();
    long double curv = 0, kin = 0, quart = 0, coup = 0;
    std::array<double, 4> h{};
    for (int mu = 0; mu < 4; ++mu) h[mu] = L.lengths()[mu] / d[mu];
    auto link = [&](std::array<int, 4> x, int mu) { return c.gauge.angles[4 * site_at(L, x) + mu]; };
    std::array<int, 4> x{};
    for (x[3] = 0; x[3] < d[3]; ++x[3])
        for (x[2] = 0; x[2] < d[2]; ++x[2])
            for (x[1] = 0; x[1] < d[1]; ++x[1])
                for (x[0] = 0; x[0] < d[0]; ++x[0]) {
                    const std::size_t s = site_at(L, x);
                    for (int mu = 0; mu < 4; ++mu)
                        for (int nu = mu + 1; nu < 4; ++nu) {
                            const double raw =
                                link(x, mu) + link(shifted(x, mu), nu) - link(shifted(x, nu), mu) - link(x, nu);
                            const double F = std::remainder(raw, 2.0 * kPi) / (h[mu] * h[nu]);
                            curv += F * F;
                        }
                    for (int mu = 0; mu < 4; ++mu) {
                        const std::size_t up = site_at(L, shifted(x, mu));
                        const Complex U = std::polar(1.0, link(x, mu));
                        for (int comp = 0; comp < 2; ++comp)
                            kin += std::norm(U * c.spinor.psi[2 * up + comp] - c.spinor.psi[2 * s + comp]) /
                                   (h[mu] * h[mu]);
                    }
                    const double r2 = std::norm(c.spinor.psi[2 * s]) + std::norm(c.spinor.psi[2 * s + 1]);
                    quart += r2 * r2;
                    coup += k[s] * r2;
                }
    const double vol = h[0] * h[1] * h[2] * h[3];
    return {static_cast<double>(curv) * vol / 4.0, static_cast<double>(kin) * vol,
            static_cast<double>(quart) * vol / 8.0, static_cast<double>(coup) * vol / 4.0};
}

// Hodge star on the six components (12,13,14,23,24,34) through the
// Levi-Civita symbol: (*F)_{mu nu} = 1/2 eps_{mu nu rho sigma} F_{rho sigma}.
inline int levi_civita(int a, int b, int c, int d) {
    const std::array<int, 4> p{a, b, c, d};
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (p[i] == p[j]) return 0;
    int sign = 1;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (p[i] > p[j]) sign = -sign;
    return sign;
}

inline std::array<double, 6> hodge_star(const std::array<double, 6>& f) {
    double F[4][4] = {};
    int p = 0;
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = mu + 1; nu < 4; ++nu, ++p) {
            F[mu][nu] = f[p];
            F[nu][mu] = -f[p];
        }
    std::array<double, 6> out{};
    p = 0;
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = mu + 1; nu < 4; ++nu, ++p) {
            double acc = 0;
            for (int r = 0; r < 4; ++r)
                for (int s = 0; s < 4; ++s) acc += 0.5 * levi_civita(mu, nu, r, s) * F[r][s];
            out[p] = acc;
        }
    return out;
}

// Reduced model for the twisted constant-|phi| family on N^4 with link
// spacing h: a uniform holonomy twist tau per link in one direction and
// |phi| = r give E(tau, r) = (2 sin(tau/2)/h)^2 r^2 + r^4/8 + k r^2/4 on the
// unit torus. Returns max over tau of min over r.
inline double reduced_minimax(double h, double k, int tau_samples = 2001) {
    double best = -1e300;
    for (int i = 0; i < tau_samples; ++i) {
        const double tau = 2.0 * kPi * i / (tau_samples - 1);
        const double q2 = std::pow(2.0 * std::sin(tau / 2.0) / h, 2);
        const double c = q2 + k / 4.0;  // E = c r^2 + r^4/8
        const double emin = c >= 0.0 ? 0.0 : -2.0 * c * c;  // r^2 = -4c
        best = std::max(best, emin);
    }
    return best;
}

}  // namespace testing
