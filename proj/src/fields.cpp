#include "swflow/fields.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "swflow/errors.hpp"

namespace swflow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr Complex kI{0.0, 1.0};

void require_links(const LatticeSpec& spec, std::size_t n) {
    if (n != spec.links()) throw Error("gauge field size does not match its lattice");
}

Mat2 make(Complex a, Complex b, Complex c, Complex d) {
    Mat2 r;
    r.m = {a, b, c, d};
    return r;
}

const std::array<Mat2, 4>& tau_table() {
    static const std::array<Mat2, 4> t{
        make(0.0, -kI, -kI, 0.0),   // -i s1
        make(0.0, -1.0, 1.0, 0.0),  // -i s2
        make(-kI, 0.0, 0.0, kI),    // -i s3
        make(1.0, 0.0, 0.0, 1.0),   // I
    };
    return t;
}

// Unit self-dual 2-forms (e12+e34, e13-e24, e14+e23)/sqrt(2).
const std::array<std::array<double, kPlanes>, 3>& selfdual_basis() {
    static const std::array<std::array<double, kPlanes>, 3> b = [] {
        const double r = 1.0 / std::sqrt(2.0);
        return std::array<std::array<double, kPlanes>, 3>{{
            {r, 0, 0, 0, 0, r},
            {0, r, 0, 0, -r, 0},
            {0, 0, r, r, 0, 0},
        }};
    }();
    return b;
}

const std::array<Mat2, 3>& endo_basis() {
    static const std::array<Mat2, 3> e = [] {
        std::array<Mat2, 3> out;
        for (int i = 0; i < 3; ++i) out[i] = selfdual_to_endo(selfdual_basis()[i]);
        return out;
    }();
    return e;
}

inline Complex transporter(double angle) {
    return {std::cos(angle), std::sin(angle)};
}

}  // namespace

Mat2 operator*(const Mat2& a, const Mat2& b) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j);
    return r;
}

Mat2 operator+(const Mat2& a, const Mat2& b) {
    Mat2 r;
    for (int i = 0; i < 4; ++i) r.m[i] = a.m[i] + b.m[i];
    return r;
}

Mat2 operator*(Complex s, const Mat2& a) {
    Mat2 r;
    for (int i = 0; i < 4; ++i) r.m[i] = s * a.m[i];
    return r;
}

Mat2 adjoint(const Mat2& a) {
    return make(std::conj(a(0, 0)), std::conj(a(1, 0)), std::conj(a(0, 1)), std::conj(a(1, 1)));
}

Complex trace(const Mat2& a) {
    return a(0, 0) + a(1, 1);
}

std::array<Complex, 2> act(const Mat2& a, const std::array<Complex, 2>& v) {
    return {a(0, 0) * v[0] + a(0, 1) * v[1], a(1, 0) * v[0] + a(1, 1) * v[1]};
}

double endo_inner(const Mat2& p, const Mat2& q) {
    return 0.5 * trace(p * adjoint(q)).real();
}

const Mat2& tau(int mu) {
    return tau_table()[mu];
}

Mat2 clifford_action(const std::array<double, kPlanes>& form) {
    Mat2 r;
    for (int p = 0; p < kPlanes; ++p) {
        if (form[p] == 0.0) continue;
        const Mat2 rho = Complex(-1.0) * (adjoint(tau(kPlaneList[p].mu)) * tau(kPlaneList[p].nu));
        r = r + Complex(0.0, form[p]) * rho;
    }
    return r;
}

Mat2 selfdual_to_endo(const std::array<double, kPlanes>& form) {
    return Complex(1.0 / std::sqrt(2.0)) * clifford_action(form);
}

std::array<double, kPlanes> endo_to_selfdual(const Mat2& h) {
    std::array<double, kPlanes> out{};
    for (int i = 0; i < 3; ++i) {
        const double c = endo_inner(h, endo_basis()[i]);
        for (int p = 0; p < kPlanes; ++p) out[p] += c * selfdual_basis()[i][p];
    }
    return out;
}

GaugeField::GaugeField(LatticeSpec s) : spec(std::move(s)), angles(spec.links(), 0.0) {}

GaugeField::GaugeField(LatticeSpec s, std::vector<double> a) : spec(std::move(s)), angles(std::move(a)) {
    require_links(spec, angles.size());
}

SpinorField::SpinorField(LatticeSpec s) : spec(std::move(s)), psi(2 * spec.sites(), Complex{}) {}

SpinorField::SpinorField(LatticeSpec s, std::vector<Complex> p) : spec(std::move(s)), psi(std::move(p)) {
    if (psi.size() != 2 * spec.sites()) throw Error("spinor field size does not match its lattice");
}

GaugeTransform::GaugeTransform(LatticeSpec s) : spec(std::move(s)), theta(spec.sites(), 0.0) {}

GaugeTransform::GaugeTransform(LatticeSpec s, std::vector<double> t, std::array<int, kDim> w)
    : spec(std::move(s)), theta(std::move(t)), winding(w) {
    if (theta.size() != spec.sites()) throw Error("gauge transform size does not match its lattice");
}

GaugeTransform GaugeTransform::large(const LatticeSpec& spec, const std::array<int, kDim>& winding) {
    GaugeTransform g(spec);
    g.winding = winding;
    for (std::size_t s = 0; s < spec.sites(); ++s) {
        const Coord x = spec.coords(s);
        double t = 0.0;
        for (int mu = 0; mu < kDim; ++mu) t += static_cast<double>(winding[mu]) * x[mu] / spec.dims()[mu];
        g.theta[s] = kTwoPi * t;
    }
    return g;
}

ScalarCurvatureField::ScalarCurvatureField(LatticeSpec s, std::vector<double> values)
    : spec(std::move(s)), k(std::move(values)) {
    if (k.size() != spec.sites()) throw Error("scalar curvature size does not match its lattice");
    k_min = k.front();
    for (double v : k) {
        if (!std::isfinite(v)) throw Error("scalar curvature must be finite");
        k_min = std::min(k_min, v);
    }
}

ScalarCurvatureField ScalarCurvatureField::constant(const LatticeSpec& spec, double value) {
    return ScalarCurvatureField(spec, std::vector<double>(spec.sites(), value));
}

Configuration::Configuration(GaugeField g, SpinorField s) : gauge(std::move(g)), spinor(std::move(s)) {
    require_same_spec(gauge.spec, spinor.spec, "Configuration");
}

Configuration::Configuration(const LatticeSpec& spec) : gauge(spec), spinor(spec) {}

Configuration apply_gauge(const GaugeTransform& g, const Configuration& c) {
    require_same_spec(g.spec, c.spec(), "apply_gauge");
    const LatticeSpec& L = c.spec();
    Configuration out = c;
    for (std::size_t s = 0; s < L.sites(); ++s) {
        for (int mu = 0; mu < kDim; ++mu) {
            double shift = g.theta[L.up(s, mu)] - g.theta[s];
            if (g.winding[mu] != 0 && L.wraps(s, mu)) shift += kTwoPi * g.winding[mu];
            out.gauge(s, mu) += shift;
        }
        const Complex phase = transporter(-g.theta[s]);
        out.spinor.psi[2 * s] *= phase;
        out.spinor.psi[2 * s + 1] *= phase;
    }
    return out;
}

double raw_plaquette(const GaugeField& A, std::size_t s, int p) {
    const int mu = kPlaneList[p].mu, nu = kPlaneList[p].nu;
    const LatticeSpec& L = A.spec;
    return A(s, mu) + A(L.up(s, mu), nu) - A(L.up(s, nu), mu) - A(s, nu);
}

double principal_angle(double angle) {
    return angle - kTwoPi * std::round(angle / kTwoPi);
}

Cochain curvature(const GaugeField& A) {
    const LatticeSpec& L = A.spec;
    Cochain F(L, 2);
    const auto n = static_cast<std::int64_t>(L.sites());
#pragma omp parallel for schedule(static) if (n > 8192)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto s = static_cast<std::size_t>(i);
        for (int p = 0; p < kPlanes; ++p) {
            const double area = L.spacing(kPlaneList[p].mu) * L.spacing(kPlaneList[p].nu);
            F.values[6 * s + p] = principal_angle(raw_plaquette(A, s, p)) / area;
        }
    }
    return F;
}

std::vector<std::int32_t> plaquette_branches(const GaugeField& A) {
    std::vector<std::int32_t> b(A.spec.plaquettes());
    for (std::size_t s = 0; s < A.spec.sites(); ++s)
        for (int p = 0; p < kPlanes; ++p)
            b[6 * s + p] = static_cast<std::int32_t>(std::round(raw_plaquette(A, s, p) / kTwoPi));
    return b;
}

double max_plaquette_angle(const GaugeField& A) {
    double m = 0.0;
    for (std::size_t s = 0; s < A.spec.sites(); ++s)
        for (int p = 0; p < kPlanes; ++p) m = std::max(m, std::abs(principal_angle(raw_plaquette(A, s, p))));
    return m;
}

QuantizedFlux quantize_flux(double angle_sum) {
    const double q = angle_sum / kTwoPi;
    const double r = std::round(q);
    const double d = std::abs(q - r);
    if (!(d <= 0.25))
        throw IllQuantizedFieldError("flux " + std::to_string(q) +
                                     " is too far from an integer; the field is too rough for flux identification");
    return {static_cast<int>(r), d};
}

FluxReport chern_fluxes(const GaugeField& A) {
    const LatticeSpec& L = A.spec;
    FluxReport report;
    for (int p = 0; p < kPlanes; ++p) {
        const int mu = kPlaneList[p].mu, nu = kPlaneList[p].nu;
        int rho = -1, sigma = -1;
        for (int d = 0; d < kDim; ++d) {
            if (d == mu || d == nu) continue;
            (rho < 0 ? rho : sigma) = d;
        }
        bool first = true;
        for (int xr = 0; xr < L.dims()[rho]; ++xr) {
            for (int xs = 0; xs < L.dims()[sigma]; ++xs) {
                std::vector<double> angles;
                angles.reserve(static_cast<std::size_t>(L.dims()[mu] * L.dims()[nu]));
                Coord x{};
                x[rho] = xr;
                x[sigma] = xs;
                for (int a = 0; a < L.dims()[mu]; ++a) {
                    for (int b = 0; b < L.dims()[nu]; ++b) {
                        x[mu] = a;
                        x[nu] = b;
                        angles.push_back(principal_angle(raw_plaquette(A, L.index(x), p)));
                    }
                }
                const QuantizedFlux q = quantize_flux(pairwise_sum(angles));
                report.max_distance = std::max(report.max_distance, q.distance);
                if (first) {
                    report.m[p] = q.value;
                    first = false;
                } else if (q.value != report.m[p]) {
                    throw IllQuantizedFieldError("flux differs between parallel 2-tori in plane " + std::to_string(p));
                }
            }
        }
    }
    return report;
}

GaugeField constant_flux_field(const LatticeSpec& spec, const Flux& m) {
    GaugeField A(spec);
    for (int p = 0; p < kPlanes; ++p) {
        if (m[p] == 0) continue;
        const int mu = kPlaneList[p].mu, nu = kPlaneList[p].nu;
        const int Nmu = spec.dims()[mu], Nnu = spec.dims()[nu];
        for (std::size_t s = 0; s < spec.sites(); ++s) {
            const Coord x = spec.coords(s);
            A(s, nu) += kTwoPi * m[p] * x[mu] / (static_cast<double>(Nmu) * Nnu);
            if (x[mu] == Nmu - 1) A(s, mu) -= kTwoPi * m[p] * x[nu] / static_cast<double>(Nnu);
        }
    }
    return A;
}

std::array<Complex, 2> forward_difference(const GaugeField& A, const SpinorField& phi, std::size_t s, int mu) {
    const std::size_t up = A.spec.up(s, mu);
    const Complex U = transporter(A(s, mu));
    const double h = A.spec.spacing(mu);
    return {(U * phi.psi[2 * up] - phi.psi[2 * s]) / h, (U * phi.psi[2 * up + 1] - phi.psi[2 * s + 1]) / h};
}

std::array<Complex, 2> centered_difference(const GaugeField& A, const SpinorField& phi, std::size_t s, int mu) {
    const std::size_t up = A.spec.up(s, mu);
    const std::size_t dn = A.spec.down(s, mu);
    const Complex Uf = transporter(A(s, mu));
    const Complex Ub = transporter(-A(dn, mu));
    const double h2 = 2.0 * A.spec.spacing(mu);
    return {(Uf * phi.psi[2 * up] - Ub * phi.psi[2 * dn]) / h2,
            (Uf * phi.psi[2 * up + 1] - Ub * phi.psi[2 * dn + 1]) / h2};
}

SpinorField dirac_plus(const GaugeField& A, const SpinorField& phi) {
    require_same_spec(A.spec, phi.spec, "dirac_plus");
    SpinorField out(phi.spec);
    const auto n = static_cast<std::int64_t>(phi.spec.sites());
#pragma omp parallel for schedule(static) if (n > 8192)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto s = static_cast<std::size_t>(i);
        std::array<Complex, 2> acc{};
        for (int mu = 0; mu < kDim; ++mu) {
            const auto t = act(tau(mu), centered_difference(A, phi, s, mu));
            acc[0] += t[0];
            acc[1] += t[1];
        }
        out.psi[2 * s] = acc[0];
        out.psi[2 * s + 1] = acc[1];
    }
    return out;
}

SpinorField dirac_plus_adjoint(const GaugeField& A, const SpinorField& chi) {
    require_same_spec(A.spec, chi.spec, "dirac_plus_adjoint");
    SpinorField out(chi.spec);
    const auto n = static_cast<std::int64_t>(chi.spec.sites());
#pragma omp parallel for schedule(static) if (n > 8192)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto s = static_cast<std::size_t>(i);
        std::array<Complex, 2> acc{};
        for (int mu = 0; mu < kDim; ++mu) {
            const auto t = act(adjoint(tau(mu)), centered_difference(A, chi, s, mu));
            acc[0] -= t[0];
            acc[1] -= t[1];
        }
        out.psi[2 * s] = acc[0];
        out.psi[2 * s + 1] = acc[1];
    }
    return out;
}

SpinorField covariant_laplacian(const GaugeField& A, const SpinorField& phi) {
    require_same_spec(A.spec, phi.spec, "covariant_laplacian");
    const LatticeSpec& L = phi.spec;
    SpinorField out(L);
    const auto n = static_cast<std::int64_t>(L.sites());
#pragma omp parallel for schedule(static) if (n > 8192)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto s = static_cast<std::size_t>(i);
        for (int c = 0; c < 2; ++c) {
            Complex acc{};
            for (int mu = 0; mu < kDim; ++mu) {
                const std::size_t up = L.up(s, mu), dn = L.down(s, mu);
                const double h = L.spacing(mu);
                acc += (2.0 * phi.psi[2 * s + c] - transporter(A(s, mu)) * phi.psi[2 * up + c] -
                        transporter(-A(dn, mu)) * phi.psi[2 * dn + c]) /
                       (h * h);
            }
            out.psi[2 * s + c] = acc;
        }
    }
    return out;
}

Mat2 sigma_matrix(const std::array<Complex, 2>& phi) {
    const double a = std::norm(phi[0]), b = std::norm(phi[1]);
    return make(0.5 * (a - b), phi[0] * std::conj(phi[1]), phi[1] * std::conj(phi[0]), 0.5 * (b - a));
}

SigmaForm sigma_form(const SpinorField& phi) {
    SigmaForm out{std::vector<Mat2>(phi.spec.sites()), Cochain(phi.spec, 2)};
    for (std::size_t s = 0; s < phi.spec.sites(); ++s) {
        out.matrices[s] = sigma_matrix(phi.at(s));
        const auto f = endo_to_selfdual(out.matrices[s]);
        for (int p = 0; p < kPlanes; ++p) out.selfdual.values[6 * s + p] = f[p];
    }
    return out;
}

Cochain phi_star(const GaugeField& A, const SpinorField& phi) {
    require_same_spec(A.spec, phi.spec, "phi_star");
    Cochain out(A.spec, 1);
    const auto n = static_cast<std::int64_t>(A.spec.sites());
#pragma omp parallel for schedule(static) if (n > 8192)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto s = static_cast<std::size_t>(i);
        for (int mu = 0; mu < kDim; ++mu) {
            const auto d = forward_difference(A, phi, s, mu);
            const Complex pairing = std::conj(phi.psi[2 * s]) * d[0] + std::conj(phi.psi[2 * s + 1]) * d[1];
            out.values[4 * s + mu] = pairing.imag();
        }
    }
    return out;
}

double real_inner(const SpinorField& a, const SpinorField& b) {
    require_same_spec(a.spec, b.spec, "real_inner");
    std::vector<double> prod(a.psi.size());
    for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = (std::conj(a.psi[i]) * b.psi[i]).real();
    return pairwise_sum(prod) * a.spec.cell_volume();
}

double norm(const SpinorField& a) {
    return std::sqrt(real_inner(a, a));
}

double max_abs_sq(const SpinorField& phi) {
    double m = 0.0;
    for (std::size_t s = 0; s < phi.spec.sites(); ++s)
        m = std::max(m, std::norm(phi.psi[2 * s]) + std::norm(phi.psi[2 * s + 1]));
    return m;
}

}  // namespace swflow
