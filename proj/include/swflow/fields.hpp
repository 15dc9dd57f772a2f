#pragma once

// Gauge and spinor fields on the lattice, and the operators built from them.
//
// The connection is stored as one real angle a(x,mu) per forward link; the
// parallel transporter is U = exp(i a). Spinors carry two complex components
// per site, stored as psi[2*site + component]. A gauge transform
// g = exp(i theta) acts by a -> a + theta(x+mu) - theta(x),
// psi -> exp(-i theta) psi.
//
// Clifford multipliers (S+ -> S-):
//   tau_1 = -i s1, tau_2 = -i s2, tau_3 = -i s3, tau_4 = I
// with tau_mu^dag tau_nu + tau_nu^dag tau_mu = 2 delta_{mu nu}. A real 2-form
// F acts on S+ through rho(F) = -sum_{mu<nu} F_{mu nu} tau_mu^dag tau_nu,
// which annihilates the anti-self-dual part for the orientation
// dx1^dx2^dx3^dx4 > 0.

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "swflow/lattice.hpp"

namespace swflow {

using Complex = std::complex<double>;
using Flux = std::array<int, kPlanes>;  // (m12, m13, m14, m23, m24, m34)

// Row-major 2x2 complex matrix.
struct Mat2 {
    std::array<Complex, 4> m{};

    Complex& operator()(int r, int c) { return m[2 * r + c]; }
    Complex operator()(int r, int c) const { return m[2 * r + c]; }
};

Mat2 operator*(const Mat2& a, const Mat2& b);
Mat2 operator+(const Mat2& a, const Mat2& b);
Mat2 operator*(Complex s, const Mat2& a);
Mat2 adjoint(const Mat2& a);
Complex trace(const Mat2& a);
std::array<Complex, 2> act(const Mat2& a, const std::array<Complex, 2>& v);

// Inner product on End0(S+): <P,Q> = (1/2) tr(P Q^dag).
double endo_inner(const Mat2& p, const Mat2& q);

const Mat2& tau(int mu);

// i*rho(F) for the six plaquette components of a real 2-form at one site.
Mat2 clifford_action(const std::array<double, kPlanes>& form);

// Isometry Omega2+ -> End0(S+), M(F) = i rho(F+) / sqrt(2), and its inverse
// (which returns a self-dual 2-form).
Mat2 selfdual_to_endo(const std::array<double, kPlanes>& form);
std::array<double, kPlanes> endo_to_selfdual(const Mat2& h);

struct GaugeField {
    explicit GaugeField(LatticeSpec spec);
    GaugeField(LatticeSpec spec, std::vector<double> angles);

    LatticeSpec spec;
    std::vector<double> angles;

    double& operator()(std::size_t site, int mu) { return angles[4 * site + mu]; }
    double operator()(std::size_t site, int mu) const { return angles[4 * site + mu]; }
};

struct SpinorField {
    explicit SpinorField(LatticeSpec spec);
    SpinorField(LatticeSpec spec, std::vector<Complex> psi);

    LatticeSpec spec;
    std::vector<Complex> psi;

    std::array<Complex, 2> at(std::size_t site) const { return {psi[2 * site], psi[2 * site + 1]}; }
};

struct GaugeTransform {
    explicit GaugeTransform(LatticeSpec spec);
    GaugeTransform(LatticeSpec spec, std::vector<double> theta, std::array<int, kDim> winding = {});

    // g_n(x) = exp(2 pi i sum_mu n_mu x_mu / L_mu), the large transform of winding n.
    static GaugeTransform large(const LatticeSpec& spec, const std::array<int, kDim>& winding);

    LatticeSpec spec;
    std::vector<double> theta;
    // theta is the restriction of a quasi-periodic lift with
    // theta(x + L_mu e_mu) = theta(x) + 2 pi winding[mu].
    std::array<int, kDim> winding{};
};

struct ScalarCurvatureField {
    ScalarCurvatureField(LatticeSpec spec, std::vector<double> k);
    static ScalarCurvatureField constant(const LatticeSpec& spec, double value);

    LatticeSpec spec;
    std::vector<double> k;
    double k_min;
};

struct Configuration {
    Configuration(GaugeField gauge, SpinorField spinor);
    explicit Configuration(const LatticeSpec& spec);

    const LatticeSpec& spec() const { return gauge.spec; }

    GaugeField gauge;
    SpinorField spinor;
};

Configuration apply_gauge(const GaugeTransform& g, const Configuration& c);

// Plaquette angle a(x,mu) + a(x+mu,nu) - a(x+nu,mu) - a(x,nu), unreduced.
double raw_plaquette(const GaugeField& A, std::size_t site, int plane);
double principal_angle(double angle);

// Principal-branch plaquette angle divided by h_mu h_nu.
Cochain curvature(const GaugeField& A);

// Branch index round(raw / 2 pi) of every plaquette; a change between two
// fields means a plaquette crossed +-pi.
std::vector<std::int32_t> plaquette_branches(const GaugeField& A);
double max_plaquette_angle(const GaugeField& A);

struct FluxReport {
    Flux m{};
    double max_distance = 0.0;  // distance of (angle sum)/2pi to the nearest integer, worst 2-torus
};

struct QuantizedFlux {
    int value;
    double distance;
};
// Throws IllQuantizedFieldError when angle_sum/2pi is more than 0.25 from an integer.
QuantizedFlux quantize_flux(double angle_sum);

FluxReport chern_fluxes(const GaugeField& A);

// Standard constant-flux field: uniform principal plaquette angle
// 2 pi m_{mu nu} / (N_mu N_nu) in every plane.
GaugeField constant_flux_field(const LatticeSpec& spec, const Flux& m);

// Forward covariant difference (U_mu(x) psi(x+mu) - psi(x)) / h_mu.
std::array<Complex, 2> forward_difference(const GaugeField& A, const SpinorField& phi, std::size_t site, int mu);
// Centered covariant difference (U_mu(x) psi(x+mu) - U_mu(x-mu)^* psi(x-mu)) / (2 h_mu).
std::array<Complex, 2> centered_difference(const GaugeField& A, const SpinorField& phi, std::size_t site, int mu);

SpinorField dirac_plus(const GaugeField& A, const SpinorField& phi);
// Adjoint of dirac_plus for the volume-weighted Hermitian product.
SpinorField dirac_plus_adjoint(const GaugeField& A, const SpinorField& chi);
SpinorField covariant_laplacian(const GaugeField& A, const SpinorField& phi);

struct SigmaForm {
    std::vector<Mat2> matrices;  // one per site
    Cochain selfdual;            // image under endo_to_selfdual
};

Mat2 sigma_matrix(const std::array<Complex, 2>& phi);
SigmaForm sigma_form(const SpinorField& phi);

// Im <grad^A_mu phi, phi> on every forward link.
Cochain phi_star(const GaugeField& A, const SpinorField& phi);

// Volume-weighted Hermitian product Re<a,b> and norm.
double real_inner(const SpinorField& a, const SpinorField& b);
double norm(const SpinorField& a);
double max_abs_sq(const SpinorField& phi);  // sup over sites of |phi|^2

}  // namespace swflow
