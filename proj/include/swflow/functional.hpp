#pragma once

// The energy functional
//   E(A,phi) = int 1/4 |F_A|^2 + |grad^A phi|^2 + 1/8 |phi|^4 + 1/4 k |phi|^2
// its first-order (sum of squares) counterpart, Euler-Lagrange residuals and
// the diagnostic identities relating them.
//
// Norm conventions: |F|^2 = sum_{mu<nu} F_{mu nu}^2; the kinetic term is the
// sum over forward covariant differences, so it equals <Delta_A phi, phi>
// exactly. Residual scales (checked against finite differences in the tests):
//   dE/dphi . L      = 2 Re<el_residual_phi, L>
//   dE/dTheta . T    = 1/2 <el_residual_A, T>     (Theta = a / h, component units)

#include <cstdint>

#include "swflow/fields.hpp"

namespace swflow {

struct EnergyBreakdown {
    double curvature_term = 0.0;
    double kinetic_term = 0.0;
    double quartic_term = 0.0;
    double coupling_term = 0.0;
    double total = 0.0;
    double first_order_total = 0.0;
    double topological_gap = 0.0;
};

// The four terms and their sum only (no first-order energy).
EnergyBreakdown energy_terms(const Configuration& c, const ScalarCurvatureField& k);
EnergyBreakdown sw_energy(const Configuration& c, const ScalarCurvatureField& k);

struct FirstOrderResult {
    double value;
    Cochain curvature_residual;  // F+ - sigma(phi), as a self-dual 2-cochain
    SpinorField dirac_residual;  // D+ phi
};

FirstOrderResult first_order_residuals(const Configuration& c);
double first_order_energy(const Configuration& c);

// Every first-order energy the process evaluates is recorded here; the
// acceptance suite asserts the minimum never drops below zero.
struct FirstOrderAudit {
    std::uint64_t evaluations;
    double minimum;
};
FirstOrderAudit first_order_audit();
void reset_first_order_audit();

SpinorField el_residual_phi(const Configuration& c, const ScalarCurvatureField& k);
Cochain el_residual_A(const Configuration& c);

// Energy terms plus both residual fields in one pass.
struct Evaluation {
    EnergyBreakdown energy;  // first_order_total / topological_gap left at zero
    SpinorField residual_phi;
    Cochain residual_A;
    double residual_phi_norm;
    double residual_A_norm;
    double sup_phi_sq;
};
Evaluation evaluate(const Configuration& c, const ScalarCurvatureField& k);

// F+.phi here is the isometric action M(F+) phi, the normalization under which
// the first identity is exact; the Hermitian pairing is taken as its real part.
struct IdentityReport {
    double curvature_pairing;  // |<F+,sigma> - 1/2 <F+.phi,phi>|
    double sigma_norm;         // |<sigma,sigma> - |phi|^4/4|
    double sigma_eigen;        // |sigma phi - |phi|^2/2 phi|
    double worst() const;
};
IdentityReport identity_suite(const SpinorField& phi, const Cochain& fplus);

// |(D+)* D+ phi - Delta_A phi - k/4 phi - 1/2 F.phi| / |phi|, with F.phi the
// Clifford product summed over ordered pairs (so 1/2 F.phi = i rho(F) phi) and
// F taken as the clover average of the four plaquettes at each site.
double weitzenbock_residual(const Configuration& c, const ScalarCurvatureField& k);

// total - first_order_total.
double topological_constant(const Configuration& c, const ScalarCurvatureField& k);

// m12 m34 - m13 m24 + m14 m23.
int flux_pairing(const Flux& m);
// Continuum value of total - first_order_total for a constant-curvature field
// with fluxes m and phi = 0: (1/4) int (|F-|^2 - |F+|^2) = -2 pi^2 flux_pairing(m),
// independent of the torus lengths.
double flux_gap_predictor(const Flux& m);

}  // namespace swflow
