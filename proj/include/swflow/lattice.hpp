#pragma once

// Discrete exterior calculus on a periodic rectangular 4-torus.
//
// Storage order (used everywhere, including snapshots):
//   site       s = x1 + N1*(x2 + N2*(x3 + N3*x4))       (x1 fastest)
//   link       4*s + mu                                  mu = 0..3
//   plaquette  6*s + p, p indexes the planes (12,13,14,23,24,34)
// Cochain values are the components of the real form -i*(u(1)-valued form),
// so a 1-cochain built by exterior_derivative holds (c(x+mu)-c(x))/h_mu.

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace swflow {

inline constexpr int kDim = 4;
inline constexpr int kPlanes = 6;

struct Plane {
    int mu;
    int nu;
};

inline constexpr std::array<Plane, kPlanes> kPlaneList{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

// Index into kPlaneList for mu < nu.
constexpr int plane_index(int mu, int nu) {
    for (int p = 0; p < kPlanes; ++p)
        if (kPlaneList[p].mu == mu && kPlaneList[p].nu == nu) return p;
    return -1;
}

using Coord = std::array<int, kDim>;

class LatticeSpec {
public:
    LatticeSpec(std::array<int, kDim> dims, std::array<double, kDim> lengths);

    static LatticeSpec cubic(int n, double length = 1.0);

    const std::array<int, kDim>& dims() const { return dims_; }
    const std::array<double, kDim>& lengths() const { return lengths_; }
    double spacing(int mu) const { return spacing_[mu]; }

    std::size_t sites() const { return sites_; }
    std::size_t links() const { return 4 * sites_; }
    std::size_t plaquettes() const { return 6 * sites_; }
    std::size_t cells(int degree) const;

    double cell_volume() const { return cell_volume_; }
    double volume() const;

    std::size_t index(const Coord& x) const;
    Coord coords(std::size_t site) const;

    std::size_t up(std::size_t site, int mu) const { return (*neighbors_)[8 * site + mu]; }
    std::size_t down(std::size_t site, int mu) const { return (*neighbors_)[8 * site + 4 + mu]; }
    // True when the forward link (site, mu) crosses the periodic boundary.
    bool wraps(std::size_t site, int mu) const;

    bool operator==(const LatticeSpec& other) const {
        return dims_ == other.dims_ && lengths_ == other.lengths_;
    }

private:
    std::array<int, kDim> dims_;
    std::array<double, kDim> lengths_;
    std::array<double, kDim> spacing_;
    std::array<std::size_t, kDim> strides_;
    std::size_t sites_;
    double cell_volume_;
    std::shared_ptr<const std::vector<std::uint32_t>> neighbors_;
};

void require_same_spec(const LatticeSpec& a, const LatticeSpec& b, const char* where);

struct Cochain {
    Cochain(LatticeSpec spec, int degree);
    Cochain(LatticeSpec spec, int degree, std::vector<double> values);

    LatticeSpec spec;
    int degree;
    std::vector<double> values;

    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
};

enum class Duality { SelfDual, AntiSelfDual };

Cochain exterior_derivative(const Cochain& c);
Cochain codifferential(const Cochain& c);
Cochain selfdual_project(const Cochain& c, Duality sign);

// Volume-weighted pairing sum_cells a*b*(cell volume).
double inner_product(const Cochain& a, const Cochain& b);
double norm(const Cochain& c);

// Fixed-tree pairwise sum; result is independent of thread count.
double pairwise_sum(std::span<const double> values);

// Caps the worker count of the parallel kernels (0 restores the default).
void set_worker_threads(int n);
int worker_threads();

}  // namespace swflow
