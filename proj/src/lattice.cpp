#include "swflow/lattice.hpp"

#include <cmath>
#include <omp.h>
#include <string>

#include "swflow/errors.hpp"

namespace swflow {

namespace {

int g_default_threads = 0;

// Partner slots of the self-dual pairing (12,34), (13,42), (14,23).
// sign is the orientation of the second slot relative to the partner 2-form.
struct DualPair {
    int first;
    int second;
    double sign;
};
constexpr std::array<DualPair, 3> kDualPairs{{{0, 5, 1.0}, {1, 4, -1.0}, {2, 3, 1.0}}};

double antisym(const Cochain& f, std::size_t site, int mu, int nu) {
    if (mu < nu) return f.values[6 * site + plane_index(mu, nu)];
    return -f.values[6 * site + plane_index(nu, mu)];
}

}  // namespace

LatticeSpec::LatticeSpec(std::array<int, kDim> dims, std::array<double, kDim> lengths)
    : dims_(dims), lengths_(lengths) {
    sites_ = 1;
    cell_volume_ = 1.0;
    for (int mu = 0; mu < kDim; ++mu) {
        if (dims[mu] < 2) throw Error("lattice dimension " + std::to_string(mu + 1) + " must be >= 2");
        if (!(lengths[mu] > 0.0) || !std::isfinite(lengths[mu]))
            throw Error("lattice length " + std::to_string(mu + 1) + " must be positive and finite");
        strides_[mu] = sites_;
        sites_ *= static_cast<std::size_t>(dims[mu]);
        spacing_[mu] = lengths[mu] / dims[mu];
        cell_volume_ *= spacing_[mu];
    }
    auto table = std::make_shared<std::vector<std::uint32_t>>(8 * sites_);
    for (std::size_t s = 0; s < sites_; ++s) {
        Coord x = coords(s);
        for (int mu = 0; mu < kDim; ++mu) {
            Coord xp = x, xm = x;
            xp[mu] = (x[mu] + 1) % dims_[mu];
            xm[mu] = (x[mu] + dims_[mu] - 1) % dims_[mu];
            (*table)[8 * s + mu] = static_cast<std::uint32_t>(index(xp));
            (*table)[8 * s + 4 + mu] = static_cast<std::uint32_t>(index(xm));
        }
    }
    neighbors_ = std::move(table);
}

LatticeSpec LatticeSpec::cubic(int n, double length) {
    return LatticeSpec({n, n, n, n}, {length, length, length, length});
}

std::size_t LatticeSpec::cells(int degree) const {
    switch (degree) {
        case 0: return sites();
        case 1: return links();
        case 2: return plaquettes();
        default: throw DegreeError("cochains of degree " + std::to_string(degree) + " are not represented");
    }
}

double LatticeSpec::volume() const {
    return lengths_[0] * lengths_[1] * lengths_[2] * lengths_[3];
}

std::size_t LatticeSpec::index(const Coord& x) const {
    std::size_t s = 0;
    for (int mu = 0; mu < kDim; ++mu) s += strides_[mu] * static_cast<std::size_t>(x[mu]);
    return s;
}

Coord LatticeSpec::coords(std::size_t site) const {
    Coord x{};
    for (int mu = 0; mu < kDim; ++mu) {
        x[mu] = static_cast<int>(site % static_cast<std::size_t>(dims_[mu]));
        site /= static_cast<std::size_t>(dims_[mu]);
    }
    return x;
}

bool LatticeSpec::wraps(std::size_t site, int mu) const {
    return static_cast<int>((site / strides_[mu]) % static_cast<std::size_t>(dims_[mu])) == dims_[mu] - 1;
}

void require_same_spec(const LatticeSpec& a, const LatticeSpec& b, const char* where) {
    if (!(a == b)) throw SpecMismatchError(std::string(where) + ": lattice specs differ");
}

Cochain::Cochain(LatticeSpec s, int d) : spec(std::move(s)), degree(d), values(spec.cells(d), 0.0) {}

Cochain::Cochain(LatticeSpec s, int d, std::vector<double> v)
    : spec(std::move(s)), degree(d), values(std::move(v)) {
    if (values.size() != spec.cells(degree)) throw Error("cochain value count does not match its lattice");
}

Cochain exterior_derivative(const Cochain& c) {
    const LatticeSpec& L = c.spec;
    const auto n = static_cast<std::int64_t>(L.sites());
    if (c.degree == 0) {
        Cochain out(L, 1);
#pragma omp parallel for schedule(static) if (n > 8192)
        for (std::int64_t i = 0; i < n; ++i) {
            const auto s = static_cast<std::size_t>(i);
            for (int mu = 0; mu < kDim; ++mu)
                out.values[4 * s + mu] = (c.values[L.up(s, mu)] - c.values[s]) / L.spacing(mu);
        }
        return out;
    }
    if (c.degree == 1) {
        Cochain out(L, 2);
#pragma omp parallel for schedule(static) if (n > 8192)
        for (std::int64_t i = 0; i < n; ++i) {
            const auto s = static_cast<std::size_t>(i);
            for (int p = 0; p < kPlanes; ++p) {
                const int mu = kPlaneList[p].mu, nu = kPlaneList[p].nu;
                const double dnu = (c.values[4 * L.up(s, mu) + nu] - c.values[4 * s + nu]) / L.spacing(mu);
                const double dmu = (c.values[4 * L.up(s, nu) + mu] - c.values[4 * s + mu]) / L.spacing(nu);
                out.values[6 * s + p] = dnu - dmu;
            }
        }
        return out;
    }
    throw DegreeError("exterior_derivative: unsupported degree " + std::to_string(c.degree));
}

Cochain codifferential(const Cochain& c) {
    if (c.degree != 2) throw DegreeError("codifferential expects a 2-cochain");
    const LatticeSpec& L = c.spec;
    Cochain out(L, 1);
    const auto n = static_cast<std::int64_t>(L.sites());
#pragma omp parallel for schedule(static) if (n > 8192)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto s = static_cast<std::size_t>(i);
        for (int nu = 0; nu < kDim; ++nu) {
            double acc = 0.0;
            for (int mu = 0; mu < kDim; ++mu) {
                if (mu == nu) continue;
                acc += (antisym(c, L.down(s, mu), mu, nu) - antisym(c, s, mu, nu)) / L.spacing(mu);
            }
            out.values[4 * s + nu] = acc;
        }
    }
    return out;
}

Cochain selfdual_project(const Cochain& c, Duality sign) {
    if (c.degree != 2) throw DegreeError("selfdual_project expects a 2-cochain");
    Cochain out(c.spec, 2);
    const double eps = sign == Duality::SelfDual ? 1.0 : -1.0;
    const std::size_t n = c.spec.sites();
    for (std::size_t s = 0; s < n; ++s) {
        const double* f = &c.values[6 * s];
        double* g = &out.values[6 * s];
        for (const auto& pr : kDualPairs) {
            const double v = 0.5 * (f[pr.first] + eps * pr.sign * f[pr.second]);
            g[pr.first] = v;
            g[pr.second] = eps * pr.sign * v;
        }
    }
    return out;
}

double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 16) {
        double acc = 0.0;
        for (double v : values) acc += v;
        return acc;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double inner_product(const Cochain& a, const Cochain& b) {
    require_same_spec(a.spec, b.spec, "inner_product");
    if (a.degree != b.degree) throw DegreeError("inner_product: degree mismatch");
    std::vector<double> prod(a.values.size());
    for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = a.values[i] * b.values[i];
    return pairwise_sum(prod) * a.spec.cell_volume();
}

double norm(const Cochain& c) {
    return std::sqrt(inner_product(c, c));
}

void set_worker_threads(int n) {
    if (g_default_threads == 0) g_default_threads = omp_get_max_threads();
    omp_set_num_threads(n > 0 ? n : g_default_threads);
}

int worker_threads() {
    return omp_get_max_threads();
}

}  // namespace swflow
