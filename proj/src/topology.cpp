#include "swflow/topology.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <numeric>
#include <sstream>

#include "swflow/errors.hpp"

namespace swflow {

AbelianGroup::AbelianGroup(int free_rank, std::vector<std::int64_t> orders) : free_rank_(free_rank) {
    if (free_rank < 0) throw Error("free rank must be non-negative");
    std::vector<std::int64_t> t;
    for (auto d : orders) {
        if (d < 0) throw Error("cyclic orders must be non-negative");
        if (d == 0)
            ++free_rank_;
        else if (d > 1)
            t.push_back(d);
    }
    // Pairwise (gcd, lcm) exchange converges to the divisor chain.
    for (std::size_t i = 0; i < t.size(); ++i)
        for (std::size_t j = i + 1; j < t.size(); ++j) {
            const auto g = std::gcd(t[i], t[j]);
            const auto l = t[i] / g * t[j];
            t[i] = g;
            t[j] = l;
        }
    t.erase(std::remove(t.begin(), t.end(), 1), t.end());
    torsion_ = std::move(t);
}

std::string AbelianGroup::to_string() const {
    if (is_trivial()) return "0";
    std::ostringstream os;
    bool first = true;
    if (free_rank_ > 0) {
        os << "Z";
        if (free_rank_ > 1) os << "^" << free_rank_;
        first = false;
    }
    for (auto d : torsion_) {
        if (!first) os << " + ";
        os << "Z/" << d;
        first = false;
    }
    return os.str();
}

AbelianGroup direct_sum(const AbelianGroup& a, const AbelianGroup& b) {
    std::vector<std::int64_t> t = a.torsion();
    t.insert(t.end(), b.torsion().begin(), b.torsion().end());
    return AbelianGroup(a.free_rank() + b.free_rank(), std::move(t));
}

AbelianGroup tensor(const AbelianGroup& a, const AbelianGroup& b) {
    std::vector<std::int64_t> t;
    for (int i = 0; i < b.free_rank(); ++i) t.insert(t.end(), a.torsion().begin(), a.torsion().end());
    for (int i = 0; i < a.free_rank(); ++i) t.insert(t.end(), b.torsion().begin(), b.torsion().end());
    for (auto d : a.torsion())
        for (auto e : b.torsion()) t.push_back(std::gcd(d, e));
    return AbelianGroup(a.free_rank() * b.free_rank(), std::move(t));
}

IntersectionForm::IntersectionForm(std::vector<std::vector<std::int64_t>> matrix, std::vector<int> parity)
    : q(std::move(matrix)), w(std::move(parity)) {
    const std::size_t n = q.size();
    if (w.size() != n) throw Error("intersection form: w has the wrong length");
    for (std::size_t i = 0; i < n; ++i) {
        if (q[i].size() != n) throw Error("intersection form: Q must be square");
        if (w[i] != 0 && w[i] != 1) throw Error("intersection form: w entries must be 0 or 1");
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (q[i][j] != q[j][i]) throw Error("intersection form: Q must be symmetric");
    // Characteristic property on the basis: Q(w, e_i) = Q(e_i, e_i) mod 2.
    for (std::size_t i = 0; i < n; ++i) {
        std::int64_t qw = 0;
        for (std::size_t j = 0; j < n; ++j) qw += w[j] * q[j][i];
        if (((qw - q[i][i]) % 2) != 0) throw Error("intersection form: w is not characteristic for Q");
    }
}

IntersectionForm IntersectionForm::torus() {
    std::vector<std::vector<std::int64_t>> q(6, std::vector<std::int64_t>(6, 0));
    for (int b = 0; b < 3; ++b) q[2 * b][2 * b + 1] = q[2 * b + 1][2 * b] = 1;
    return IntersectionForm(std::move(q), std::vector<int>(6, 0));
}

std::int64_t IntersectionForm::pair(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) const {
    if (a.size() != rank() || b.size() != rank()) throw Error("intersection form: dimension mismatch");
    std::int64_t s = 0;
    for (std::size_t i = 0; i < rank(); ++i)
        for (std::size_t j = 0; j < rank(); ++j) s += a[i] * q[i][j] * b[j];
    return s;
}

void CohomologyProfile::validate() const {
    if (!(vol > 0.0) || !std::isfinite(vol)) throw Error("cohomology profile: vol must be > 0");
    if (!std::isfinite(k_min)) throw Error("cohomology profile: k_min must be finite");
}

std::int64_t alpha_squared(const IntersectionForm& q, const SpinCClass& a) {
    return q.pair(a.alpha, a.alpha);
}

double attainment_bound(const CohomologyProfile& p) {
    const double k_minus = std::max(0.0, -p.k_min);
    return (k_minus / 8.0 * p.vol + 2.0 * p.chi + 3.0 * p.sigma) / (4.0 * std::numbers::pi * std::numbers::pi);
}

std::vector<SpinCClass> spinc_enumerate(const IntersectionForm& q, const CohomologyProfile& p, int radius,
                                        std::uint64_t cell_cap) {
    p.validate();
    if (radius < 0) throw Error("spinc_enumerate: radius must be non-negative");
    const std::size_t b2 = q.rank();
    const std::uint64_t side = 2 * static_cast<std::uint64_t>(radius) + 1;
    std::uint64_t cells = 1;
    for (std::size_t i = 0; i < b2; ++i) {
        if (cells > cell_cap / side) throw SearchTooLargeError("spinc_enumerate: search box exceeds the cell cap");
        cells *= side;
    }
    const double bound = attainment_bound(p);
    std::vector<SpinCClass> out;
    std::vector<std::int64_t> a(b2, -radius);
    for (std::uint64_t c = 0; c < cells; ++c) {
        bool parity = true;
        for (std::size_t i = 0; i < b2 && parity; ++i) parity = ((a[i] - q.w[i]) % 2) == 0;
        if (parity && static_cast<double>(q.pair(a, a)) <= bound) out.push_back({a});
        // Odometer increment, last coordinate fastest.
        for (std::size_t i = b2; i-- > 0;) {
            if (a[i] < radius) {
                ++a[i];
                break;
            }
            a[i] = -radius;
        }
    }
    return out;
}

AbelianGroup homotopy_groups(const CohomologyProfile& p, int n) {
    if (n == 0) throw Error("homotopy_groups: n = 0 is the set of components; use pi_zero");
    if (n < 0) throw Error("homotopy_groups: n must be positive");
    const AbelianGroup h1_sphere = n == 1 ? AbelianGroup::integers() : AbelianGroup::trivial();
    const AbelianGroup h2_sphere = n == 2 ? AbelianGroup::integers() : AbelianGroup::trivial();
    return direct_sum(tensor(h1_sphere, p.H1), h2_sphere);
}

AbelianGroup pi_zero(const CohomologyProfile& p) {
    return p.H2;
}

bool homotopy_torsion_flag(const CohomologyProfile& p, int n) {
    return n == 1 && p.H1.is_torsion();
}

std::string render_homotopy_table(const CohomologyProfile& p, const std::vector<int>& ns) {
    std::vector<std::array<std::string, 3>> rows{{"n", "H^1(X,Z)", "pi_n"}};
    for (int n : ns) {
        std::string g = homotopy_groups(p, n).to_string();
        if (homotopy_torsion_flag(p, n)) g += "  (torsion-only H^1)";
        rows.push_back({std::to_string(n), p.H1.to_string(), g});
    }
    std::array<std::size_t, 3> width{};
    for (const auto& r : rows)
        for (int c = 0; c < 3; ++c) width[c] = std::max(width[c], r[c].size());
    std::ostringstream os;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (int c = 0; c < 3; ++c) {
            os << std::left << std::setw(static_cast<int>(width[c])) << rows[i][c];
            if (c < 2) os << " | ";
        }
        os << "\n";
        if (i == 0) os << std::string(width[0] + width[1] + width[2] + 6, '-') << "\n";
    }
    return os.str();
}

}  // namespace swflow
