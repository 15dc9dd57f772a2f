#pragma once

// Integer cohomology arithmetic: finitely generated abelian groups,
// intersection forms, Spin^c classes under the attainment bound, and the
// homotopy groups of the configuration quotient.

#include <cstdint>
#include <string>
#include <vector>

namespace swflow {

// Z^free_rank + Z/d1 + Z/d2 + ... with d1 | d2 | ... and every d >= 2.
class AbelianGroup {
public:
    AbelianGroup() = default;
    // Accepts any list of cyclic orders (0 means Z, 1 is dropped) and reduces
    // it to the invariant-factor normal form.
    AbelianGroup(int free_rank, std::vector<std::int64_t> cyclic_orders);

    static AbelianGroup trivial() { return {}; }
    static AbelianGroup integers(int rank = 1) { return AbelianGroup(rank, {}); }

    int free_rank() const { return free_rank_; }
    const std::vector<std::int64_t>& torsion() const { return torsion_; }
    bool is_trivial() const { return free_rank_ == 0 && torsion_.empty(); }
    bool is_torsion() const { return free_rank_ == 0 && !torsion_.empty(); }

    // "0", "Z", "Z^4", "Z^2 + Z/2 + Z/6", ...
    std::string to_string() const;

    bool operator==(const AbelianGroup&) const = default;

private:
    int free_rank_ = 0;
    std::vector<std::int64_t> torsion_;
};

AbelianGroup direct_sum(const AbelianGroup& a, const AbelianGroup& b);
AbelianGroup tensor(const AbelianGroup& a, const AbelianGroup& b);

struct IntersectionForm {
    IntersectionForm(std::vector<std::vector<std::int64_t>> q, std::vector<int> w);

    // H + H + H, the form of the 4-torus, with w = 0.
    static IntersectionForm torus();

    std::size_t rank() const { return q.size(); }
    std::int64_t pair(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) const;

    std::vector<std::vector<std::int64_t>> q;
    std::vector<int> w;  // entries 0 or 1
};

struct SpinCClass {
    std::vector<std::int64_t> alpha;
    bool operator==(const SpinCClass&) const = default;
};

struct CohomologyProfile {
    AbelianGroup H1;
    AbelianGroup H2;
    int chi = 0;
    int sigma = 0;
    double vol = 1.0;
    double k_min = 0.0;

    void validate() const;
};

std::int64_t alpha_squared(const IntersectionForm& q, const SpinCClass& a);

// (1/4 pi^2) ((k-/8) vol + 2 chi + 3 sigma), k- = max(0, -k_min).
double attainment_bound(const CohomologyProfile& p);

inline constexpr std::uint64_t kDefaultCellCap = 50'000'000;

// Every alpha in the box |alpha|_inf <= radius with alpha = w mod 2 and
// alpha^2 <= attainment_bound, lexicographically ordered.
std::vector<SpinCClass> spinc_enumerate(const IntersectionForm& q, const CohomologyProfile& p, int radius,
                                        std::uint64_t cell_cap = kDefaultCellCap);

// pi_n of the configuration quotient: (H^1(S^n) x H^1(X)) + H^2(S^n), so
// H^1(X) for n = 1, Z for n = 2 and 0 otherwise. n = 0 is rejected; see pi_zero.
AbelianGroup homotopy_groups(const CohomologyProfile& p, int n);
// pi_0 = [X, CP^inf] = H^2(X, Z).
AbelianGroup pi_zero(const CohomologyProfile& p);

// True for n = 1 when H^1(X) is nonzero but pure torsion, a case the
// published table leaves implicit; the group is still returned as H^1(X).
bool homotopy_torsion_flag(const CohomologyProfile& p, int n);

// Aligned text table with columns n | H^1(X,Z) | pi_n.
std::string render_homotopy_table(const CohomologyProfile& p, const std::vector<int>& ns);

}  // namespace swflow
