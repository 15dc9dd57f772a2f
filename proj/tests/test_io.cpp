#include <doctest.h>

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>

#include "support.hpp"
#include "swflow/errors.hpp"
#include "swflow/io.hpp"

using namespace swflow;
using testing::Rng;

namespace {

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "swflow_test_io";
    std::filesystem::create_directories(dir);
    return dir / name;
}

template <class T>
T read_le(const std::vector<std::uint8_t>& b, std::size_t off) {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
    U u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) u |= static_cast<U>(b[off + i]) << (8 * i);
    return std::bit_cast<T>(u);
}

}  // namespace

TEST_CASE("snapshot byte layout") {
    const LatticeSpec L({2, 3, 2, 2}, {1.0, 1.5, 2.0, 0.5});
    Rng r(61);
    const Configuration c = testing::random_config(L, {}, r);
    const Flux m{1, 0, -2, 0, 0, 3};
    const auto bytes = encode_snapshot(c, m);
    const std::size_t header = 8 + 16 + 32 + 24;
    CHECK(bytes.size() == header + 8 * L.links() + 16 * L.sites() * 2);
    CHECK(std::memcmp(bytes.data(), "SWLATT1\0", 8) == 0);
    CHECK(read_le<std::uint32_t>(bytes, 8) == 2);
    CHECK(read_le<std::uint32_t>(bytes, 12) == 3);
    CHECK(read_le<double>(bytes, 24 + 8) == 1.5);
    CHECK(read_le<std::int32_t>(bytes, 56 + 8) == -2);
    CHECK(read_le<std::int32_t>(bytes, 56 + 20) == 3);
    CHECK(read_le<double>(bytes, header + 8 * 5) == c.gauge.angles[5]);
    const std::size_t spin = header + 8 * L.links();
    CHECK(read_le<double>(bytes, spin + 16 * 3) == c.spinor.psi[3].real());
    CHECK(read_le<double>(bytes, spin + 16 * 3 + 8) == c.spinor.psi[3].imag());
}

TEST_CASE("snapshot round trip is exact") {
    const LatticeSpec L = LatticeSpec::cubic(3, 1.7);
    Rng r(62);
    Configuration c = testing::random_config(L, {0, 1, 0, 0, 0, 0}, r);
    c.spinor.psi[0] = {std::numeric_limits<double>::denorm_min(), -0.0};
    const auto path = scratch("round.swlatt");
    write_snapshot(path, c, {0, 1, 0, 0, 0, 0});
    const Snapshot s = read_snapshot(path);
    CHECK(s.config.spec() == L);
    CHECK(s.flux == Flux{0, 1, 0, 0, 0, 0});
    CHECK(s.config.gauge.angles == c.gauge.angles);
    CHECK(s.config.spinor.psi == c.spinor.psi);
    CHECK(std::signbit(s.config.spinor.psi[0].imag()));
    const auto k = ScalarCurvatureField::constant(L, -1.0);
    CHECK(energy_terms(s.config, k).total == energy_terms(c, k).total);
}

TEST_CASE("snapshot decoding rejects damaged input") {
    const LatticeSpec L = LatticeSpec::cubic(2);
    auto bytes = encode_snapshot(Configuration(L), {});
    auto bad = bytes;
    bad[0] = 'X';
    CHECK_THROWS_AS(decode_snapshot(bad), Error);
    auto shortened = bytes;
    shortened.pop_back();
    CHECK_THROWS_AS(decode_snapshot(shortened), Error);
    auto longer = bytes;
    longer.push_back(0);
    CHECK_THROWS_AS(decode_snapshot(longer), Error);
    CHECK_THROWS_AS(decode_snapshot({}), Error);
    CHECK_THROWS_AS(read_snapshot(scratch("missing.swlatt")), Error);
}

TEST_CASE("energy breakdown JSON round trip") {
    EnergyBreakdown e{0.1, 1.0 / 3.0, 2.5e-17, -0.25, 1e300, 3.141592653589793, -0.0};
    const auto j = to_json(e);
    CHECK(j.size() == 7);
    for (const char* key : {"curvature_term", "kinetic_term", "quartic_term", "coupling_term", "total",
                            "first_order_total", "topological_gap"})
        CHECK(j.contains(key));
    const EnergyBreakdown back = energy_from_json(nlohmann::json::parse(j.dump()));
    CHECK(back.curvature_term == e.curvature_term);
    CHECK(back.kinetic_term == e.kinetic_term);
    CHECK(back.quartic_term == e.quartic_term);
    CHECK(back.coupling_term == e.coupling_term);
    CHECK(back.total == e.total);
    CHECK(back.first_order_total == e.first_order_total);
    CHECK(back.topological_gap == e.topological_gap);
}

TEST_CASE("shortest decimal formatting round trips (property)") {
    Rng r(63);
    for (int i = 0; i < 1000; ++i) {
        const double v = r.uniform() * std::pow(10.0, r.integer(-300, 300));
        CHECK(std::stod(format_double(v)) == v);
    }
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(-2.0) == "-2");
}

TEST_CASE("trace CSV") {
    const auto path = scratch("trace.csv");
    write_trace_csv(path, {{0, -0.1, 0.0, 0.2, 0.3, -0.6, 1e-3, 2e-3, 0.9}, {1, -0.12, 0, 0, 0, 0, 0, 0, 1}});
    std::ifstream f(path);
    std::string header, row0, row1, extra;
    std::getline(f, header);
    std::getline(f, row0);
    std::getline(f, row1);
    CHECK(header == "iteration,total,curvature_term,kinetic_term,quartic_term,coupling_term,residual_phi,residual_A,"
                    "sup_phi_sq");
    CHECK(row0.rfind("0,-0.1,", 0) == 0);
    CHECK(row1.rfind("1,-0.12,", 0) == 0);
    CHECK_FALSE(static_cast<bool>(std::getline(f, extra)));
}
