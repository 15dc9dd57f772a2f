#include "swflow/io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iterator>

#include "swflow/errors.hpp"

namespace swflow {

namespace {

constexpr char kMagic[8] = {'S', 'W', 'L', 'A', 'T', 'T', '1', '\0'};

template <typename U>
void put(std::vector<std::uint8_t>& out, U v) {
    for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
    put(out, std::bit_cast<std::uint64_t>(v));
}

class Reader {
public:
    explicit Reader(const std::vector<std::uint8_t>& b) : bytes_(b) {}

    template <typename U>
    U get() {
        if (pos_ + sizeof(U) > bytes_.size()) throw Error("snapshot is truncated");
        U v = 0;
        for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(bytes_[pos_ + i]) << (8 * i);
        pos_ += sizeof(U);
        return v;
    }
    double get_f64() { return std::bit_cast<double>(get<std::uint64_t>()); }
    std::size_t remaining() const { return bytes_.size() - pos_; }
    void skip(std::size_t n) {
        if (pos_ + n > bytes_.size()) throw Error("snapshot is truncated");
        pos_ += n;
    }
    const std::uint8_t* data() const { return bytes_.data() + pos_; }

private:
    const std::vector<std::uint8_t>& bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_snapshot(const Configuration& c, const Flux& flux) {
    const LatticeSpec& L = c.spec();
    std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
    out.reserve(8 + 16 + 32 + 24 + 8 * (L.links() + 4 * L.sites()));
    for (int d : L.dims()) put(out, static_cast<std::uint32_t>(d));
    for (double l : L.lengths()) put_f64(out, l);
    for (int m : flux) put(out, static_cast<std::uint32_t>(static_cast<std::int32_t>(m)));
    for (double a : c.gauge.angles) put_f64(out, a);
    for (const Complex& z : c.spinor.psi) {
        put_f64(out, z.real());
        put_f64(out, z.imag());
    }
    return out;
}

Snapshot decode_snapshot(const std::vector<std::uint8_t>& bytes) {
    Reader r(bytes);
    if (bytes.size() < sizeof(kMagic) || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0)
        throw Error("not a SWLATT1 snapshot (bad magic)");
    r.skip(sizeof(kMagic));
    std::array<int, kDim> dims{};
    std::array<double, kDim> lengths{};
    for (auto& d : dims) {
        const auto v = r.get<std::uint32_t>();
        if (v < 2 || v > (1u << 20)) throw Error("snapshot: implausible lattice dimension");
        d = static_cast<int>(v);
    }
    for (auto& l : lengths) l = r.get_f64();
    Flux flux{};
    for (auto& m : flux) m = static_cast<std::int32_t>(r.get<std::uint32_t>());
    LatticeSpec spec(dims, lengths);
    if (r.remaining() != 8 * (spec.links() + 4 * spec.sites()))
        throw Error("snapshot: payload size does not match the header");
    std::vector<double> angles(spec.links());
    for (auto& a : angles) a = r.get_f64();
    std::vector<Complex> psi(2 * spec.sites());
    for (auto& z : psi) {
        const double re = r.get_f64();
        const double im = r.get_f64();
        z = {re, im};
    }
    return {Configuration(GaugeField(spec, std::move(angles)), SpinorField(spec, std::move(psi))), flux};
}

void write_snapshot(const std::filesystem::path& path, const Configuration& c, const Flux& flux) {
    const auto bytes = encode_snapshot(c, flux);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open " + path.string() + " for writing");
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw Error("failed writing " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open snapshot " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return decode_snapshot(bytes);
}

nlohmann::json to_json(const EnergyBreakdown& e) {
    return {{"curvature_term", e.curvature_term},       {"kinetic_term", e.kinetic_term},
            {"quartic_term", e.quartic_term},           {"coupling_term", e.coupling_term},
            {"total", e.total},                         {"first_order_total", e.first_order_total},
            {"topological_gap", e.topological_gap}};
}

EnergyBreakdown energy_from_json(const nlohmann::json& j) {
    EnergyBreakdown e;
    e.curvature_term = j.at("curvature_term").get<double>();
    e.kinetic_term = j.at("kinetic_term").get<double>();
    e.quartic_term = j.at("quartic_term").get<double>();
    e.coupling_term = j.at("coupling_term").get<double>();
    e.total = j.at("total").get<double>();
    e.first_order_total = j.at("first_order_total").get<double>();
    e.topological_gap = j.at("topological_gap").get<double>();
    return e;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRow>& rows) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw Error("cannot open " + path.string() + " for writing");
    f << "iteration,total,curvature_term,kinetic_term,quartic_term,coupling_term,residual_phi,residual_A,sup_phi_sq\n";
    for (const auto& r : rows) {
        f << r.iteration;
        for (double v : {r.total, r.curvature_term, r.kinetic_term, r.quartic_term, r.coupling_term, r.residual_phi,
                         r.residual_A, r.sup_phi_sq})
            f << ',' << format_double(v);
        f << '\n';
    }
}

}  // namespace swflow
