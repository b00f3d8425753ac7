#include "fgpe/io.hpp"

#include "fgpe/errors.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace fgpe {

namespace {

constexpr char kMagic[4] = {'F', 'G', 'S', 'N'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "snapshot payloads are written little-endian via raw memcpy");

void append(std::vector<unsigned char>& buf, const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    buf.insert(buf.end(), b, b + n);
}

template <typename T> void append_pod(std::vector<unsigned char>& buf, T v) {
    append(buf, &v, sizeof v);
}

struct Reader {
    const unsigned char* p;
    std::size_t left;

    void take(void* out, std::size_t n) {
        if (n > left) throw ConfigError("snapshot file truncated");
        std::memcpy(out, p, n);
        p += n;
        left -= n;
    }
    template <typename T> T pod() {
        T v;
        take(&v, sizeof v);
        return v;
    }
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<unsigned char> read_all(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file '" + path + "'");
    std::vector<unsigned char> data((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return data;
}

std::uint32_t crc_of(const unsigned char* data, std::size_t n) {
    uLong crc = crc32(0L, Z_NULL, 0);
    // zlib takes uInt chunks; fields here are far below 4 GiB but chunk anyway
    while (n > 0) {
        const auto chunk = static_cast<uInt>(std::min<std::size_t>(n, 1u << 30));
        crc = crc32(crc, data, chunk);
        data += chunk;
        n -= chunk;
    }
    return static_cast<std::uint32_t>(crc);
}

} // namespace

void write_snapshot(const std::string& path, const Snapshot& snap) {
    const Grid& g = *snap.field.grid;
    if (snap.field.values.size() != g.size())
        throw ConfigError("snapshot field size does not match its grid");

    std::vector<unsigned char> buf;
    buf.reserve(164 + 16 * g.size() + 4);
    append(buf, kMagic, 4);
    append_pod(buf, kVersion);
    append_pod(buf, static_cast<std::int32_t>(g.dim()));
    for (int a = 0; a < 3; ++a)
        append_pod(buf, static_cast<std::int32_t>(a < g.dim() ? g.points(a) : 1));
    for (int a = 0; a < 3; ++a) append_pod(buf, a < g.dim() ? g.lo(a) : 0.0);
    for (int a = 0; a < 3; ++a) append_pod(buf, a < g.dim() ? g.hi(a) : 0.0);
    append_pod(buf, snap.t);
    append_pod(buf, static_cast<std::uint32_t>(snap.rotating_frame ? 1 : 0));
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            append_pod(buf, snap.rotation[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
    append_pod(buf, snap.params_hash);
    for (const cplx& z : snap.field.values) {
        append_pod(buf, z.real());
        append_pod(buf, z.imag());
    }
    append_pod(buf, crc_of(buf.data(), buf.size()));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size()));
    if (!out) throw ConfigError("short write to '" + path + "'");
}

Snapshot read_snapshot(const std::string& path) {
    const auto data = read_all(path);
    if (data.size() < 168) throw ConfigError("snapshot file truncated: '" + path + "'");

    const std::uint32_t stored_crc = [&] {
        std::uint32_t v;
        std::memcpy(&v, data.data() + data.size() - 4, 4);
        return v;
    }();
    if (crc_of(data.data(), data.size() - 4) != stored_crc)
        throw ConfigError("snapshot checksum mismatch: '" + path + "'");

    Reader r{data.data(), data.size() - 4};
    char magic[4];
    r.take(magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw ConfigError("not a snapshot file: '" + path + "'");
    if (r.pod<std::uint32_t>() != kVersion)
        throw ConfigError("unsupported snapshot version in '" + path + "'");

    const auto dim = r.pod<std::int32_t>();
    if (dim != 2 && dim != 3) throw ConfigError("snapshot grid dim must be 2 or 3");
    std::array<int, 3> n{1, 1, 1};
    for (int a = 0; a < 3; ++a) n[static_cast<std::size_t>(a)] = r.pod<std::int32_t>();
    std::array<double, 3> lo{}, hi{};
    for (int a = 0; a < 3; ++a) lo[static_cast<std::size_t>(a)] = r.pod<double>();
    for (int a = 0; a < 3; ++a) hi[static_cast<std::size_t>(a)] = r.pod<double>();
    for (int a = 0; a < dim; ++a) {
        if (n[static_cast<std::size_t>(a)] < 4 || n[static_cast<std::size_t>(a)] % 2 != 0)
            throw ConfigError("snapshot grid points must be even and >= 4");
        if (!(lo[static_cast<std::size_t>(a)] < hi[static_cast<std::size_t>(a)]))
            throw ConfigError("snapshot grid bounds invalid");
    }

    Snapshot snap;
    snap.t = r.pod<double>();
    snap.rotating_frame = r.pod<std::uint32_t>() != 0;
    for (int row = 0; row < 3; ++row)
        for (int col = 0; col < 3; ++col)
            snap.rotation[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)] =
                r.pod<double>();
    snap.params_hash = r.pod<std::uint64_t>();

    auto grid = std::make_shared<Grid>(dim, lo, hi, n);
    if (r.left != 16 * grid->size())
        throw ConfigError("snapshot payload length does not match its grid spec");
    snap.field = ComplexField(grid);
    for (cplx& z : snap.field.values) {
        const double re = r.pod<double>();
        const double im = r.pod<double>();
        z = {re, im};
    }
    return snap;
}

std::uint64_t params_fingerprint(const PhysicsParams& p) {
    std::uint64_t h = 1469598103934665603ull; // FNV-1a offset basis
    const auto mix = [&h](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xff;
            h *= 1099511628211ull;
        }
    };
    const auto mixd = [&](double v) { mix(std::bit_cast<std::uint64_t>(v)); };
    mixd(p.s);
    mixd(p.m);
    mixd(p.beta);
    mixd(p.lambda);
    mixd(p.omega);
    for (double g : p.gamma) mixd(g);
    mix(static_cast<std::uint64_t>(p.kernel.variant));
    mixd(p.kernel.exponent);
    for (double a : p.kernel.axis) mixd(a);
    return h;
}

std::string diagnostics_csv_header() {
    return "t,mass,e_kinetic,e_potential,e_rotation,e_local,e_nonlocal,e_total,"
           "angular_momentum,center_x,center_y,center_z,width_x,width_y,width_z,"
           "momentum_x,momentum_y,momentum_z,ame_production";
}

std::string diagnostics_csv_row(const DiagnosticsRecord& r) {
    std::string s;
    const auto add = [&s](double v) {
        if (!s.empty()) s += ',';
        s += fmt(v);
    };
    add(r.t);
    add(r.mass);
    add(r.energy.kinetic);
    add(r.energy.potential);
    add(r.energy.rotation);
    add(r.energy.local);
    add(r.energy.nonlocal);
    add(r.energy.total);
    add(r.angular_momentum);
    for (double v : r.center) add(v);
    for (double v : r.widths) add(v);
    for (double v : r.momentum) add(v);
    add(r.ame_production);
    return s;
}

std::string convergence_csv_header() {
    return "iteration,e_kinetic,e_potential,e_rotation,e_local,e_nonlocal,e_total,"
           "residual,inner_iterations";
}

std::string convergence_csv_row(const OuterRecord& r) {
    std::string s = std::to_string(r.iteration);
    const auto add = [&s](double v) { s += ',', s += fmt(v); };
    add(r.energy.kinetic);
    add(r.energy.potential);
    add(r.energy.rotation);
    add(r.energy.local);
    add(r.energy.nonlocal);
    add(r.energy.total);
    add(r.residual);
    s += ',';
    s += std::to_string(r.inner_iterations);
    return s;
}

namespace {

// nearest grid row to coordinate 0 on the given axis
int zero_index(const Grid& g, int axis) {
    int best = 0;
    double dist = std::abs(g.coord(axis, 0));
    for (int i = 1; i < g.points(axis); ++i) {
        const double d = std::abs(g.coord(axis, i));
        if (d < dist) {
            dist = d;
            best = i;
        }
    }
    return best;
}

void emit_slice_x(const Snapshot& snap, std::ostream& out) {
    const Grid& g = *snap.field.grid;
    const int iy = zero_index(g, 1);
    const int iz = g.dim() == 3 ? zero_index(g, 2) : 0;
    const std::size_t nz = g.dim() == 3 ? static_cast<std::size_t>(g.points(2)) : 1;
    const auto ny = static_cast<std::size_t>(g.points(1));
    out << "# x abs\n";
    for (int i = 0; i < g.points(0); ++i) {
        const std::size_t idx =
            (static_cast<std::size_t>(i) * ny + static_cast<std::size_t>(iy)) * nz +
            static_cast<std::size_t>(iz);
        out << fmt(g.coord(0, i)) << ' ' << fmt(std::abs(snap.field.values[idx])) << '\n';
    }
}

void emit_contour(const Snapshot& snap, std::ostream& out) {
    const Grid& g = *snap.field.grid;
    const int iz = g.dim() == 3 ? zero_index(g, 2) : 0;
    const std::size_t nz = g.dim() == 3 ? static_cast<std::size_t>(g.points(2)) : 1;
    const auto ny = static_cast<std::size_t>(g.points(1));
    out << "# x y density\n";
    for (int i = 0; i < g.points(0); ++i) {
        for (int j = 0; j < g.points(1); ++j) {
            const std::size_t idx =
                (static_cast<std::size_t>(i) * ny + static_cast<std::size_t>(j)) * nz +
                static_cast<std::size_t>(iz);
            out << fmt(g.coord(0, i)) << ' ' << fmt(g.coord(1, j)) << ' '
                << fmt(std::norm(snap.field.values[idx])) << '\n';
        }
        out << '\n'; // scanline break, gnuplot grid convention
    }
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

void emit_timeseries(const std::string& path, std::ostream& out,
                     const std::vector<std::string>& columns) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open file '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty CSV file '" + path + "'");
    const auto header = split_csv(line);

    std::vector<std::size_t> pick;
    if (columns.empty()) {
        for (std::size_t i = 0; i < header.size(); ++i) pick.push_back(i);
    } else {
        for (const auto& name : columns) {
            auto it = std::find(header.begin(), header.end(), name);
            if (it == header.end())
                throw ConfigError("column '" + name + "' not present in '" + path + "'");
            pick.push_back(static_cast<std::size_t>(it - header.begin()));
        }
    }

    out << '#';
    for (std::size_t i : pick) out << ' ' << header[i];
    out << '\n';
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto cells = split_csv(line);
        if (cells.size() != header.size())
            throw ConfigError("CSV row " + std::to_string(lineno) + " in '" + path +
                              "' has " + std::to_string(cells.size()) + " cells, expected " +
                              std::to_string(header.size()));
        bool first = true;
        for (std::size_t i : pick) {
            if (!first) out << ' ';
            first = false;
            out << cells[i];
        }
        out << '\n';
    }
}

} // namespace

void emit_plot_data(const std::string& input_path, const std::string& kind,
                    std::ostream& out, const std::vector<std::string>& columns) {
    if (kind == "slice_x") {
        emit_slice_x(read_snapshot(input_path), out);
    } else if (kind == "contour_grid") {
        emit_contour(read_snapshot(input_path), out);
    } else if (kind == "timeseries") {
        emit_timeseries(input_path, out, columns);
    } else {
        throw ConfigError("unknown plot kind '" + kind +
                          "' (expected slice_x|contour_grid|timeseries)");
    }
}

} // namespace fgpe
