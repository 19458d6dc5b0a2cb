#include "ahvx/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace ahvx {

static_assert(std::endian::native == std::endian::little,
              "AHVX snapshots are little-endian; big-endian hosts are unsupported");

namespace {

template <class T>
void put(std::ofstream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& is) {
    T v;
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw numeric_error("AHVX read: truncated file");
    return v;
}

} // namespace

void write_snapshot(const std::string& path, const SnapshotHeader& hdr,
                    const std::vector<double>& payload) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw numeric_error("AHVX write: cannot open " + path);
    os.write("AHVX", 4);
    put<std::uint32_t>(os, hdr.version);
    put<std::uint32_t>(os, hdr.rank);
    for (std::uint32_t d : hdr.dims) put<std::uint32_t>(os, d);
    put<double>(os, hdr.spacing);
    for (double o : hdr.origin) put<double>(os, o);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(hdr.kind));
    os.write(reinterpret_cast<const char*>(payload.data()),
             std::streamsize(payload.size() * sizeof(double)));
    if (!os) throw numeric_error("AHVX write failed: " + path);
}

std::vector<double> read_snapshot(const std::string& path, SnapshotHeader& hdr) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw numeric_error("AHVX read: cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "AHVX", 4) != 0)
        throw numeric_error("AHVX read: bad magic in " + path);
    hdr.version = get<std::uint32_t>(is);
    hdr.rank = get<std::uint32_t>(is);
    hdr.dims.resize(hdr.rank);
    for (auto& d : hdr.dims) d = get<std::uint32_t>(is);
    hdr.spacing = get<double>(is);
    hdr.origin.resize(hdr.rank);
    for (auto& o : hdr.origin) o = get<double>(is);
    hdr.kind = static_cast<FieldKind>(get<std::uint32_t>(is));
    std::vector<double> payload;
    std::uint64_t n = 1;
    for (auto d : hdr.dims) n *= d;
    bool complex = hdr.kind == FieldKind::higgs || hdr.kind == FieldKind::pi_higgs;
    payload.resize(n * (complex ? 2 : 1));
    is.read(reinterpret_cast<char*>(payload.data()),
            std::streamsize(payload.size() * sizeof(double)));
    if (!is) throw numeric_error("AHVX read: truncated payload in " + path);
    return payload;
}

namespace {
SnapshotHeader header_for(const Grid& g, FieldKind k) {
    SnapshotHeader h;
    h.rank = std::uint32_t(g.rank);
    for (int a = 0; a < g.rank; ++a) h.dims.push_back(std::uint32_t(g.dims[a]));
    h.spacing = g.h;
    for (int a = 0; a < g.rank; ++a) h.origin.push_back(g.origin[a]);
    h.kind = k;
    return h;
}
Grid grid_from(const SnapshotHeader& h) {
    if (h.rank == 2)
        return Grid::make2d(int(h.dims[0]), int(h.dims[1]), h.spacing, h.origin[0], h.origin[1]);
    return Grid::make3d(int(h.dims[0]), int(h.dims[1]), int(h.dims[2]), h.spacing, h.origin[0],
                        h.origin[1], h.origin[2]);
}
} // namespace

void write_field2(const std::string& path, const Grid& g, const Field2<double>& f, FieldKind k) {
    write_snapshot(path, header_for(g, k), f.v);
}

void write_field2(const std::string& path, const Grid& g, const Field2<cplx>& f, FieldKind k) {
    std::vector<double> p(f.v.size() * 2);
    for (std::size_t i = 0; i < f.v.size(); ++i) {
        p[2 * i] = f.v[i].real();
        p[2 * i + 1] = f.v[i].imag();
    }
    write_snapshot(path, header_for(g, k), p);
}

Field2<double> read_field2(const std::string& path, Grid& g, FieldKind& k) {
    SnapshotHeader h;
    auto p = read_snapshot(path, h);
    g = grid_from(h);
    k = h.kind;
    Field2<double> f(int(h.dims[0]), int(h.dims[1]));
    f.v = std::move(p);
    return f;
}

Field2<cplx> read_field2_complex(const std::string& path, Grid& g, FieldKind& k) {
    SnapshotHeader h;
    auto p = read_snapshot(path, h);
    g = grid_from(h);
    k = h.kind;
    Field2<cplx> f(int(h.dims[0]), int(h.dims[1]));
    for (std::size_t i = 0; i < f.v.size(); ++i) f.v[i] = cplx(p[2 * i], p[2 * i + 1]);
    return f;
}

} // namespace ahvx
