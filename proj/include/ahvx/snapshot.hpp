#ifndef AHVX_SNAPSHOT_HPP
#define AHVX_SNAPSHOT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "ahvx/field.hpp"

namespace ahvx {

// Field-kind tags for the AHVX snapshot format (shared repo-wide).
enum class FieldKind : std::uint32_t {
    higgs = 1,        // complex site field, interleaved (re, im)
    gauge_x = 2,      // real link field, x family
    gauge_y = 3,
    gauge_z = 4,
    plaquette_xy = 5, // real plaquette field
    plaquette_yz = 6,
    plaquette_zx = 7,
    site_scalar = 8,
    pi_higgs = 9,     // d/dt of the Higgs field, complex
    e_x = 10,         // d/dt of the gauge link families
    e_y = 11,
    e_z = 12,
    metric_g = 13,    // chart/metric dumps
};

// Binary, little-endian. Header: magic "AHVX", version u32, rank u32,
// dims u32 x rank, spacing f64, origin f64 x rank, field-kind u32, then the
// f64 payload row-major; complex fields interleaved (re, im).
struct SnapshotHeader {
    std::uint32_t version = 1;
    std::uint32_t rank = 2;
    std::vector<std::uint32_t> dims;
    double spacing = 0.0;
    std::vector<double> origin;
    FieldKind kind = FieldKind::site_scalar;
};

void write_snapshot(const std::string& path, const SnapshotHeader& hdr,
                    const std::vector<double>& payload);
std::vector<double> read_snapshot(const std::string& path, SnapshotHeader& hdr);

// Convenience wrappers for grid-attached fields.
void write_field2(const std::string& path, const Grid& g, const Field2<double>& f, FieldKind k);
void write_field2(const std::string& path, const Grid& g, const Field2<cplx>& f, FieldKind k);
Field2<double> read_field2(const std::string& path, Grid& g, FieldKind& k);
Field2<cplx> read_field2_complex(const std::string& path, Grid& g, FieldKind& k);

} // namespace ahvx

#endif
