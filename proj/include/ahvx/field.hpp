#ifndef AHVX_FIELD_HPP
#define AHVX_FIELD_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "ahvx/util.hpp"

namespace ahvx {

// Uniform grid, rank 2 or 3. Sites at origin + h*(i0,i1,...).
struct Grid {
    int rank = 2;
    std::array<int, 3> dims{0, 0, 1};
    double h = 0.0;               // spacing, same along every axis
    std::array<double, 3> origin{0.0, 0.0, 0.0};
    std::array<bool, 3> periodic{false, false, false};

    int nx() const { return dims[0]; }
    int ny() const { return dims[1]; }
    int nz() const { return dims[2]; }
    std::int64_t nsites() const {
        return std::int64_t(dims[0]) * dims[1] * (rank == 3 ? dims[2] : 1);
    }
    double x(int i) const { return origin[0] + h * i; }
    double y(int j) const { return origin[1] + h * j; }
    double z(int k) const { return origin[2] + h * k; }
    bool same_layout(const Grid& o) const {
        return rank == o.rank && dims == o.dims && h == o.h && origin == o.origin &&
               periodic == o.periodic;
    }

    void validate() const {
        if (h <= 0.0) throw shape_error("grid spacing must be positive");
        for (int a = 0; a < rank; ++a)
            if (dims[a] < 4) throw shape_error("grid needs at least 4 sites per axis");
    }

    static Grid make2d(int nx, int ny, double h, double ox, double oy) {
        Grid g;
        g.rank = 2;
        g.dims = {nx, ny, 1};
        g.h = h;
        g.origin = {ox, oy, 0.0};
        g.validate();
        return g;
    }
    static Grid make3d(int nx, int ny, int nz, double h, double ox, double oy, double oz) {
        Grid g;
        g.rank = 3;
        g.dims = {nx, ny, nz};
        g.h = h;
        g.origin = {ox, oy, oz};
        g.validate();
        return g;
    }
};

// Dense 2D array, row-major in j (index = i*ny + j).
template <class T>
struct Field2 {
    int nx = 0, ny = 0;
    std::vector<T> v;

    Field2() = default;
    Field2(int nx_, int ny_, T fill = T{}) : nx(nx_), ny(ny_), v(std::size_t(nx_) * ny_, fill) {}

    T& operator()(int i, int j) { return v[std::size_t(i) * ny + j]; }
    const T& operator()(int i, int j) const { return v[std::size_t(i) * ny + j]; }
    std::int64_t size() const { return std::int64_t(nx) * ny; }
    void fill(T x) { std::fill(v.begin(), v.end(), x); }
};

template <class T>
struct Field3 {
    int nx = 0, ny = 0, nz = 0;
    std::vector<T> v;

    Field3() = default;
    Field3(int nx_, int ny_, int nz_, T fill = T{})
        : nx(nx_), ny(ny_), nz(nz_), v(std::size_t(nx_) * ny_ * nz_, fill) {}

    T& operator()(int i, int j, int k) { return v[(std::size_t(i) * ny + j) * nz + k]; }
    const T& operator()(int i, int j, int k) const {
        return v[(std::size_t(i) * ny + j) * nz + k];
    }
    std::int64_t size() const { return std::int64_t(nx) * ny * nz; }
    void fill(T x) { std::fill(v.begin(), v.end(), x); }
};

} // namespace ahvx

#endif
