#ifndef AHVX_LATTICE_HPP
#define AHVX_LATTICE_HPP

#include <optional>
#include <utility>
#include <vector>

#include "ahvx/field.hpp"
#include "ahvx/util.hpp"

namespace ahvx {

// 2D Euclidean abelian Higgs configuration on a staggered grid.
//
// phi lives on sites. ax(i,j) is the gauge component on the link from site
// (i,j) to (i+1,j) at the half-integer position; ay likewise in y. The last
// row/column of a link array is unused on non-periodic axes. Covariant
// differences couple through the link phase exp(-i h A), so every local
// observable below (|D phi|^2, F, j, omega) is exactly gauge invariant on
// the lattice, not just to O(h^2).
struct Config2D {
    Grid grid;
    Field2<cplx> phi;
    Field2<double> ax, ay;
    double epsilon = 1.0;
    double lambda = 1.0;

    static Config2D vacuum(const Grid& g, double eps, double lam);

    int nlx() const { return grid.periodic[0] ? grid.nx() : grid.nx() - 1; } // x-link count in i
    int nly() const { return grid.periodic[1] ? grid.ny() : grid.ny() - 1; } // y-link count in j
    int npx() const { return nlx(); }                                        // plaquette count in i
    int npy() const { return nly(); }

    int wrapi(int i) const { int n = grid.nx(); return grid.periodic[0] ? (i % n + n) % n : i; }
    int wrapj(int j) const { int n = grid.ny(); return grid.periodic[1] ? (j % n + n) % n : j; }

    // Resolution guard: h <= epsilon / guard (core must be resolved).
    void validate(double guard = 2.0) const;
};

enum class Axis { x = 0, y = 1 };

// Discrete gauge-covariant forward difference along `dir`; result on links.
Field2<cplx> covariant_diff(const Field2<cplx>& phi, const Field2<double>& a, Axis dir,
                            const Grid& grid);

// Plaquette curvature: circulation of A divided by cell area.
Field2<double> curvature(const Config2D& u);

// Gauge-invariant link current j = <i phi, D phi> referenced to the link
// midpoint via parallel transport: j(link) = <i phi(x), exp(-ihA) phi(x+h)>/h.
std::pair<Field2<double>, Field2<double>> current(const Config2D& u);

// Plaquette vorticity omega = (1/2) curl(j + A).
Field2<double> vorticity(const Config2D& u);

// Site energy density (link/plaquette terms averaged to sites).
Field2<double> energy_density_2d(const Config2D& u);

// Total energy from link/plaquette/site sums at their natural positions;
// deterministic reduction.
double total_energy_2d(const Config2D& u);

// Weighted sums against a function of position evaluated at each summand's
// natural location (site, link midpoint, plaquette center).
double weighted_energy_2d(const Config2D& u, const std::function<double(double, double)>& w);
double weighted_vorticity_2d(const Config2D& u, const std::function<double(double, double)>& w);

// phi -> e^{i chi} phi, A -> A + d chi (exact lattice differences).
// chi must be resolved: neighbor jumps above pi are rejected (a winding /
// multivalued phase cannot be represented by a site sample).
void gauge_transform(Config2D& u, const Field2<double>& chi);

struct WindingResult {
    int degree = 0;
    double residual = 0.0;   // |raw/2pi - degree|
    bool under_resolved = false; // residual > 0.25
};

// Degree of phi/|phi| along a closed lattice path (sequence of sites, last
// implicitly joined to first). Throws if |phi| vanishes on the path.
WindingResult winding_degree(const Field2<cplx>& phi, const std::vector<std::pair<int, int>>& loop);

// Axis-aligned rectangular loop of half-width sx, sy (in cells) around site
// (ic, jc), counterclockwise.
std::vector<std::pair<int, int>> rect_loop(const Grid& g, int ic, int jc, int sx, int sy);

// Sum of omega h^2 over the plaquettes enclosed by rect_loop(ic,jc,sx,sy).
double omega_integral_rect(const Config2D& u, int ic, int jc, int sx, int sy);

// Sum of omega h^2 over plaquettes whose center lies within `radius` of (cx, cy).
double omega_integral_disk(const Config2D& u, double cx, double cy, double radius);

// Line integral of (1/2)|D_tan phi|^2 + (lambda/8 eps^2)(|phi|^2-1)^2 along a
// rectangular loop (measured boundary energy entering the quantization bound).
double boundary_energy_rect(const Config2D& u, int ic, int jc, int sx, int sy);

// Pointwise Bogomol'nyi split at interior sites. The three residual densities
// are nonnegative; `defect` is e - (sign*omega + r1 + r2 + r3), which vanishes
// up to O(h^2) averaging error. Boundary entries are zero.
struct BogomolnySplit {
    Field2<double> r1, r2, r3, defect;
};
BogomolnySplit bogomolny_residual(const Config2D& u, int sign);

// L1 norm of the defect over interior sites (for Richardson order checks).
double bogomolny_defect_l1(const Config2D& u, int sign);

} // namespace ahvx

#endif
