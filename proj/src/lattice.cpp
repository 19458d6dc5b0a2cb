#include "ahvx/lattice.hpp"

#include <algorithm>
#include <cmath>

namespace ahvx {

Config2D Config2D::vacuum(const Grid& g, double eps, double lam) {
    Config2D u;
    u.grid = g;
    u.phi = Field2<cplx>(g.nx(), g.ny(), cplx(1.0, 0.0));
    u.ax = Field2<double>(g.nx(), g.ny(), 0.0);
    u.ay = Field2<double>(g.nx(), g.ny(), 0.0);
    u.epsilon = eps;
    u.lambda = lam;
    u.validate();
    return u;
}

void Config2D::validate(double guard) const {
    grid.validate();
    if (!(epsilon > 0.0 && epsilon <= 1.0)) throw numeric_error("epsilon must lie in (0,1]");
    if (!(lambda > 0.0)) throw numeric_error("lambda must be positive");
    if (grid.h > epsilon / guard + 1e-14)
        throw numeric_error("grid spacing too coarse for epsilon (resolution guard)");
}

Field2<cplx> covariant_diff(const Field2<cplx>& phi, const Field2<double>& a, Axis dir,
                            const Grid& grid) {
    if (phi.nx != grid.nx() || phi.ny != grid.ny() || a.nx != grid.nx() || a.ny != grid.ny())
        throw shape_error("covariant_diff: fields do not share the grid");
    const int nx = grid.nx(), ny = grid.ny();
    const double h = grid.h;
    Field2<cplx> d(nx, ny, cplx(0.0, 0.0));
    if (dir == Axis::x) {
        const int nl = grid.periodic[0] ? nx : nx - 1;
        par::parallel_for(nl, [&](std::int64_t b, std::int64_t e) {
            for (int i = int(b); i < int(e); ++i) {
                int ip1 = grid.periodic[0] ? (i + 1) % nx : i + 1;
                for (int j = 0; j < ny; ++j)
                    d(i, j) = (phi(ip1, j) * std::polar(1.0, -h * a(i, j)) - phi(i, j)) / h;
            }
        });
    } else {
        const int nl = grid.periodic[1] ? ny : ny - 1;
        par::parallel_for(nx, [&](std::int64_t b, std::int64_t e) {
            for (int i = int(b); i < int(e); ++i)
                for (int j = 0; j < nl; ++j) {
                    int jp1 = grid.periodic[1] ? (j + 1) % ny : j + 1;
                    d(i, j) = (phi(i, jp1) * std::polar(1.0, -h * a(i, j)) - phi(i, j)) / h;
                }
        });
    }
    return d;
}

Field2<double> curvature(const Config2D& u) {
    const int nx = u.grid.nx(), ny = u.grid.ny();
    const double h = u.grid.h;
    Field2<double> f(nx, ny, 0.0);
    const int npx = u.npx(), npy = u.npy();
    par::parallel_for(npx, [&](std::int64_t b, std::int64_t e) {
        for (int i = int(b); i < int(e); ++i) {
            int ip1 = u.wrapi(i + 1);
            for (int j = 0; j < npy; ++j) {
                int jp1 = u.wrapj(j + 1);
                f(i, j) = (u.ax(i, j) + u.ay(ip1, j) - u.ax(i, jp1) - u.ay(i, j)) / h;
            }
        }
    });
    return f;
}

std::pair<Field2<double>, Field2<double>> current(const Config2D& u) {
    const int nx = u.grid.nx(), ny = u.grid.ny();
    const double h = u.grid.h;
    Field2<double> jx(nx, ny, 0.0), jy(nx, ny, 0.0);
    const int nlx = u.nlx(), nly = u.nly();
    par::parallel_for(nx, [&](std::int64_t b, std::int64_t e) {
        for (int i = int(b); i < int(e); ++i) {
            for (int j = 0; j < ny; ++j) {
                if (i < nlx) {
                    int ip1 = u.wrapi(i + 1);
                    jx(i, j) = ip(cplx(0, 1) * u.phi(i, j),
                                  std::polar(1.0, -h * u.ax(i, j)) * u.phi(ip1, j)) / h;
                }
                if (j < nly) {
                    int jp1 = u.wrapj(j + 1);
                    jy(i, j) = ip(cplx(0, 1) * u.phi(i, j),
                                  std::polar(1.0, -h * u.ay(i, j)) * u.phi(i, jp1)) / h;
                }
            }
        }
    });
    return {std::move(jx), std::move(jy)};
}

Field2<double> vorticity(const Config2D& u) {
    const int nx = u.grid.nx(), ny = u.grid.ny();
    const double h = u.grid.h;
    auto [jx, jy] = current(u);
    Field2<double> f = curvature(u);
    Field2<double> om(nx, ny, 0.0);
    const int npx = u.npx(), npy = u.npy();
    par::parallel_for(npx, [&](std::int64_t b, std::int64_t e) {
        for (int i = int(b); i < int(e); ++i) {
            int ip1 = u.wrapi(i + 1);
            for (int j = 0; j < npy; ++j) {
                int jp1 = u.wrapj(j + 1);
                double circ_j = (jx(i, j) + jy(ip1, j) - jx(i, jp1) - jy(i, j)) / h;
                om(i, j) = 0.5 * (circ_j + f(i, j));
            }
        }
    });
    return om;
}

namespace {

inline double site_potential(const Config2D& u, int i, int j) {
    double m2 = std::norm(u.phi(i, j));
    double d = m2 - 1.0;
    return u.lambda / (8.0 * u.epsilon * u.epsilon) * d * d;
}

} // namespace

Field2<double> energy_density_2d(const Config2D& u) {
    const int nx = u.grid.nx(), ny = u.grid.ny();
    Field2<cplx> dx = covariant_diff(u.phi, u.ax, Axis::x, u.grid);
    Field2<cplx> dy = covariant_diff(u.phi, u.ay, Axis::y, u.grid);
    Field2<double> f = curvature(u);
    const double ee = u.epsilon * u.epsilon;
    Field2<double> e(nx, ny, 0.0);
    const int nlx = u.nlx(), nly = u.nly(), npx = u.npx(), npy = u.npy();
    par::parallel_for(nx, [&](std::int64_t b, std::int64_t eend) {
        for (int i = int(b); i < int(eend); ++i) {
            for (int j = 0; j < ny; ++j) {
                double kx = 0.0; int cx = 0;
                if (i < nlx) { kx += 0.5 * std::norm(dx(i, j)); ++cx; }
                int im1 = u.grid.periodic[0] ? (i + nx - 1) % nx : i - 1;
                if (im1 >= 0 && im1 < nlx && (u.grid.periodic[0] || i > 0)) {
                    kx += 0.5 * std::norm(dx(im1, j)); ++cx;
                }
                double ky = 0.0; int cy = 0;
                if (j < nly) { ky += 0.5 * std::norm(dy(i, j)); ++cy; }
                int jm1 = u.grid.periodic[1] ? (j + ny - 1) % ny : j - 1;
                if (jm1 >= 0 && jm1 < nly && (u.grid.periodic[1] || j > 0)) {
                    ky += 0.5 * std::norm(dy(i, jm1)); ++cy;
                }
                double fm = 0.0; int cf = 0;
                for (int di = -1; di <= 0; ++di)
                    for (int dj = -1; dj <= 0; ++dj) {
                        int pi = u.grid.periodic[0] ? (i + di + nx) % nx : i + di;
                        int pj = u.grid.periodic[1] ? (j + dj + ny) % ny : j + dj;
                        if (pi >= 0 && pi < npx && pj >= 0 && pj < npy) {
                            fm += 0.5 * ee * f(pi, pj) * f(pi, pj);
                            ++cf;
                        }
                    }
                e(i, j) = (cx ? kx / cx : 0.0) + (cy ? ky / cy : 0.0) + (cf ? fm / cf : 0.0) +
                          site_potential(u, i, j);
            }
        }
    });
    return e;
}

double total_energy_2d(const Config2D& u) {
    return weighted_energy_2d(u, [](double, double) { return 1.0; });
}

double weighted_energy_2d(const Config2D& u, const std::function<double(double, double)>& w) {
    const int nx = u.grid.nx(), ny = u.grid.ny();
    const double h = u.grid.h;
    Field2<cplx> dx = covariant_diff(u.phi, u.ax, Axis::x, u.grid);
    Field2<cplx> dy = covariant_diff(u.phi, u.ay, Axis::y, u.grid);
    Field2<double> f = curvature(u);
    const double ee = u.epsilon * u.epsilon;
    const int nlx = u.nlx(), nly = u.nly(), npx = u.npx(), npy = u.npy();

    double s_sites = par::reduce_sum(std::int64_t(nx) * ny, [&](std::int64_t idx) {
        int i = int(idx / ny), j = int(idx % ny);
        return w(u.grid.x(i), u.grid.y(j)) * site_potential(u, i, j);
    });
    double s_lx = par::reduce_sum(std::int64_t(nlx) * ny, [&](std::int64_t idx) {
        int i = int(idx / ny), j = int(idx % ny);
        return w(u.grid.x(i) + 0.5 * h, u.grid.y(j)) * 0.5 * std::norm(dx(i, j));
    });
    double s_ly = par::reduce_sum(std::int64_t(nx) * nly, [&](std::int64_t idx) {
        int i = int(idx / nly), j = int(idx % nly);
        return w(u.grid.x(i), u.grid.y(j) + 0.5 * h) * 0.5 * std::norm(dy(i, j));
    });
    double s_p = par::reduce_sum(std::int64_t(npx) * npy, [&](std::int64_t idx) {
        int i = int(idx / npy), j = int(idx % npy);
        return w(u.grid.x(i) + 0.5 * h, u.grid.y(j) + 0.5 * h) * 0.5 * ee * f(i, j) * f(i, j);
    });
    return h * h * (((s_sites + s_lx) + (s_ly + s_p)));
}

double weighted_vorticity_2d(const Config2D& u, const std::function<double(double, double)>& w) {
    Field2<double> om = vorticity(u);
    const double h = u.grid.h;
    const int npx = u.npx(), npy = u.npy();
    double s = par::reduce_sum(std::int64_t(npx) * npy, [&](std::int64_t idx) {
        int i = int(idx / npy), j = int(idx % npy);
        return w(u.grid.x(i) + 0.5 * h, u.grid.y(j) + 0.5 * h) * om(i, j);
    });
    return h * h * s;
}

void gauge_transform(Config2D& u, const Field2<double>& chi) {
    const int nx = u.grid.nx(), ny = u.grid.ny();
    if (chi.nx != nx || chi.ny != ny) throw shape_error("gauge_transform: chi shape mismatch");
    const double h = u.grid.h;
    const int nlx = u.nlx(), nly = u.nly();
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            if (!std::isfinite(chi(i, j))) throw numeric_error("gauge_transform: chi not finite");
            if (i < nlx) {
                double d = chi(u.wrapi(i + 1), j) - chi(i, j);
                if (std::abs(d) > pi)
                    throw numeric_error("gauge_transform: chi jump exceeds pi (winding or "
                                        "under-resolved phase)");
            }
            if (j < nly) {
                double d = chi(i, u.wrapj(j + 1)) - chi(i, j);
                if (std::abs(d) > pi)
                    throw numeric_error("gauge_transform: chi jump exceeds pi (winding or "
                                        "under-resolved phase)");
            }
        }
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            u.phi(i, j) *= std::polar(1.0, chi(i, j));
            if (i < nlx) u.ax(i, j) += (chi(u.wrapi(i + 1), j) - chi(i, j)) / h;
            if (j < nly) u.ay(i, j) += (chi(i, u.wrapj(j + 1)) - chi(i, j)) / h;
        }
}

WindingResult winding_degree(const Field2<cplx>& phi,
                             const std::vector<std::pair<int, int>>& loop) {
    if (loop.size() < 3) throw shape_error("winding_degree: loop too short");
    double total = 0.0;
    for (std::size_t k = 0; k < loop.size(); ++k) {
        auto [i0, j0] = loop[k];
        auto [i1, j1] = loop[(k + 1) % loop.size()];
        cplx a = phi(i0, j0), b = phi(i1, j1);
        if (std::abs(a) == 0.0 || std::abs(b) == 0.0)
            throw numeric_error("winding_degree: |phi| = 0 on the loop, degree undefined");
        total += std::arg(b / a);
    }
    WindingResult r;
    double t = total / (2.0 * pi);
    r.degree = int(std::lround(t));
    r.residual = std::abs(t - r.degree);
    r.under_resolved = r.residual > 0.25;
    return r;
}

std::vector<std::pair<int, int>> rect_loop(const Grid& g, int ic, int jc, int sx, int sy) {
    int ilo = ic - sx, ihi = ic + sx, jlo = jc - sy, jhi = jc + sy;
    if (ilo < 0 || jlo < 0 || ihi >= g.nx() || jhi >= g.ny())
        throw shape_error("rect_loop: loop leaves the grid");
    std::vector<std::pair<int, int>> loop;
    for (int i = ilo; i < ihi; ++i) loop.emplace_back(i, jlo);
    for (int j = jlo; j < jhi; ++j) loop.emplace_back(ihi, j);
    for (int i = ihi; i > ilo; --i) loop.emplace_back(i, jhi);
    for (int j = jhi; j > jlo; --j) loop.emplace_back(ilo, j);
    return loop;
}

double omega_integral_rect(const Config2D& u, int ic, int jc, int sx, int sy) {
    Field2<double> om = vorticity(u);
    const double h = u.grid.h;
    double s = 0.0;
    for (int i = ic - sx; i < ic + sx; ++i)
        for (int j = jc - sy; j < jc + sy; ++j) s += om(i, j);
    return s * h * h;
}

double omega_integral_disk(const Config2D& u, double cx, double cy, double radius) {
    return weighted_vorticity_2d(u, [&](double x, double y) {
        double dx = x - cx, dy = y - cy;
        return dx * dx + dy * dy <= radius * radius ? 1.0 : 0.0;
    });
}

double boundary_energy_rect(const Config2D& u, int ic, int jc, int sx, int sy) {
    auto loop = rect_loop(u.grid, ic, jc, sx, sy);
    const double h = u.grid.h;
    double s = 0.0;
    for (std::size_t k = 0; k < loop.size(); ++k) {
        auto [i0, j0] = loop[k];
        auto [i1, j1] = loop[(k + 1) % loop.size()];
        // tangential covariant difference along the loop link
        double alink;
        cplx pa = u.phi(i0, j0), pb = u.phi(i1, j1);
        if (i1 == i0 + 1) alink = u.ax(i0, j0);
        else if (i1 == i0 - 1) alink = -u.ax(i1, j1);
        else if (j1 == j0 + 1) alink = u.ay(i0, j0);
        else alink = -u.ay(i1, j1);
        cplx d = (pb * std::polar(1.0, -h * alink) - pa) / h;
        double v0 = site_potential(u, i0, j0), v1 = site_potential(u, i1, j1);
        s += (0.5 * std::norm(d) + 0.5 * (v0 + v1)) * h;
    }
    return s;
}

BogomolnySplit bogomolny_residual(const Config2D& u, int sign) {
    const int nx = u.grid.nx(), ny = u.grid.ny();
    const double h = u.grid.h, eps = u.epsilon, lam = u.lambda;
    const double sg = sign >= 0 ? 1.0 : -1.0;
    Field2<cplx> dxl = covariant_diff(u.phi, u.ax, Axis::x, u.grid);
    Field2<cplx> dyl = covariant_diff(u.phi, u.ay, Axis::y, u.grid);
    Field2<double> f = curvature(u);
    Field2<double> om = vorticity(u);
    BogomolnySplit out;
    out.r1 = Field2<double>(nx, ny, 0.0);
    out.r2 = Field2<double>(nx, ny, 0.0);
    out.r3 = Field2<double>(nx, ny, 0.0);
    out.defect = Field2<double>(nx, ny, 0.0);
    for (int i = 1; i < nx - 1; ++i)
        for (int j = 1; j < ny - 1; ++j) {
            // site-referenced centered covariant derivatives
            cplx dxf = dxl(i, j);
            cplx dxb = (u.phi(i, j) - std::polar(1.0, h * u.ax(i - 1, j)) * u.phi(i - 1, j)) / h;
            cplx dyf = dyl(i, j);
            cplx dyb = (u.phi(i, j) - std::polar(1.0, h * u.ay(i, j - 1)) * u.phi(i, j - 1)) / h;
            cplx d1 = 0.5 * (dxf + dxb), d2 = 0.5 * (dyf + dyb);
            double fs = 0.25 * (f(i, j) + f(i - 1, j) + f(i, j - 1) + f(i - 1, j - 1));
            double os = 0.25 * (om(i, j) + om(i - 1, j) + om(i, j - 1) + om(i - 1, j - 1));
            double m2 = std::norm(u.phi(i, j));
            cplx c = d1 + sg * cplx(0, 1) * d2;
            double r1 = 0.5 * std::norm(c);
            double b = eps * fs + sg * (m2 - 1.0) / (2.0 * eps);
            double r2 = 0.5 * b * b;
            double r3 = (lam - 1.0) / (8.0 * eps * eps) * (m2 - 1.0) * (m2 - 1.0);
            // site energy with matching averaging
            double es = 0.25 * (std::norm(dxf) + std::norm(dxb) + std::norm(dyf) + std::norm(dyb));
            double efm = 0.25 * ((f(i, j) * f(i, j) + f(i - 1, j) * f(i - 1, j)) +
                                 (f(i, j - 1) * f(i, j - 1) + f(i - 1, j - 1) * f(i - 1, j - 1)));
            double e = es + 0.5 * eps * eps * efm + site_potential(u, i, j);
            out.r1(i, j) = r1;
            out.r2(i, j) = r2;
            out.r3(i, j) = r3;
            out.defect(i, j) = e - (sg * os + r1 + r2 + r3);
        }
    return out;
}

double bogomolny_defect_l1(const Config2D& u, int sign) {
    BogomolnySplit s = bogomolny_residual(u, sign);
    const int nx = u.grid.nx(), ny = u.grid.ny();
    const double h = u.grid.h;
    double t = par::reduce_sum(std::int64_t(nx) * ny, [&](std::int64_t idx) {
        int i = int(idx / ny), j = int(idx % ny);
        return std::abs(s.defect(i, j));
    });
    return t * h * h;
}

} // namespace ahvx
