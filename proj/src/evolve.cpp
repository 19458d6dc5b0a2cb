#include "ahvx/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ahvx {

State2D State2D::rest(const Config2D& u, Geometry2D geom) {
    State2D s;
    s.grid = u.grid;
    s.geom = geom;
    s.epsilon = u.epsilon;
    s.lambda = u.lambda;
    s.phi = u.phi;
    s.ax = u.ax;
    s.ay = u.ay;
    s.pi = Field2<cplx>(u.grid.nx(), u.grid.ny(), cplx(0, 0));
    s.ex = Field2<double>(u.grid.nx(), u.grid.ny(), 0.0);
    s.ey = Field2<double>(u.grid.nx(), u.grid.ny(), 0.0);
    s.default_masks();
    return s;
}

Config2D State2D::as_config() const {
    Config2D u;
    u.grid = grid;
    u.epsilon = epsilon;
    u.lambda = lambda;
    u.phi = phi;
    u.ax = ax;
    u.ay = ay;
    return u;
}

void State2D::default_masks(int frozen_layers) {
    const int nx = grid.nx(), ny = grid.ny(), f = frozen_layers;
    upd_site = Field2<char>(nx, ny, 0);
    upd_ax = Field2<char>(nx, ny, 0);
    upd_ay = Field2<char>(nx, ny, 0);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            bool interior = i >= f && j >= f && i < nx - f && j < ny - f;
            if (geom == Geometry2D::axisym && !axis_parity && i == 0) interior = false;
            upd_site(i, j) = interior ? 1 : 0;
            upd_ax(i, j) = (interior && i < nx - f) ? 1 : 0;
            upd_ay(i, j) = (interior && j < ny - f) ? 1 : 0;
        }
}

namespace {

// plaquette weight at (i+1/2, j+1/2); link weights at their midpoints
inline double wsite(const State2D& s, int i) {
    return s.geom == Geometry2D::axisym ? s.grid.x(i) : 1.0;
}
inline double wmidx(const State2D& s, int i) {
    return s.geom == Geometry2D::axisym ? s.grid.x(i) + 0.5 * s.grid.h : 1.0;
}

} // namespace

void rhs(const State2D& s, Accel2D& a) {
    const int nx = s.grid.nx(), ny = s.grid.ny();
    const double h = s.grid.h, eps = s.epsilon, lam = s.lambda;
    const double ee = eps * eps;
    if (a.phi.nx != nx) {
        a.phi = Field2<cplx>(nx, ny, cplx(0, 0));
        a.ax = Field2<double>(nx, ny, 0.0);
        a.ay = Field2<double>(nx, ny, 0.0);
    }
    // plaquette curvature
    Field2<double> f(nx, ny, 0.0);
    par::parallel_for(nx - 1, [&](std::int64_t b, std::int64_t e) {
        for (int i = int(b); i < int(e); ++i)
            for (int j = 0; j < ny - 1; ++j)
                f(i, j) = (s.ax(i, j) + s.ay(i + 1, j) - s.ax(i, j + 1) - s.ay(i, j)) / h;
    });
    par::parallel_for(nx, [&](std::int64_t b, std::int64_t e) {
        for (int i = int(b); i < int(e); ++i)
            for (int j = 0; j < ny; ++j) {
                a.phi(i, j) = cplx(0, 0);
                a.ax(i, j) = 0.0;
                a.ay(i, j) = 0.0;
                cplx p = s.phi(i, j);
                if (s.upd_site(i, j)) {
                    // covariant Laplacian with the cylindrical measure weight
                    cplx lap(0, 0);
                    double wc = wsite(s, i);
                    if (s.geom == Geometry2D::axisym && s.axis_parity && i == 0) {
                        // regularized axis: (1/rho) d_rho(rho d_rho phi) -> 4(phi(1)-phi(0))/h^2
                        // for even phi (A_rho odd => transport trivial at the axis)
                        cplx fwd = std::polar(1.0, -h * s.ax(0, j)) * s.phi(1, j) - p;
                        lap += 4.0 * fwd / (h * h);
                    } else {
                        double wl = s.geom == Geometry2D::axisym ? (s.grid.x(i) - 0.5 * h) : 1.0;
                        double wr = wmidx(s, i);
                        cplx fwd = std::polar(1.0, -h * s.ax(i, j)) * s.phi(i + 1, j) - p;
                        cplx bwd = p - std::polar(1.0, h * s.ax(i - 1, j)) * s.phi(i - 1, j);
                        lap += (wr * fwd - wl * bwd) / (wc * h * h);
                    }
                    cplx fwy = std::polar(1.0, -h * s.ay(i, j)) * s.phi(i, j + 1) - p;
                    cplx bwy = p - std::polar(1.0, h * s.ay(i, j - 1)) * s.phi(i, j - 1);
                    lap += (fwy - bwy) / (h * h);
                    a.phi(i, j) = lap - lam / (2.0 * ee) * (std::norm(p) - 1.0) * p;
                }
                if (s.upd_ax(i, j)) {
                    cplx t = std::polar(1.0, -h * s.ax(i, j)) * s.phi(i + 1, j);
                    double jl = ip(cplx(0, 1) * p, t) / h;
                    // both adjacent plaquettes share the link's radial weight
                    double curl = (f(i, j) - (j > 0 ? f(i, j - 1) : 0.0)) / h;
                    a.ax(i, j) = jl / ee - curl;
                }
                if (s.upd_ay(i, j)) {
                    cplx t = std::polar(1.0, -h * s.ay(i, j)) * s.phi(i, j + 1);
                    double jl = ip(cplx(0, 1) * p, t) / h;
                    double curl;
                    if (s.geom == Geometry2D::axisym) {
                        double wc = wsite(s, i);
                        double wl = s.grid.x(i) - 0.5 * h;
                        double wr = s.grid.x(i) + 0.5 * h;
                        curl = (wr * f(i, j) - (i > 0 ? wl * f(i - 1, j) : 0.0)) / (wc * h);
                    } else {
                        curl = (f(i, j) - (i > 0 ? f(i - 1, j) : 0.0)) / h;
                    }
                    a.ay(i, j) = jl / ee + curl;
                }
            }
    });
}

Stepper2D::Stepper2D(State2D s) : state(std::move(s)) {}

void Stepper2D::step(double dt) {
    if (dt > cfl * state.grid.h * (1.0 + 1e-12)) {
        std::ostringstream ss;
        ss << "step: dt = " << dt << " violates the CFL bound " << cfl * state.grid.h;
        throw numeric_error(ss.str());
    }
    const int nx = state.grid.nx(), ny = state.grid.ny();
    if (!acc_fresh_) {
        rhs(state, acc_);
        acc_fresh_ = true;
    }
    auto kick = [&](double w) {
        par::parallel_for(nx, [&](std::int64_t b, std::int64_t e) {
            for (int i = int(b); i < int(e); ++i)
                for (int j = 0; j < ny; ++j) {
                    if (state.upd_site(i, j)) state.pi(i, j) += w * acc_.phi(i, j);
                    if (state.upd_ax(i, j)) state.ex(i, j) += w * acc_.ax(i, j);
                    if (state.upd_ay(i, j)) state.ey(i, j) += w * acc_.ay(i, j);
                }
        });
    };
    kick(0.5 * dt);
    par::parallel_for(nx, [&](std::int64_t b, std::int64_t e) {
        for (int i = int(b); i < int(e); ++i)
            for (int j = 0; j < ny; ++j) {
                if (state.upd_site(i, j)) state.phi(i, j) += dt * state.pi(i, j);
                if (state.upd_ax(i, j)) state.ax(i, j) += dt * state.ex(i, j);
                if (state.upd_ay(i, j)) state.ay(i, j) += dt * state.ey(i, j);
            }
    });
    rhs(state, acc_);
    kick(0.5 * dt);
    state.t += dt;
}

void Stepper2D::reverse_velocities() {
    const int nx = state.grid.nx(), ny = state.grid.ny();
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            state.pi(i, j) = -state.pi(i, j);
            state.ex(i, j) = -state.ex(i, j);
            state.ey(i, j) = -state.ey(i, j);
        }
}

GaussReport gauss_residual(const State2D& s) {
    const int nx = s.grid.nx(), ny = s.grid.ny();
    const double h = s.grid.h, ee = s.epsilon * s.epsilon;
    GaussReport r;
    r.residual = Field2<double>(nx, ny, 0.0);
    for (int i = 1; i < nx - 1; ++i)
        for (int j = 1; j < ny - 1; ++j) {
            double divE;
            if (s.geom == Geometry2D::axisym) {
                double wc = s.grid.x(i);
                divE = ((s.grid.x(i) + 0.5 * h) * s.ex(i, j) -
                        (s.grid.x(i) - 0.5 * h) * s.ex(i - 1, j)) /
                           (wc * h) +
                       (s.ey(i, j) - s.ey(i, j - 1)) / h;
            } else {
                divE = (s.ex(i, j) - s.ex(i - 1, j)) / h + (s.ey(i, j) - s.ey(i, j - 1)) / h;
            }
            r.residual(i, j) = ee * divE - ip(cplx(0, 1) * s.phi(i, j), s.pi(i, j));
        }
    double l2 = par::reduce_sum(std::int64_t(nx) * ny, [&](std::int64_t idx) {
        int i = int(idx / ny), j = int(idx % ny);
        double w = s.geom == Geometry2D::axisym ? s.grid.x(i) : 1.0;
        return w * r.residual(i, j) * r.residual(i, j);
    });
    double vol_factor = s.geom == Geometry2D::axisym ? 2.0 * pi : 1.0;
    r.l2 = std::sqrt(vol_factor * l2 * h * h);
    r.linf = par::reduce_max(std::int64_t(nx) * ny, [&](std::int64_t idx) {
        int i = int(idx / ny), j = int(idx % ny);
        return std::abs(r.residual(i, j));
    });
    return r;
}

double total_energy(const State2D& s) {
    const int nx = s.grid.nx(), ny = s.grid.ny();
    const double h = s.grid.h, eps = s.epsilon, lam = s.lambda;
    const double ee = eps * eps;
    const double vol = (s.geom == Geometry2D::axisym ? 2.0 * pi : 1.0) * h * h;
    double ssum = par::reduce_sum(std::int64_t(nx) * ny, [&](std::int64_t idx) {
        int i = int(idx / ny), j = int(idx % ny);
        double acc = 0.0;
        double m2 = std::norm(s.phi(i, j));
        acc += wsite(s, i) * (0.5 * std::norm(s.pi(i, j)) +
                              lam / (8.0 * ee) * (m2 - 1.0) * (m2 - 1.0));
        if (i < nx - 1) {
            cplx d = (std::polar(1.0, -h * s.ax(i, j)) * s.phi(i + 1, j) - s.phi(i, j)) / h;
            acc += wmidx(s, i) * (0.5 * std::norm(d) + 0.5 * ee * s.ex(i, j) * s.ex(i, j));
        }
        if (j < ny - 1) {
            cplx d = (std::polar(1.0, -h * s.ay(i, j)) * s.phi(i, j + 1) - s.phi(i, j)) / h;
            acc += wsite(s, i) * (0.5 * std::norm(d) + 0.5 * ee * s.ey(i, j) * s.ey(i, j));
        }
        if (i < nx - 1 && j < ny - 1) {
            double f = (s.ax(i, j) + s.ay(i + 1, j) - s.ax(i, j + 1) - s.ay(i, j)) / h;
            acc += wmidx(s, i) * 0.5 * ee * f * f;
        }
        return acc;
    });
    return vol * ssum;
}

Field2<double> energy_density(const State2D& s) {
    Config2D u = s.as_config();
    Field2<double> e = energy_density_2d(u);
    const int nx = s.grid.nx(), ny = s.grid.ny();
    const double h = s.grid.h, ee = s.epsilon * s.epsilon;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            double kin = 0.5 * std::norm(s.pi(i, j));
            double el = 0.0;
            int c = 0;
            if (i < nx - 1) { el += s.ex(i, j) * s.ex(i, j); ++c; }
            if (i > 0) { el += s.ex(i - 1, j) * s.ex(i - 1, j); ++c; }
            if (j < ny - 1) { el += s.ey(i, j) * s.ey(i, j); ++c; }
            if (j > 0) { el += s.ey(i, j - 1) * s.ey(i, j - 1); ++c; }
            e(i, j) += kin + (c ? 0.5 * ee * 2.0 * el / c : 0.0);
        }
    return e;
}

void LightConeMonitor::init(const State2D& s, double support_radius, double ccx, double ccy,
                            double margin_) {
    initial = s;
    margin = margin_;
    const int nx = s.grid.nx(), ny = s.grid.ny();
    support_dist = Field2<double>(nx, ny, 0.0);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            double dx = s.grid.x(i) - ccx, dy = s.grid.y(j) - ccy;
            support_dist(i, j) = std::max(0.0, std::sqrt(dx * dx + dy * dy) - support_radius);
        }
}

void LightConeMonitor::sample(const State2D& s) {
    const int nx = s.grid.nx(), ny = s.grid.ny();
    double m = par::reduce_max(std::int64_t(nx) * ny, [&](std::int64_t idx) {
        int i = int(idx / ny), j = int(idx % ny);
        if (support_dist(i, j) <= s.t + margin) return 0.0;
        double d = std::abs(s.phi(i, j) - initial.phi(i, j));
        d = std::max(d, std::abs(s.pi(i, j) - initial.pi(i, j)));
        d = std::max(d, std::abs(s.ax(i, j) - initial.ax(i, j)));
        d = std::max(d, std::abs(s.ay(i, j) - initial.ay(i, j)));
        d = std::max(d, std::abs(s.ex(i, j) - initial.ex(i, j)));
        d = std::max(d, std::abs(s.ey(i, j) - initial.ey(i, j)));
        return d;
    });
    max_change = std::max(max_change, m);
}

void gauge_transform_state(State2D& s, const Field2<double>& chi) {
    Config2D u = s.as_config();
    gauge_transform(u, chi);
    s.phi = u.phi;
    s.ax = u.ax;
    s.ay = u.ay;
    const int nx = s.grid.nx(), ny = s.grid.ny();
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) s.pi(i, j) *= std::polar(1.0, chi(i, j));
    // ex, ey unchanged: the transformation is time-independent
}

// --- 3D --------------------------------------------------------------------

namespace {
inline void wrap_assert(const Grid& g) {
    if (g.rank != 3) throw shape_error("3d state requires a rank-3 grid");
}
} // namespace

void rhs3d(const State3D& s, Accel3D& acc) {
    wrap_assert(s.grid);
    const int nx = s.grid.nx(), ny = s.grid.ny(), nz = s.grid.nz();
    const double h = s.grid.h, ee = s.epsilon * s.epsilon, lam = s.lambda;
    if (acc.phi.nx != nx) {
        acc.phi = Field3<cplx>(nx, ny, nz, cplx(0, 0));
        for (int d = 0; d < 3; ++d) acc.a[d] = Field3<double>(nx, ny, nz, 0.0);
    }
    auto shift = [&](int i, int j, int k, int d, int off, int* ii, int* jj, int* kk) {
        *ii = i + (d == 0 ? off : 0);
        *jj = j + (d == 1 ? off : 0);
        *kk = k + (d == 2 ? off : 0);
    };
    par::parallel_for(nx, [&](std::int64_t bb, std::int64_t eee) {
        for (int i = int(bb); i < int(eee); ++i)
            for (int j = 0; j < ny; ++j)
                for (int k = 0; k < nz; ++k) {
                    acc.phi(i, j, k) = cplx(0, 0);
                    for (int d = 0; d < 3; ++d) acc.a[d](i, j, k) = 0.0;
                    if (!s.dyn_site(i, j, k)) continue;
                    cplx p = s.phi(i, j, k);
                    cplx lap(0, 0);
                    for (int d = 0; d < 3; ++d) {
                        int ip1, jp1, kp1, im1, jm1, km1;
                        shift(i, j, k, d, +1, &ip1, &jp1, &kp1);
                        shift(i, j, k, d, -1, &im1, &jm1, &km1);
                        lap += (std::polar(1.0, -h * s.a[d](i, j, k)) * s.phi(ip1, jp1, kp1) -
                                2.0 * p +
                                std::polar(1.0, h * s.a[d](im1, jm1, km1)) *
                                    s.phi(im1, jm1, km1)) /
                               (h * h);
                    }
                    acc.phi(i, j, k) = lap - lam / (2.0 * ee) * (std::norm(p) - 1.0) * p;
                    // gauge links: eps^2 d_t^2 A_d = eps^2 sum_j d_j F_{jd} + j_d
                    for (int d = 0; d < 3; ++d) {
                        int ip1, jp1, kp1;
                        shift(i, j, k, d, +1, &ip1, &jp1, &kp1);
                        cplx t = std::polar(1.0, -h * s.a[d](i, j, k)) * s.phi(ip1, jp1, kp1);
                        double jl = ip(cplx(0, 1) * p, t) / h;
                        double curl = 0.0;
                        for (int d2 = 0; d2 < 3; ++d2) {
                            if (d2 == d) continue;
                            // F_{d2,d} on the plaquettes containing the link
                            auto Fplaq = [&](int i0, int j0, int k0) {
                                int i1, j1, k1, i2, j2, k2;
                                shift(i0, j0, k0, d2, +1, &i1, &j1, &k1);
                                shift(i0, j0, k0, d, +1, &i2, &j2, &k2);
                                return (s.a[d2](i0, j0, k0) + s.a[d](i1, j1, k1) -
                                        s.a[d2](i2, j2, k2) - s.a[d](i0, j0, k0)) /
                                       h;
                            };
                            int im, jm, km;
                            shift(i, j, k, d2, -1, &im, &jm, &km);
                            // d_{d2} F_{d2 d} at the link midpoint
                            curl += (Fplaq(i, j, k) - Fplaq(im, jm, km)) / h;
                        }
                        acc.a[d](i, j, k) = jl / ee + curl;
                    }
                }
    });
}

Stepper3D::Stepper3D(State3D s) : state(std::move(s)) {}

void Stepper3D::step(double dt) {
    if (dt > cfl * state.grid.h * (1.0 + 1e-12))
        throw numeric_error("step3d: dt violates the CFL bound");
    const int nx = state.grid.nx(), ny = state.grid.ny(), nz = state.grid.nz();
    if (!acc_fresh_) {
        rhs3d(state, acc_);
        acc_fresh_ = true;
    }
    auto kick = [&](double w) {
        par::parallel_for(nx, [&](std::int64_t b, std::int64_t e) {
            for (int i = int(b); i < int(e); ++i)
                for (int j = 0; j < ny; ++j)
                    for (int k = 0; k < nz; ++k) {
                        state.pi(i, j, k) += w * acc_.phi(i, j, k);
                        for (int d = 0; d < 3; ++d)
                            state.e[d](i, j, k) += w * acc_.a[d](i, j, k);
                    }
        });
    };
    kick(0.5 * dt);
    par::parallel_for(nx, [&](std::int64_t b, std::int64_t e) {
        for (int i = int(b); i < int(e); ++i)
            for (int j = 0; j < ny; ++j)
                for (int k = 0; k < nz; ++k) {
                    state.phi(i, j, k) += dt * state.pi(i, j, k);
                    for (int d = 0; d < 3; ++d) state.a[d](i, j, k) += dt * state.e[d](i, j, k);
                }
    });
    rhs3d(state, acc_);
    kick(0.5 * dt);
    state.t += dt;
}

void Stepper3D::reverse_velocities() {
    for (auto& v : state.pi.v) v = -v;
    for (int d = 0; d < 3; ++d)
        for (auto& v : state.e[d].v) v = -v;
}

double total_energy3d(const State3D& s) {
    const int nx = s.grid.nx(), ny = s.grid.ny(), nz = s.grid.nz();
    const double h = s.grid.h, ee = s.epsilon * s.epsilon, lam = s.lambda;
    auto shift = [&](int i, int j, int k, int d, int* ii, int* jj, int* kk) {
        *ii = i + (d == 0 ? 1 : 0);
        *jj = j + (d == 1 ? 1 : 0);
        *kk = k + (d == 2 ? 1 : 0);
    };
    double ssum = par::reduce_sum(std::int64_t(nx) * ny * nz, [&](std::int64_t idx) {
        int i = int(idx / (std::int64_t(ny) * nz));
        int j = int((idx / nz) % ny);
        int k = int(idx % nz);
        double acc = 0.0;
        double m2 = std::norm(s.phi(i, j, k));
        acc += 0.5 * std::norm(s.pi(i, j, k)) + lam / (8.0 * ee) * (m2 - 1.0) * (m2 - 1.0);
        for (int d = 0; d < 3; ++d) {
            int ii, jj, kk;
            shift(i, j, k, d, &ii, &jj, &kk);
            if (ii >= nx || jj >= ny || kk >= nz) continue;
            cplx dphi =
                (std::polar(1.0, -h * s.a[d](i, j, k)) * s.phi(ii, jj, kk) - s.phi(i, j, k)) / h;
            acc += 0.5 * std::norm(dphi) + 0.5 * ee * s.e[d](i, j, k) * s.e[d](i, j, k);
        }
        // plaquettes in the three planes
        static const int pl[3][2] = {{0, 1}, {1, 2}, {2, 0}};
        for (auto& pq : pl) {
            int d1 = pq[0], d2 = pq[1];
            int i1, j1, k1, i2, j2, k2;
            shift(i, j, k, d1, &i1, &j1, &k1);
            shift(i, j, k, d2, &i2, &j2, &k2);
            if (i1 >= nx || j1 >= ny || k1 >= nz || i2 >= nx || j2 >= ny || k2 >= nz) continue;
            double f = (s.a[d1](i, j, k) + s.a[d2](i1, j1, k1) - s.a[d1](i2, j2, k2) -
                        s.a[d2](i, j, k)) /
                       h;
            acc += 0.5 * ee * f * f;
        }
        return acc;
    });
    return ssum * h * h * h;
}

Field3<double> energy_density3d(const State3D& s) {
    const int nx = s.grid.nx(), ny = s.grid.ny(), nz = s.grid.nz();
    const double h = s.grid.h, ee = s.epsilon * s.epsilon, lam = s.lambda;
    Field3<double> out(nx, ny, nz, 0.0);
    par::parallel_for(nx - 1, [&](std::int64_t b, std::int64_t e) {
        for (int i = std::max(1, int(b)); i < int(e); ++i)
            for (int j = 1; j < ny - 1; ++j)
                for (int k = 1; k < nz - 1; ++k) {
                    double m2 = std::norm(s.phi(i, j, k));
                    double acc = 0.5 * std::norm(s.pi(i, j, k)) +
                                 lam / (8.0 * ee) * (m2 - 1.0) * (m2 - 1.0);
                    auto link = [&](int d, int i0, int j0, int k0) {
                        int ii = i0 + (d == 0), jj = j0 + (d == 1), kk = k0 + (d == 2);
                        cplx dphi = (std::polar(1.0, -h * s.a[d](i0, j0, k0)) *
                                         s.phi(ii, jj, kk) -
                                     s.phi(i0, j0, k0)) /
                                    h;
                        return 0.5 * std::norm(dphi) +
                               0.5 * ee * s.e[d](i0, j0, k0) * s.e[d](i0, j0, k0);
                    };
                    acc += 0.5 * (link(0, i, j, k) + link(0, i - 1, j, k));
                    acc += 0.5 * (link(1, i, j, k) + link(1, i, j - 1, k));
                    acc += 0.5 * (link(2, i, j, k) + link(2, i, j, k - 1));
                    // plaquette terms averaged over the four plaquettes per plane
                    static const int pl[3][2] = {{0, 1}, {1, 2}, {2, 0}};
                    for (auto& pq : pl) {
                        int d1 = pq[0], d2 = pq[1];
                        double fm = 0.0;
                        for (int o1 = -1; o1 <= 0; ++o1)
                            for (int o2 = -1; o2 <= 0; ++o2) {
                                int i0 = i + (d1 == 0 ? o1 : 0) + (d2 == 0 ? o2 : 0);
                                int j0 = j + (d1 == 1 ? o1 : 0) + (d2 == 1 ? o2 : 0);
                                int k0 = k + (d1 == 2 ? o1 : 0) + (d2 == 2 ? o2 : 0);
                                int i1 = i0 + (d1 == 0), j1 = j0 + (d1 == 1), k1 = k0 + (d1 == 2);
                                int i2 = i0 + (d2 == 0), j2 = j0 + (d2 == 1), k2 = k0 + (d2 == 2);
                                double f = (s.a[d1](i0, j0, k0) + s.a[d2](i1, j1, k1) -
                                            s.a[d1](i2, j2, k2) - s.a[d2](i0, j0, k0)) /
                                           h;
                                fm += f * f;
                            }
                        acc += 0.5 * ee * fm / 4.0;
                    }
                    out(i, j, k) = acc;
                }
    });
    return out;
}

GaussNorms gauss_residual3d(const State3D& s, Field3<double>* field_out) {
    const int nx = s.grid.nx(), ny = s.grid.ny(), nz = s.grid.nz();
    const double h = s.grid.h, ee = s.epsilon * s.epsilon;
    Field3<double> res(nx, ny, nz, 0.0);
    for (int i = 1; i < nx - 1; ++i)
        for (int j = 1; j < ny - 1; ++j)
            for (int k = 1; k < nz - 1; ++k) {
                double divE = (s.e[0](i, j, k) - s.e[0](i - 1, j, k) + s.e[1](i, j, k) -
                               s.e[1](i, j - 1, k) + s.e[2](i, j, k) - s.e[2](i, j, k - 1)) /
                              h;
                res(i, j, k) = ee * divE - ip(cplx(0, 1) * s.phi(i, j, k), s.pi(i, j, k));
            }
    GaussNorms n;
    double l2 = 0.0;
    for (auto v : res.v) {
        l2 += v * v;
        n.linf = std::max(n.linf, std::abs(v));
    }
    n.l2 = std::sqrt(l2 * h * h * h);
    if (field_out) *field_out = std::move(res);
    return n;
}

} // namespace ahvx
