#include "ahvx/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace ahvx {

void SnapshotSeries::push(const State2D& s) {
    if (snaps.empty()) {
        grid = s.grid;
        epsilon = s.epsilon;
        lambda = s.lambda;
    }
    Snapshot2D sn;
    sn.t = s.t;
    sn.phi = s.phi;
    sn.pi = s.pi;
    sn.arho = s.ax;
    sn.az = s.ay;
    sn.erho = s.ex;
    sn.ez = s.ey;
    snaps.push_back(std::move(sn));
}

namespace {

inline void cr_weights(double t, double* w, double* dw) {
    double t2 = t * t, t3 = t2 * t;
    w[0] = 0.5 * (-t3 + 2 * t2 - t);
    w[1] = 0.5 * (3 * t3 - 5 * t2 + 2);
    w[2] = 0.5 * (-3 * t3 + 4 * t2 + t);
    w[3] = 0.5 * (t3 - t2);
    if (dw) {
        dw[0] = 0.5 * (-3 * t2 + 4 * t - 1);
        dw[1] = 0.5 * (9 * t2 - 10 * t);
        dw[2] = 0.5 * (-9 * t2 + 8 * t + 1);
        dw[3] = 0.5 * (3 * t2 - 2 * t);
    }
}

template <class T>
struct Bicubic {
    T v = T{};
    T dx = T{};
    T dy = T{};
};

// field positions are origin + (offx + i, offy + j) * h
template <class T>
Bicubic<T> bicubic(const Field2<T>& f, double gx, double gy) {
    int i = int(std::floor(gx)), j = int(std::floor(gy));
    i = std::clamp(i, 1, f.nx - 3);
    j = std::clamp(j, 1, f.ny - 3);
    double tx = gx - i, ty = gy - j;
    double wx[4], dwx[4], wy[4], dwy[4];
    cr_weights(tx, wx, dwx);
    cr_weights(ty, wy, dwy);
    Bicubic<T> out;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            const T& val = f(i - 1 + a, j - 1 + b);
            out.v += wx[a] * wy[b] * val;
            out.dx += dwx[a] * wy[b] * val;
            out.dy += wx[a] * dwy[b] * val;
        }
    return out;
}

template <class T>
T bilinear_simple(const Field2<T>& f, double gx, double gy) {
    int i = std::clamp(int(std::floor(gx)), 0, f.nx - 2);
    int j = std::clamp(int(std::floor(gy)), 0, f.ny - 2);
    double tx = gx - i, ty = gy - j;
    return (1 - tx) * (1 - ty) * f(i, j) + tx * (1 - ty) * f(i + 1, j) +
           (1 - tx) * ty * f(i, j + 1) + tx * ty * f(i + 1, j + 1);
}

} // namespace

LabSample SeriesInterp::eval(double t, double rho, double z) const {
    const auto& sn = ss_.snaps;
    const Grid& g = ss_.grid;
    const double h = g.h;
    if (sn.size() < 2) throw numeric_error("series interpolation needs at least two snapshots");
    if (t < sn.front().t - 1e-9 || t > sn.back().t + 1e-9)
        throw numeric_error("series interpolation: time outside the stored range");
    int k = int(std::upper_bound(sn.begin(), sn.end(), t,
                                 [](double tt, const Snapshot2D& s) { return tt < s.t; }) -
                sn.begin()) -
            1;
    k = std::clamp(k, 0, int(sn.size()) - 2);
    double dt = sn[k + 1].t - sn[k].t;
    double u = (t - sn[k].t) / dt;

    double gx = (rho - g.origin[0]) / h, gy = (z - g.origin[1]) / h;
    double gxl = gx - 0.5, gyl = gy - 0.5;

    double h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u);
    double h01 = u * u * (3 - 2 * u), h11 = u * u * (u - 1);
    double dh00 = 6 * u * (u - 1) / dt, dh10 = 1 - 4 * u + 3 * u * u;
    double dh01 = 6 * u * (1 - u) / dt, dh11 = u * (3 * u - 2);

    LabSample out;
    {
        auto p0 = bicubic(sn[k].phi, gx, gy), p1 = bicubic(sn[k + 1].phi, gx, gy);
        auto q0 = bicubic(sn[k].pi, gx, gy), q1 = bicubic(sn[k + 1].pi, gx, gy);
        out.phi = h00 * p0.v + h01 * p1.v + dt * (h10 * q0.v + h11 * q1.v);
        out.dphi_drho = (h00 * p0.dx + h01 * p1.dx + dt * (h10 * q0.dx + h11 * q1.dx)) / h;
        out.dphi_dz = (h00 * p0.dy + h01 * p1.dy + dt * (h10 * q0.dy + h11 * q1.dy)) / h;
        out.pi = dh00 * p0.v + dh01 * p1.v + dh10 * q0.v + dh11 * q1.v;
    }
    {
        auto a0 = bicubic(sn[k].arho, gxl, gy), a1 = bicubic(sn[k + 1].arho, gxl, gy);
        auto e0 = bicubic(sn[k].erho, gxl, gy), e1 = bicubic(sn[k + 1].erho, gxl, gy);
        out.arho = h00 * a0.v + h01 * a1.v + dt * (h10 * e0.v + h11 * e1.v);
        out.erho = dh00 * a0.v + dh01 * a1.v + dh10 * e0.v + dh11 * e1.v;
        auto b0 = bicubic(sn[k].az, gx, gyl), b1 = bicubic(sn[k + 1].az, gx, gyl);
        auto f0 = bicubic(sn[k].ez, gx, gyl), f1 = bicubic(sn[k + 1].ez, gx, gyl);
        out.az = h00 * b0.v + h01 * b1.v + dt * (h10 * f0.v + h11 * f1.v);
        out.ez = dh00 * b0.v + dh01 * b1.v + dh10 * f0.v + dh11 * f1.v;
        double dAz_drho = (h00 * b0.dx + h01 * b1.dx + dt * (h10 * f0.dx + h11 * f1.dx)) / h;
        double dArho_dz = (h00 * a0.dy + h01 * a1.dy + dt * (h10 * e0.dy + h11 * e1.dy)) / h;
        out.f_rz = dAz_drho - dArho_dz;
    }
    return out;
}

double SeriesInterp::error_estimate(double t, double rho, double z) const {
    const auto& sn = ss_.snaps;
    const Grid& g = ss_.grid;
    int k = int(std::upper_bound(sn.begin(), sn.end(), t,
                                 [](double tt, const Snapshot2D& s) { return tt < s.t; }) -
                sn.begin()) -
            1;
    k = std::clamp(k, 0, int(sn.size()) - 2);
    double u = (t - sn[k].t) / (sn[k + 1].t - sn[k].t);
    double gx = (rho - g.origin[0]) / g.h, gy = (z - g.origin[1]) / g.h;
    cplx c0 = bicubic(sn[k].phi, gx, gy).v - bilinear_simple(sn[k].phi, gx, gy);
    cplx c1 = bicubic(sn[k + 1].phi, gx, gy).v - bilinear_simple(sn[k + 1].phi, gx, gy);
    return std::abs((1 - u) * c0 + u * c1);
}

int CrossSection::winding() const {
    double acc = 0.0;
    int k = nr - 1;
    for (int l = 0; l < nth; ++l) {
        cplx a = phi[idx(k, l)], b = phi[idx(k, (l + 1) % nth)];
        if (std::abs(a) == 0.0 || std::abs(b) == 0.0)
            throw numeric_error("cross-section winding: |phi| vanished on the outer ring");
        acc += std::arg(b / a);
    }
    return int(std::lround(acc / (2.0 * pi)));
}

CrossSection pullback_cross_section(const SeriesInterp& interp, const NormalChart& chart,
                                    double s, double y1, const ZetaParams& zp) {
    CrossSection cs;
    cs.y1 = y1;
    cs.rho = 0.5 * zp.rho1;
    cs.nr = zp.nr;
    cs.nth = zp.nth;
    const int N = cs.nr * cs.nth;
    cs.phi.resize(N);
    cs.a2.resize(N);
    cs.a3.resize(N);
    cs.jpa2.resize(N);
    cs.jpa3.resize(N);
    cs.e_nu.resize(N);
    cs.e_g.resize(N);
    cs.dtau2.resize(N);
    cs.ftau2.resize(N);
    cs.f23.resize(N);
    const double eps = interp.epsilon(), lam = interp.lambda();
    const double ee = eps * eps;
    std::vector<double> errs(cs.nr, 0.0);

    par::parallel_for(cs.nr, [&](std::int64_t kb, std::int64_t ke) {
        for (int k = int(kb); k < int(ke); ++k) {
            for (int l = 0; l < cs.nth; ++l) {
                double r = cs.node_r(k), th = cs.node_th(l);
                double y[4] = {s, y1, r * std::cos(th), r * std::sin(th)};
                Vec4 x = chart.psi(y);
                double D[4][4];
                chart.dpsi(y, D);
                ChartMetric mt = chart.metric_basic(y);

                double rho_lab = std::hypot(x[1], x[2]);
                double az = std::atan2(x[2], x[1]);
                LabSample ls = interp.eval(x[0], rho_lab, x[3]);
                errs[k] = std::max(errs[k], interp.error_estimate(x[0], rho_lab, x[3]));

                double ca = std::cos(az), sa = std::sin(az);
                cplx iphi = cplx(0, 1) * ls.phi;
                cplx Drho = ls.dphi_drho - iphi * ls.arho;
                cplx Dz = ls.dphi_dz - iphi * ls.az;
                cplx Dlab[4] = {ls.pi, ca * Drho, sa * Drho, Dz};
                double Flab[4][4] = {};
                double e_lab[3] = {ca * ls.erho, sa * ls.erho, ls.ez};
                for (int kk = 0; kk < 3; ++kk) {
                    Flab[0][kk + 1] = e_lab[kk];
                    Flab[kk + 1][0] = -e_lab[kk];
                }
                Flab[1][3] = ca * ls.f_rz;
                Flab[3][1] = -Flab[1][3];
                Flab[2][3] = sa * ls.f_rz;
                Flab[3][2] = -Flab[2][3];

                cplx Dch[4];
                for (int al = 0; al < 4; ++al) {
                    cplx acc(0, 0);
                    for (int mu = 0; mu < 4; ++mu) acc += D[mu][al] * Dlab[mu];
                    Dch[al] = acc;
                }
                double Fch[4][4];
                for (int al = 0; al < 4; ++al)
                    for (int be = 0; be < 4; ++be) {
                        double acc = 0.0;
                        for (int mu = 0; mu < 4; ++mu)
                            for (int nu = 0; nu < 4; ++nu)
                                acc += D[mu][al] * D[nu][be] * Flab[mu][nu];
                        Fch[al][be] = acc;
                    }
                double Alab[4] = {0.0, ca * ls.arho, sa * ls.arho, ls.az};
                double Ach[4];
                for (int al = 0; al < 4; ++al) {
                    double acc = 0.0;
                    for (int mu = 0; mu < 4; ++mu) acc += D[mu][al] * Alab[mu];
                    Ach[al] = acc;
                }

                double m2 = std::norm(ls.phi);
                double V = lam / (8.0 * ee) * (m2 - 1.0) * (m2 - 1.0);
                double dnu2 = std::norm(Dch[2]) + std::norm(Dch[3]);
                double quad = -mt.ginv[0][0] * ip(Dch[0], Dch[0]);
                for (int aa = 1; aa < 4; ++aa)
                    for (int bb = 1; bb < 4; ++bb)
                        quad += mt.ginv[aa][bb] * ip(Dch[aa], Dch[bb]);
                double Fup[4][4];
                for (int aa = 0; aa < 4; ++aa)
                    for (int bb = 0; bb < 4; ++bb) {
                        double acc = 0.0;
                        for (int cc = 0; cc < 4; ++cc)
                            for (int dd = 0; dd < 4; ++dd)
                                acc += mt.ginv[aa][cc] * mt.ginv[bb][dd] * Fch[cc][dd];
                        Fup[aa][bb] = acc;
                    }
                double FF = 0.0, F0 = 0.0;
                for (int aa = 0; aa < 4; ++aa)
                    for (int bb = 0; bb < 4; ++bb) FF += Fch[aa][bb] * Fup[aa][bb];
                for (int bb = 0; bb < 4; ++bb) F0 += Fup[0][bb] * Fch[0][bb];
                double ft = 2.0 * Fch[0][1] * Fch[0][1];
                for (int alc : {2, 3}) ft += Fch[alc][0] * Fch[alc][0] + Fch[alc][1] * Fch[alc][1];

                const int id = cs.idx(k, l);
                cs.phi[id] = ls.phi;
                cs.a2[id] = Ach[2];
                cs.a3[id] = Ach[3];
                cs.jpa2[id] = ip(iphi, Dch[2]) + Ach[2];
                cs.jpa3[id] = ip(iphi, Dch[3]) + Ach[3];
                cs.f23[id] = Fch[2][3];
                cs.e_nu[id] = 0.5 * dnu2 + 0.5 * ee * Fch[2][3] * Fch[2][3] + V;
                cs.e_g[id] = 0.5 * quad + 0.25 * ee * (FF - 4.0 * F0) + V;
                cs.dtau2[id] = std::norm(Dch[0]) + std::norm(Dch[1]);
                cs.ftau2[id] = ft;
            }
        }
    });
    cs.interp_error = *std::max_element(errs.begin(), errs.end());
    return cs;
}

ZetaSlice zeta_slice(const SeriesInterp& interp, const NormalChart& chart, double s,
                     const ZetaParams& zp) {
    CrossSection cs = pullback_cross_section(interp, chart, s, 0.0, zp);
    const double L = chart.ws.period();
    const double eps = interp.epsilon();
    const double R = cs.rho;
    WeightFunction wf = make_weight(R);

    ZetaSlice out;
    out.s = s;
    out.interp_error = cs.interp_error;
    out.winding = cs.winding();
    double z1 = 0.0, z3t = 0.0, z3m = 0.0, disk = 0.0, fom = 0.0;
    for (int k = 0; k < cs.nr; ++k)
        for (int l = 0; l < cs.nth; ++l) {
            const int id = cs.idx(k, l);
            double r = cs.node_r(k), th = cs.node_th(l);
            double w = cs.node_weight(k);
            z1 += (1.0 + zp.kappa2 * r * r) * cs.e_g[id] * w;
            z3t += (cs.dtau2[id] + eps * eps * cs.ftau2[id]) * w;
            z3m += r * r * cs.e_nu[id] * w;
            disk += cs.e_nu[id] * w;
            // int f omega = -(1/2) int f'(r) (v . theta-hat) dA
            double vth = -std::sin(th) * cs.jpa2[id] + std::cos(th) * cs.jpa3[id];
            fom += -0.5 * wf.deriv(r) * vth * w;
        }
    out.zeta1 = L * (z1 - zp.e_ref);
    out.confinement = pi * zp.m - fom;
    out.zeta2 = L * std::abs(out.confinement);
    out.zeta3_tau = L * z3t;
    out.zeta3_moment = L * z3m;
    out.zeta3 = out.zeta3_tau + out.zeta3_moment;
    out.disk_energy = disk;
    return out;
}

double profile_comparison(const CrossSection& cs, const TruncatedVortex& ref, double length) {
    double s_mod = 0.0, s_f = 0.0, s_e = 0.0;
    const double ee = ref.epsilon * ref.epsilon;
    for (int k = 0; k < cs.nr; ++k) {
        double r = cs.node_r(k);
        double mod_ref = ref.modulus(r);
        double f_ref = ref.fnu(r);
        double e_ref = ref.e_nu(r);
        for (int l = 0; l < cs.nth; ++l) {
            const int id = cs.idx(k, l);
            double w = cs.node_weight(k);
            double dm = std::abs(cs.phi[id]) - mod_ref;
            s_mod += dm * dm * w;
            double df = cs.f23[id] - f_ref;
            s_f += df * df * w;
            s_e += std::abs(cs.e_nu[id] - e_ref) * w;
        }
    }
    return length * (s_mod + ee * s_f + s_e);
}

TubeSplit tube_split(const Snapshot2D& snap, const Grid& grid, double eps, double lam,
                     const NormalChart& chart, double rho1, double T0) {
    State2D s;
    s.grid = grid;
    s.geom = Geometry2D::axisym;
    s.epsilon = eps;
    s.lambda = lam;
    s.t = snap.t;
    s.phi = snap.phi;
    s.pi = snap.pi;
    s.ax = snap.arho;
    s.ay = snap.az;
    s.ex = snap.erho;
    s.ey = snap.ez;
    s.default_masks();
    Field2<double> ed = energy_density(s);

    const int nx = grid.nx(), ny = grid.ny();
    const double h = grid.h;
    TubeSplit out;
    const double rho_half = 0.5 * rho1;
    // march the chart inversion across the grid, seeding from the previous cell
    std::vector<double> ext_row(nx, 0.0), wtd_row(nx, 0.0), int_row(nx, 0.0);
    par::parallel_for(nx, [&](std::int64_t b, std::int64_t e) {
        for (int i = int(b); i < int(e); ++i) {
            double guess[4];
            bool have = false;
            for (int j = 0; j < ny; ++j) {
                if (i == 0 || j == 0 || i == nx - 1 || j == ny - 1) continue;
                double rho = grid.x(i), z = grid.y(j);
                double dv = 2.0 * pi * rho * h * h;
                bool in = false;
                double dnu = 0.0;
                if (std::abs(snap.t) < T0) {
                    Vec4 x{snap.t, rho, 0.0, z};
                    try {
                        InverseResult ir =
                            chart.inverse(x, rho_half, have ? guess : nullptr);
                        if (ir.converged) {
                            for (int d = 0; d < 4; ++d) guess[d] = ir.y[d];
                            have = true;
                            in = ir.in_tube && std::abs(ir.y[0]) < chart.T1;
                            dnu = std::hypot(ir.y[2], ir.y[3]);
                        } else {
                            have = false;
                        }
                    } catch (const numeric_error&) {
                        have = false;
                    }
                }
                if (in) {
                    wtd_row[i] += dnu * dnu * ed(i, j) * dv;
                    int_row[i] += ed(i, j) * dv;
                } else {
                    ext_row[i] += ed(i, j) * dv;
                }
            }
        }
    });
    out.exterior = par::pairwise_sum(ext_row);
    out.weighted = par::pairwise_sum(wtd_row);
    out.interior = par::pairwise_sum(int_row);
    return out;
}

CoreTrack track_core(const Snapshot2D& snap, const Grid& grid, int m) {
    const int nx = grid.nx(), ny = grid.ny();
    const double h = grid.h;
    CoreTrack out;
    out.t = snap.t;
    out.error_bar = 0.5 * h;
    // winding plaquettes; a corner sitting exactly on the zero wins outright
    double best = 0.0;
    int bi = -1, bj = -1;
    for (int i = 0; i < nx - 1; ++i)
        for (int j = 0; j < ny - 1; ++j) {
            cplx p00 = snap.phi(i, j), p10 = snap.phi(i + 1, j);
            cplx p11 = snap.phi(i + 1, j + 1), p01 = snap.phi(i, j + 1);
            if (std::abs(p00) == 0.0 || std::abs(p10) == 0.0 || std::abs(p11) == 0.0 ||
                std::abs(p01) == 0.0) {
                best = 2.0 * pi;
                bi = i;
                bj = j;
                continue;
            }
            double circ = std::arg(p10 / p00) + std::arg(p11 / p10) + std::arg(p01 / p11) +
                          std::arg(p00 / p01);
            if (std::abs(circ) > best) {
                best = std::abs(circ);
                bi = i;
                bj = j;
            }
        }
    if (bi < 0 || best < pi)
        throw numeric_error("track_core: no winding plaquette found (string lost)");
    (void)m;
    // bilinear zero of phi inside the plaquette
    cplx p00 = snap.phi(bi, bj), p10 = snap.phi(bi + 1, bj), p11 = snap.phi(bi + 1, bj + 1),
         p01 = snap.phi(bi, bj + 1);
    double u = 0.5, v = 0.5;
    for (int it = 0; it < 20; ++it) {
        cplx f = (1 - u) * (1 - v) * p00 + u * (1 - v) * p10 + (1 - u) * v * p01 + u * v * p11;
        cplx fu = -(1 - v) * p00 + (1 - v) * p10 - v * p01 + v * p11;
        cplx fv = -(1 - u) * p00 - u * p10 + (1 - u) * p01 + u * p11;
        double J[2][2] = {{fu.real(), fv.real()}, {fu.imag(), fv.imag()}};
        double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
        if (std::abs(det) < 1e-30) break;
        double du = (-f.real() * J[1][1] + f.imag() * J[0][1]) / det;
        double dv = (-J[0][0] * f.imag() + J[1][0] * f.real()) / det;
        u = std::clamp(u + du, 0.0, 1.0);
        v = std::clamp(v + dv, 0.0, 1.0);
        if (std::abs(f) < 1e-14) break;
    }
    out.rho = grid.x(bi) + u * h;
    out.z = grid.y(bj) + v * h;
    return out;
}

std::vector<CoreSection3D> track_cores_3d(const State3D& s, const NormalChart& chart,
                                          double rho_track, int nsections) {
    std::vector<CoreSection3D> out;
    const double L = chart.ws.period();
    const int nth = 64;
    for (int sec = 0; sec < nsections; ++sec) {
        double y1 = L * sec / nsections;
        CoreSection3D c{y1, 0, 0.0, 0.0};
        double acc = 0.0;
        cplx prev;
        double minmod = 1e300;
        for (int l = 0; l <= nth; ++l) {
            double th = 2.0 * pi * l / nth;
            double y[4] = {0.0, y1, rho_track * std::cos(th), rho_track * std::sin(th)};
            Vec4 x = chart.psi(y);
            // nearest-site sample of phi
            int i = std::clamp(int(std::lround((x[1] - s.grid.origin[0]) / s.grid.h)), 0,
                               s.grid.nx() - 1);
            int j = std::clamp(int(std::lround((x[2] - s.grid.origin[1]) / s.grid.h)), 0,
                               s.grid.ny() - 1);
            int k = std::clamp(int(std::lround((x[3] - s.grid.origin[2]) / s.grid.h)), 0,
                               s.grid.nz() - 1);
            cplx ph = s.phi(i, j, k);
            if (l > 0) acc += std::arg(ph / prev);
            prev = ph;
            minmod = std::min(minmod, std::abs(ph));
        }
        c.winding = int(std::lround(acc / (2.0 * pi)));
        // crude centroid: scan the disk for the |phi| minimum
        double best = 1e300;
        for (int a = -6; a <= 6; ++a)
            for (int b = -6; b <= 6; ++b) {
                double y[4] = {0.0, y1, rho_track * a / 6.0, rho_track * b / 6.0};
                Vec4 x = chart.psi(y);
                int i = std::clamp(int(std::lround((x[1] - s.grid.origin[0]) / s.grid.h)), 0,
                                   s.grid.nx() - 1);
                int j = std::clamp(int(std::lround((x[2] - s.grid.origin[1]) / s.grid.h)), 0,
                                   s.grid.ny() - 1);
                int k = std::clamp(int(std::lround((x[3] - s.grid.origin[2]) / s.grid.h)), 0,
                                   s.grid.nz() - 1);
                double mod = std::abs(s.phi(i, j, k));
                if (mod < best) {
                    best = mod;
                    c.c2 = y[2];
                    c.c3 = y[3];
                }
            }
        out.push_back(c);
    }
    return out;
}

NambuGotoCompare compare_nambu_goto(const std::vector<CoreTrack>& track, double R0) {
    NambuGotoCompare out;
    for (const auto& c : track) {
        double pred = R0 * std::cos(c.t / R0);
        out.t.push_back(c.t);
        out.err.push_back(std::abs(c.rho - pred));
        out.max_rel_err = std::max(out.max_rel_err, std::abs(c.rho - pred) / R0);
    }
    return out;
}

double measure_kappa2(const NormalChart& chart, double rho1, double eps, double lambda, double c,
                      int samples, uint64_t seed) {
    Rng rng(seed);
    double kmax = 1.0;
    const double ee = eps * eps;
    for (int n = 0; n < samples; ++n) {
        double r = 0.5 * rho1 * std::sqrt(rng.uniform(0.01, 1.0));
        double th = rng.uniform(0.0, 2.0 * pi);
        double y[4] = {rng.uniform(-0.8, 0.8) * chart.T1, rng.uniform(0.0, chart.ws.period()),
                       r * std::cos(th), r * std::sin(th)};
        ChartMetric mt = chart.metric_basic(y);
        // random field data
        cplx D[4];
        for (auto& d : D) d = cplx(rng.gaussian(), rng.gaussian());
        double F[4][4] = {};
        for (int a = 0; a < 4; ++a)
            for (int b = a + 1; b < 4; ++b) {
                F[a][b] = rng.gaussian() / ee; // curvature scale ~ 1/eps^2
                F[b][a] = -F[a][b];
            }
        double pot = std::abs(rng.gaussian()) / ee;
        double quad = -mt.ginv[0][0] * ip(D[0], D[0]);
        for (int a = 1; a < 4; ++a)
            for (int b = 1; b < 4; ++b) quad += mt.ginv[a][b] * ip(D[a], D[b]);
        double Fup[4][4];
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                double acc = 0.0;
                for (int cc = 0; cc < 4; ++cc)
                    for (int dd = 0; dd < 4; ++dd)
                        acc += mt.ginv[a][cc] * mt.ginv[b][dd] * F[cc][dd];
                Fup[a][b] = acc;
            }
        double FF = 0.0, F0 = 0.0;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) FF += F[a][b] * Fup[a][b];
        for (int b = 0; b < 4; ++b) F0 += Fup[0][b] * F[0][b];
        double e_g = 0.5 * quad + 0.25 * ee * (FF - 4.0 * F0) + pot;
        double dnu2 = std::norm(D[2]) + std::norm(D[3]);
        double e_nu = 0.5 * dnu2 + 0.5 * ee * F[2][3] * F[2][3] + pot;
        double dtau2 = std::norm(D[0]) + std::norm(D[1]);
        double ft = 2.0 * F[0][1] * F[0][1];
        for (int a : {2, 3}) ft += F[a][0] * F[a][0] + F[a][1] * F[a][1];
        double need = c * (dtau2 + ee * ft) + (1.0 + r * r) * e_nu;
        if (e_g <= 1e-12) continue; // outside the positivity regime; skip
        double k2 = (need - e_g) / (r * r * e_g);
        kmax = std::max(kmax, k2);
    }
    return kmax;
}

} // namespace ahvx
