#include "ahvx/curve.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ahvx {

Vec3 ClosedCurve::eval(double s) const {
    double w = 2.0 * pi / L;
    Vec3 p = c[0];
    for (std::size_t k = 1; k < c.size(); ++k) {
        double ck = std::cos(k * w * s), sk = std::sin(k * w * s);
        for (int d = 0; d < 3; ++d) p[d] += c[k][d] * ck + s_[k][d] * sk;
    }
    return p;
}

Vec3 ClosedCurve::deriv(double s) const {
    double w = 2.0 * pi / L;
    Vec3 p{0, 0, 0};
    for (std::size_t k = 1; k < c.size(); ++k) {
        double ck = std::cos(k * w * s), sk = std::sin(k * w * s), f = k * w;
        for (int d = 0; d < 3; ++d) p[d] += f * (-c[k][d] * sk + s_[k][d] * ck);
    }
    return p;
}

Vec3 ClosedCurve::deriv2(double s) const {
    double w = 2.0 * pi / L;
    Vec3 p{0, 0, 0};
    for (std::size_t k = 1; k < c.size(); ++k) {
        double ck = std::cos(k * w * s), sk = std::sin(k * w * s), f = k * w * k * w;
        for (int d = 0; d < 3; ++d) p[d] += -f * (c[k][d] * ck + s_[k][d] * sk);
    }
    return p;
}

Vec3 ClosedCurve::deriv3(double s) const {
    double w = 2.0 * pi / L;
    Vec3 p{0, 0, 0};
    for (std::size_t k = 1; k < c.size(); ++k) {
        double ck = std::cos(k * w * s), sk = std::sin(k * w * s), f = std::pow(k * w, 3);
        for (int d = 0; d < 3; ++d) p[d] += f * (c[k][d] * sk - s_[k][d] * ck);
    }
    return p;
}

double ClosedCurve::max_speed_defect(int samples) const {
    double m = 0.0;
    for (int i = 0; i < samples; ++i)
        m = std::max(m, std::abs(norm3(deriv(L * i / samples)) - 1.0));
    return m;
}

double ClosedCurve::min_curvature_radius(int samples) const {
    double kmax = 0.0;
    for (int i = 0; i < samples; ++i) {
        double s = L * i / samples;
        Vec3 d1 = deriv(s), d2 = deriv2(s);
        double sp = norm3(d1);
        double k = norm3(cross(d1, d2)) / (sp * sp * sp);
        kmax = std::max(kmax, k);
    }
    return kmax > 0 ? 1.0 / kmax : 1e300;
}

double ClosedCurve::self_distance(int samples, double min_arc_sep_frac) const {
    std::vector<Vec3> p(samples);
    for (int i = 0; i < samples; ++i) p[i] = eval(L * i / samples);
    double dmin = 1e300;
    int sep = std::max(1, int(min_arc_sep_frac * samples));
    for (int i = 0; i < samples; ++i)
        for (int j = i + sep; j < samples && (samples - (j - i)) >= sep; ++j)
            dmin = std::min(dmin, norm3(p[i] - p[j]));
    return dmin;
}

ClosedCurve ClosedCurve::circle(double R, const Vec3& center) {
    ClosedCurve c;
    c.L = 2.0 * pi * R;
    c.c.assign(2, Vec3{0, 0, 0});
    c.s_.assign(2, Vec3{0, 0, 0});
    c.c[0] = center;
    c.c[1] = {R, 0, 0};
    c.s_[1] = {0, R, 0};
    return c;
}

ClosedCurve fourier_fit(const std::vector<Vec3>& samples, double period, int modes) {
    const int M = int(samples.size());
    modes = std::min(modes, M / 2 - 1);
    ClosedCurve f;
    f.L = period;
    f.c.assign(modes + 1, Vec3{0, 0, 0});
    f.s_.assign(modes + 1, Vec3{0, 0, 0});
    for (int k = 0; k <= modes; ++k) {
        Vec3 ck{0, 0, 0}, sk{0, 0, 0};
        for (int i = 0; i < M; ++i) {
            double th = 2.0 * pi * k * i / M;
            double cc = std::cos(th), ss = std::sin(th);
            for (int d = 0; d < 3; ++d) {
                ck[d] += samples[i][d] * cc;
                sk[d] += samples[i][d] * ss;
            }
        }
        for (int d = 0; d < 3; ++d) {
            f.c[k][d] = (k == 0 ? ck[d] : 2.0 * ck[d]) / M;
            f.s_[k][d] = (k == 0 ? 0.0 : 2.0 * sk[d] / M);
        }
    }
    return f;
}

namespace {

void check_embedded(const ClosedCurve& c) {
    double d = c.self_distance();
    if (d < c.L / 1000.0)
        throw numeric_error("curve self-intersects (min self-distance " + std::to_string(d) + ")");
}

ClosedCurve reparam_once(const ClosedCurve& raw, int modes) {
    // cumulative arclength on a fine grid, then resample at uniform s
    const int NF = std::max(8192, 16 * raw.modes());
    std::vector<double> cum(NF + 1, 0.0);
    double du = raw.L / NF;
    // Simpson increments per subinterval
    for (int i = 0; i < NF; ++i) {
        double u0 = i * du, um = (i + 0.5) * du, u1 = (i + 1) * du;
        double sp = (norm3(raw.deriv(u0)) + 4.0 * norm3(raw.deriv(um)) + norm3(raw.deriv(u1))) / 6.0;
        cum[i + 1] = cum[i] + sp * du;
    }
    double Ltot = cum[NF];
    const int M = std::max(4 * modes, 512);
    std::vector<Vec3> pts(M);
    int lo = 0;
    for (int j = 0; j < M; ++j) {
        double target = Ltot * j / M;
        while (lo + 1 < NF && cum[lo + 1] < target) ++lo;
        // Newton refinement of s(u) = target starting inside [lo, lo+1]
        double u = du * (lo + (target - cum[lo]) / std::max(1e-300, cum[lo + 1] - cum[lo]));
        for (int it = 0; it < 8; ++it) {
            // s(u) by local Simpson from node lo
            double a = lo * du;
            double sloc = cum[lo];
            double h = u - a;
            if (std::abs(h) > 0) {
                double sp = (norm3(raw.deriv(a)) + 4.0 * norm3(raw.deriv(a + 0.5 * h)) +
                             norm3(raw.deriv(u))) / 6.0;
                sloc += sp * h;
            }
            double f = sloc - target;
            double fp = norm3(raw.deriv(u));
            double step = f / fp;
            u -= step;
            if (std::abs(step) < 1e-15 * raw.L) break;
        }
        pts[j] = raw.eval(u);
    }
    ClosedCurve out = fourier_fit(pts, Ltot, modes);
    return out;
}

} // namespace

ClosedCurve arclength_reparametrize(const ClosedCurve& raw, int modes, double tol) {
    check_embedded(raw);
    ClosedCurve c = raw;
    for (int pass = 0; pass < 6; ++pass) {
        if (c.max_speed_defect() < tol) return c;
        c = reparam_once(c, modes);
    }
    if (c.max_speed_defect() < tol) return c;
    throw numeric_error("arclength_reparametrize: speed defect did not reach tolerance (raise "
                        "mode count for this curve)");
}

ClosedCurve arclength_reparametrize(const std::vector<Vec3>& samples, int modes, double tol) {
    if (samples.size() < 16) throw shape_error("arclength_reparametrize: too few samples");
    ClosedCurve raw = fourier_fit(samples, 1.0, std::min<int>(modes, int(samples.size()) / 4));
    return arclength_reparametrize(raw, modes, tol);
}

ClosedCurve load_curve_csv(const std::string& path, int modes) {
    std::ifstream is(path);
    if (!is) throw numeric_error("cannot open curve file " + path);
    std::string line;
    std::vector<std::vector<double>> rows;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#' || std::isalpha(line[0])) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) row.push_back(std::stod(tok));
        if (!row.empty()) rows.push_back(row);
    }
    if (rows.empty()) throw numeric_error("empty curve file " + path);
    if (rows[0].size() == 3) {
        std::vector<Vec3> pts;
        for (auto& r : rows) pts.push_back({r[0], r[1], r[2]});
        return arclength_reparametrize(pts, modes);
    }
    if (rows[0].size() == 7) {
        // k, cx, cy, cz, sx, sy, sz rows; row k=0 also carries L in sx slot? no:
        // the first row k=0 holds the center in c and the period in column 4.
        ClosedCurve c;
        int kmax = 0;
        for (auto& r : rows) kmax = std::max(kmax, int(r[0]));
        c.c.assign(kmax + 1, Vec3{0, 0, 0});
        c.s_.assign(kmax + 1, Vec3{0, 0, 0});
        for (auto& r : rows) {
            int k = int(r[0]);
            c.c[k] = {r[1], r[2], r[3]};
            if (k == 0) c.L = r[4];
            else c.s_[k] = {r[4], r[5], r[6]};
        }
        if (c.L <= 0) throw numeric_error("curve file: period missing in k=0 row");
        return arclength_reparametrize(c, std::max(modes, kmax));
    }
    throw numeric_error("curve file: rows must be x,y,z points or k,c,s Fourier rows");
}

void write_curve_fourier_csv(const std::string& path, const ClosedCurve& c) {
    std::ofstream os(path);
    if (!os) throw numeric_error("cannot open " + path);
    os << "k,cx,cy,cz,sx_or_L,sy,sz\n";
    os.precision(17);
    for (int k = 0; k <= c.modes(); ++k) {
        os << k << ',' << c.c[k][0] << ',' << c.c[k][1] << ',' << c.c[k][2] << ',';
        if (k == 0) os << c.L << ",0,0\n";
        else os << c.s_[k][0] << ',' << c.s_[k][1] << ',' << c.s_[k][2] << '\n';
    }
}

} // namespace ahvx
