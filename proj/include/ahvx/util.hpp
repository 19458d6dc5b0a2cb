#ifndef AHVX_UTIL_HPP
#define AHVX_UTIL_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ahvx {

using cplx = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;

// Wrap to (-pi, pi].
inline double wrap_angle(double a) {
    a = std::fmod(a, 2.0 * pi);
    if (a <= -pi) a += 2.0 * pi;
    if (a > pi) a -= 2.0 * pi;
    return a;
}

// Real inner product <f,g> = Re(f conj(g)).
inline double ip(cplx f, cplx g) { return f.real() * g.real() + f.imag() * g.imag(); }

struct shape_error : std::runtime_error {
    explicit shape_error(const std::string& m) : std::runtime_error(m) {}
};
struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& m) : std::runtime_error(m) {}
};

// splitmix64: deterministic seeding for property tests.
struct Rng {
    uint64_t s;
    explicit Rng(uint64_t seed) : s(seed) {}
    uint64_t next_u64() {
        uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    // uniform in [0,1)
    double uniform() { return (next_u64() >> 11) * (1.0 / 9007199254740992.0); }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    double gaussian() {
        // Box-Muller, one value per call
        double u1 = uniform();
        double u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * pi * u2);
    }
};

// --- Deterministic parallelism ------------------------------------------
//
// Work is split into fixed-size chunks independent of the thread count, and
// reductions combine per-chunk partials in chunk order. Results are
// bit-identical for any number of threads.

namespace par {

// Global worker count (set once by the CLI / tests; default hardware).
int thread_count();
void set_thread_count(int n);

// Invoke fn(chunk_begin, chunk_end) over [0,n) in fixed chunks.
void parallel_for(std::int64_t n, const std::function<void(std::int64_t, std::int64_t)>& fn,
                  std::int64_t chunk = 0);

// Deterministic pairwise tree sum over a vector of partials.
double pairwise_sum(const std::vector<double>& v);

// Deterministic sum of term(i) for i in [0,n): fixed chunks, serial in-chunk
// accumulation, pairwise combine across chunks.
double reduce_sum(std::int64_t n, const std::function<double(std::int64_t)>& term,
                  std::int64_t chunk = 4096);

// Deterministic max (order-independent anyway, but chunked for parallelism).
double reduce_max(std::int64_t n, const std::function<double(std::int64_t)>& term);

} // namespace par

} // namespace ahvx

#endif
