#include "ahvx/util.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace ahvx::par {

namespace {
int g_threads = 0;
}

int thread_count() {
    if (g_threads > 0) return g_threads;
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

void set_thread_count(int n) { g_threads = n < 1 ? 0 : n; } // <1 resets to hardware

void parallel_for(std::int64_t n, const std::function<void(std::int64_t, std::int64_t)>& fn,
                  std::int64_t chunk) {
    if (n <= 0) return;
    if (chunk <= 0) chunk = std::max<std::int64_t>(1, n / 64);
    const std::int64_t nchunks = (n + chunk - 1) / chunk;
    const int nt = std::min<std::int64_t>(thread_count(), nchunks);
    if (nt <= 1) {
        for (std::int64_t c = 0; c < nchunks; ++c)
            fn(c * chunk, std::min(n, (c + 1) * chunk));
        return;
    }
    std::atomic<std::int64_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::int64_t c = next.fetch_add(1);
            if (c >= nchunks) return;
            fn(c * chunk, std::min(n, (c + 1) * chunk));
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(nt - 1);
    for (int t = 0; t < nt - 1; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
}

double pairwise_sum(const std::vector<double>& v) {
    // bottom-up pairwise combine; order fixed by index
    std::vector<double> w = v;
    std::size_t n = w.size();
    if (n == 0) return 0.0;
    while (n > 1) {
        std::size_t m = 0;
        for (std::size_t i = 0; i + 1 < n; i += 2) w[m++] = w[i] + w[i + 1];
        if (n % 2) w[m++] = w[n - 1];
        n = m;
    }
    return w[0];
}

double reduce_sum(std::int64_t n, const std::function<double(std::int64_t)>& term,
                  std::int64_t chunk) {
    if (n <= 0) return 0.0;
    if (chunk <= 0) chunk = 4096;
    const std::int64_t nchunks = (n + chunk - 1) / chunk;
    std::vector<double> partial(static_cast<std::size_t>(nchunks), 0.0);
    parallel_for(
        n,
        [&](std::int64_t b, std::int64_t e) {
            double s = 0.0;
            for (std::int64_t i = b; i < e; ++i) s += term(i);
            partial[static_cast<std::size_t>(b / chunk)] = s;
        },
        chunk);
    return pairwise_sum(partial);
}

double reduce_max(std::int64_t n, const std::function<double(std::int64_t)>& term) {
    if (n <= 0) return 0.0;
    const std::int64_t chunk = 4096;
    const std::int64_t nchunks = (n + chunk - 1) / chunk;
    std::vector<double> partial(static_cast<std::size_t>(nchunks), -1e300);
    parallel_for(
        n,
        [&](std::int64_t b, std::int64_t e) {
            double s = -1e300;
            for (std::int64_t i = b; i < e; ++i) s = std::max(s, term(i));
            partial[static_cast<std::size_t>(b / chunk)] = s;
        },
        chunk);
    double m = -1e300;
    for (double p : partial) m = std::max(m, p);
    return m;
}

} // namespace ahvx::par
