#pragma once

#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace hardylab {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// Raised when a computation hits bad numerical state (non-finite node
/// values, vanishing fibers, singular systems).  Distinct from argument
/// errors so the CLI can map it to its own exit code.
class numeric_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A point of the open unit disk.  Quadrature constructors keep nodes
/// strictly inside (never 0, never on the circle).
struct DiskPoint {
    cplx z;

    DiskPoint() = default;
    explicit DiskPoint(cplx value) : z(value) {
        if (!(std::abs(value) < 1.0))
            throw std::invalid_argument("DiskPoint: |z| must be < 1, got |z| = " +
                                        std::to_string(std::abs(value)));
    }
};

inline std::string format_point(cplx z) {
    return "(" + std::to_string(z.real()) + ", " + std::to_string(z.imag()) + ")";
}

namespace detail {

template <class T>
T pairwise_sum_impl(std::span<const T> v) {
    if (v.size() <= 16) {
        T acc{};
        for (const T& x : v) acc += x;
        return acc;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum_impl(v.subspan(0, half)) + pairwise_sum_impl(v.subspan(half));
}

} // namespace detail

/// Fixed-tree pairwise summation.  The reduction order depends only on the
/// length, so results are bit-identical regardless of how the values were
/// produced (serial or parallel evaluation).
template <class T>
T pairwise_sum(std::span<const T> v) {
    return detail::pairwise_sum_impl(v);
}

template <class T>
T pairwise_sum(const std::vector<T>& v) {
    return detail::pairwise_sum_impl(std::span<const T>(v));
}

/// Worker cap: min(hardware, HARDYLAB_THREADS if set).  Always >= 1.
inline unsigned worker_count() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("HARDYLAB_THREADS")) {
        char* end = nullptr;
        const unsigned long cap = std::strtoul(env, &end, 10);
        if (end != env && cap >= 1 && cap < 4096) hw = std::min<unsigned>(hw, static_cast<unsigned>(cap));
    }
    return hw;
}

/// Runs fn(i) for i in [0, n).  Work is handed out in fixed chunks; each
/// index writes only its own output slots, so the thread count never
/// changes results.
template <class F>
void parallel_for_index(std::size_t n, F&& fn) {
    const unsigned workers = worker_count();
    if (workers <= 1 || n < 2048) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    constexpr std::size_t chunk = 1024;
    const std::size_t nchunks = (n + chunk - 1) / chunk;
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= nchunks) return;
            const std::size_t lo = c * chunk;
            const std::size_t hi = std::min(lo + chunk, n);
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (unsigned t = 1; t < workers; ++t) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
}

/// Deterministic RNG for test corpora.  mt19937_64 plus explicit bit
/// transforms (std::uniform_real_distribution is implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() {  // [0, 1)
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() {  // Box-Muller, one value per call pair cached
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * kPi * u2);
        have_spare_ = true;
        return r * std::cos(2.0 * kPi * u2);
    }

    cplx cnormal() { return {normal(), normal()}; }

    std::uint64_t bits() { return eng_(); }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace hardylab
