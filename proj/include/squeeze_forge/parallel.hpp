#pragma once

// Deterministic chunked Monte Carlo: every chunk owns an RNG stream derived
// from (seed, stream, chunk), so results do not depend on the thread count.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace sqf {

/// Worker count: SQUEEZE_FORGE_THREADS if set and positive, else hardware concurrency.
inline unsigned thread_count() {
    if (const char* env = std::getenv("SQUEEZE_FORGE_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (...) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t chunk) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(chunk),
                          static_cast<std::uint32_t>(chunk >> 32)};
        eng_.seed(seq);
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    std::uint64_t below(std::uint64_t n) { return eng_() % n; }

    /// Standard normal via Box–Muller (implementation-independent, unlike std::normal_distribution).
    double normal() {
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Uniform direction on the unit sphere of R^dim.
    Eigen::VectorXd direction(Eigen::Index dim) {
        Eigen::VectorXd v(dim);
        do {
            for (Eigen::Index i = 0; i < dim; ++i) v[i] = normal();
        } while (v.squaredNorm() == 0.0);
        return v.normalized();
    }

    /// Uniform point in the unit ball of R^dim.
    Eigen::VectorXd in_ball(Eigen::Index dim) {
        return direction(dim) * std::pow(uniform(), 1.0 / static_cast<double>(dim));
    }

private:
    std::mt19937_64 eng_;
};

/**
 * Split `total` work items into fixed-size chunks, run `fn(chunk, begin, end)`
 * on a worker pool and fold the per-chunk reports in chunk order with
 * `Report::merge`.
 */
template <typename Report, typename ChunkFn>
Report chunked_reduce(std::uint64_t total, std::uint64_t chunk_size, ChunkFn&& fn) {
    chunk_size = std::max<std::uint64_t>(chunk_size, 1);
    const std::uint64_t chunks = (total + chunk_size - 1) / chunk_size;
    std::vector<Report> parts(chunks);
    const unsigned workers = static_cast<unsigned>(
        std::min<std::uint64_t>(thread_count(), std::max<std::uint64_t>(chunks, 1)));

    std::vector<std::exception_ptr> errors(std::max(workers, 1u));
    auto run = [&](unsigned w) {
        try {
            for (std::uint64_t c = w; c < chunks; c += workers) {
                const std::uint64_t b = c * chunk_size;
                parts[c] = fn(c, b, std::min(total, b + chunk_size));
            }
        } catch (...) {
            errors[w] = std::current_exception();
        }
    };
    if (workers <= 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    Report out{};
    for (auto& p : parts) out.merge(p);
    return out;
}

}  // namespace sqf
