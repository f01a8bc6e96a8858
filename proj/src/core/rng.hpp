#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace narxprune {

// mt19937_64 wrapped with distribution-free draws. The standard library
// distributions are implementation-defined, so helpers are hand-rolled to keep
// seeded streams identical across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t raw() { return gen_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n), rejection-sampled to avoid modulo bias.
    std::uint64_t below(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v = gen_();
        while (v >= limit) v = gen_();
        return v % n;
    }

    // First n entries of a seeded partial Fisher-Yates shuffle of [0, total).
    std::vector<int> sample_without_replacement(int total, int n) {
        std::vector<int> idx(static_cast<std::size_t>(total));
        for (int i = 0; i < total; ++i) idx[static_cast<std::size_t>(i)] = i;
        for (int i = 0; i < n; ++i) {
            const int j = i + static_cast<int>(below(static_cast<std::uint64_t>(total - i)));
            std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
        }
        idx.resize(static_cast<std::size_t>(n));
        return idx;
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace narxprune
