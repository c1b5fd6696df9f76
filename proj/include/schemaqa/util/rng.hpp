#pragma once
// Deterministic RNG utilities. std::shuffle / uniform_*_distribution are
// implementation-defined, so sampling is done by hand on top of mt19937_64
// to keep run artifacts byte-identical across standard libraries.

#include <cstdint>
#include <random>
#include <vector>

namespace schemaqa {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform in [0, n). Modulo bias is irrelevant at the n values used here.
    std::uint64_t below(std::uint64_t n) { return engine_() % n; }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace schemaqa
