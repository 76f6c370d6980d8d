// random.hpp - bit-reproducible randomness.
//
// All randomness in the toolkit flows through Rng: a std::mt19937_64 engine
// (its output sequence is fixed by the standard) plus hand-rolled bounded
// integer, real, and shuffle routines. The std distributions are avoided
// because their algorithms are implementation-defined.
#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace coarse {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform on [0, bound) by rejection; bound > 0.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % bound;
    }

    // Uniform on [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

    template <class T>
    void shuffle(std::span<T> items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace coarse
