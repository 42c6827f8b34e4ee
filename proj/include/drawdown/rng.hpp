#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace drawdown {

// SplitMix64 step (Steele/Lea/Flood); used only to expand stream keys.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t s) : state(s) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
};

// xoshiro256++ (Blackman & Vigna). One independent generator per
// (seed, stream) key, so path results do not depend on thread scheduling.
class Xoshiro256pp {
public:
    Xoshiro256pp(std::uint64_t seed, std::uint64_t stream) {
        SplitMix64 sm(seed * 0x9E3779B97F4A7C15ull +
                      stream * 0xD1B54A32D192ED03ull + 0x8CB92BA72F3D8DD7ull);
        for (auto& si : s_) si = sm.next();
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    double uniform() {  // [0, 1)
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    double uniform_open() {  // (0, 1)
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    }

private:
    static std::uint64_t rotl(std::uint64_t v, int k) {
        return (v << k) | (v >> (64 - k));
    }

    std::array<std::uint64_t, 4> s_;
};

namespace detail {

// Ziggurat tables for the standard normal, 128 strips (Doornik's ZIGNOR
// layout: x[0] is the virtual width of the base strip).
struct ZigguratTables {
    static constexpr double kR = 3.442619855899;
    static constexpr double kV = 9.91256303526217e-3;
    std::array<double, 129> x{};
    std::array<double, 128> ratio{};

    ZigguratTables() {
        double f = std::exp(-0.5 * kR * kR);
        x[0] = kV / f;
        x[1] = kR;
        x[128] = 0.0;
        for (int i = 2; i < 128; ++i) {
            x[i] = std::sqrt(-2.0 * std::log(kV / x[i - 1] + f));
            f = std::exp(-0.5 * x[i] * x[i]);
        }
        for (int i = 0; i < 128; ++i) ratio[i] = x[i + 1] / x[i];
    }
};

inline const ZigguratTables kZig{};

template <class Gen>
double normal_tail(Gen& gen, bool negative) {
    double xt, yt;
    do {
        xt = std::log(gen.uniform_open()) / ZigguratTables::kR;
        yt = std::log(gen.uniform_open());
    } while (-2.0 * yt < xt * xt);
    return negative ? xt - ZigguratTables::kR : ZigguratTables::kR - xt;
}

}  // namespace detail

// Standard normal draw via the ziggurat; one uint64 per attempt in the
// common (rectangle) case.
template <class Gen>
double draw_normal(Gen& gen) {
    const auto& zig = detail::kZig;
    for (;;) {
        const std::uint64_t bits = gen.next();
        const unsigned i = static_cast<unsigned>(bits & 0x7F);
        const double u = 2.0 * (static_cast<double>(bits >> 11) * 0x1.0p-53) - 1.0;
        if (std::abs(u) < zig.ratio[i]) return u * zig.x[i];
        if (i == 0) return detail::normal_tail(gen, u < 0.0);
        const double xv = u * zig.x[i];
        const double f0 = std::exp(-0.5 * (zig.x[i] * zig.x[i] - xv * xv));
        const double f1 = std::exp(-0.5 * (zig.x[i + 1] * zig.x[i + 1] - xv * xv));
        if (f1 + gen.uniform() * (f0 - f1) < 1.0) return xv;
    }
}

// Per-path stream: all draws for one simulated path come from here, so a
// path can be replayed exactly under a different strategy (common random
// numbers) or thread layout.
class PathRng {
public:
    PathRng(std::uint64_t seed, std::uint64_t path_index)
        : gen_(seed, path_index) {}

    double normal() { return draw_normal(gen_); }
    double uniform() { return gen_.uniform(); }
    double exponential(double rate) { return -std::log(gen_.uniform_open()) / rate; }

private:
    Xoshiro256pp gen_;
};

}  // namespace drawdown
