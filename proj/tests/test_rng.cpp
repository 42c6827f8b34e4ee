#include "drawdown/rng.hpp"

#include <cmath>
#include <vector>

#include "doctest.h"

using namespace drawdown;

TEST_CASE("per-path streams replay exactly and differ across paths") {
    PathRng a(42, 7);
    PathRng b(42, 7);
    PathRng c(42, 8);
    bool any_differ = false;
    for (int i = 0; i < 1000; ++i) {
        const double va = a.normal();
        CHECK(va == b.normal());
        any_differ = any_differ || va != c.normal();
    }
    CHECK(any_differ);
}

TEST_CASE("different seeds give different streams") {
    PathRng a(1, 0);
    PathRng b(2, 0);
    bool differ = false;
    for (int i = 0; i < 64; ++i) differ = differ || a.uniform() != b.uniform();
    CHECK(differ);
}

TEST_CASE("uniform stays in [0, 1)") {
    Xoshiro256pp g(3, 1);
    for (int i = 0; i < 100000; ++i) {
        const double u = g.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        const double uo = g.uniform_open();
        CHECK(uo > 0.0);
        CHECK(uo < 1.0);
    }
}

TEST_CASE("ziggurat normal: moments and tail quantiles") {
    const int n = 2'000'000;
    Xoshiro256pp g(20260809, 0);
    double s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0;
    // empirical CDF counts at a few fixed points
    const double qs[] = {-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0};
    int counts[7] = {0};
    for (int i = 0; i < n; ++i) {
        const double x = draw_normal(g);
        s1 += x;
        s2 += x * x;
        s3 += x * x * x;
        s4 += x * x * x * x;
        for (int q = 0; q < 7; ++q) counts[q] += x < qs[q] ? 1 : 0;
    }
    const double mean = s1 / n;
    const double var = s2 / n - mean * mean;
    const double skew = s3 / n;
    const double kurt = s4 / n;
    // 5-sigma-ish bands for n = 2e6
    CHECK(std::abs(mean) < 5.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(var - 1.0) < 0.01);
    CHECK(std::abs(skew) < 0.02);
    CHECK(std::abs(kurt - 3.0) < 0.05);
    for (int q = 0; q < 7; ++q) {
        const double p = 0.5 * std::erfc(-qs[q] / std::sqrt(2.0));
        const double se = std::sqrt(p * (1.0 - p) / n);
        CHECK(std::abs(static_cast<double>(counts[q]) / n - p) < 5.0 * se);
    }
}

TEST_CASE("exponential draw has the right mean") {
    PathRng r(5, 0);
    const int n = 500'000;
    const double rate = 0.04;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += r.exponential(rate);
    const double mean = acc / n;
    CHECK(std::abs(mean - 1.0 / rate) < 5.0 / rate / std::sqrt(static_cast<double>(n)));
}
