#include <doctest.h>

#include <cmath>
#include <cstdint>

#include "tben/splitmix64.hpp"

using tben::GaussianStream;
using tben::SplitMix64;

TEST_CASE("splitmix64 reference stream for seed 0") {
    // Values frozen from the published reference implementation.
    SplitMix64 rng(0);
    CHECK(rng.next() == 0xE220A8397B1DCDAFull);
    CHECK(rng.next() == 0x6E789E6AA1B965F4ull);
    CHECK(rng.next() == 0x06C45D188009454Full);
    CHECK(rng.next() == 0xF88BB8A8724C81ECull);
    CHECK(rng.next() == 0x1B39896A51A8749Bull);
}

TEST_CASE("splitmix64 reference stream for a large seed") {
    SplitMix64 rng(0x123456789ABCDEFull);
    CHECK(rng.next() == 0x157A3807A48FAA9Dull);
    CHECK(rng.next() == 0xD573529B34A1D093ull);
    CHECK(rng.next() == 0x2F90B72E996DCCBEull);
}

TEST_CASE("next_unit uses the top 53 bits, giving exact reproducible doubles") {
    SplitMix64 rng(0);
    CHECK(rng.next_unit() == 0.8833108082136426);
    CHECK(rng.next_unit() == 0.43152799704850997);
    CHECK(rng.next_unit() == 0.026433771592597743);
    CHECK(rng.next_unit() == 0.9708819781538285);
}

TEST_CASE("next_unit stays inside [0,1)") {
    SplitMix64 rng(987654321);
    for (int i = 0; i < 10000; ++i) {
        double u = rng.next_unit();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("next_uniform is an affine map of next_unit") {
    SplitMix64 a(0), b(0);
    for (int i = 0; i < 100; ++i) {
        double u = a.next_unit();
        CHECK(b.next_uniform(-1.0, 1.0) == -1.0 + 2.0 * u);
    }
}

TEST_CASE("next_below is plain modulo of the raw word") {
    SplitMix64 a(7), b(7);
    for (int i = 0; i < 100; ++i) {
        CHECK(a.next_below(13) == b.next() % 13);
    }
}

TEST_CASE("gaussian stream pins the box-muller draw order") {
    GaussianStream gs(42);
    CHECK(gs.next() == doctest::Approx(0.8822489062222688).epsilon(1e-12));
    CHECK(gs.next() == doctest::Approx(1.388473285287707).epsilon(1e-12));
    CHECK(gs.next() == doctest::Approx(-0.4508498757188601).epsilon(1e-12));
    CHECK(gs.next() == doctest::Approx(0.6707164409024291).epsilon(1e-12));
}

TEST_CASE("gaussian stream has standard-normal moments") {
    GaussianStream gs(123);
    const int n = 200000;
    double sum = 0.0, sumsq = 0.0;
    int inside_one_sigma = 0;
    for (int i = 0; i < n; ++i) {
        double x = gs.next();
        sum += x;
        sumsq += x * x;
        if (std::fabs(x) <= 1.0) ++inside_one_sigma;
    }
    double mean = sum / n;
    double var = sumsq / n - mean * mean;
    CHECK(std::fabs(mean) < 0.01);
    CHECK(std::fabs(var - 1.0) < 0.015);
    // P(|X| <= 1) for a standard normal.
    CHECK(std::fabs(static_cast<double>(inside_one_sigma) / n - 0.6827) < 0.005);
}

TEST_CASE("identical seeds give identical gaussian streams") {
    GaussianStream a(55), b(55);
    for (int i = 0; i < 1000; ++i) CHECK(a.next() == b.next());
}
