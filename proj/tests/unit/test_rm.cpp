#include <doctest.h>

#include <cmath>
#include <vector>

#include "tben/error.hpp"
#include "tben/rm.hpp"
#include "tben/splitmix64.hpp"

using tben::Normalization;
using tben::RmProjector;

namespace {

std::vector<double> random_vec(tben::SplitMix64& rng, std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.next_uniform(-1.0, 1.0);
    return v;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

TEST_CASE("normalization spellings parse and round trip") {
    CHECK(Normalization::parse("identity").kind() == Normalization::Kind::Identity);
    CHECK(Normalization::parse("ssqrt").kind() == Normalization::Kind::SignedSqrt);
    CHECK(Normalization::parse("sigmoid").kind() == Normalization::Kind::Sigmoid);
    auto sc = Normalization::parse("scale:2.5");
    CHECK(sc.kind() == Normalization::Kind::Scale);
    CHECK(sc.scale() == 2.5);

    for (const char* s : {"identity", "ssqrt", "sigmoid", "scale:2.5"}) {
        CHECK(Normalization::parse(s).to_string() == s);
    }

    CHECK_THROWS_AS(Normalization::parse("sqrt"), tben::ConfigError);
    CHECK_THROWS_AS(Normalization::parse(""), tben::ConfigError);
    CHECK_THROWS_AS(Normalization::parse("scale:"), tben::ConfigError);
    CHECK_THROWS_AS(Normalization::parse("scale:abc"), tben::ConfigError);
    CHECK_THROWS_AS(Normalization::parse("scale:0"), tben::ConfigError);
    CHECK_THROWS_AS(Normalization::parse("scale:-1"), tben::ConfigError);
    CHECK_THROWS_AS(Normalization::scaled(0.0), tben::ConfigError);
}

TEST_CASE("normalization elementwise values") {
    CHECK(Normalization::identity()(-3.0) == -3.0);
    CHECK(Normalization::signed_sqrt()(4.0) == 2.0);
    CHECK(Normalization::signed_sqrt()(-3.0) == doctest::Approx(-std::sqrt(3.0)));
    CHECK(Normalization::signed_sqrt()(0.0) == 0.0);
    CHECK(Normalization::sigmoid()(0.0) == 0.5);
    CHECK(Normalization::sigmoid()(-3.0) == doctest::Approx(1.0 / (1.0 + std::exp(3.0))));
    // Scale divides: it undoes the growth of an expanding sum.
    CHECK(Normalization::scaled(2.0)(-3.0) == -1.5);

    auto v = tben::apply_normalization({4.0, -9.0}, Normalization::signed_sqrt());
    CHECK(v[0] == 2.0);
    CHECK(v[1] == doctest::Approx(-3.0));
}

TEST_CASE("seeded projector draws w1 before w2 from one splitmix stream") {
    // Signs follow the top bits of the seed-0 reference stream.
    RmProjector p(0, 1, 4);
    CHECK(p.w1(0, 0) == -1.0);
    CHECK(p.w1(1, 0) == 1.0);
    CHECK(p.w1(2, 0) == 1.0);
    CHECK(p.w1(3, 0) == -1.0);
    CHECK(p.w2(0, 0) == 1.0);
    CHECK(p.w2(1, 0) == 1.0);
    CHECK(p.w2(2, 0) == 1.0);
    CHECK(p.w2(3, 0) == -1.0);

    auto y = p.project(std::vector<double>{2.0});
    CHECK(y == std::vector<double>{-4.0, 4.0, 4.0, 4.0});
}

TEST_CASE("same seed same matrices, different seed different matrices") {
    RmProjector a(9, 8, 16), b(9, 8, 16), c(10, 8, 16);
    bool same = true, differs = false;
    for (std::size_t r = 0; r < 16; ++r) {
        for (std::size_t col = 0; col < 8; ++col) {
            same = same && a.w1(r, col) == b.w1(r, col) && a.w2(r, col) == b.w2(r, col);
            differs = differs || a.w1(r, col) != c.w1(r, col);
        }
    }
    CHECK(same);
    CHECK(differs);
}

TEST_CASE("hand-checked projection with explicit matrices") {
    // c=2, d=1, w1=[1,-1], w2=[1,1], x=[1,2]: (1-2)*(1+2) = -3.
    auto base = [](Normalization n) {
        return RmProjector::from_matrices(2, 1, {1.0, -1.0}, {1.0, 1.0}, n);
    };
    CHECK(base(Normalization::identity()).project(std::vector<double>{1, 2})[0] == -3.0);
    CHECK(base(Normalization::signed_sqrt()).project(std::vector<double>{1, 2})[0] ==
          doctest::Approx(-std::sqrt(3.0)));
    CHECK(base(Normalization::sigmoid()).project(std::vector<double>{1, 2})[0] ==
          doctest::Approx(1.0 / (1.0 + std::exp(3.0))));
    CHECK(base(Normalization::scaled(2.0)).project(std::vector<double>{1, 2})[0] == -1.5);
}

TEST_CASE("projector input validation") {
    RmProjector p(3, 4, 8);
    CHECK_THROWS_AS(p.project(std::vector<double>{1, 2, 3}), tben::DimensionError);
    CHECK_THROWS_AS(p.project(std::vector<double>{1, 2, 3, std::nan("")}), tben::DataError);
    CHECK_THROWS_AS(RmProjector(0, 0, 4), tben::DimensionError);
    CHECK_THROWS_AS(RmProjector(0, 4, 0), tben::DimensionError);
    CHECK_THROWS_AS(RmProjector::from_matrices(2, 1, {1.0, -1.0}, {1.0}, {}),
                    tben::DimensionError);
    CHECK_THROWS_AS(RmProjector::from_matrices(2, 1, {1.0, 0.5}, {1.0, 1.0}, {}),
                    tben::DataError);
}

TEST_CASE("output dim at or below input dim is allowed (with a warning)") {
    RmProjector p(1, 8, 4);
    CHECK(p.output_dim() == 4);
    CHECK(p.project(std::vector<double>(8, 0.5)).size() == 4);
}

TEST_CASE("full_bilinear is the exact second-order oracle") {
    std::vector<std::vector<double>> one{{1.0, 2.0}};
    CHECK(tben::full_bilinear(one, 2) == std::vector<double>{1, 2, 2, 4});

    CHECK(tben::full_bilinear({}, 2) == std::vector<double>(4, 0.0));

    // Additivity over the set.
    std::vector<std::vector<double>> xs{{1.0, 2.0}, {-1.0, 0.5}};
    auto both = tben::full_bilinear(xs, 2);
    auto a = tben::full_bilinear(std::vector<std::vector<double>>{xs[0]}, 2);
    auto b = tben::full_bilinear(std::vector<std::vector<double>>{xs[1]}, 2);
    for (std::size_t i = 0; i < 4; ++i) CHECK(both[i] == doctest::Approx(a[i] + b[i]));
}

TEST_CASE("frobenius inner product of bilinear maps equals sum of squared dots") {
    tben::SplitMix64 rng(31);
    const std::size_t c = 5;
    std::vector<std::vector<double>> xs, ys;
    for (int i = 0; i < 3; ++i) xs.push_back(random_vec(rng, c));
    for (int i = 0; i < 4; ++i) ys.push_back(random_vec(rng, c));

    auto bx = tben::full_bilinear(xs, c);
    auto by = tben::full_bilinear(ys, c);
    double frob = dot(bx, by);

    double expect = 0.0;
    for (const auto& x : xs) {
        for (const auto& y : ys) {
            double d = dot(x, y);
            expect += d * d;
        }
    }
    CHECK(frob == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("projection approximates the squared-dot kernel in expectation") {
    const std::size_t c = 8, d = 8192;
    tben::SplitMix64 rng(77);
    auto x = random_vec(rng, c);
    auto y = random_vec(rng, c);
    double target = dot(x, y);
    target *= target;

    double acc = 0.0;
    const int seeds = 8;
    for (int s = 0; s < seeds; ++s) {
        RmProjector p(1000 + static_cast<std::uint64_t>(s), c, d);
        acc += dot(p.project(x), p.project(y)) / static_cast<double>(d);
    }
    double estimate = acc / seeds;
    CHECK(estimate == doctest::Approx(target).epsilon(0.15));
}

TEST_CASE("accumulate_projections matches the per-descriptor sum across block edges") {
    const std::size_t c = 16, d = 32, n = 700;  // spans several gemm blocks
    tben::SplitMix64 rng(5);
    std::vector<double> rows(n * c);
    for (auto& v : rows) v = rng.next_uniform(-1.0, 1.0);

    for (auto norm : {Normalization::identity(), Normalization::signed_sqrt()}) {
        RmProjector p(123, c, d, norm);
        std::vector<double> fast(d, 0.0);
        p.accumulate_projections(rows.data(), n, fast.data());

        std::vector<double> slow(d, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            auto y = p.project(std::span<const double>(rows.data() + i * c, c));
            for (std::size_t j = 0; j < d; ++j) slow[j] += y[j];
        }
        for (std::size_t j = 0; j < d; ++j) {
            CHECK(fast[j] == doctest::Approx(slow[j]).epsilon(1e-9));
        }
    }
}
