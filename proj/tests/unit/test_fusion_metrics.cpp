#include <doctest.h>

#include <cmath>
#include <vector>

#include "tben/error.hpp"
#include "tben/fusion.hpp"
#include "tben/metrics.hpp"
#include "tben/splitmix64.hpp"

using tben::HitRate;
using tben::ModalityVector;
using tben::Prediction;

TEST_CASE("modality vectors carry a tag and finite values") {
    ModalityVector mv("rgb", {1.0, -2.0});
    CHECK(mv.modality == "rgb");
    CHECK_THROWS_AS(ModalityVector("", {1.0}), tben::DataError);
    CHECK_THROWS_AS(ModalityVector("audio", {1.0, std::nan("")}), tben::DataError);
}

TEST_CASE("concat preserves order and offsets") {
    std::vector<ModalityVector> parts;
    parts.emplace_back("rgb", std::vector<double>{1.0, 2.0});
    parts.emplace_back("audio", std::vector<double>{3.0});
    CHECK(tben::concat_features(parts) == std::vector<double>{1.0, 2.0, 3.0});

    std::vector<ModalityVector> one;
    one.emplace_back("rgb", std::vector<double>{5.0});
    CHECK(tben::concat_features(one) == std::vector<double>{5.0});

    CHECK_THROWS_AS(tben::concat_features({}), tben::DataError);

    // An empty vector inside a part contributes nothing but is legal.
    parts.emplace_back("flow", std::vector<double>{});
    CHECK(tben::concat_features(parts).size() == 3);
}

TEST_CASE("late fusion sums activations") {
    std::vector<std::vector<double>> sets{{1.0, 2.0}, {3.0, 4.0}};
    CHECK(tben::late_fuse(sets) == std::vector<double>{4.0, 6.0});

    std::vector<double> w{2.0, 1.0};
    CHECK(tben::late_fuse(sets, w) == std::vector<double>{5.0, 8.0});

    std::vector<double> downweight{1.0, 0.0};
    CHECK(tben::late_fuse(sets, downweight) == std::vector<double>{1.0, 2.0});

    std::vector<std::vector<double>> solo{{1.5, -2.0}};
    CHECK(tben::late_fuse(solo) == std::vector<double>{1.5, -2.0});
}

TEST_CASE("late fusion input validation") {
    std::vector<std::vector<double>> sets{{1.0, 2.0}, {3.0, 4.0}};
    CHECK_THROWS_AS(tben::late_fuse({}), tben::DataError);

    std::vector<std::vector<double>> ragged{{1.0, 2.0}, {3.0}};
    CHECK_THROWS_AS(tben::late_fuse(ragged), tben::DimensionError);

    std::vector<double> short_w{1.0};
    CHECK_THROWS_AS(tben::late_fuse(sets, short_w), tben::ConfigError);
    std::vector<double> neg_w{1.0, -0.5};
    CHECK_THROWS_AS(tben::late_fuse(sets, neg_w), tben::ConfigError);
    std::vector<double> zero_w{0.0, 0.0};
    CHECK_THROWS_AS(tben::late_fuse(sets, zero_w), tben::ConfigError);
}

TEST_CASE("hit_at_k basic ranking") {
    std::vector<double> scores{0.1, 0.5, 0.4};
    CHECK(tben::hit_at_k(scores, 1, 1));
    CHECK_FALSE(tben::hit_at_k(scores, 2, 1));
    CHECK(tben::hit_at_k(scores, 2, 2));
    CHECK_FALSE(tben::hit_at_k(scores, 0, 2));
    CHECK(tben::hit_at_k(scores, 0, 3));
}

TEST_CASE("hit_at_k breaks ties toward lower class ids") {
    std::vector<double> tie{0.5, 0.5};
    CHECK(tben::hit_at_k(tie, 0, 1));        // wins its tie
    CHECK_FALSE(tben::hit_at_k(tie, 1, 1));  // loses to the equal-scoring lower id
    CHECK(tben::hit_at_k(tie, 1, 2));

    std::vector<double> all_same{0.25, 0.25, 0.25, 0.25};
    CHECK(tben::hit_at_k(all_same, 2, 3));
    CHECK_FALSE(tben::hit_at_k(all_same, 3, 3));
}

TEST_CASE("hit_at_k validates label and k") {
    std::vector<double> scores{0.1, 0.9};
    CHECK_THROWS_AS(tben::hit_at_k(scores, 2, 1), tben::LabelError);
    CHECK_THROWS_AS(tben::hit_at_k(scores, -1, 1), tben::LabelError);
    CHECK_THROWS_AS(tben::hit_at_k(scores, 0, 0), tben::ConfigError);
    CHECK_THROWS_AS(tben::hit_at_k(scores, 0, 3), tben::ConfigError);
    CHECK_THROWS_AS(tben::hit_at_k(std::vector<double>{}, 0, 1), tben::DataError);
}

TEST_CASE("a hit at k stays a hit at every larger k") {
    tben::SplitMix64 rng(44);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> scores(8);
        for (auto& s : scores) s = rng.next_unit();
        int label = static_cast<int>(rng.next_below(8));
        bool seen = false;
        for (int k = 1; k <= 8; ++k) {
            bool hit = tben::hit_at_k(scores, label, k);
            if (seen) CHECK(hit);
            seen = seen || hit;
        }
        CHECK(seen);  // k = n always hits
    }
}

TEST_CASE("evaluate reports one rate per requested k") {
    std::vector<Prediction> preds{
        {{0.7, 0.2, 0.1, 0.0}, 0},  // hit at 1
        {{0.4, 0.5, 0.1, 0.0}, 0},  // hit at 2
        {{0.1, 0.2, 0.3, 0.4}, 0},  // hit at 4 only
        {{0.9, 0.05, 0.03, 0.02}, 0},
    };
    std::vector<int> ks{1, 2, 4};
    auto rates = tben::evaluate(preds, ks);
    REQUIRE(rates.size() == 3);
    CHECK(rates[0].k == 1);
    CHECK(rates[0].percent == doctest::Approx(50.0));
    CHECK(rates[1].percent == doctest::Approx(75.0));
    CHECK(rates[2].percent == doctest::Approx(100.0));

    CHECK_THROWS_AS(tben::evaluate({}, ks), tben::DataError);
}

TEST_CASE("frame averaging keeps distributions normalized") {
    std::vector<std::vector<double>> frames{{0.5, 0.5}, {0.25, 0.75}};
    auto avg = tben::average_frame_predictions(frames);
    CHECK(avg == std::vector<double>{0.375, 0.625});

    std::vector<std::vector<double>> single{{0.2, 0.8}};
    CHECK(tben::average_frame_predictions(single) == std::vector<double>{0.2, 0.8});

    CHECK_THROWS_AS(tben::average_frame_predictions({}), tben::DataError);
    std::vector<std::vector<double>> ragged{{0.5, 0.5}, {1.0}};
    CHECK_THROWS_AS(tben::average_frame_predictions(ragged), tben::DimensionError);
    std::vector<std::vector<double>> unnormalized{{0.5, 0.6}};
    CHECK_THROWS_AS(tben::average_frame_predictions(unnormalized), tben::DataError);
    // 1e-6 slack admits accumulated float error.
    std::vector<std::vector<double>> close{{0.5, 0.5 + 5e-7}};
    CHECK_NOTHROW(tben::average_frame_predictions(close));
}

TEST_CASE("split_mean averages percentages") {
    std::vector<double> splits{91.44, 90.63, 91.02};
    CHECK(tben::split_mean(splits) == doctest::Approx(91.03).epsilon(1e-9));
    std::vector<double> one{47.95};
    CHECK(tben::split_mean(one) == 47.95);
    CHECK_THROWS_AS(tben::split_mean({}), tben::DataError);
}
