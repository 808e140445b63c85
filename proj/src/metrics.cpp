#include "tben/metrics.hpp"

#include <cmath>
#include <string>

namespace tben {

bool hit_at_k(std::span<const double> scores, int true_label, int k) {
    const int n = static_cast<int>(scores.size());
    if (n == 0) throw DataError("hit_at_k: empty score vector");
    if (true_label < 0 || true_label >= n) {
        throw LabelError("hit_at_k: label " + std::to_string(true_label) + " outside [0, " +
                         std::to_string(n) + ")");
    }
    if (k < 1 || k > n) {
        throw ConfigError("hit_at_k: k=" + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
    }
    const double s = scores[true_label];
    int better = 0;
    for (int i = 0; i < n; ++i) {
        if (scores[i] > s || (scores[i] == s && i < true_label)) ++better;
    }
    return better < k;
}

std::vector<HitRate> evaluate(std::span<const Prediction> predictions, std::span<const int> ks) {
    if (predictions.empty()) throw DataError("evaluate: no predictions");
    std::vector<HitRate> table;
    table.reserve(ks.size());
    for (int k : ks) {
        std::size_t hits = 0;
        for (const auto& p : predictions) {
            if (hit_at_k(p.scores, p.label, k)) ++hits;
        }
        table.push_back({k, 100.0 * static_cast<double>(hits) / static_cast<double>(predictions.size())});
    }
    return table;
}

std::vector<double> average_frame_predictions(std::span<const std::vector<double>> frame_scores) {
    if (frame_scores.empty()) throw DataError("average_frame_predictions: no frames");
    const std::size_t n = frame_scores.front().size();
    for (const auto& f : frame_scores) {
        if (f.size() != n) {
            throw DimensionError("average_frame_predictions: length mismatch (" +
                                 std::to_string(f.size()) + " vs " + std::to_string(n) + ")");
        }
        double sum = 0.0;
        for (double v : f) sum += v;
        if (std::abs(sum - 1.0) > 1e-6) {
            throw DataError("average_frame_predictions: frame distribution sums to " +
                            std::to_string(sum) + ", not 1");
        }
    }
    std::vector<double> mean(n, 0.0);
    for (const auto& f : frame_scores) {
        for (std::size_t i = 0; i < n; ++i) mean[i] += f[i];
    }
    for (double& v : mean) v /= static_cast<double>(frame_scores.size());
    return mean;
}

double split_mean(std::span<const double> values) {
    if (values.empty()) throw DataError("split_mean: no values");
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

}  // namespace tben
