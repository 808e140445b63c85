#ifndef TBEN_METRICS_HPP
#define TBEN_METRICS_HPP

#include <span>
#include <vector>

#include "tben/error.hpp"

namespace tben {

// True iff `true_label` is among the k highest-scoring classes. Ties are
// broken by lower class id first, so results are deterministic: a label is
// a hit iff fewer than k classes score strictly higher than it, counting a
// tied class as higher only when its id is lower.
bool hit_at_k(std::span<const double> scores, int true_label, int k);

struct Prediction {
    std::vector<double> scores;
    int label = 0;
};

struct HitRate {
    int k = 0;
    double percent = 0.0;  // 100 * hits / count
};

// Hit@k percentages over a prediction set, one row per requested k.
std::vector<HitRate> evaluate(std::span<const Prediction> predictions, std::span<const int> ks);

// Mean of per-frame class distributions; each input must be a probability
// vector (sums to 1 within 1e-6). The mean is again a distribution.
std::vector<double> average_frame_predictions(std::span<const std::vector<double>> frame_scores);

// Arithmetic mean of percentages (e.g. across dataset splits).
double split_mean(std::span<const double> values);

}  // namespace tben

#endif  // TBEN_METRICS_HPP
