#include "tben/fusion.hpp"

#include <cmath>

namespace tben {

ModalityVector::ModalityVector(std::string tag, std::vector<double> vals)
    : modality(std::move(tag)), values(std::move(vals)) {
    if (modality.empty()) throw DataError("modality tag must be nonempty");
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw DataError("modality '" + modality + "' contains a non-finite value");
        }
    }
}

std::vector<double> concat_features(std::span<const ModalityVector> parts) {
    if (parts.empty()) throw DataError("concat_features: no modality vectors given");
    std::size_t total = 0;
    for (const auto& p : parts) total += p.values.size();
    std::vector<double> out;
    out.reserve(total);
    for (const auto& p : parts) out.insert(out.end(), p.values.begin(), p.values.end());
    return out;
}

std::vector<double> late_fuse(std::span<const std::vector<double>> activation_sets,
                              std::span<const double> weights) {
    if (activation_sets.empty()) throw DataError("late_fuse: no activation sets given");
    const std::size_t n = activation_sets.front().size();
    for (const auto& a : activation_sets) {
        if (a.size() != n) {
            throw DimensionError("late_fuse: activation length mismatch (" +
                                 std::to_string(a.size()) + " vs " + std::to_string(n) + ")");
        }
    }
    std::vector<double> w(activation_sets.size(), 1.0);
    if (!weights.empty()) {
        if (weights.size() != activation_sets.size()) {
            throw ConfigError("late_fuse: " + std::to_string(weights.size()) + " weights for " +
                              std::to_string(activation_sets.size()) + " activation sets");
        }
        double sum = 0.0;
        for (double x : weights) {
            if (!std::isfinite(x) || x < 0.0) throw ConfigError("late_fuse: weights must be finite and nonnegative");
            sum += x;
        }
        if (sum == 0.0) throw ConfigError("late_fuse: weights must not all be zero");
        w.assign(weights.begin(), weights.end());
    }
    std::vector<double> fused(n, 0.0);
    for (std::size_t m = 0; m < activation_sets.size(); ++m) {
        for (std::size_t i = 0; i < n; ++i) fused[i] += w[m] * activation_sets[m][i];
    }
    return fused;
}

}  // namespace tben
