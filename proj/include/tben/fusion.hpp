#ifndef TBEN_FUSION_HPP
#define TBEN_FUSION_HPP

#include <span>
#include <string>
#include <vector>

#include "tben/error.hpp"

namespace tben {

// One modality's feature vector for a single video, tagged with where it
// came from ("rgb", "audio", ...). Tags survive into manifests and
// prediction files so fused artefacts stay traceable.
struct ModalityVector {
    std::string modality;
    std::vector<double> values;

    ModalityVector(std::string tag, std::vector<double> vals);
};

// Early fusion: concatenate per-modality features in the given order.
// Output length is the sum of input lengths; every coordinate of every
// part is preserved at a computable offset.
std::vector<double> concat_features(std::span<const ModalityVector> parts);

// Late fusion: weighted sum of per-modality activation vectors over a
// shared label space. Default weights are all 1 (plain sum). Weights, if
// given, must match the number of activation sets, be nonnegative, and not
// all zero. Softmax/argmax is the caller's business.
std::vector<double> late_fuse(std::span<const std::vector<double>> activation_sets,
                              std::span<const double> weights = {});

}  // namespace tben

#endif  // TBEN_FUSION_HPP
