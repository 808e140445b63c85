#ifndef TBEN_SYNTH_HPP
#define TBEN_SYNTH_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tben/classifier.hpp"
#include "tben/fusion.hpp"
#include "tben/tensor.hpp"

namespace tben {

// One generated video: a (T,C) feature sequence plus its labels. `parent`
// is -1 for datasets without hierarchical structure.
struct SynthVideo {
    FeatureSequence seq;
    int label;
    int parent = -1;
};

// Covariance-separated dataset. Every class has the same per-frame mean;
// classes differ only in channel covariance, so average pooling destroys
// the label signal while second-order pooling keeps it.
struct SynthSpec {
    int num_classes = 4;
    int videos_per_class = 200;
    int t = 20;
    int c = 32;
    std::uint64_t seed = 0;
    double covariance_strength = 1.5;  // "a" below; 0 gives indistinguishable classes
    double mean_offset = 0.0;          // shared mean is mean_offset * ones

    void validate() const;  // SpecError on violation
};

// Frames of class k are x = mu + z + a*(g * u_k) with mu the shared mean,
// z i.i.d. standard normal per channel, g a per-frame standard normal
// scalar, and u_k a unit vector supported on channel block k (blocks of
// floor(c/num_classes) channels, disjoint across classes). All Gaussians
// come from one Box-Muller stream seeded with spec.seed, drawn in
// class -> video -> frame order (z first, then g within a frame), so the
// dataset is bit-identical for a given spec.
std::vector<SynthVideo> gen_covariance_classes(const SynthSpec& spec);

// Hierarchy-structured dataset: parents set a coarse mean direction,
// children add a finer, smaller offset, frames add isotropic noise.
struct HierSynthSpec {
    int parents = 8;
    int children_per_parent = 4;
    int videos_per_child = 30;
    int t = 12;
    int c = 64;
    std::uint64_t seed = 0;
    double parent_scale = 3.0;
    double child_scale = 1.0;
    double noise = 1.0;

    void validate() const;
};

struct HierDataset {
    std::vector<SynthVideo> videos;  // label = child id, parent set
    Hierarchy hierarchy;
};

// Child id layout: parent p owns children [p*children_per_parent,
// (p+1)*children_per_parent). Frame x of child (p, j) is
// parent_scale*v_p + child_scale*w_{p,j} + noise*z with v and w random
// unit vectors; siblings therefore share the dominant direction and have
// higher pairwise cosine similarity than non-siblings.
HierDataset gen_hier_dataset(const HierSynthSpec& spec);

// Correlated second modality: one vector per video, aligned with `labels`
// order, equal to a class-specific random unit prototype plus (1/snr)
// scaled Gaussian noise. High snr makes the modality alone sufficient;
// low snr makes it weak but still complementary.
std::vector<ModalityVector> gen_second_modality(std::span<const int> labels, double snr, int dim,
                                                std::uint64_t seed,
                                                const std::string& tag = "audio");

}  // namespace tben

#endif  // TBEN_SYNTH_HPP
