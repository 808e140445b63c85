#include "tben/synth.hpp"

#include <algorithm>
#include <cmath>

#include "tben/splitmix64.hpp"

namespace tben {
namespace {

// Draw `n` standard normals into out[0..n) from the shared stream.
void fill_gaussian(GaussianStream& g, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = g.next();
}

std::vector<double> random_unit_vector(GaussianStream& g, std::size_t n) {
    std::vector<double> v(n);
    fill_gaussian(g, v.data(), n);
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    // A Gaussian draw of any practical dimension is never numerically zero.
    for (double& x : v) x /= norm;
    return v;
}

}  // namespace

void SynthSpec::validate() const {
    if (num_classes < 1) throw SpecError("num_classes must be >= 1");
    if (videos_per_class < 1) throw SpecError("videos_per_class must be >= 1");
    if (t < 1) throw SpecError("t must be >= 1");
    if (c < 4) throw SpecError("c must be >= 4");
    if (num_classes > c / 2) {
        throw SpecError("num_classes=" + std::to_string(num_classes) + " > c/2=" +
                        std::to_string(c / 2) + ": class covariance supports would collide");
    }
    if (!(covariance_strength >= 0.0) || !std::isfinite(covariance_strength)) {
        throw SpecError("covariance_strength must be finite and >= 0");
    }
    if (!std::isfinite(mean_offset)) throw SpecError("mean_offset must be finite");
}

std::vector<SynthVideo> gen_covariance_classes(const SynthSpec& spec) {
    spec.validate();
    const std::size_t t = static_cast<std::size_t>(spec.t);
    const std::size_t c = static_cast<std::size_t>(spec.c);
    const std::size_t support = c / static_cast<std::size_t>(spec.num_classes);
    const double u_entry = 1.0 / std::sqrt(static_cast<double>(support));

    GaussianStream g(spec.seed);
    std::vector<SynthVideo> out;
    out.reserve(static_cast<std::size_t>(spec.num_classes) * spec.videos_per_class);
    std::vector<double> frame(c);
    for (int k = 0; k < spec.num_classes; ++k) {
        const std::size_t block = static_cast<std::size_t>(k) * support;
        for (int v = 0; v < spec.videos_per_class; ++v) {
            std::vector<double> data;
            data.reserve(t * c);
            for (std::size_t i = 0; i < t; ++i) {
                fill_gaussian(g, frame.data(), c);  // z
                const double gs = spec.covariance_strength * g.next();
                for (std::size_t j = 0; j < c; ++j) frame[j] += spec.mean_offset;
                for (std::size_t j = 0; j < support; ++j) frame[block + j] += gs * u_entry;
                data.insert(data.end(), frame.begin(), frame.end());
            }
            Tensor tensor({t, c}, {Axis::T, Axis::C}, std::move(data));
            out.push_back({FeatureSequence(std::move(tensor)), k, -1});
        }
    }
    return out;
}

void HierSynthSpec::validate() const {
    if (parents < 1) throw SpecError("parents must be >= 1");
    if (children_per_parent < 1) throw SpecError("children_per_parent must be >= 1");
    if (videos_per_child < 1) throw SpecError("videos_per_child must be >= 1");
    if (t < 1) throw SpecError("t must be >= 1");
    if (c < 2) throw SpecError("c must be >= 2");
    for (double x : {parent_scale, child_scale, noise}) {
        if (!std::isfinite(x) || x < 0.0) throw SpecError("scales and noise must be finite and >= 0");
    }
}

HierDataset gen_hier_dataset(const HierSynthSpec& spec) {
    spec.validate();
    const std::size_t t = static_cast<std::size_t>(spec.t);
    const std::size_t c = static_cast<std::size_t>(spec.c);
    const int num_children = spec.parents * spec.children_per_parent;

    GaussianStream g(spec.seed);
    // All class means are fixed before any video noise so that the mean
    // geometry does not depend on videos_per_child.
    std::vector<std::vector<double>> parent_dir;
    parent_dir.reserve(static_cast<std::size_t>(spec.parents));
    for (int p = 0; p < spec.parents; ++p) parent_dir.push_back(random_unit_vector(g, c));
    std::vector<std::vector<double>> child_mean;
    child_mean.reserve(static_cast<std::size_t>(num_children));
    std::vector<int> parent_of(static_cast<std::size_t>(num_children));
    for (int p = 0; p < spec.parents; ++p) {
        for (int j = 0; j < spec.children_per_parent; ++j) {
            const int child = p * spec.children_per_parent + j;
            parent_of[static_cast<std::size_t>(child)] = p;
            std::vector<double> offset = random_unit_vector(g, c);
            std::vector<double> mean(c);
            for (std::size_t i = 0; i < c; ++i) {
                mean[i] = spec.parent_scale * parent_dir[static_cast<std::size_t>(p)][i] +
                          spec.child_scale * offset[i];
            }
            child_mean.push_back(std::move(mean));
        }
    }

    std::vector<SynthVideo> videos;
    videos.reserve(static_cast<std::size_t>(num_children) * spec.videos_per_child);
    std::vector<double> frame(c);
    for (int child = 0; child < num_children; ++child) {
        const auto& mean = child_mean[static_cast<std::size_t>(child)];
        for (int v = 0; v < spec.videos_per_child; ++v) {
            std::vector<double> data;
            data.reserve(t * c);
            for (std::size_t i = 0; i < t; ++i) {
                fill_gaussian(g, frame.data(), c);
                for (std::size_t j = 0; j < c; ++j) frame[j] = mean[j] + spec.noise * frame[j];
                data.insert(data.end(), frame.begin(), frame.end());
            }
            Tensor tensor({t, c}, {Axis::T, Axis::C}, std::move(data));
            videos.push_back({FeatureSequence(std::move(tensor)), child,
                              parent_of[static_cast<std::size_t>(child)]});
        }
    }
    return {std::move(videos), Hierarchy(static_cast<std::size_t>(spec.parents), std::move(parent_of))};
}

std::vector<ModalityVector> gen_second_modality(std::span<const int> labels, double snr, int dim,
                                                std::uint64_t seed, const std::string& tag) {
    if (labels.empty()) throw DataError("gen_second_modality: empty label list");
    if (!(snr > 0.0) || !std::isfinite(snr)) throw SpecError("snr must be finite and > 0");
    if (dim < 1) throw SpecError("dim must be >= 1");
    int num_classes = 0;
    for (int l : labels) {
        if (l < 0) throw LabelError("gen_second_modality: negative label");
        num_classes = std::max(num_classes, l + 1);
    }

    GaussianStream g(seed);
    // Prototypes first so the stream layout is independent of video count.
    std::vector<std::vector<double>> prototype;
    prototype.reserve(static_cast<std::size_t>(num_classes));
    for (int k = 0; k < num_classes; ++k) {
        prototype.push_back(random_unit_vector(g, static_cast<std::size_t>(dim)));
    }

    const double noise_scale = 1.0 / snr;
    std::vector<ModalityVector> out;
    out.reserve(labels.size());
    std::vector<double> z(static_cast<std::size_t>(dim));
    for (int l : labels) {
        fill_gaussian(g, z.data(), z.size());
        std::vector<double> v(static_cast<std::size_t>(dim));
        const auto& proto = prototype[static_cast<std::size_t>(l)];
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = proto[i] + noise_scale * z[i];
        out.emplace_back(tag, std::move(v));
    }
    return out;
}

}  // namespace tben
