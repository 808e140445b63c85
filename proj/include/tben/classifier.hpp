#ifndef TBEN_CLASSIFIER_HPP
#define TBEN_CLASSIFIER_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include <json.hpp>

#include "tben/error.hpp"

namespace tben {

// Parent/child label structure. Children of one parent form a sibling
// group; child conditional probabilities are normalized within it.
class Hierarchy {
  public:
    Hierarchy(std::size_t num_parents, std::vector<int> parent_of);

    std::size_t num_parents() const { return num_parents_; }
    std::size_t num_children() const { return parent_of_.size(); }
    int parent_of(std::size_t child) const { return parent_of_[child]; }
    const std::vector<int>& children_of(std::size_t parent) const { return children_of_[parent]; }

    nlohmann::json to_json() const;
    static Hierarchy from_json(const nlohmann::json& j);

  private:
    std::size_t num_parents_;
    std::vector<int> parent_of_;
    std::vector<std::vector<int>> children_of_;
};

struct FlatMode {
    std::size_t num_classes;
};
struct HierMode {
    Hierarchy hierarchy;
};
using HeadMode = std::variant<FlatMode, HierMode>;

struct TrainConfig {
    double learning_rate = 0.01;
    double momentum = 0.9;
    int epochs = 1;
    int batch_size = 32;
    std::uint64_t seed = 0;
    double weight_init_scale = 0.01;

    void validate() const;
};

// Linear layer: out x in weights plus bias, flat-softmax or hierarchical.
// Zero-initialized at construction; train() owns the random init.
class LinearHead {
  public:
    LinearHead(HeadMode mode, std::size_t input_dim);

    std::size_t input_dim() const { return input_dim_; }
    std::size_t output_dim() const { return output_dim_; }
    const HeadMode& mode() const { return mode_; }
    bool is_hier() const { return std::holds_alternative<HierMode>(mode_); }
    const Hierarchy* hierarchy() const;

    // Raw activations W x + b.
    std::vector<double> activations(std::span<const double> x) const;

    std::vector<double>& weights() { return weights_; }
    const std::vector<double>& weights() const { return weights_; }
    std::vector<double>& bias() { return bias_; }
    const std::vector<double>& bias() const { return bias_; }

    // JSON header at `path` plus one TBNF tensor per parameter alongside.
    void save(const std::filesystem::path& path,
              const nlohmann::json* config_echo = nullptr) const;
    static LinearHead load(const std::filesystem::path& path);

  private:
    HeadMode mode_;
    std::size_t input_dim_;
    std::size_t output_dim_;
    std::vector<double> weights_;  // out x in, row-major
    std::vector<double> bias_;     // out
};

// Stable softmax of W x + b; sums to 1.
std::vector<double> forward_flat(const LinearHead& head, std::span<const double> x);

struct HierForward {
    std::vector<double> parent_probs;  // P(A_p), length P
    std::vector<double> joint;         // P(A_p, A_c) indexed by child, length C_total
};
// Parent softmax over the first P activations; child softmax within each
// sibling group; joint = product. Total joint mass is 1.
HierForward forward_hier(const LinearHead& head, std::span<const double> x);

// One training example. Flat mode: `label` is the class id. Hier mode:
// `label` is the child id and `parent` its parent (-1 derives the parent
// from the hierarchy; an inconsistent pair is a label error).
struct Sample {
    std::vector<double> features;
    int label = -1;
    int parent = -1;
};

struct Gradients {
    std::vector<double> weights;
    std::vector<double> bias;
};

// Mean negative log-likelihood over the batch and its exact gradients.
// Flat: cross-entropy on the softmax. Hier: -log of the joint at the true
// (parent, child) pair; parent and sibling-group terms add.
std::pair<double, Gradients> loss_and_grad(const LinearHead& head, std::span<const Sample> batch);

// Classical heavy-ball update: v <- momentum*v + g; w <- w - lr*v.
void sgd_momentum_step(std::span<double> params, std::span<double> velocity,
                       std::span<const double> grads, const TrainConfig& cfg);

struct TrainResult {
    LinearHead head;
    std::vector<double> epoch_losses;
};

// Deterministic given cfg.seed: weight init and per-epoch shuffling both
// come from one SplitMix64 stream. on_epoch (optional) observes the head
// after each epoch.
TrainResult train(const std::vector<Sample>& dataset, const TrainConfig& cfg, HeadMode mode,
                  const std::function<void(int epoch, double loss, const LinearHead&)>& on_epoch = {});

}  // namespace tben

#endif  // TBEN_CLASSIFIER_HPP
