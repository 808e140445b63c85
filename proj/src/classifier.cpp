#include "tben/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>


#include "tben/splitmix64.hpp"
#include "tben/tensor.hpp"

namespace tben {

using nlohmann::json;

Hierarchy::Hierarchy(std::size_t num_parents, std::vector<int> parent_of)
    : num_parents_(num_parents), parent_of_(std::move(parent_of)) {
    if (num_parents_ == 0) throw ConfigError("hierarchy needs at least one parent");
    if (parent_of_.empty()) throw ConfigError("hierarchy needs at least one child");
    children_of_.assign(num_parents_, {});
    for (std::size_t c = 0; c < parent_of_.size(); ++c) {
        int p = parent_of_[c];
        if (p < 0 || static_cast<std::size_t>(p) >= num_parents_) {
            throw LabelError("child " + std::to_string(c) + " names parent " + std::to_string(p) +
                             " outside [0," + std::to_string(num_parents_) + ")");
        }
        children_of_[p].push_back(static_cast<int>(c));
    }
    for (std::size_t p = 0; p < num_parents_; ++p) {
        if (children_of_[p].empty()) {
            throw LabelError("parent " + std::to_string(p) + " has no children");
        }
    }
}

json Hierarchy::to_json() const {
    return json{{"num_parents", num_parents_}, {"parent_of", parent_of_}};
}

Hierarchy Hierarchy::from_json(const json& j) {
    return Hierarchy(j.at("num_parents").get<std::size_t>(),
                     j.at("parent_of").get<std::vector<int>>());
}

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        throw ConfigError("learning rate must be positive");
    }
    if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("momentum must be in [0,1)");
    if (epochs <= 0) throw ConfigError("epochs must be positive");
    if (batch_size <= 0) throw ConfigError("batch size must be positive");
    if (!(weight_init_scale >= 0.0) || !std::isfinite(weight_init_scale)) {
        throw ConfigError("weight init scale must be nonnegative");
    }
}

namespace {

std::size_t mode_output_dim(const HeadMode& mode) {
    if (const auto* flat = std::get_if<FlatMode>(&mode)) {
        if (flat->num_classes == 0) throw ConfigError("flat head needs at least one class");
        return flat->num_classes;
    }
    const auto& h = std::get<HierMode>(mode).hierarchy;
    return h.num_parents() + h.num_children();
}

// In-place stable softmax.
void softmax(std::span<double> v) {
    double mx = *std::max_element(v.begin(), v.end());
    double sum = 0.0;
    for (double& x : v) {
        x = std::exp(x - mx);
        sum += x;
    }
    for (double& x : v) x /= sum;
}

double log_sum_exp(std::span<const double> v) {
    double mx = *std::max_element(v.begin(), v.end());
    double sum = 0.0;
    for (double x : v) sum += std::exp(x - mx);
    return mx + std::log(sum);
}

}  // namespace

LinearHead::LinearHead(HeadMode mode, std::size_t input_dim)
    : mode_(std::move(mode)), input_dim_(input_dim), output_dim_(mode_output_dim(mode_)),
      weights_(output_dim_ * input_dim_, 0.0), bias_(output_dim_, 0.0) {
    if (input_dim_ == 0) throw DimensionError("head input dim must be positive");
}

const Hierarchy* LinearHead::hierarchy() const {
    const auto* hm = std::get_if<HierMode>(&mode_);
    return hm ? &hm->hierarchy : nullptr;
}

std::vector<double> LinearHead::activations(std::span<const double> x) const {
    if (x.size() != input_dim_) {
        throw DimensionError("head expects input of length " + std::to_string(input_dim_) +
                             ", got " + std::to_string(x.size()));
    }
    std::vector<double> a(bias_);
    for (std::size_t o = 0; o < output_dim_; ++o) {
        const double* row = weights_.data() + o * input_dim_;
        double s = 0.0;
        for (std::size_t i = 0; i < input_dim_; ++i) s += row[i] * x[i];
        a[o] += s;
    }
    return a;
}

std::vector<double> forward_flat(const LinearHead& head, std::span<const double> x) {
    if (head.is_hier()) throw ConfigError("forward_flat called on a hierarchical head");
    std::vector<double> a = head.activations(x);
    softmax(a);
    return a;
}

HierForward forward_hier(const LinearHead& head, std::span<const double> x) {
    const Hierarchy* h = head.hierarchy();
    if (!h) throw ConfigError("forward_hier called on a flat head");
    std::vector<double> a = head.activations(x);
    const std::size_t num_p = h->num_parents();

    HierForward out;
    out.parent_probs.assign(a.begin(), a.begin() + num_p);
    softmax(out.parent_probs);

    out.joint.assign(h->num_children(), 0.0);
    std::vector<double> group;
    for (std::size_t p = 0; p < num_p; ++p) {
        const auto& kids = h->children_of(p);
        group.resize(kids.size());
        for (std::size_t i = 0; i < kids.size(); ++i) group[i] = a[num_p + kids[i]];
        softmax(group);
        for (std::size_t i = 0; i < kids.size(); ++i) {
            out.joint[kids[i]] = out.parent_probs[p] * group[i];
        }
    }
    return out;
}

std::pair<double, Gradients> loss_and_grad(const LinearHead& head, std::span<const Sample> batch) {
    if (batch.empty()) throw DataError("empty batch");
    const std::size_t in = head.input_dim();
    const std::size_t out = head.output_dim();
    Gradients g{std::vector<double>(out * in, 0.0), std::vector<double>(out, 0.0)};
    double loss = 0.0;
    std::vector<double> dlogits(out);

    const Hierarchy* h = head.hierarchy();
    const std::size_t num_p = h ? h->num_parents() : 0;

    for (const Sample& s : batch) {
        std::vector<double> a = head.activations(s.features);
        std::fill(dlogits.begin(), dlogits.end(), 0.0);

        if (!h) {
            if (s.label < 0 || static_cast<std::size_t>(s.label) >= out) {
                throw LabelError("class label " + std::to_string(s.label) + " out of range");
            }
            loss += log_sum_exp(a) - a[s.label];
            std::vector<double> p = a;
            softmax(p);
            for (std::size_t o = 0; o < out; ++o) dlogits[o] = p[o];
            dlogits[s.label] -= 1.0;
        } else {
            if (s.label < 0 || static_cast<std::size_t>(s.label) >= h->num_children()) {
                throw LabelError("child label " + std::to_string(s.label) + " out of range");
            }
            int parent = s.parent >= 0 ? s.parent : h->parent_of(s.label);
            if (parent != h->parent_of(s.label)) {
                throw LabelError("child " + std::to_string(s.label) + " is not a child of parent " +
                                 std::to_string(parent));
            }

            std::span<const double> pa(a.data(), num_p);
            loss += log_sum_exp(pa) - a[parent];
            std::vector<double> pp(pa.begin(), pa.end());
            softmax(pp);
            for (std::size_t o = 0; o < num_p; ++o) dlogits[o] = pp[o];
            dlogits[parent] -= 1.0;

            const auto& kids = h->children_of(parent);
            std::vector<double> grp(kids.size());
            for (std::size_t i = 0; i < kids.size(); ++i) grp[i] = a[num_p + kids[i]];
            loss += log_sum_exp(grp) - a[num_p + s.label];
            softmax(grp);
            for (std::size_t i = 0; i < kids.size(); ++i) {
                dlogits[num_p + kids[i]] = grp[i];
            }
            dlogits[num_p + s.label] -= 1.0;
        }

        for (std::size_t o = 0; o < out; ++o) {
            if (dlogits[o] == 0.0) continue;
            double* wrow = g.weights.data() + o * in;
            const double dl = dlogits[o];
            for (std::size_t i = 0; i < in; ++i) wrow[i] += dl * s.features[i];
            g.bias[o] += dl;
        }
    }

    const double inv = 1.0 / static_cast<double>(batch.size());
    loss *= inv;
    for (double& v : g.weights) v *= inv;
    for (double& v : g.bias) v *= inv;
    return {loss, std::move(g)};
}

void sgd_momentum_step(std::span<double> params, std::span<double> velocity,
                       std::span<const double> grads, const TrainConfig& cfg) {
    if (params.size() != velocity.size() || params.size() != grads.size()) {
        throw DimensionError("parameter/velocity/gradient shapes differ");
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        velocity[i] = cfg.momentum * velocity[i] + grads[i];
        params[i] -= cfg.learning_rate * velocity[i];
    }
}

TrainResult train(const std::vector<Sample>& dataset, const TrainConfig& cfg, HeadMode mode,
                  const std::function<void(int, double, const LinearHead&)>& on_epoch) {
    cfg.validate();
    if (dataset.empty()) throw DataError("empty training dataset");
    const std::size_t in = dataset[0].features.size();
    for (const Sample& s : dataset) {
        if (s.features.size() != in) {
            throw DimensionError("inconsistent feature lengths in training data");
        }
    }

    LinearHead head(std::move(mode), in);
    SplitMix64 rng(cfg.seed);
    const double s = cfg.weight_init_scale / std::sqrt(static_cast<double>(in));
    for (double& w : head.weights()) w = rng.next_uniform(-s, s);

    std::vector<double> vel_w(head.weights().size(), 0.0);
    std::vector<double> vel_b(head.bias().size(), 0.0);

    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<Sample> batch;
    std::vector<double> epoch_losses;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        // Fisher-Yates over the same stream as the initializer.
        for (std::size_t i = order.size(); i-- > 1;) {
            std::size_t j = rng.next_below(i + 1);
            std::swap(order[i], order[j]);
        }
        double loss_sum = 0.0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            std::size_t end = std::min(order.size(), start + cfg.batch_size);
            batch.clear();
            for (std::size_t k = start; k < end; ++k) batch.push_back(dataset[order[k]]);
            auto [loss, grads] = loss_and_grad(head, batch);
            sgd_momentum_step(head.weights(), vel_w, grads.weights, cfg);
            sgd_momentum_step(head.bias(), vel_b, grads.bias, cfg);
            loss_sum += loss * static_cast<double>(end - start);
        }
        double epoch_loss = loss_sum / static_cast<double>(dataset.size());
        epoch_losses.push_back(epoch_loss);
        if (on_epoch) on_epoch(epoch, epoch_loss, head);
    }
    return TrainResult{std::move(head), std::move(epoch_losses)};
}

void LinearHead::save(const std::filesystem::path& path, const json* config_echo) const {
    json j;
    j["format"] = "tben-linear-head";
    j["version"] = 1;
    j["input_dim"] = input_dim_;
    j["output_dim"] = output_dim_;
    if (const auto* flat = std::get_if<FlatMode>(&mode_)) {
        j["mode"] = "flat";
        j["num_classes"] = flat->num_classes;
    } else {
        j["mode"] = "hier";
        j["hierarchy"] = std::get<HierMode>(mode_).hierarchy.to_json();
    }
    std::string stem = path.stem().string();
    std::string wname = stem + ".weights.tbnf";
    std::string bname = stem + ".bias.tbnf";
    j["weights_file"] = wname;
    j["bias_file"] = bname;
    if (config_echo) j["train_config"] = *config_echo;

    std::filesystem::path dir = path.parent_path();
    write_tensor(Tensor({output_dim_, input_dim_}, {Axis::H, Axis::W}, weights_), dir / wname);
    write_tensor(Tensor({output_dim_}, {Axis::C}, bias_), dir / bname);

    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << "\n";
    if (!out.good()) throw IoError("write failure on " + path.string());
}

LinearHead LinearHead::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw FormatError("bad model file " + path.string() + ": " + e.what());
    }
    if (j.value("format", "") != "tben-linear-head") {
        throw FormatError("not a model file: " + path.string());
    }
    HeadMode mode = FlatMode{1};
    if (j.at("mode") == "flat") {
        mode = FlatMode{j.at("num_classes").get<std::size_t>()};
    } else if (j.at("mode") == "hier") {
        mode = HierMode{Hierarchy::from_json(j.at("hierarchy"))};
    } else {
        throw FormatError("unknown head mode in " + path.string());
    }
    LinearHead head(std::move(mode), j.at("input_dim").get<std::size_t>());

    std::filesystem::path dir = path.parent_path();
    Tensor w = read_tensor(dir / j.at("weights_file").get<std::string>());
    Tensor b = read_tensor(dir / j.at("bias_file").get<std::string>());
    if (w.size() != head.weights().size() || b.size() != head.bias().size()) {
        throw DimensionError("model parameter tensors do not match declared dims");
    }
    std::copy(w.data().begin(), w.data().end(), head.weights().begin());
    std::copy(b.data().begin(), b.data().end(), head.bias().begin());
    return head;
}

}  // namespace tben
