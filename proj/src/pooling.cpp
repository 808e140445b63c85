#include "tben/pooling.hpp"

#include <algorithm>
#include <cmath>

namespace tben {

PipelineKind parse_pipeline_kind(std::string_view spec) {
    if (spec == "stap") return PipelineKind::Stap;
    if (spec == "sap+tcbp") return PipelineKind::SapTcbp;
    if (spec == "scbp+tap") return PipelineKind::ScbpTap;
    if (spec == "scbp+tcbp") return PipelineKind::ScbpTcbp;
    if (spec == "stcbp") return PipelineKind::Stcbp;
    throw ConfigError("unknown pipeline: " + std::string(spec) +
                      " (expect stap|sap+tcbp|scbp+tap|scbp+tcbp|stcbp)");
}

std::string pipeline_name(PipelineKind kind) {
    switch (kind) {
        case PipelineKind::Stap: return "stap";
        case PipelineKind::SapTcbp: return "sap+tcbp";
        case PipelineKind::ScbpTap: return "scbp+tap";
        case PipelineKind::ScbpTcbp: return "scbp+tcbp";
        case PipelineKind::Stcbp: return "stcbp";
    }
    return "?";
}

bool pipeline_has_spatial_cbp(PipelineKind kind) {
    return kind == PipelineKind::ScbpTap || kind == PipelineKind::ScbpTcbp;
}

bool pipeline_has_temporal_cbp(PipelineKind kind) {
    return kind == PipelineKind::SapTcbp || kind == PipelineKind::ScbpTcbp;
}

PoolingPipeline PoolingPipeline::stap() { return PoolingPipeline(PipelineKind::Stap); }

PoolingPipeline PoolingPipeline::sap_tcbp(RmProjector temporal) {
    PoolingPipeline pp(PipelineKind::SapTcbp);
    pp.temporal_ = std::move(temporal);
    return pp;
}

PoolingPipeline PoolingPipeline::scbp_tap(RmProjector spatial) {
    PoolingPipeline pp(PipelineKind::ScbpTap);
    pp.spatial_ = std::move(spatial);
    return pp;
}

PoolingPipeline PoolingPipeline::scbp_tcbp(RmProjector spatial, RmProjector temporal) {
    if (temporal.input_dim() != spatial.output_dim()) {
        throw DimensionError("temporal projector input dim " +
                             std::to_string(temporal.input_dim()) +
                             " must equal spatial projector output dim " +
                             std::to_string(spatial.output_dim()));
    }
    PoolingPipeline pp(PipelineKind::ScbpTcbp);
    pp.spatial_ = std::move(spatial);
    pp.temporal_ = std::move(temporal);
    return pp;
}

PoolingPipeline PoolingPipeline::stcbp(RmProjector joint) {
    PoolingPipeline pp(PipelineKind::Stcbp);
    pp.spatial_ = std::move(joint);
    return pp;
}

const RmProjector* PoolingPipeline::spatial_projector() const {
    return pipeline_has_spatial_cbp(kind_) && spatial_ ? &*spatial_ : nullptr;
}

const RmProjector* PoolingPipeline::temporal_projector() const {
    return temporal_ ? &*temporal_ : nullptr;
}

const RmProjector* PoolingPipeline::joint_projector() const {
    return kind_ == PipelineKind::Stcbp && spatial_ ? &*spatial_ : nullptr;
}

std::size_t PoolingPipeline::output_dim(std::size_t channels) const {
    switch (kind_) {
        case PipelineKind::Stap: return channels;
        case PipelineKind::SapTcbp: return temporal_->output_dim();
        case PipelineKind::ScbpTap: return spatial_->output_dim();
        case PipelineKind::ScbpTcbp: return temporal_->output_dim();
        case PipelineKind::Stcbp: return spatial_->output_dim();
    }
    return 0;
}

namespace {

void require_tc(const FeatureSequence& seq, const char* op) {
    if (seq.has_spatial()) {
        throw AxisError(std::string(op) + " expects a (T,C) sequence");
    }
}

void require_thwc(const FeatureSequence& seq, const char* op) {
    if (!seq.has_spatial()) {
        throw AxisError(std::string(op) + " expects a (T,H,W,C) sequence");
    }
}

void require_input_dim(const FeatureSequence& seq, const RmProjector& p) {
    if (p.input_dim() != seq.channels()) {
        throw DimensionError("projector input dim " + std::to_string(p.input_dim()) +
                             " does not match channel count " + std::to_string(seq.channels()));
    }
}

}  // namespace

std::vector<double> tap(const FeatureSequence& seq) {
    require_tc(seq, "tap");
    Tensor m = reduce_mean(seq.tensor(), {Axis::T});
    return std::vector<double>(m.data().begin(), m.data().end());
}

FeatureSequence sap(const FeatureSequence& seq) {
    require_thwc(seq, "sap");
    Tensor m = reduce_mean(seq.tensor(), {Axis::H, Axis::W});
    return FeatureSequence(std::move(m), seq.frame_rate());
}

FeatureSequence scbp(const FeatureSequence& seq, const RmProjector& p) {
    require_thwc(seq, "scbp");
    require_input_dim(seq, p);
    const std::size_t t = seq.frames();
    const std::size_t per_frame = seq.descriptors_per_frame();
    const std::size_t d = p.output_dim();
    std::vector<double> out(t * d, 0.0);
    for (std::size_t f = 0; f < t; ++f) {
        p.accumulate_projections(seq.frame_data(f).data(), per_frame, out.data() + f * d);
    }
    return FeatureSequence(Tensor({t, d}, {Axis::T, Axis::C}, std::move(out)), seq.frame_rate());
}

std::vector<double> tcbp(const FeatureSequence& seq, const RmProjector& p) {
    require_tc(seq, "tcbp");
    require_input_dim(seq, p);
    std::vector<double> out(p.output_dim(), 0.0);
    p.accumulate_projections(seq.tensor().data().data(), seq.frames(), out.data());
    return out;
}

std::vector<double> stcbp(const FeatureSequence& seq, const RmProjector& p) {
    require_thwc(seq, "stcbp");
    require_input_dim(seq, p);
    std::vector<double> out(p.output_dim(), 0.0);
    p.accumulate_projections(seq.tensor().data().data(),
                             seq.frames() * seq.descriptors_per_frame(), out.data());
    return out;
}

std::vector<double> run_pipeline(const PoolingPipeline& pp, const FeatureSequence& seq) {
    const bool spatial_input = seq.has_spatial();
    switch (pp.kind()) {
        case PipelineKind::Stap: {
            Tensor m = spatial_input ? reduce_mean(seq.tensor(), {Axis::T, Axis::H, Axis::W})
                                     : reduce_mean(seq.tensor(), {Axis::T});
            return std::vector<double>(m.data().begin(), m.data().end());
        }
        case PipelineKind::SapTcbp:
            return tcbp(spatial_input ? sap(seq) : seq, *pp.temporal_projector());
        case PipelineKind::ScbpTap:
            return tap(scbp(seq, *pp.spatial_projector()));
        case PipelineKind::ScbpTcbp:
            return tcbp(scbp(seq, *pp.spatial_projector()), *pp.temporal_projector());
        case PipelineKind::Stcbp:
            return stcbp(seq, *pp.joint_projector());
    }
    throw ConfigError("unreachable pipeline kind");
}

FeatureSequence mid_frame(const FeatureSequence& seq) {
    auto src = seq.frame_data(seq.frames() / 2);
    std::vector<std::size_t> dims = seq.tensor().dims();
    dims[0] = 1;
    return FeatureSequence(
        Tensor(std::move(dims), seq.tensor().axes(), std::vector<double>(src.begin(), src.end())),
        seq.frame_rate());
}

std::vector<FeatureSequence> sliding_windows(const FeatureSequence& seq, double window_s,
                                             double stride_s) {
    if (!(window_s >= 1.0) || !(stride_s >= 1.0)) {
        throw ConfigError("window and stride must be at least 1 second");
    }
    const std::size_t t = seq.frames();
    const auto window = static_cast<std::size_t>(std::llround(window_s * seq.frame_rate()));
    const auto stride = static_cast<std::size_t>(std::llround(stride_s * seq.frame_rate()));
    if (window == 0 || stride == 0) {
        throw ConfigError("window and stride must cover at least one frame");
    }

    auto slice = [&](std::size_t begin, std::size_t end) {
        const std::size_t frame_size = seq.descriptors_per_frame() * seq.channels();
        auto data = seq.tensor().data().subspan(begin * frame_size, (end - begin) * frame_size);
        std::vector<std::size_t> dims = seq.tensor().dims();
        dims[0] = end - begin;
        return FeatureSequence(
            Tensor(std::move(dims), seq.tensor().axes(), std::vector<double>(data.begin(), data.end())),
            seq.frame_rate());
    };

    std::vector<FeatureSequence> out;
    std::size_t start = 0;
    std::size_t covered = 0;  // end of the last full window
    while (start + window <= t) {
        out.push_back(slice(start, start + window));
        covered = start + window;
        start += stride;
    }
    // Tail window: only when it reaches frames no full window covered
    // (start can land past the end when stride exceeds window).
    if (covered < t && start < t) {
        out.push_back(slice(start, t));
    }
    return out;
}

PoolingPipeline make_pipeline(PipelineKind kind, std::size_t channels, std::size_t proj_dim,
                              std::size_t spatial_dim, std::uint64_t seed,
                              const Normalization& norm) {
    switch (kind) {
        case PipelineKind::Stap:
            return PoolingPipeline::stap();
        case PipelineKind::SapTcbp:
            return PoolingPipeline::sap_tcbp(RmProjector(seed, channels, proj_dim, norm));
        case PipelineKind::ScbpTap:
            return PoolingPipeline::scbp_tap(RmProjector(seed, channels, spatial_dim, norm));
        case PipelineKind::ScbpTcbp:
            return PoolingPipeline::scbp_tcbp(RmProjector(seed, channels, spatial_dim, norm),
                                              RmProjector(seed + 1, spatial_dim, proj_dim, norm));
        case PipelineKind::Stcbp:
            return PoolingPipeline::stcbp(RmProjector(seed, channels, proj_dim, norm));
    }
    throw ConfigError("invalid pipeline kind");
}

}  // namespace tben
