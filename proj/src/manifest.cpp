#include "tben/manifest.hpp"

#include <fstream>

#include <json.hpp>

#include "tben/tensor.hpp"

namespace tben {
namespace {

using nlohmann::json;

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void write_json_file(const json& j, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw IoError("short write to " + path.string());
}

void check_format(const json& j, const std::string& expected, const std::filesystem::path& path) {
    if (!j.is_object() || j.value("format", "") != expected) {
        throw FormatError(path.string() + ": not a " + expected + " file");
    }
    if (j.value("version", 0) != 1) {
        throw FormatError(path.string() + ": unsupported version");
    }
}

}  // namespace

Split parse_split(const std::string& s) {
    if (s == "train") return Split::Train;
    if (s == "val") return Split::Val;
    if (s == "test") return Split::Test;
    throw ConfigError("unknown split '" + s + "' (expected train|val|test)");
}

std::string split_name(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Val: return "val";
        case Split::Test: return "test";
    }
    throw ConfigError("invalid split value");
}

Manifest Manifest::load(const std::filesystem::path& path) {
    const json j = read_json_file(path);
    check_format(j, "tben-manifest", path);

    Manifest m;
    m.root = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");

    try {
        if (j.contains("hierarchy")) {
            m.hierarchy_path = j.at("hierarchy").get<std::string>();
            const auto hpath = m.resolve(*m.hierarchy_path);
            if (!std::filesystem::exists(hpath)) {
                throw DataError("hierarchy file missing: " + hpath.string());
            }
            m.hierarchy = Hierarchy::from_json(read_json_file(hpath));
        }
        for (const auto& je : j.at("entries")) {
            ManifestEntry e;
            e.video_id = je.at("video_id").get<std::string>();
            if (e.video_id.empty()) throw DataError("empty video_id");
            e.split = parse_split(je.at("split").get<std::string>());
            if (je.contains("labels")) {
                const auto& jl = je.at("labels");
                if (jl.contains("flat")) e.flat_label = jl.at("flat").get<int>();
                if (jl.contains("parent")) e.parent_label = jl.at("parent").get<int>();
                if (jl.contains("child")) e.child_label = jl.at("child").get<int>();
            }
            if (je.contains("modalities")) {
                for (const auto& [tag, p] : je.at("modalities").items()) {
                    e.modalities[tag] = p.get<std::string>();
                }
            }
            m.entries.push_back(std::move(e));
        }
    } catch (const json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }

    // Invariants: unique ids, referenced files exist, labels fit the hierarchy.
    std::map<std::string, int> seen;
    for (const auto& e : m.entries) {
        if (++seen[e.video_id] > 1) throw DataError("duplicate video_id '" + e.video_id + "'");
        for (const auto& [tag, rel] : e.modalities) {
            const auto fpath = m.resolve(rel);
            if (!std::filesystem::exists(fpath)) {
                throw DataError("missing tensor for " + e.video_id + " modality '" + tag +
                                "': " + fpath.string());
            }
        }
        if (m.hierarchy) {
            const auto& h = *m.hierarchy;
            const int num_children = static_cast<int>(h.num_children());
            if (e.child_label && (*e.child_label < 0 || *e.child_label >= num_children)) {
                throw LabelError(e.video_id + ": child label out of range");
            }
            if (e.parent_label &&
                (*e.parent_label < 0 || *e.parent_label >= static_cast<int>(h.num_parents()))) {
                throw LabelError(e.video_id + ": parent label out of range");
            }
            if (e.child_label && e.parent_label &&
                h.parent_of(static_cast<std::size_t>(*e.child_label)) != *e.parent_label) {
                throw LabelError(e.video_id + ": parent label disagrees with hierarchy");
            }
        }
    }
    return m;
}

void Manifest::save(const std::filesystem::path& path) const {
    json j;
    j["format"] = "tben-manifest";
    j["version"] = 1;
    std::optional<std::string> hpath = hierarchy_path;
    if (hierarchy && !hpath) hpath = "hierarchy.json";
    if (hpath) j["hierarchy"] = *hpath;

    json jentries = json::array();
    for (const auto& e : entries) {
        json je;
        je["video_id"] = e.video_id;
        je["split"] = split_name(e.split);
        json jl = json::object();
        if (e.flat_label) jl["flat"] = *e.flat_label;
        if (e.parent_label) jl["parent"] = *e.parent_label;
        if (e.child_label) jl["child"] = *e.child_label;
        if (!jl.empty()) je["labels"] = jl;
        if (!e.modalities.empty()) {
            json jm = json::object();
            for (const auto& [tag, rel] : e.modalities) jm[tag] = rel;
            je["modalities"] = jm;
        }
        jentries.push_back(std::move(je));
    }
    j["entries"] = std::move(jentries);
    write_json_file(j, path);

    if (hierarchy) {
        const auto dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
        write_json_file(hierarchy->to_json(), dir / *hpath);
    }
}

std::vector<const ManifestEntry*> Manifest::split_entries(Split s) const {
    std::vector<const ManifestEntry*> out;
    for (const auto& e : entries) {
        if (e.split == s) out.push_back(&e);
    }
    return out;
}

const ManifestEntry& Manifest::find(const std::string& video_id) const {
    for (const auto& e : entries) {
        if (e.video_id == video_id) return e;
    }
    throw DataError("video_id '" + video_id + "' not in manifest");
}

FeatureSet FeatureSet::load(const std::filesystem::path& path) {
    // Accept either the index file itself or the directory holding it.
    const auto index_path =
        std::filesystem::is_directory(path) ? path / "index.json" : path;
    const json j = read_json_file(index_path);
    check_format(j, "tben-features", index_path);

    FeatureSet fs;
    fs.root = index_path.has_parent_path() ? index_path.parent_path() : std::filesystem::path(".");
    try {
        fs.pipeline = j.at("pipeline").get<std::string>();
        fs.dim = j.at("dim").get<std::size_t>();
        for (const auto& [id, je] : j.at("entries").items()) {
            FeatureIndexEntry e;
            e.file = je.at("file").get<std::string>();
            if (je.contains("encode_ns")) e.encode_ns = je.at("encode_ns").get<std::int64_t>();
            fs.entries[id] = std::move(e);
        }
    } catch (const json::exception& e) {
        throw FormatError(index_path.string() + ": " + e.what());
    }
    for (const auto& [id, e] : fs.entries) {
        const auto p = fs.root / e.file;
        if (!std::filesystem::exists(p)) {
            throw DataError("missing feature tensor for '" + id + "': " + p.string());
        }
    }
    return fs;
}

void FeatureSet::save(const std::filesystem::path& index_path) const {
    json j;
    j["format"] = "tben-features";
    j["version"] = 1;
    j["pipeline"] = pipeline;
    j["dim"] = dim;
    json je = json::object();
    for (const auto& [id, e] : entries) {
        json v;
        v["file"] = e.file;
        if (e.encode_ns) v["encode_ns"] = *e.encode_ns;
        je[id] = std::move(v);
    }
    j["entries"] = std::move(je);
    write_json_file(j, index_path);
}

std::vector<double> FeatureSet::load_vector(const std::string& video_id) const {
    auto it = entries.find(video_id);
    if (it == entries.end()) throw DataError("no features indexed for '" + video_id + "'");
    const Tensor t = read_tensor(root / it->second.file);
    if (t.rank() != 1) {
        throw DataError("feature tensor for '" + video_id + "' has rank " +
                        std::to_string(t.rank()) + ", expected 1");
    }
    if (dim != 0 && t.size() != dim) {
        throw DataError("feature tensor for '" + video_id + "' has length " +
                        std::to_string(t.size()) + ", index says " + std::to_string(dim));
    }
    return std::vector<double>(t.data().begin(), t.data().end());
}

}  // namespace tben
