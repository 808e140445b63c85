#ifndef TBEN_MANIFEST_HPP
#define TBEN_MANIFEST_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tben/classifier.hpp"
#include "tben/error.hpp"

namespace tben {

enum class Split { Train, Val, Test };

Split parse_split(const std::string& s);  // ConfigError on anything else
std::string split_name(Split s);

// One video in a dataset manifest. Modality paths are stored relative to
// the manifest file's directory.
struct ManifestEntry {
    std::string video_id;
    Split split = Split::Train;
    std::optional<int> flat_label;
    std::optional<int> parent_label;
    std::optional<int> child_label;
    std::map<std::string, std::string> modalities;  // tag -> relative tensor path
};

// Dataset manifest (manifest.json). Schema:
//   { "format": "tben-manifest", "version": 1,
//     "hierarchy": "hierarchy.json",            // optional
//     "entries": [ { "video_id": ..., "split": "train|val|test",
//                    "labels": { "flat": id } or { "parent": id, "child": id },
//                    "modalities": { tag: relative path } } ] }
// The hierarchy file holds { "num_parents": P, "parent_of": [...] }.
//
// load() validates: unique video ids, every referenced file exists, and —
// when a hierarchy is present — parent/child labels consistent with it.
struct Manifest {
    std::vector<ManifestEntry> entries;
    std::optional<std::string> hierarchy_path;  // relative, as stored
    std::optional<Hierarchy> hierarchy;
    std::filesystem::path root;  // manifest directory; set by load(), used by resolve()

    static Manifest load(const std::filesystem::path& path);
    // Writes manifest.json at `path` and, when a hierarchy is attached,
    // the hierarchy file at its relative location.
    void save(const std::filesystem::path& path) const;

    std::filesystem::path resolve(const std::string& relative) const { return root / relative; }
    std::vector<const ManifestEntry*> split_entries(Split s) const;
    const ManifestEntry& find(const std::string& video_id) const;  // DataError if absent
};

// Index of encoded feature vectors (index.json next to the .tbnf files):
//   { "format": "tben-features", "version": 1, "pipeline": ..., "dim": ...,
//     "entries": { video_id: { "file": relative path, "encode_ns": optional } } }
struct FeatureIndexEntry {
    std::string file;
    std::optional<std::int64_t> encode_ns;
};

struct FeatureSet {
    std::string pipeline;
    std::size_t dim = 0;
    std::map<std::string, FeatureIndexEntry> entries;  // keyed (and serialized) by id
    std::filesystem::path root;

    static FeatureSet load(const std::filesystem::path& index_path);
    void save(const std::filesystem::path& index_path) const;

    // Reads the rank-1 tensor for one video; checks length against dim.
    std::vector<double> load_vector(const std::string& video_id) const;
};

}  // namespace tben

#endif  // TBEN_MANIFEST_HPP
