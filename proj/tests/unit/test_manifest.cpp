#include <doctest.h>

#include <fstream>
#include <vector>

#include "tben/manifest.hpp"
#include "tben/tensor.hpp"

#include "../testutil.hpp"

using tben::Axis;
using tben::FeatureIndexEntry;
using tben::FeatureSet;
using tben::Hierarchy;
using tben::Manifest;
using tben::ManifestEntry;
using tben::Split;
using tben::Tensor;
using testutil::TempDir;

namespace {

void write_seq(const std::filesystem::path& p, double fill) {
    tben::write_tensor(Tensor({2, 3}, {Axis::T, Axis::C}, std::vector<double>(6, fill)), p);
}

ManifestEntry entry(const std::string& id, Split split, int flat) {
    ManifestEntry e;
    e.video_id = id;
    e.split = split;
    e.flat_label = flat;
    e.modalities["rgb"] = id + ".tbnf";
    return e;
}

}  // namespace

TEST_CASE("split names round trip") {
    CHECK(tben::parse_split("train") == Split::Train);
    CHECK(tben::parse_split("val") == Split::Val);
    CHECK(tben::parse_split("test") == Split::Test);
    for (auto s : {Split::Train, Split::Val, Split::Test}) {
        CHECK(tben::parse_split(tben::split_name(s)) == s);
    }
    CHECK_THROWS_AS(tben::parse_split("validation"), tben::ConfigError);
    CHECK_THROWS_AS(tben::parse_split(""), tben::ConfigError);
}

TEST_CASE("manifest round trip with flat labels") {
    TempDir dir;
    write_seq(dir / "a.tbnf", 1.0);
    write_seq(dir / "b.tbnf", 2.0);

    Manifest m;
    m.entries.push_back(entry("a", Split::Train, 0));
    m.entries.push_back(entry("b", Split::Test, 1));
    m.save(dir / "manifest.json");

    Manifest back = Manifest::load(dir / "manifest.json");
    REQUIRE(back.entries.size() == 2);
    CHECK(back.entries[0].video_id == "a");
    CHECK(back.entries[0].split == Split::Train);
    CHECK(back.entries[0].flat_label == 0);
    CHECK_FALSE(back.entries[0].child_label.has_value());
    CHECK(back.entries[1].modalities.at("rgb") == "b.tbnf");
    CHECK_FALSE(back.hierarchy.has_value());

    CHECK(back.resolve("a.tbnf") == dir / "a.tbnf");
    CHECK(back.split_entries(Split::Train).size() == 1);
    CHECK(back.split_entries(Split::Val).empty());
    CHECK(back.find("b").video_id == "b");
    CHECK_THROWS_AS(back.find("zz"), tben::DataError);
}

TEST_CASE("manifest round trip with a hierarchy") {
    TempDir dir;
    write_seq(dir / "a.tbnf", 1.0);
    write_seq(dir / "b.tbnf", 2.0);

    Manifest m;
    ManifestEntry a = entry("a", Split::Train, 0);
    a.flat_label.reset();
    a.parent_label = 0;
    a.child_label = 1;
    ManifestEntry b = entry("b", Split::Test, 0);
    b.flat_label.reset();
    b.parent_label = 1;
    b.child_label = 2;
    m.entries = {a, b};
    m.hierarchy = Hierarchy(2, {0, 0, 1});
    m.save(dir / "manifest.json");

    CHECK(std::filesystem::exists(dir / "hierarchy.json"));
    Manifest back = Manifest::load(dir / "manifest.json");
    REQUIRE(back.hierarchy.has_value());
    CHECK(back.hierarchy->num_children() == 3);
    CHECK(back.entries[0].child_label == 1);
    CHECK(back.entries[0].parent_label == 0);
}

TEST_CASE("manifest load rejects inconsistent input") {
    TempDir dir;
    write_seq(dir / "a.tbnf", 1.0);

    Manifest m;
    m.entries.push_back(entry("a", Split::Train, 0));

    SUBCASE("duplicate ids") {
        m.entries.push_back(entry("a", Split::Val, 1));
        m.save(dir / "manifest.json");
        CHECK_THROWS_AS(Manifest::load(dir / "manifest.json"), tben::DataError);
    }

    SUBCASE("missing tensor file") {
        m.entries.push_back(entry("ghost", Split::Val, 1));
        m.save(dir / "manifest.json");
        CHECK_THROWS_AS(Manifest::load(dir / "manifest.json"), tben::DataError);
    }

    SUBCASE("parent label disagrees with the hierarchy") {
        m.entries[0].flat_label.reset();
        m.entries[0].parent_label = 1;  // hierarchy says child 0 belongs to parent 0
        m.entries[0].child_label = 0;
        m.hierarchy = Hierarchy(2, {0, 1});
        m.save(dir / "manifest.json");
        CHECK_THROWS_AS(Manifest::load(dir / "manifest.json"), tben::LabelError);
    }

    SUBCASE("child label out of range") {
        m.entries[0].flat_label.reset();
        m.entries[0].parent_label = 0;
        m.entries[0].child_label = 7;
        m.hierarchy = Hierarchy(2, {0, 1});
        m.save(dir / "manifest.json");
        CHECK_THROWS_AS(Manifest::load(dir / "manifest.json"), tben::LabelError);
    }
}

TEST_CASE("manifest load rejects malformed files") {
    TempDir dir;
    CHECK_THROWS_AS(Manifest::load(dir / "none.json"), tben::IoError);

    std::ofstream(dir / "bad.json") << "{\"format\":\"something-else\",\"version\":1}";
    CHECK_THROWS_AS(Manifest::load(dir / "bad.json"), tben::FormatError);

    std::ofstream(dir / "oldver.json") << "{\"format\":\"tben-manifest\",\"version\":9}";
    CHECK_THROWS_AS(Manifest::load(dir / "oldver.json"), tben::FormatError);

    std::ofstream(dir / "trunc.json") << "{\"format\":\"tben-manifest\",";
    CHECK_THROWS_AS(Manifest::load(dir / "trunc.json"), tben::FormatError);
}

TEST_CASE("feature index round trip") {
    TempDir dir;
    tben::write_tensor(Tensor({3}, {Axis::C}, {1, 2, 3}), dir / "a.tbnf");
    tben::write_tensor(Tensor({3}, {Axis::C}, {4, 5, 6}), dir / "b.tbnf");

    FeatureSet fs;
    fs.pipeline = "stap";
    fs.dim = 3;
    fs.root = dir.path();
    fs.entries["a"] = FeatureIndexEntry{"a.tbnf", std::nullopt};
    fs.entries["b"] = FeatureIndexEntry{"b.tbnf", 1234567};
    fs.save(dir / "index.json");

    FeatureSet back = FeatureSet::load(dir / "index.json");
    CHECK(back.pipeline == "stap");
    CHECK(back.dim == 3);
    REQUIRE(back.entries.size() == 2);
    CHECK_FALSE(back.entries["a"].encode_ns.has_value());
    CHECK(back.entries["b"].encode_ns == 1234567);
    CHECK(back.load_vector("a") == std::vector<double>{1, 2, 3});

    // The directory itself resolves to its index.json.
    FeatureSet from_dir = FeatureSet::load(dir.path());
    CHECK(from_dir.entries.size() == 2);

    CHECK_THROWS_AS(back.load_vector("zz"), tben::DataError);
}

TEST_CASE("feature index validates tensors against the declared dim") {
    TempDir dir;
    tben::write_tensor(Tensor({4}, {Axis::C}, {1, 2, 3, 4}), dir / "long.tbnf");
    tben::write_tensor(Tensor({2, 2}, {Axis::T, Axis::C}, {1, 2, 3, 4}), dir / "mat.tbnf");

    FeatureSet fs;
    fs.pipeline = "stap";
    fs.dim = 3;
    fs.root = dir.path();
    fs.entries["long"] = FeatureIndexEntry{"long.tbnf", std::nullopt};
    fs.entries["mat"] = FeatureIndexEntry{"mat.tbnf", std::nullopt};
    fs.save(dir / "index.json");

    FeatureSet back = FeatureSet::load(dir / "index.json");
    CHECK_THROWS_AS(back.load_vector("long"), tben::DataError);  // wrong length
    CHECK_THROWS_AS(back.load_vector("mat"), tben::DataError);   // wrong rank

    FeatureSet missing;
    missing.pipeline = "stap";
    missing.dim = 3;
    missing.entries["ghost"] = FeatureIndexEntry{"ghost.tbnf", std::nullopt};
    missing.save(dir / "bad_index.json");
    CHECK_THROWS_AS(FeatureSet::load(dir / "bad_index.json"), tben::DataError);
}
