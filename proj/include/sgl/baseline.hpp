#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sgl/bacs_codec.hpp"
#include "sgl/sf_codec.hpp"

namespace sgl {

// Running means of the geometry observed for one key (triplet, predicate
// or global): absolute subject box, signed object corner offset, object
// size. All values in grid cells.
struct GeometryStats {
    long long count = 0;
    std::array<double, 4> mean_subject{};       // x, y, w, h
    std::array<double, 2> mean_object_delta{};  // dx, dy
    std::array<double, 2> mean_object_size{};   // w, h

    void observe(const std::array<double, 4>& subject, const std::array<double, 2>& delta,
                 const std::array<double, 2>& size);

    friend bool operator==(const GeometryStats&, const GeometryStats&) = default;
};

// Per-triplet geometry with predicate-level and global backoff.
// Triplet keys are the three tokens joined by single spaces.
struct BaselineTable {
    int grid_max = 40;
    std::map<std::string, GeometryStats> by_triplet;
    std::map<std::string, GeometryStats> by_predicate;
    std::optional<GeometryStats> global;
    std::optional<int> modal_ar_index;

    friend bool operator==(const BaselineTable&, const BaselineTable&) = default;
};

// Folds aligned (SF, BACS) pairs into a table. Object offsets are taken
// from the relative tokens directly, or recomputed from absolute object
// corners, so either encoding mode trains the same table. A pair whose
// segment count differs from its triplet count is an AlignmentError.
BaselineTable train_baseline(const std::vector<std::pair<SfSequence, BacsSequence>>& pairs,
                             int grid_max);

// Translates an SF sequence into a relative-mode BACS sequence using the
// closest statistics: exact triplet, then predicate, then global. Means
// are rounded half-up and clamped into the vocabulary ranges, so output
// always passes verify_alignment. Throws UntrainedError on an empty table
// (or when imgar is requested but was never observed).
BacsSequence predict_baseline(const SfSequence& sf, const BaselineTable& table,
                              bool include_imgar);

// Versioned JSON serialization; load(save(t)) == t exactly.
std::string table_to_json(const BaselineTable& table);
BaselineTable table_from_json(const std::string& text);
void save_table(const BaselineTable& table, const std::filesystem::path& path);
BaselineTable load_table(const std::filesystem::path& path);

}  // namespace sgl
