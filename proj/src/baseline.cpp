#include "sgl/baseline.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sgl/errors.hpp"
#include "sgl/util.hpp"

namespace sgl {

namespace {

using nlohmann::json;

constexpr const char* kTableFormat = "sgl-baseline-table";
constexpr int kTableVersion = 1;

std::string triplet_key(const SfTriplet& t) {
    return t.subject_class + " " + t.predicate + " " + t.object_class;
}

int clamp_round(double v, int lo, int hi) {
    return static_cast<int>(std::min<long long>(hi, std::max<long long>(lo, round_half_up(v))));
}

json stats_to_json(const GeometryStats& s) {
    return json{{"count", s.count},
                {"mean_subject", s.mean_subject},
                {"mean_object_delta", s.mean_object_delta},
                {"mean_object_size", s.mean_object_size}};
}

GeometryStats stats_from_json(const json& j) {
    GeometryStats s;
    try {
        s.count = j.at("count").get<long long>();
        s.mean_subject = j.at("mean_subject").get<std::array<double, 4>>();
        s.mean_object_delta = j.at("mean_object_delta").get<std::array<double, 2>>();
        s.mean_object_size = j.at("mean_object_size").get<std::array<double, 2>>();
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed geometry stats: ") + e.what());
    }
    if (s.count < 1) throw FormatError("geometry stats must have count >= 1");
    return s;
}

}  // namespace

void GeometryStats::observe(const std::array<double, 4>& subject,
                            const std::array<double, 2>& delta,
                            const std::array<double, 2>& size) {
    ++count;
    const double n = static_cast<double>(count);
    for (std::size_t i = 0; i < 4; ++i) mean_subject[i] += (subject[i] - mean_subject[i]) / n;
    for (std::size_t i = 0; i < 2; ++i) {
        mean_object_delta[i] += (delta[i] - mean_object_delta[i]) / n;
        mean_object_size[i] += (size[i] - mean_object_size[i]) / n;
    }
}

BaselineTable train_baseline(const std::vector<std::pair<SfSequence, BacsSequence>>& pairs,
                             int grid_max) {
    BaselineTable table;
    table.grid_max = grid_max;
    std::map<int, long long> ar_counts;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        const auto& [sf, bacs] = pairs[p];
        if (sf.size() != bacs.segments.size()) {
            throw AlignmentError(10 * std::min(sf.size(), bacs.segments.size()),
                                 "matching segment count",
                                 "pair " + std::to_string(p) + ": " + std::to_string(sf.size()) +
                                     " triplets vs " + std::to_string(bacs.segments.size()) +
                                     " segments");
        }
        if (bacs.imgar) ++ar_counts[bacs.imgar->value];
        for (std::size_t k = 0; k < sf.size(); ++k) {
            const auto& t = bacs.segments[k].tokens;
            const std::array<double, 4> subject{
                static_cast<double>(t[1].value), static_cast<double>(t[2].value),
                static_cast<double>(t[3].value), static_cast<double>(t[4].value)};
            // Offsets come straight from relative tokens; absolute-mode
            // object corners reduce to the same differences.
            double dx = 0;
            double dy = 0;
            if (t[6].kind == BacsKind::xp) {
                dx = static_cast<double>(t[6].value - t[1].value);
            } else {
                dx = t[6].kind == BacsKind::ixp ? t[6].value : -t[6].value;
            }
            if (t[7].kind == BacsKind::yp) {
                dy = static_cast<double>(t[7].value - t[2].value);
            } else {
                dy = t[7].kind == BacsKind::iyp ? t[7].value : -t[7].value;
            }
            const std::array<double, 2> delta{dx, dy};
            const std::array<double, 2> size{static_cast<double>(t[8].value),
                                             static_cast<double>(t[9].value)};
            table.by_triplet[triplet_key(sf.triplets[k])].observe(subject, delta, size);
            table.by_predicate[sf.triplets[k].predicate].observe(subject, delta, size);
            if (!table.global) table.global.emplace();
            table.global->observe(subject, delta, size);
        }
    }
    long long best = 0;
    for (const auto& [index, count] : ar_counts) {
        if (count > best) {  // ties resolve to the smallest index
            best = count;
            table.modal_ar_index = index;
        }
    }
    return table;
}

BacsSequence predict_baseline(const SfSequence& sf, const BaselineTable& table,
                              bool include_imgar) {
    if (!table.global) {
        throw UntrainedError("baseline table has no training observations");
    }
    const int grid_max = table.grid_max;
    BacsSequence seq;
    if (include_imgar) {
        if (!table.modal_ar_index) {
            throw UntrainedError("imgar requested but no aspect-ratio observations were trained");
        }
        seq.imgar = BacsToken{BacsKind::imgar, *table.modal_ar_index, {}};
    }
    for (const auto& triplet : sf.triplets) {
        const GeometryStats* stats = nullptr;
        if (auto it = table.by_triplet.find(triplet_key(triplet)); it != table.by_triplet.end()) {
            stats = &it->second;
        } else if (auto p = table.by_predicate.find(triplet.predicate);
                   p != table.by_predicate.end()) {
            stats = &p->second;
        } else {
            stats = &*table.global;
        }
        BacsSegment seg;
        seg.tokens[0] = BacsToken{BacsKind::c, 0, triplet.subject_class};
        seg.tokens[1] = BacsToken{BacsKind::xp, clamp_round(stats->mean_subject[0], 0, grid_max - 1), {}};
        seg.tokens[2] = BacsToken{BacsKind::yp, clamp_round(stats->mean_subject[1], 0, grid_max - 1), {}};
        seg.tokens[3] = BacsToken{BacsKind::w, clamp_round(stats->mean_subject[2], 1, grid_max), {}};
        seg.tokens[4] = BacsToken{BacsKind::h, clamp_round(stats->mean_subject[3], 1, grid_max), {}};
        seg.tokens[5] = BacsToken{BacsKind::c, 0, triplet.object_class};
        const int dx = clamp_round(stats->mean_object_delta[0], -(grid_max - 1), grid_max - 1);
        const int dy = clamp_round(stats->mean_object_delta[1], -(grid_max - 1), grid_max - 1);
        seg.tokens[6] = dx >= 0 ? BacsToken{BacsKind::ixp, dx, {}} : BacsToken{BacsKind::ixn, -dx, {}};
        seg.tokens[7] = dy >= 0 ? BacsToken{BacsKind::iyp, dy, {}} : BacsToken{BacsKind::iyn, -dy, {}};
        seg.tokens[8] = BacsToken{BacsKind::w, clamp_round(stats->mean_object_size[0], 1, grid_max), {}};
        seg.tokens[9] = BacsToken{BacsKind::h, clamp_round(stats->mean_object_size[1], 1, grid_max), {}};
        seq.segments.push_back(std::move(seg));
    }
    return seq;
}

std::string table_to_json(const BaselineTable& table) {
    json doc;
    doc["format"] = kTableFormat;
    doc["version"] = kTableVersion;
    doc["grid_max"] = table.grid_max;
    doc["modal_ar_index"] = table.modal_ar_index ? json(*table.modal_ar_index) : json(nullptr);
    doc["global"] = table.global ? stats_to_json(*table.global) : json(nullptr);
    doc["by_predicate"] = json::object();
    for (const auto& [key, stats] : table.by_predicate) doc["by_predicate"][key] = stats_to_json(stats);
    doc["by_triplet"] = json::object();
    for (const auto& [key, stats] : table.by_triplet) doc["by_triplet"][key] = stats_to_json(stats);
    return doc.dump(2) + "\n";
}

BaselineTable table_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw FormatError(std::string("table is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || doc.value("format", "") != kTableFormat) {
        throw FormatError("not a baseline table file (missing format marker)");
    }
    const int version = doc.value("version", -1);
    if (version != kTableVersion) {
        throw FormatError("unsupported table version " + std::to_string(version) + "; expected " +
                          std::to_string(kTableVersion));
    }
    BaselineTable table;
    try {
        table.grid_max = doc.at("grid_max").get<int>();
        if (!doc.at("modal_ar_index").is_null()) {
            table.modal_ar_index = doc.at("modal_ar_index").get<int>();
        }
        if (!doc.at("global").is_null()) {
            table.global = stats_from_json(doc.at("global"));
        }
        for (const auto& [key, value] : doc.at("by_predicate").items()) {
            table.by_predicate[key] = stats_from_json(value);
        }
        for (const auto& [key, value] : doc.at("by_triplet").items()) {
            table.by_triplet[key] = stats_from_json(value);
        }
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed baseline table: ") + e.what());
    }
    return table;
}

void save_table(const BaselineTable& table, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write table file " + path.string());
    out << table_to_json(table);
}

BaselineTable load_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open table file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return table_from_json(buffer.str());
}

}  // namespace sgl
