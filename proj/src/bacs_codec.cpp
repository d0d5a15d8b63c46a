#include "sgl/bacs_codec.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>

#include "sgl/errors.hpp"
#include "sgl/util.hpp"

namespace sgl {

namespace {

constexpr std::array<std::string_view, 10> kKindNames = {
    "c", "xp", "yp", "ixp", "ixn", "iyp", "iyn", "w", "h", "imgar"};

std::optional<BacsKind> kind_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kKindNames.size(); ++i) {
        if (kKindNames[i] == name) return static_cast<BacsKind>(i);
    }
    return std::nullopt;
}

int clamp_int(int v, int lo, int hi) {
    return std::min(std::max(v, lo), hi);
}

// Positions 6 and 7 of a relative segment accept either sign kind.
std::string expected_kinds_at(std::size_t pos_in_segment, BacsMode mode) {
    switch (pos_in_segment) {
        case 0:
        case 5: return "c";
        case 1: return "xp";
        case 2: return "yp";
        case 3:
        case 8: return "w";
        case 4:
        case 9: return "h";
        case 6: return mode == BacsMode::relative ? "ixp|ixn" : "xp";
        case 7: return mode == BacsMode::relative ? "iyp|iyn" : "yp";
        default: return "";
    }
}

bool kind_matches_at(BacsKind kind, std::size_t pos_in_segment, BacsMode mode) {
    switch (pos_in_segment) {
        case 0:
        case 5: return kind == BacsKind::c;
        case 1: return kind == BacsKind::xp;
        case 2: return kind == BacsKind::yp;
        case 3:
        case 8: return kind == BacsKind::w;
        case 4:
        case 9: return kind == BacsKind::h;
        case 6:
            return mode == BacsMode::relative ? (kind == BacsKind::ixp || kind == BacsKind::ixn)
                                              : kind == BacsKind::xp;
        case 7:
            return mode == BacsMode::relative ? (kind == BacsKind::iyp || kind == BacsKind::iyn)
                                              : kind == BacsKind::yp;
        default: return false;
    }
}

BacsToken int_token(BacsKind kind, int value) {
    return BacsToken{kind, value, {}};
}

BacsToken class_token(const std::string& label) {
    return BacsToken{BacsKind::c, 0, label};
}

}  // namespace

std::string_view kind_name(BacsKind kind) {
    return kKindNames[static_cast<std::size_t>(kind)];
}

int ArQuantizer::quantize(double ar) const {
    if (interval <= 0.0 || bins < 1) {
        throw DomainError("aspect-ratio quantizer needs a positive interval and at least one bin");
    }
    if (!(ar > 0.0)) {
        throw DomainError("aspect ratio must be positive, got " + std::to_string(ar));
    }
    const double top = minimum + interval * (bins - 1);
    const double clamped = std::min(std::max(ar, minimum), top);
    return static_cast<int>(round_half_up((clamped - minimum) / interval));
}

double ArQuantizer::dequantize(int index) const {
    return minimum + interval * index;
}

GridDims grid_dims_for_ratio(double ar, int grid_max) {
    GridDims dims;
    if (ar >= 1.0) {
        dims.w = grid_max;
        dims.h = static_cast<int>(std::max<long long>(1, round_half_up(grid_max / ar)));
    } else {
        dims.h = grid_max;
        dims.w = static_cast<int>(std::max<long long>(1, round_half_up(grid_max * ar)));
    }
    dims.w = std::min(dims.w, grid_max);
    dims.h = std::min(dims.h, grid_max);
    return dims;
}

std::vector<BacsToken> BacsSequence::to_tokens() const {
    std::vector<BacsToken> out;
    out.reserve(segments.size() * 10 + (imgar ? 1 : 0));
    if (imgar) out.push_back(*imgar);
    for (const auto& seg : segments) {
        out.insert(out.end(), seg.tokens.begin(), seg.tokens.end());
    }
    return out;
}

QuantizedLayout quantize_layout(const GroundedSample& sample, int grid_max, const ArQuantizer& q) {
    const SemanticLayout& layout = sample.layout;
    QuantizedLayout ql;
    ql.ar_index = q.quantize(static_cast<double>(layout.image_w) / layout.image_h);
    const GridDims dims = grid_dims_for_ratio(q.dequantize(ql.ar_index), grid_max);
    ql.grid_w = dims.w;
    ql.grid_h = dims.h;
    const double sx = static_cast<double>(ql.grid_w) / layout.image_w;
    const double sy = static_cast<double>(ql.grid_h) / layout.image_h;
    for (const auto& [node_id, box] : layout.boxes) {
        GridBox g;
        g.x = clamp_int(static_cast<int>(round_half_up(box.x * sx)), 0, ql.grid_w - 1);
        g.y = clamp_int(static_cast<int>(round_half_up(box.y * sy)), 0, ql.grid_h - 1);
        g.w = clamp_int(static_cast<int>(round_half_up(box.w * sx)), 1, ql.grid_w);
        g.h = clamp_int(static_cast<int>(round_half_up(box.h * sy)), 1, ql.grid_h);
        ql.boxes[node_id] = QuantizedBox{sample.graph.node(node_id).class_label, g};
    }
    return ql;
}

BacsSequence encode_bacs(const QuantizedLayout& ql, const NodeSequence& nodes,
                         const SceneGraph& graph, BacsMode mode, bool include_imgar) {
    BacsSequence seq;
    if (include_imgar) seq.imgar = int_token(BacsKind::imgar, ql.ar_index);
    seq.segments.reserve(nodes.size());
    for (const auto& pair : nodes.pairs) {
        for (int node_id : {pair.subject_id, pair.object_id}) {
            if (!graph.has_node(node_id)) {
                throw ConsistencyError("node sequence references node " + std::to_string(node_id) +
                                       " absent from the graph");
            }
            if (!ql.boxes.count(node_id)) {
                throw ConsistencyError("node " + std::to_string(node_id) +
                                       " has no box in the quantized layout");
            }
        }
        const QuantizedBox& sub = ql.boxes.at(pair.subject_id);
        const QuantizedBox& obj = ql.boxes.at(pair.object_id);
        BacsSegment seg;
        seg.tokens[0] = class_token(sub.class_label);
        seg.tokens[1] = int_token(BacsKind::xp, sub.box.x);
        seg.tokens[2] = int_token(BacsKind::yp, sub.box.y);
        seg.tokens[3] = int_token(BacsKind::w, sub.box.w);
        seg.tokens[4] = int_token(BacsKind::h, sub.box.h);
        seg.tokens[5] = class_token(obj.class_label);
        if (mode == BacsMode::relative) {
            const int dx = obj.box.x - sub.box.x;
            const int dy = obj.box.y - sub.box.y;
            seg.tokens[6] = dx >= 0 ? int_token(BacsKind::ixp, dx) : int_token(BacsKind::ixn, -dx);
            seg.tokens[7] = dy >= 0 ? int_token(BacsKind::iyp, dy) : int_token(BacsKind::iyn, -dy);
        } else {
            seg.tokens[6] = int_token(BacsKind::xp, obj.box.x);
            seg.tokens[7] = int_token(BacsKind::yp, obj.box.y);
        }
        seg.tokens[8] = int_token(BacsKind::w, obj.box.w);
        seg.tokens[9] = int_token(BacsKind::h, obj.box.h);
        seq.segments.push_back(std::move(seg));
    }
    return seq;
}

std::string serialize_token(const BacsToken& token) {
    std::string out(kind_name(token.kind));
    out += '_';
    if (token.kind == BacsKind::c) {
        out += token.class_label;
    } else {
        out += std::to_string(token.value);
    }
    return out;
}

std::string serialize_bacs(const BacsSequence& seq) {
    std::vector<std::string> parts;
    parts.reserve(seq.segments.size() * 10 + 1);
    for (const auto& token : seq.to_tokens()) parts.push_back(serialize_token(token));
    return join(parts, " ");
}

BacsToken parse_bacs_token(std::string_view text, int grid_max, int ar_bins) {
    const std::size_t sep = text.find('_');
    if (sep == std::string_view::npos || sep == 0 || sep + 1 >= text.size()) {
        throw ParseError("token '" + std::string(text) + "' is not of the form kind_value");
    }
    const auto kind = kind_from_name(text.substr(0, sep));
    if (!kind) {
        throw ParseError("unknown token kind in '" + std::string(text) + "'");
    }
    const std::string_view payload = text.substr(sep + 1);
    if (*kind == BacsKind::c) {
        if (!is_token(payload)) {
            throw ParseError("class token '" + std::string(text) + "' has an invalid label");
        }
        return class_token(std::string(payload));
    }
    int value = 0;
    auto [ptr, ec] = std::from_chars(payload.data(), payload.data() + payload.size(), value);
    if (ec != std::errc{} || ptr != payload.data() + payload.size()) {
        throw ParseError("token '" + std::string(text) + "' has a non-integer value");
    }
    int lo = 0;
    int hi = 0;
    switch (*kind) {
        case BacsKind::xp:
        case BacsKind::yp:
        case BacsKind::ixp:
        case BacsKind::iyp:
            lo = 0;
            hi = grid_max - 1;
            break;
        case BacsKind::ixn:
        case BacsKind::iyn:
            lo = 1;
            hi = grid_max - 1;
            break;
        case BacsKind::w:
        case BacsKind::h:
            lo = 1;
            hi = grid_max;
            break;
        case BacsKind::imgar:
            lo = 0;
            hi = ar_bins - 1;
            break;
        default: break;
    }
    if (value < lo || value > hi) {
        throw ParseError("token '" + std::string(text) + "' value out of range [" +
                         std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    return int_token(*kind, value);
}

std::vector<BacsToken> parse_bacs_tokens(std::string_view line, int grid_max, int ar_bins) {
    std::vector<BacsToken> tokens;
    for (const auto& word : split_whitespace(line)) {
        tokens.push_back(parse_bacs_token(word, grid_max, ar_bins));
    }
    return tokens;
}

std::vector<std::pair<std::size_t, std::size_t>> verify_alignment(std::span<const BacsToken> tokens,
                                                                  std::size_t expected_k,
                                                                  BacsMode mode,
                                                                  bool expect_imgar) {
    const std::size_t offset = expect_imgar ? 1 : 0;
    const std::size_t expected_count = 10 * expected_k + offset;
    if (tokens.size() != expected_count) {
        const std::size_t position = std::min(tokens.size(), expected_count);
        throw AlignmentError(position, "token count " + std::to_string(expected_count),
                             "expected " + std::to_string(expected_count) + " tokens, got " +
                                 std::to_string(tokens.size()));
    }
    if (expect_imgar && tokens[0].kind != BacsKind::imgar) {
        throw AlignmentError(0, "imgar",
                             "expected leading imgar token, got " +
                                 std::string(kind_name(tokens[0].kind)) + " at position 0");
    }
    std::vector<std::pair<std::size_t, std::size_t>> boundaries;
    boundaries.reserve(expected_k);
    for (std::size_t k = 0; k < expected_k; ++k) {
        const std::size_t start = offset + 10 * k;
        for (std::size_t j = 0; j < 10; ++j) {
            const BacsToken& token = tokens[start + j];
            if (!kind_matches_at(token.kind, j, mode)) {
                const std::string expected = expected_kinds_at(j, mode);
                throw AlignmentError(start + j, expected,
                                     "segment " + std::to_string(k) + ": expected " + expected +
                                         " at position " + std::to_string(start + j) + ", got " +
                                         std::string(kind_name(token.kind)));
            }
        }
        boundaries.emplace_back(start, start + 10);
    }
    return boundaries;
}

BacsSequence bacs_from_tokens(std::span<const BacsToken> tokens, std::size_t expected_k,
                              BacsMode mode, bool expect_imgar) {
    const auto boundaries = verify_alignment(tokens, expected_k, mode, expect_imgar);
    BacsSequence seq;
    if (expect_imgar) seq.imgar = tokens[0];
    seq.segments.reserve(boundaries.size());
    for (const auto& [start, end] : boundaries) {
        BacsSegment seg;
        std::copy(tokens.begin() + static_cast<std::ptrdiff_t>(start),
                  tokens.begin() + static_cast<std::ptrdiff_t>(end), seg.tokens.begin());
        seq.segments.push_back(std::move(seg));
    }
    return seq;
}

QuantizedBox merge_boxes(const std::vector<QuantizedBox>& candidates) {
    if (candidates.empty()) {
        throw DomainError("merge_boxes requires at least one candidate");
    }
    const bool same_class = std::all_of(candidates.begin(), candidates.end(), [&](const auto& c) {
        return c.class_label == candidates.front().class_label;
    });
    if (same_class) {
        const double n = static_cast<double>(candidates.size());
        double sx = 0, sy = 0, sw = 0, sh = 0;
        for (const auto& c : candidates) {
            sx += c.box.x;
            sy += c.box.y;
            sw += c.box.w;
            sh += c.box.h;
        }
        GridBox merged{static_cast<int>(round_half_up(sx / n)), static_cast<int>(round_half_up(sy / n)),
                       static_cast<int>(round_half_up(sw / n)), static_cast<int>(round_half_up(sh / n))};
        return QuantizedBox{candidates.front().class_label, merged};
    }
    // Distinct classes: pick the lower-median candidate by area.
    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return candidates[a].box.w * candidates[a].box.h < candidates[b].box.w * candidates[b].box.h;
    });
    return candidates[order[(order.size() - 1) / 2]];
}

QuantizedLayout execute_bacs(const BacsSequence& seq, const NodeSequence& nodes, int grid_max,
                             const ArQuantizer& q) {
    if (nodes.size() != seq.segments.size()) {
        throw ConsistencyError("node sequence has " + std::to_string(nodes.size()) +
                               " pairs but the sequence has " + std::to_string(seq.segments.size()) +
                               " segments");
    }
    QuantizedLayout out;
    if (seq.imgar) {
        out.ar_index = seq.imgar->value;
        const GridDims dims = grid_dims_for_ratio(q.dequantize(out.ar_index), grid_max);
        out.grid_w = dims.w;
        out.grid_h = dims.h;
    } else {
        out.grid_w = grid_max;
        out.grid_h = grid_max;
        out.ar_index = q.quantize(1.0);
    }

    std::map<int, std::vector<QuantizedBox>> candidates;
    for (std::size_t k = 0; k < seq.segments.size(); ++k) {
        const auto& t = seq.segments[k].tokens;
        const NodePair& pair = nodes.pairs[k];

        GridBox sub;
        sub.x = clamp_int(t[1].value, 0, out.grid_w - 1);
        sub.y = clamp_int(t[2].value, 0, out.grid_h - 1);
        sub.w = clamp_int(t[3].value, 1, out.grid_w);
        sub.h = clamp_int(t[4].value, 1, out.grid_h);
        candidates[pair.subject_id].push_back(QuantizedBox{t[0].class_label, sub});

        // Object corner derives from the raw subject corner, before clamping.
        int ox = 0;
        int oy = 0;
        if (t[6].kind == BacsKind::xp) {
            ox = t[6].value;
        } else {
            ox = t[1].value + (t[6].kind == BacsKind::ixp ? t[6].value : -t[6].value);
        }
        if (t[7].kind == BacsKind::yp) {
            oy = t[7].value;
        } else {
            oy = t[2].value + (t[7].kind == BacsKind::iyp ? t[7].value : -t[7].value);
        }
        GridBox obj;
        obj.x = clamp_int(ox, 0, out.grid_w - 1);
        obj.y = clamp_int(oy, 0, out.grid_h - 1);
        obj.w = clamp_int(t[8].value, 1, out.grid_w);
        obj.h = clamp_int(t[9].value, 1, out.grid_h);
        candidates[pair.object_id].push_back(QuantizedBox{t[5].class_label, obj});
    }
    for (const auto& [node_id, group] : candidates) {
        out.boxes[node_id] = merge_boxes(group);
    }
    return out;
}

}  // namespace sgl
