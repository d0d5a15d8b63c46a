#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sgl/sf_codec.hpp"
#include "sgl/types.hpp"

namespace sgl {

// Token kinds, in vocabulary order. `c` sets a box class; xp/yp place the
// subject corner absolutely; ixp/ixn/iyp/iyn move the object corner
// relative to the subject; w/h set sizes; imgar selects the layout
// aspect-ratio bin.
enum class BacsKind { c, xp, yp, ixp, ixn, iyp, iyn, w, h, imgar };

std::string_view kind_name(BacsKind kind);

struct BacsToken {
    BacsKind kind = BacsKind::c;
    int value = 0;            // all kinds except c
    std::string class_label;  // kind c only

    friend bool operator==(const BacsToken&, const BacsToken&) = default;
};

// Grid-cell box; corner in [0, grid-1], size in [1, grid] per axis.
struct GridBox {
    int x = 0;
    int y = 0;
    int w = 1;
    int h = 1;

    friend bool operator==(const GridBox&, const GridBox&) = default;
};

struct QuantizedBox {
    std::string class_label;
    GridBox box;

    friend bool operator==(const QuantizedBox&, const QuantizedBox&) = default;
};

// Layout on an integer grid whose long side is grid_max. Grid dimensions
// are a pure function of ar_index (see grid_dims_for_ratio), which is what
// makes encode -> execute round trips exact.
struct QuantizedLayout {
    int grid_w = 0;
    int grid_h = 0;
    int ar_index = 0;
    std::map<int, QuantizedBox> boxes;

    friend bool operator==(const QuantizedLayout&, const QuantizedLayout&) = default;
};

// Uniform aspect-ratio quantizer; defaults cover [0.5, 2.0] in 0.05 steps.
struct ArQuantizer {
    double interval = 0.05;
    double minimum = 0.5;
    int bins = 31;

    // round((clamp(ar, minimum, top) - minimum) / interval), half-up.
    // Throws DomainError for ar <= 0.
    int quantize(double ar) const;

    // Bin center: minimum + interval * index.
    double dequantize(int index) const;
};

struct GridDims {
    int w = 0;
    int h = 0;
};

// Long side equals grid_max; the short side is the half-up-rounded
// proportional length, floored at 1.
GridDims grid_dims_for_ratio(double ar, int grid_max);

enum class BacsMode { relative, absolute };

struct CodecConfig {
    int grid_max = 40;
    ArQuantizer ar_quantizer;
    BacsMode mode = BacsMode::relative;
    bool include_imgar = false;
};

struct BacsSegment {
    std::array<BacsToken, 10> tokens;

    friend bool operator==(const BacsSegment&, const BacsSegment&) = default;
};

struct BacsSequence {
    std::optional<BacsToken> imgar;
    std::vector<BacsSegment> segments;

    std::vector<BacsToken> to_tokens() const;
    friend bool operator==(const BacsSequence&, const BacsSequence&) = default;
};

// Quantizes a sample's layout. Classes come from the paired graph; boxes
// are scaled by (grid_w/image_w, grid_h/image_h) with half-up corner and
// size rounding, sizes floored at 1, then clamped into the grid.
QuantizedLayout quantize_layout(const GroundedSample& sample, int grid_max, const ArQuantizer& q);

// One 10-token segment per node pair, in node-sequence order. The subject
// box is absolute; the object corner is a signed offset from the subject
// in relative mode (zero offsets canonicalize to ixp_0/iyp_0) and absolute
// in absolute mode. imgar is prepended when include_imgar is set.
// A pair whose node is missing from the layout is a ConsistencyError.
BacsSequence encode_bacs(const QuantizedLayout& ql, const NodeSequence& nodes,
                         const SceneGraph& graph, BacsMode mode, bool include_imgar);

// Text form `kind_value`, e.g. c_person, xp_12, ixn_3, imgar_10.
std::string serialize_token(const BacsToken& token);
std::string serialize_bacs(const BacsSequence& seq);

// Vocabulary-checked parse: value ranges depend on grid_max and ar_bins.
BacsToken parse_bacs_token(std::string_view text, int grid_max, int ar_bins);
std::vector<BacsToken> parse_bacs_tokens(std::string_view line, int grid_max, int ar_bins);

// Sequential type check of a token stream: the count must be 10*expected_k
// (+1 with imgar), imgar may appear only as the leading token and only when
// expected, and each position's kind must match the segment pattern for the
// mode. Returns the [begin, end) token range of each segment; throws
// AlignmentError carrying the first offending position and the kinds
// accepted there.
std::vector<std::pair<std::size_t, std::size_t>> verify_alignment(std::span<const BacsToken> tokens,
                                                                  std::size_t expected_k,
                                                                  BacsMode mode, bool expect_imgar);

// verify_alignment + assembly into a structured sequence.
BacsSequence bacs_from_tokens(std::span<const BacsToken> tokens, std::size_t expected_k,
                              BacsMode mode, bool expect_imgar);

// Merges candidate boxes for one node: same class everywhere -> half-up
// componentwise mean; otherwise the candidate with the lower-median area.
QuantizedBox merge_boxes(const std::vector<QuantizedBox>& candidates);

// Executes the segments into a restored layout. Grid dimensions come from
// the imgar token when present, else the grid is square. Materialized
// corners are clamped into the grid and sizes floored at 1; boxes mapping
// to the same node id are merged with merge_boxes.
QuantizedLayout execute_bacs(const BacsSequence& seq, const NodeSequence& nodes, int grid_max,
                             const ArQuantizer& q);

}  // namespace sgl
