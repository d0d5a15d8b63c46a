#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sgl/bacs_codec.hpp"
#include "sgl/types.hpp"

namespace sgl {

// Axis-aligned box with real-valued xmin/ymin corner and positive size.
struct RealBox {
    double x = 0;
    double y = 0;
    double w = 1;
    double h = 1;

    friend bool operator==(const RealBox&, const RealBox&) = default;
};

double iou(const RealBox& a, const RealBox& b);

// One relationship's visual incarnation: the class-labeled subject and
// object boxes.
struct VisualRelationship {
    std::string subject_class;
    RealBox subject_box;
    std::string object_class;
    RealBox object_box;
};

// A layout viewed as its K visual relationships, index-aligned with the
// scene graph's relationship list.
struct VisualRelationshipSet {
    std::vector<VisualRelationship> relationships;

    std::size_t size() const { return relationships.size(); }
};

struct ShiftVector {
    double dx = 0;
    double dy = 0;
};

struct SleuConfig {
    double t_iou = 0.5;
    int max_order = 3;
    // One weight per order; empty means uniform 1/max_order.
    std::vector<double> weights;

    std::vector<double> effective_weights() const;
};

struct SleuResult {
    double score = 0;
    std::vector<double> per_order;  // p_n for n = 1..min(max_order, K)
    int chosen_reference = 0;       // 1-based index into the reference list
};

// Unigram accuracy against a single reference. Relationship k matches when
// both classes agree and, after shifting the predicted pair by the
// subject-corner delta (reference minus prediction), both IoUs reach t_iou.
// Prediction and reference must have equal K (alignment error otherwise).
double unigram_accuracy(const VisualRelationshipSet& pred, const VisualRelationshipSet& ref,
                        double t_iou);

// n-gram accuracy against a single reference: the matched fraction of all
// C(K, n) relationship subsets, judged on subjects only after aligning the
// subset's corner centroids. Requires 2 <= n <= K.
double ngram_accuracy(const VisualRelationshipSet& pred, const VisualRelationshipSet& ref, int n,
                      double t_iou);

// Weighted geometric mean of per-order accuracies; any zero accuracy pins
// the result to zero. Weights are renormalized to sum to 1.
double combine_accuracies(std::span<const double> accuracies, std::span<const double> weights);

// Combined accuracy against each reference, maximized over references.
// Orders above K are excluded and the remaining weights renormalized.
SleuResult sleu_score(const VisualRelationshipSet& pred,
                      const std::vector<VisualRelationshipSet>& refs, const SleuConfig& config);

struct LabeledRealBox {
    std::string class_label;
    RealBox box;
};

// Expands a graph's relationship list into visual relationships using the
// given per-node boxes; a missing endpoint box is a ConsistencyError.
VisualRelationshipSet layout_to_visual_relationships(const SceneGraph& graph,
                                                     const std::map<int, LabeledRealBox>& boxes);

// Grid boxes pass through as coordinate units, unscaled.
VisualRelationshipSet layout_to_visual_relationships(const SceneGraph& graph,
                                                     const QuantizedLayout& ql);

std::map<int, LabeledRealBox> to_real_boxes(const QuantizedLayout& ql);

// Arithmetic mean of per-sample scores; empty input is a DomainError.
std::pair<double, std::vector<SleuResult>> mean_sleu(
    const std::vector<std::pair<VisualRelationshipSet, std::vector<VisualRelationshipSet>>>& pairs,
    const SleuConfig& config);

}  // namespace sgl
