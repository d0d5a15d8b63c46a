#include "sgl/sleu.hpp"

#include <algorithm>
#include <cmath>

#include "sgl/errors.hpp"

namespace sgl {

namespace {

RealBox shifted(const RealBox& box, const ShiftVector& t) {
    return RealBox{box.x + t.dx, box.y + t.dy, box.w, box.h};
}

void require_aligned(const VisualRelationshipSet& pred, const VisualRelationshipSet& ref) {
    if (pred.size() != ref.size()) {
        throw ConsistencyError("prediction has " + std::to_string(pred.size()) +
                               " relationships, reference has " + std::to_string(ref.size()));
    }
    if (ref.relationships.empty()) {
        throw DomainError("a layout must contain at least one relationship");
    }
}

// Enumerates the n-element index subsets of [0, K) in lexicographic order.
template <typename Fn>
void for_each_subset(int k, int n, Fn&& fn) {
    std::vector<int> indices(n);
    for (int i = 0; i < n; ++i) indices[i] = i;
    while (true) {
        fn(indices);
        int i = n - 1;
        while (i >= 0 && indices[i] == k - n + i) --i;
        if (i < 0) return;
        ++indices[i];
        for (int j = i + 1; j < n; ++j) indices[j] = indices[j - 1] + 1;
    }
}

}  // namespace

double iou(const RealBox& a, const RealBox& b) {
    const double ax2 = a.x + a.w;
    const double ay2 = a.y + a.h;
    const double bx2 = b.x + b.w;
    const double by2 = b.y + b.h;
    const double ix = std::min(ax2, bx2) - std::max(a.x, b.x);
    const double iy = std::min(ay2, by2) - std::max(a.y, b.y);
    if (ix <= 0 || iy <= 0) return 0;
    const double intersection = ix * iy;
    // All areas measured from the same corner differences, so identical
    // boxes give exactly 1 even after floating-point corner arithmetic.
    const double area_a = (ax2 - a.x) * (ay2 - a.y);
    const double area_b = (bx2 - b.x) * (by2 - b.y);
    return intersection / (area_a + area_b - intersection);
}

double unigram_accuracy(const VisualRelationshipSet& pred, const VisualRelationshipSet& ref,
                        double t_iou) {
    require_aligned(pred, ref);
    const std::size_t k_total = ref.size();
    std::size_t matches = 0;
    for (std::size_t k = 0; k < k_total; ++k) {
        const VisualRelationship& p = pred.relationships[k];
        const VisualRelationship& r = ref.relationships[k];
        if (p.subject_class != r.subject_class || p.object_class != r.object_class) continue;
        const ShiftVector t{r.subject_box.x - p.subject_box.x, r.subject_box.y - p.subject_box.y};
        const double j_subject = iou(shifted(p.subject_box, t), r.subject_box);
        const double j_object = iou(shifted(p.object_box, t), r.object_box);
        if (j_subject >= t_iou && j_object >= t_iou) ++matches;
    }
    return static_cast<double>(matches) / static_cast<double>(k_total);
}

double ngram_accuracy(const VisualRelationshipSet& pred, const VisualRelationshipSet& ref, int n,
                      double t_iou) {
    require_aligned(pred, ref);
    const int k_total = static_cast<int>(ref.size());
    if (n < 2) throw DomainError("n-gram order must be at least 2");
    if (n > k_total) {
        throw DomainError("n-gram order " + std::to_string(n) + " undefined for K = " +
                          std::to_string(k_total));
    }
    long long matches = 0;
    long long subsets = 0;
    for_each_subset(k_total, n, [&](const std::vector<int>& subset) {
        ++subsets;
        // Centroid-aligning shift: mean of per-subject corner deltas.
        ShiftVector t{0, 0};
        for (int i : subset) {
            t.dx += ref.relationships[i].subject_box.x - pred.relationships[i].subject_box.x;
            t.dy += ref.relationships[i].subject_box.y - pred.relationships[i].subject_box.y;
        }
        t.dx /= n;
        t.dy /= n;
        for (int i : subset) {
            const VisualRelationship& p = pred.relationships[i];
            const VisualRelationship& r = ref.relationships[i];
            if (p.subject_class != r.subject_class) return;
            if (iou(shifted(p.subject_box, t), r.subject_box) < t_iou) return;
        }
        ++matches;
    });
    return static_cast<double>(matches) / static_cast<double>(subsets);
}

std::vector<double> SleuConfig::effective_weights() const {
    if (weights.empty()) {
        return std::vector<double>(static_cast<std::size_t>(max_order), 1.0 / max_order);
    }
    if (static_cast<int>(weights.size()) != max_order) {
        throw DomainError("expected " + std::to_string(max_order) + " weights, got " +
                          std::to_string(weights.size()));
    }
    return weights;
}

double combine_accuracies(std::span<const double> accuracies, std::span<const double> weights) {
    if (accuracies.empty() || accuracies.size() != weights.size()) {
        throw DomainError("accuracies and weights must be non-empty and of equal length");
    }
    double weight_sum = 0;
    for (double w : weights) weight_sum += w;
    if (weight_sum <= 0) throw DomainError("weights must sum to a positive value");
    double log_sum = 0;
    for (std::size_t i = 0; i < accuracies.size(); ++i) {
        if (accuracies[i] <= 0) return 0;
        log_sum += (weights[i] / weight_sum) * std::log(accuracies[i]);
    }
    return std::exp(log_sum);
}

SleuResult sleu_score(const VisualRelationshipSet& pred,
                      const std::vector<VisualRelationshipSet>& refs, const SleuConfig& config) {
    if (refs.empty()) throw DomainError("at least one reference layout is required");
    const std::vector<double> weights = config.effective_weights();
    SleuResult best;
    best.score = -1;
    for (std::size_t j = 0; j < refs.size(); ++j) {
        const VisualRelationshipSet& ref = refs[j];
        const int orders = std::min<int>(config.max_order, static_cast<int>(ref.size()));
        std::vector<double> p;
        p.reserve(static_cast<std::size_t>(orders));
        p.push_back(unigram_accuracy(pred, ref, config.t_iou));
        for (int n = 2; n <= orders; ++n) {
            p.push_back(ngram_accuracy(pred, ref, n, config.t_iou));
        }
        const double combined = combine_accuracies(
            p, std::span<const double>(weights.data(), static_cast<std::size_t>(orders)));
        if (combined > best.score) {
            best.score = combined;
            best.per_order = p;
            best.chosen_reference = static_cast<int>(j) + 1;
        }
    }
    return best;
}

VisualRelationshipSet layout_to_visual_relationships(const SceneGraph& graph,
                                                     const std::map<int, LabeledRealBox>& boxes) {
    if (graph.relationships.empty()) {
        throw EmptyGraphError("cannot build visual relationships from a graph with no relationships");
    }
    VisualRelationshipSet set;
    set.relationships.reserve(graph.relationships.size());
    for (const auto& rel : graph.relationships) {
        auto subject = boxes.find(rel.subject_id);
        auto object = boxes.find(rel.object_id);
        if (subject == boxes.end() || object == boxes.end()) {
            throw ConsistencyError("relationship endpoints " + std::to_string(rel.subject_id) +
                                   "/" + std::to_string(rel.object_id) + " lack boxes");
        }
        set.relationships.push_back(VisualRelationship{subject->second.class_label,
                                                       subject->second.box,
                                                       object->second.class_label,
                                                       object->second.box});
    }
    return set;
}

std::map<int, LabeledRealBox> to_real_boxes(const QuantizedLayout& ql) {
    std::map<int, LabeledRealBox> out;
    for (const auto& [node_id, qbox] : ql.boxes) {
        out[node_id] = LabeledRealBox{
            qbox.class_label,
            RealBox{static_cast<double>(qbox.box.x), static_cast<double>(qbox.box.y),
                    static_cast<double>(qbox.box.w), static_cast<double>(qbox.box.h)}};
    }
    return out;
}

VisualRelationshipSet layout_to_visual_relationships(const SceneGraph& graph,
                                                     const QuantizedLayout& ql) {
    return layout_to_visual_relationships(graph, to_real_boxes(ql));
}

std::pair<double, std::vector<SleuResult>> mean_sleu(
    const std::vector<std::pair<VisualRelationshipSet, std::vector<VisualRelationshipSet>>>& pairs,
    const SleuConfig& config) {
    if (pairs.empty()) throw DomainError("mean over an empty evaluation set is undefined");
    std::vector<SleuResult> results;
    results.reserve(pairs.size());
    double total = 0;
    for (const auto& [pred, refs] : pairs) {
        results.push_back(sleu_score(pred, refs, config));
        total += results.back().score;
    }
    return {total / static_cast<double>(pairs.size()), std::move(results)};
}

}  // namespace sgl
