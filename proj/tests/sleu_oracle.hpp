#pragma once

// Brute-force reimplementation of the n-gram accuracy, kept deliberately
// independent of src/sleu.cpp: recursive subset enumeration and its own
// geometry. Used only to cross-check the metric.

#include <string>
#include <vector>

#include "sgl/sleu.hpp"

namespace sgltest {

inline double oracle_iou(const sgl::RealBox& a, const sgl::RealBox& b) {
    const double ax2 = a.x + a.w;
    const double ay2 = a.y + a.h;
    const double bx2 = b.x + b.w;
    const double by2 = b.y + b.h;
    const double ox = (ax2 < bx2 ? ax2 : bx2) - (a.x > b.x ? a.x : b.x);
    const double oy = (ay2 < by2 ? ay2 : by2) - (a.y > b.y ? a.y : b.y);
    if (ox <= 0.0 || oy <= 0.0) return 0.0;
    const double inter = ox * oy;
    return inter / (a.w * a.h + b.w * b.h - inter);
}

inline bool oracle_subset_matches(const sgl::VisualRelationshipSet& pred,
                                  const sgl::VisualRelationshipSet& ref,
                                  const std::vector<int>& subset, double t_iou) {
    double dx = 0.0;
    double dy = 0.0;
    for (int i : subset) {
        dx += ref.relationships[i].subject_box.x - pred.relationships[i].subject_box.x;
        dy += ref.relationships[i].subject_box.y - pred.relationships[i].subject_box.y;
    }
    dx /= static_cast<double>(subset.size());
    dy /= static_cast<double>(subset.size());
    for (int i : subset) {
        if (pred.relationships[i].subject_class != ref.relationships[i].subject_class) return false;
        sgl::RealBox moved = pred.relationships[i].subject_box;
        moved.x += dx;
        moved.y += dy;
        if (oracle_iou(moved, ref.relationships[i].subject_box) < t_iou) return false;
    }
    return true;
}

inline void oracle_enumerate(int k, int n, int start, std::vector<int>& current,
                             const sgl::VisualRelationshipSet& pred,
                             const sgl::VisualRelationshipSet& ref, double t_iou,
                             long& matches, long& total) {
    if (static_cast<int>(current.size()) == n) {
        ++total;
        if (oracle_subset_matches(pred, ref, current, t_iou)) ++matches;
        return;
    }
    for (int i = start; i < k; ++i) {
        current.push_back(i);
        oracle_enumerate(k, n, i + 1, current, pred, ref, t_iou, matches, total);
        current.pop_back();
    }
}

inline double oracle_ngram(const sgl::VisualRelationshipSet& pred,
                           const sgl::VisualRelationshipSet& ref, int n, double t_iou) {
    long matches = 0;
    long total = 0;
    std::vector<int> current;
    oracle_enumerate(static_cast<int>(ref.relationships.size()), n, 0, current, pred, ref, t_iou,
                     matches, total);
    return static_cast<double>(matches) / static_cast<double>(total);
}

}  // namespace sgltest
