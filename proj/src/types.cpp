#include "sgl/types.hpp"

#include <set>

#include "sgl/errors.hpp"
#include "sgl/util.hpp"

namespace sgl {

bool SceneGraph::has_node(int node_id) const {
    for (const auto& n : nodes) {
        if (n.node_id == node_id) return true;
    }
    return false;
}

const ObjectNode& SceneGraph::node(int node_id) const {
    for (const auto& n : nodes) {
        if (n.node_id == node_id) return n;
    }
    throw ConsistencyError("graph has no node with id " + std::to_string(node_id));
}

void validate_sample(const GroundedSample& sample) {
    const std::string where = "sample '" + sample.sample_id + "'";
    if (sample.layout.image_w <= 0 || sample.layout.image_h <= 0) {
        throw ParseError(where + ": width/height must be positive");
    }
    std::set<int> ids;
    for (const auto& node : sample.graph.nodes) {
        if (!ids.insert(node.node_id).second) {
            throw ParseError(where + ": duplicate node id " + std::to_string(node.node_id));
        }
        if (!is_token(node.class_label)) {
            throw ParseError(where + ", node " + std::to_string(node.node_id) +
                             ": class '" + node.class_label + "' is not a valid token");
        }
        for (const auto& attr : node.attributes) {
            if (!is_token(attr)) {
                throw ParseError(where + ", node " + std::to_string(node.node_id) +
                                 ": attribute '" + attr + "' is not a valid token");
            }
        }
    }
    for (std::size_t k = 0; k < sample.graph.relationships.size(); ++k) {
        const auto& rel = sample.graph.relationships[k];
        const std::string rel_name = where + ", relationship " + std::to_string(k);
        if (!ids.count(rel.subject_id)) {
            throw ParseError(rel_name + ": subject references unknown node id " +
                             std::to_string(rel.subject_id));
        }
        if (!ids.count(rel.object_id)) {
            throw ParseError(rel_name + ": object references unknown node id " +
                             std::to_string(rel.object_id));
        }
        if (rel.subject_id == rel.object_id) {
            throw ParseError(rel_name + ": subject and object are the same node " +
                             std::to_string(rel.subject_id));
        }
        if (!is_token(rel.predicate)) {
            throw ParseError(rel_name + ": predicate '" + rel.predicate + "' is not a valid token");
        }
        if (!sample.layout.boxes.count(rel.subject_id) || !sample.layout.boxes.count(rel.object_id)) {
            throw ParseError(rel_name + ": endpoint has no box in the layout");
        }
    }
    for (const auto& [node_id, box] : sample.layout.boxes) {
        const std::string box_name = where + ", box for node " + std::to_string(node_id);
        if (!ids.count(node_id)) {
            throw ParseError(box_name + ": no such node in the graph");
        }
        if (box.w <= 0 || box.h <= 0) {
            throw ParseError(box_name + ": non-positive size " + std::to_string(box.w) + "x" +
                             std::to_string(box.h));
        }
        if (box.x < 0 || box.y < 0 || box.x + box.w > sample.layout.image_w ||
            box.y + box.h > sample.layout.image_h) {
            throw ParseError(box_name + ": outside image bounds");
        }
    }
}

}  // namespace sgl
