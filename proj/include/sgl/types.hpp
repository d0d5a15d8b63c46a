#pragma once

#include <map>
#include <string>
#include <vector>

namespace sgl {

// An object node of a scene graph. node ids are unique within a graph.
struct ObjectNode {
    int node_id = 0;
    std::string class_label;
    std::vector<std::string> attributes;

    friend bool operator==(const ObjectNode&, const ObjectNode&) = default;
};

// Directed edge: subject --predicate--> object. Endpoints must be distinct
// nodes of the same graph.
struct Relationship {
    int subject_id = 0;
    std::string predicate;
    int object_id = 0;

    friend bool operator==(const Relationship&, const Relationship&) = default;
};

// Relationship order is significant and preserved through every codec.
struct SceneGraph {
    std::vector<ObjectNode> nodes;
    std::vector<Relationship> relationships;

    bool has_node(int node_id) const;
    const ObjectNode& node(int node_id) const;  // throws ConsistencyError if absent

    friend bool operator==(const SceneGraph&, const SceneGraph&) = default;
};

// Pixel-space box, xmin/ymin corner plus positive size.
struct PixelBox {
    int x = 0;
    int y = 0;
    int w = 1;
    int h = 1;

    friend bool operator==(const PixelBox&, const PixelBox&) = default;
};

// Pixel boxes of a scene, keyed by node id, plus the canvas dimensions.
struct SemanticLayout {
    int image_w = 0;
    int image_h = 0;
    std::map<int, PixelBox> boxes;

    friend bool operator==(const SemanticLayout&, const SemanticLayout&) = default;
};

struct GroundedSample {
    SceneGraph graph;
    SemanticLayout layout;
    std::string sample_id;

    friend bool operator==(const GroundedSample&, const GroundedSample&) = default;
};

// Checks every structural invariant of a sample: unique node ids, valid
// labels, resolvable relationship endpoints, subject != object, a box for
// every node referenced by a relationship, boxes inside the image.
// Throws ParseError naming the sample and field on the first violation.
void validate_sample(const GroundedSample& sample);

}  // namespace sgl
