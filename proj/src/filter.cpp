#include "sgl/filter.hpp"

#include <algorithm>
#include <set>

#include "sgl/errors.hpp"

namespace sgl {

GroundedSample preprocess_graph(const GroundedSample& sample) {
    if (sample.graph.relationships.empty()) {
        throw EmptyGraphError("sample '" + sample.sample_id + "' has no relationships");
    }
    std::set<int> referenced;
    for (const auto& rel : sample.graph.relationships) {
        referenced.insert(rel.subject_id);
        referenced.insert(rel.object_id);
    }
    GroundedSample out;
    out.sample_id = sample.sample_id;
    out.graph.relationships = sample.graph.relationships;
    out.layout.image_w = sample.layout.image_w;
    out.layout.image_h = sample.layout.image_h;
    for (const auto& node : sample.graph.nodes) {
        if (!referenced.count(node.node_id)) continue;
        out.graph.nodes.push_back(ObjectNode{node.node_id, node.class_label, {}});
        out.layout.boxes[node.node_id] = sample.layout.boxes.at(node.node_id);
    }
    return out;
}

ClassFrequencies count_class_frequencies(const std::vector<GroundedSample>& samples) {
    ClassFrequencies freq;
    for (const auto& sample : samples) {
        for (const auto& node : sample.graph.nodes) ++freq.object_classes[node.class_label];
        for (const auto& rel : sample.graph.relationships) ++freq.predicates[rel.predicate];
    }
    return freq;
}

namespace {

long count_of(const std::map<std::string, long>& table, const std::string& key) {
    auto it = table.find(key);
    return it == table.end() ? 0 : it->second;
}

}  // namespace

std::vector<GroundedSample> filter_corpus(const std::vector<GroundedSample>& samples,
                                          const FilterConfig& config,
                                          const ClassFrequencies& frequencies) {
    if (config.min_objects > config.max_objects) {
        throw DomainError("min_objects exceeds max_objects");
    }
    if (config.min_object_class_count < 0 || config.min_relationship_class_count < 0 ||
        config.min_box_side < 0 || config.min_objects < 0 || config.max_relationships < 0) {
        throw DomainError("filter thresholds must be non-negative");
    }
    std::vector<GroundedSample> out;
    for (const auto& sample : samples) {
        // 1. box-size cull: node, box and touching relationships go together.
        std::set<int> dropped_nodes;
        for (const auto& [node_id, box] : sample.layout.boxes) {
            if (std::min(box.w, box.h) < config.min_box_side) dropped_nodes.insert(node_id);
        }
        GroundedSample kept;
        kept.sample_id = sample.sample_id;
        kept.layout.image_w = sample.layout.image_w;
        kept.layout.image_h = sample.layout.image_h;
        for (const auto& node : sample.graph.nodes) {
            if (dropped_nodes.count(node.node_id)) continue;
            kept.graph.nodes.push_back(node);
            kept.layout.boxes[node.node_id] = sample.layout.boxes.at(node.node_id);
        }
        // 2. class-frequency cull removes relationships only.
        for (const auto& rel : sample.graph.relationships) {
            if (dropped_nodes.count(rel.subject_id) || dropped_nodes.count(rel.object_id)) continue;
            if (count_of(frequencies.predicates, rel.predicate) <
                config.min_relationship_class_count) {
                continue;
            }
            const std::string& subject_class = sample.graph.node(rel.subject_id).class_label;
            const std::string& object_class = sample.graph.node(rel.object_id).class_label;
            if (count_of(frequencies.object_classes, subject_class) < config.min_object_class_count ||
                count_of(frequencies.object_classes, object_class) < config.min_object_class_count) {
                continue;
            }
            kept.graph.relationships.push_back(rel);
        }
        // 3. sample-level cull on object count and relationship presence.
        const int object_count = static_cast<int>(kept.graph.nodes.size());
        if (object_count < config.min_objects || object_count > config.max_objects) continue;
        if (kept.graph.relationships.empty()) continue;
        // 4. relationship cap: first max_relationships in document order.
        if (static_cast<int>(kept.graph.relationships.size()) > config.max_relationships) {
            kept.graph.relationships.resize(static_cast<std::size_t>(config.max_relationships));
        }
        out.push_back(std::move(kept));
    }
    return out;
}

std::vector<GroundedSample> filter_corpus(const std::vector<GroundedSample>& samples,
                                          const FilterConfig& config) {
    return filter_corpus(samples, config, count_class_frequencies(samples));
}

}  // namespace sgl
