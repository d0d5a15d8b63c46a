#include "sgl/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sgl/errors.hpp"
#include "sgl/util.hpp"

namespace sgl {

namespace {

using nlohmann::json;

const json& require_field(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw ParseError(where + ": missing field '" + key + "'");
    }
    return *it;
}

int require_int(const json& obj, const char* key, const std::string& where) {
    const json& v = require_field(obj, key, where);
    if (!v.is_number_integer()) {
        throw ParseError(where + ": field '" + key + "' must be an integer");
    }
    return v.get<int>();
}

std::string require_label(const json& obj, const char* key, const std::string& where) {
    const json& v = require_field(obj, key, where);
    if (!v.is_string()) {
        throw ParseError(where + ": field '" + key + "' must be a string");
    }
    const std::string normalized = normalize_label(v.get<std::string>());
    if (!is_token(normalized)) {
        throw ParseError(where + ": field '" + key + "' value '" + v.get<std::string>() +
                         "' does not normalize to a token");
    }
    return normalized;
}

PixelBox parse_box(const json& arr, int image_w, int image_h, const std::string& where) {
    if (!arr.is_array() || arr.size() != 4) {
        throw ParseError(where + ": field 'box' must be [x, y, w, h]");
    }
    for (const auto& v : arr) {
        if (!v.is_number_integer()) {
            throw ParseError(where + ": box coordinates must be integers");
        }
    }
    const int x = arr[0].get<int>();
    const int y = arr[1].get<int>();
    const int w = arr[2].get<int>();
    const int h = arr[3].get<int>();
    if (w <= 0 || h <= 0) {
        throw ParseError(where + ": non-positive box size " + std::to_string(w) + "x" +
                         std::to_string(h));
    }
    // Clip to the image rectangle; a box entirely outside is an error.
    const int x1 = std::max(x, 0);
    const int y1 = std::max(y, 0);
    const int x2 = std::min(x + w, image_w);
    const int y2 = std::min(y + h, image_h);
    if (x2 - x1 <= 0 || y2 - y1 <= 0) {
        throw ParseError(where + ": box lies outside the image");
    }
    return PixelBox{x1, y1, x2 - x1, y2 - y1};
}

GroundedSample parse_sample(const json& entry, std::size_t index) {
    if (!entry.is_object()) {
        throw ParseError("sample #" + std::to_string(index) + ": entry must be an object");
    }
    const json& id_field = require_field(entry, "id", "sample #" + std::to_string(index));
    if (!id_field.is_string()) {
        throw ParseError("sample #" + std::to_string(index) + ": field 'id' must be a string");
    }
    GroundedSample sample;
    sample.sample_id = id_field.get<std::string>();
    const std::string where = "sample '" + sample.sample_id + "'";

    sample.layout.image_w = require_int(entry, "width", where);
    sample.layout.image_h = require_int(entry, "height", where);
    if (sample.layout.image_w <= 0 || sample.layout.image_h <= 0) {
        throw ParseError(where + ": width/height must be positive");
    }

    const json& objects = require_field(entry, "objects", where);
    if (!objects.is_array()) throw ParseError(where + ": field 'objects' must be an array");
    for (const auto& obj : objects) {
        const std::string obj_where = where + ", object #" + std::to_string(sample.graph.nodes.size());
        ObjectNode node;
        node.node_id = require_int(obj, "id", obj_where);
        node.class_label = require_label(obj, "class", obj_where);
        const json& attrs = require_field(obj, "attributes", obj_where);
        if (!attrs.is_array()) throw ParseError(obj_where + ": field 'attributes' must be an array");
        for (const auto& a : attrs) {
            if (!a.is_string()) throw ParseError(obj_where + ": attributes must be strings");
            const std::string normalized = normalize_label(a.get<std::string>());
            if (!is_token(normalized)) {
                throw ParseError(obj_where + ": attribute '" + a.get<std::string>() +
                                 "' does not normalize to a token");
            }
            node.attributes.push_back(normalized);
        }
        sample.layout.boxes[node.node_id] =
            parse_box(require_field(obj, "box", obj_where), sample.layout.image_w,
                      sample.layout.image_h, obj_where);
        sample.graph.nodes.push_back(std::move(node));
    }

    const json& rels = require_field(entry, "relationships", where);
    if (!rels.is_array()) throw ParseError(where + ": field 'relationships' must be an array");
    for (const auto& rel : rels) {
        const std::string rel_where =
            where + ", relationship #" + std::to_string(sample.graph.relationships.size());
        Relationship r;
        r.subject_id = require_int(rel, "subject", rel_where);
        r.predicate = require_label(rel, "predicate", rel_where);
        r.object_id = require_int(rel, "object", rel_where);
        sample.graph.relationships.push_back(std::move(r));
    }

    validate_sample(sample);
    return sample;
}

}  // namespace

std::vector<GroundedSample> parse_corpus(std::string_view document) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::exception& e) {
        throw ParseError(std::string("corpus is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("samples") || !doc["samples"].is_array()) {
        throw ParseError("corpus document must be an object with a 'samples' array");
    }
    std::vector<GroundedSample> samples;
    std::set<std::string> seen_ids;
    for (std::size_t i = 0; i < doc["samples"].size(); ++i) {
        GroundedSample sample = parse_sample(doc["samples"][i], i);
        if (!seen_ids.insert(sample.sample_id).second) {
            throw ParseError("duplicate sample id '" + sample.sample_id + "'");
        }
        samples.push_back(std::move(sample));
    }
    return samples;
}

std::vector<GroundedSample> load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open corpus file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_corpus(buffer.str());
}

std::string corpus_to_json(const std::vector<GroundedSample>& samples) {
    json doc;
    doc["samples"] = json::array();
    for (const auto& sample : samples) {
        json entry;
        entry["id"] = sample.sample_id;
        entry["width"] = sample.layout.image_w;
        entry["height"] = sample.layout.image_h;
        entry["objects"] = json::array();
        for (const auto& node : sample.graph.nodes) {
            const PixelBox& box = sample.layout.boxes.at(node.node_id);
            entry["objects"].push_back(json{{"id", node.node_id},
                                            {"class", node.class_label},
                                            {"attributes", node.attributes},
                                            {"box", {box.x, box.y, box.w, box.h}}});
        }
        entry["relationships"] = json::array();
        for (const auto& rel : sample.graph.relationships) {
            entry["relationships"].push_back(json{{"subject", rel.subject_id},
                                                  {"predicate", rel.predicate},
                                                  {"object", rel.object_id}});
        }
        doc["samples"].push_back(std::move(entry));
    }
    return doc.dump(2) + "\n";
}

void save_corpus(const std::vector<GroundedSample>& samples, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write corpus file " + path.string());
    out << corpus_to_json(samples);
}

std::vector<std::string> read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest " + path.string());
    std::vector<std::string> ids;
    std::set<std::string> seen;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
            line.pop_back();
        }
        std::size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos) continue;
        std::string id = line.substr(start);
        if (!seen.insert(id).second) {
            throw ParseError("manifest " + path.string() + ": duplicate id '" + id + "'");
        }
        ids.push_back(std::move(id));
    }
    return ids;
}

}  // namespace sgl
