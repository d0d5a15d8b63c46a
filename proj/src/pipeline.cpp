#include "sgl/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sgl/corpus.hpp"
#include "sgl/errors.hpp"
#include "sgl/util.hpp"

namespace sgl {

namespace {

using nlohmann::json;

void set_config_key(PipelineConfig& config, const std::string& key, const json& value,
                    const std::string& origin) {
    try {
        if (key == "grid_max") {
            config.codec.grid_max = value.get<int>();
        } else if (key == "ar_interval") {
            config.codec.ar_quantizer.interval = value.get<double>();
        } else if (key == "ar_min") {
            config.codec.ar_quantizer.minimum = value.get<double>();
        } else if (key == "ar_bins") {
            config.codec.ar_quantizer.bins = value.get<int>();
        } else if (key == "mode") {
            const std::string mode = value.get<std::string>();
            if (mode == "relative") {
                config.codec.mode = BacsMode::relative;
            } else if (mode == "absolute") {
                config.codec.mode = BacsMode::absolute;
            } else {
                throw ParseError(origin + ": mode must be 'relative' or 'absolute', got '" + mode +
                                 "'");
            }
        } else if (key == "include_imgar") {
            config.codec.include_imgar = value.get<bool>();
        } else if (key == "min_object_class_count") {
            config.filter.min_object_class_count = value.get<long>();
        } else if (key == "min_relationship_class_count") {
            config.filter.min_relationship_class_count = value.get<long>();
        } else if (key == "min_box_side") {
            config.filter.min_box_side = value.get<int>();
        } else if (key == "min_objects") {
            config.filter.min_objects = value.get<int>();
        } else if (key == "max_objects") {
            config.filter.max_objects = value.get<int>();
        } else if (key == "max_relationships") {
            config.filter.max_relationships = value.get<int>();
        } else if (key == "max_variants") {
            config.max_variants = value.get<int>();
        } else if (key == "t_ious") {
            config.t_ious = value.get<std::vector<double>>();
        } else if (key == "max_order") {
            config.max_order = value.get<int>();
        } else if (key == "seed") {
            config.seed = value.get<std::uint64_t>();
        } else if (key == "jobs") {
            config.jobs = value.get<int>();
        } else {
            throw ParseError(origin + ": unknown config key '" + key + "'");
        }
    } catch (const json::exception&) {
        throw ParseError(origin + ": bad value for config key '" + key + "'");
    }
}

json parse_scalar(const std::string& text) {
    if (text == "true") return json(true);
    if (text == "false") return json(false);
    try {
        return json::parse(text);  // numbers and arrays
    } catch (const json::exception&) {
        return json(text);  // bare string, e.g. mode=relative
    }
}

std::string trim(const std::string& s) {
    const std::size_t begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const std::size_t end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::string format_threshold(double t) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%g", t);
    return buffer;
}

json grid_box_to_json(const GridBox& box) {
    return json::array({box.x, box.y, box.w, box.h});
}

struct SamplePrediction {
    std::optional<QuantizedLayout> layout;
    std::string error;  // non-empty => scored 0 and flagged
};

}  // namespace

void apply_config_text(PipelineConfig& config, const std::string& text, const std::string& origin) {
    const std::size_t first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        json doc;
        try {
            doc = json::parse(text);
        } catch (const json::exception& e) {
            throw ParseError(origin + ": invalid JSON config: " + e.what());
        }
        for (const auto& [key, value] : doc.items()) {
            set_config_key(config, key, value, origin);
        }
        return;
    }
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ParseError(origin + " line " + std::to_string(line_no) +
                             ": expected key=value, got '" + stripped + "'");
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        json parsed = parse_scalar(value);
        if (key == "t_ious" && parsed.is_string()) {
            // Comma-separated list in key=value form.
            json arr = json::array();
            for (const auto& part : split_on(value, ',')) arr.push_back(std::stod(trim(part)));
            parsed = arr;
        }
        set_config_key(config, key, parsed, origin + " line " + std::to_string(line_no));
    }
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    PipelineConfig config;
    apply_config_text(config, buffer.str(), path.string());
    return config;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open file " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

void write_lines(const std::vector<std::string>& lines, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write file " + path.string());
    for (const auto& line : lines) out << line << '\n';
}

// ---- ingest ----

IngestSummary cmd_ingest(const IngestOptions& options, const PipelineConfig& config,
                         std::ostream& log) {
    if (options.splits.empty()) throw DomainError("ingest needs at least one split manifest");
    const std::vector<GroundedSample> corpus = load_corpus(options.corpus);
    std::map<std::string, const GroundedSample*> by_id;
    for (const auto& sample : corpus) by_id[sample.sample_id] = &sample;

    std::set<std::string> assigned;
    std::vector<std::vector<GroundedSample>> split_samples;
    for (const auto& [name, manifest] : options.splits) {
        std::vector<GroundedSample> samples;
        for (const auto& id : read_manifest(manifest)) {
            auto it = by_id.find(id);
            if (it == by_id.end()) {
                throw ParseError("manifest " + manifest.string() + ": sample id '" + id +
                                 "' not present in the corpus");
            }
            if (!assigned.insert(id).second) {
                throw ParseError("sample id '" + id + "' appears in more than one split");
            }
            samples.push_back(*it->second);
        }
        split_samples.push_back(std::move(samples));
    }

    // Frequencies come from the first (training) split and apply everywhere.
    const ClassFrequencies frequencies = count_class_frequencies(split_samples.front());

    std::filesystem::create_directories(options.out_dir);
    IngestSummary summary;
    summary.unassigned = corpus.size() - assigned.size();
    for (std::size_t i = 0; i < options.splits.size(); ++i) {
        const std::string& name = options.splits[i].first;
        const std::vector<GroundedSample> filtered =
            filter_corpus(split_samples[i], config.filter, frequencies);
        SplitSummary split;
        split.name = name;
        split.samples_in = split_samples[i].size();
        split.samples_out = filtered.size();
        for (const auto& sample : filtered) {
            split.objects_out += sample.graph.nodes.size();
            split.relationships_out += sample.graph.relationships.size();
        }
        save_corpus(filtered, options.out_dir / (name + ".json"));
        log << name << ": " << split.samples_in << " -> " << split.samples_out << " samples, "
            << split.objects_out << " objects, " << split.relationships_out
            << " relationships kept\n";
        summary.splits.push_back(std::move(split));
    }
    if (summary.unassigned > 0) {
        log << summary.unassigned << " corpus sample(s) not named by any manifest were skipped\n";
    }
    return summary;
}

// ---- encode ----

EncodeSummary cmd_encode(const EncodeOptions& options, const PipelineConfig& config,
                         std::ostream& log) {
    const std::vector<GroundedSample> corpus = load_corpus(options.corpus);
    std::vector<std::string> sf_lines(corpus.size());
    std::vector<std::string> node_lines(corpus.size());
    std::vector<std::string> bacs_lines(corpus.size());
    parallel_for(corpus.size(), config.jobs, [&](std::size_t i) {
        const GroundedSample sample = preprocess_graph(corpus[i]);
        const auto [sf, nodes] = encode_sf(sample.graph);
        const QuantizedLayout ql =
            quantize_layout(sample, config.codec.grid_max, config.codec.ar_quantizer);
        const BacsSequence bacs =
            encode_bacs(ql, nodes, sample.graph, config.codec.mode, config.codec.include_imgar);
        sf_lines[i] = serialize_sf(sf);
        node_lines[i] = serialize_nodes(nodes);
        bacs_lines[i] = serialize_bacs(bacs);
    });
    write_lines(sf_lines, options.out_prefix.string() + ".sf");
    write_lines(node_lines, options.out_prefix.string() + ".nodes");
    write_lines(bacs_lines, options.out_prefix.string() + ".bacs");
    log << "encoded " << corpus.size() << " samples\n";
    return EncodeSummary{corpus.size()};
}

// ---- augment ----

AugmentSummary cmd_augment(const AugmentOptions& options, const PipelineConfig& config,
                           std::ostream& log) {
    const std::vector<GroundedSample> corpus = load_corpus(options.corpus);
    const AugmentConfig augment_config = config.augment_config();
    std::vector<std::vector<AugmentVariant>> variants(corpus.size());
    parallel_for(corpus.size(), config.jobs, [&](std::size_t i) {
        variants[i] = augment_sample(preprocess_graph(corpus[i]), augment_config, config.codec);
    });
    std::vector<std::string> sf_lines;
    std::vector<std::string> node_lines;
    std::vector<std::string> bacs_lines;
    for (const auto& sample_variants : variants) {
        for (const auto& variant : sample_variants) {
            sf_lines.push_back(serialize_sf(variant.sf));
            node_lines.push_back(serialize_nodes(variant.nodes));
            bacs_lines.push_back(serialize_bacs(variant.bacs));
        }
    }
    write_lines(sf_lines, options.out_prefix.string() + ".sf");
    write_lines(node_lines, options.out_prefix.string() + ".nodes");
    write_lines(bacs_lines, options.out_prefix.string() + ".bacs");
    log << "augmented " << corpus.size() << " samples into " << sf_lines.size() << " variants\n";
    return AugmentSummary{corpus.size(), sf_lines.size()};
}

// ---- decode ----

std::string layout_line_to_json(const QuantizedLayout& layout, std::size_t line) {
    json entry;
    entry["line"] = line;
    entry["grid_w"] = layout.grid_w;
    entry["grid_h"] = layout.grid_h;
    entry["ar_index"] = layout.ar_index;
    entry["boxes"] = json::object();
    for (const auto& [node_id, qbox] : layout.boxes) {
        entry["boxes"][std::to_string(node_id)] =
            json{{"class", qbox.class_label}, {"box", grid_box_to_json(qbox.box)}};
    }
    return entry.dump();
}

std::string layout_error_to_json(const std::string& error, std::size_t line) {
    return json{{"line", line}, {"error", error}}.dump();
}

DecodedLine layout_line_from_json(const std::string& text) {
    json entry;
    try {
        entry = json::parse(text);
        DecodedLine decoded;
        decoded.line = entry.at("line").get<std::size_t>();
        if (entry.contains("error")) {
            decoded.error = entry.at("error").get<std::string>();
            return decoded;
        }
        QuantizedLayout layout;
        layout.grid_w = entry.at("grid_w").get<int>();
        layout.grid_h = entry.at("grid_h").get<int>();
        layout.ar_index = entry.at("ar_index").get<int>();
        for (const auto& [key, value] : entry.at("boxes").items()) {
            const auto arr = value.at("box").get<std::array<int, 4>>();
            layout.boxes[std::stoi(key)] = QuantizedBox{
                value.at("class").get<std::string>(), GridBox{arr[0], arr[1], arr[2], arr[3]}};
        }
        decoded.layout = std::move(layout);
        return decoded;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed layout line: ") + e.what());
    }
}

namespace {

// Restores one predicted line; a failure becomes a flagged entry rather
// than aborting the run.
SamplePrediction restore_line(const std::string& bacs_line, std::size_t expected_k,
                              const NodeSequence& nodes, const PipelineConfig& config) {
    SamplePrediction prediction;
    try {
        const std::vector<BacsToken> tokens = parse_bacs_tokens(
            bacs_line, config.codec.grid_max, config.codec.ar_quantizer.bins);
        const BacsSequence seq = bacs_from_tokens(tokens, expected_k, config.codec.mode,
                                                  config.codec.include_imgar);
        prediction.layout =
            execute_bacs(seq, nodes, config.codec.grid_max, config.codec.ar_quantizer);
    } catch (const AlignmentError& e) {
        prediction.error = "misaligned at position " + std::to_string(e.position) +
                           " (expected " + e.expected + "): " + e.what();
    } catch (const Error& e) {
        prediction.error = e.what();
    }
    return prediction;
}

}  // namespace

DecodeSummary cmd_decode(const DecodeOptions& options, const PipelineConfig& config,
                         std::ostream& log) {
    const std::vector<std::string> bacs_lines = read_lines(options.bacs);
    const std::vector<std::string> sf_lines = read_lines(options.sf);
    const std::vector<std::string> node_lines = read_lines(options.nodes);
    if (sf_lines.size() != node_lines.size() || sf_lines.size() != bacs_lines.size()) {
        throw ConsistencyError("line counts differ: " + std::to_string(bacs_lines.size()) +
                               " bacs, " + std::to_string(sf_lines.size()) + " sf, " +
                               std::to_string(node_lines.size()) + " nodes");
    }
    std::vector<std::string> out_lines(bacs_lines.size());
    std::vector<char> misaligned(bacs_lines.size(), 0);
    std::vector<std::string> diagnostics(bacs_lines.size());
    parallel_for(bacs_lines.size(), config.jobs, [&](std::size_t i) {
        const SfSequence sf = parse_sf(sf_lines[i]);
        const NodeSequence nodes = parse_nodes(node_lines[i]);
        if (nodes.size() != sf.size()) {
            throw ConsistencyError("line " + std::to_string(i) + ": node sequence has " +
                                   std::to_string(nodes.size()) + " pairs for " +
                                   std::to_string(sf.size()) + " triplets");
        }
        const SamplePrediction prediction = restore_line(bacs_lines[i], sf.size(), nodes, config);
        if (prediction.layout) {
            out_lines[i] = layout_line_to_json(*prediction.layout, i);
        } else {
            out_lines[i] = layout_error_to_json(prediction.error, i);
            misaligned[i] = 1;
            diagnostics[i] = "line " + std::to_string(i) + ": " + prediction.error;
        }
    });
    DecodeSummary summary;
    summary.lines = bacs_lines.size();
    for (std::size_t i = 0; i < bacs_lines.size(); ++i) {
        if (misaligned[i]) {
            ++summary.misaligned;
            log << diagnostics[i] << '\n';
        }
    }
    write_lines(out_lines, options.out);
    log << "decoded " << summary.lines << " lines, " << summary.misaligned << " misaligned\n";
    return summary;
}

// ---- evaluate ----

namespace {

struct ReferenceSample {
    std::string id;
    SceneGraph graph;  // preprocessed
    SfSequence sf;
    NodeSequence nodes;
    std::vector<VisualRelationshipSet> refs;  // one per reference corpus
};

std::vector<ReferenceSample> load_references(const std::vector<std::filesystem::path>& paths,
                                             const PipelineConfig& config) {
    if (paths.empty()) throw DomainError("at least one reference corpus is required");
    std::vector<std::vector<GroundedSample>> corpora;
    for (const auto& path : paths) corpora.push_back(load_corpus(path));
    for (std::size_t j = 1; j < corpora.size(); ++j) {
        if (corpora[j].size() != corpora[0].size()) {
            throw ConsistencyError("reference corpora differ in size: " +
                                   std::to_string(corpora[0].size()) + " vs " +
                                   std::to_string(corpora[j].size()));
        }
    }
    std::vector<ReferenceSample> samples;
    samples.reserve(corpora[0].size());
    for (std::size_t i = 0; i < corpora[0].size(); ++i) {
        ReferenceSample ref;
        const GroundedSample primary = preprocess_graph(corpora[0][i]);
        ref.id = primary.sample_id;
        ref.graph = primary.graph;
        auto encoded = encode_sf(ref.graph);
        ref.sf = std::move(encoded.first);
        ref.nodes = std::move(encoded.second);
        for (std::size_t j = 0; j < corpora.size(); ++j) {
            const GroundedSample sample = preprocess_graph(corpora[j][i]);
            if (sample.sample_id != ref.id) {
                throw ConsistencyError("reference corpora disagree on sample ids at index " +
                                       std::to_string(i) + ": '" + ref.id + "' vs '" +
                                       sample.sample_id + "'");
            }
            if (serialize_sf(encode_sf(sample.graph).first) != serialize_sf(ref.sf)) {
                throw ConsistencyError("reference corpora disagree on the scene graph of sample '" +
                                       ref.id + "'");
            }
            const QuantizedLayout ql =
                quantize_layout(sample, config.codec.grid_max, config.codec.ar_quantizer);
            ref.refs.push_back(layout_to_visual_relationships(sample.graph, ql));
        }
        samples.push_back(std::move(ref));
    }
    return samples;
}

}  // namespace

EvaluateSummary cmd_evaluate(const EvaluateOptions& options, const PipelineConfig& config,
                             std::ostream& log) {
    if (options.pred_bacs.has_value() == options.pred_layouts.has_value()) {
        throw DomainError("evaluate needs exactly one of a BACS file or a layouts file");
    }
    const std::vector<ReferenceSample> references = load_references(options.refs, config);

    // Restore per-sample predicted layouts.
    std::vector<SamplePrediction> predictions(references.size());
    if (options.pred_bacs) {
        const std::vector<std::string> lines = read_lines(*options.pred_bacs);
        if (lines.size() != references.size()) {
            throw ConsistencyError("prediction file has " + std::to_string(lines.size()) +
                                   " lines for " + std::to_string(references.size()) +
                                   " reference samples");
        }
        parallel_for(references.size(), config.jobs, [&](std::size_t i) {
            predictions[i] =
                restore_line(lines[i], references[i].sf.size(), references[i].nodes, config);
        });
    } else {
        const std::vector<std::string> lines = read_lines(*options.pred_layouts);
        if (lines.size() != references.size()) {
            throw ConsistencyError("layouts file has " + std::to_string(lines.size()) +
                                   " lines for " + std::to_string(references.size()) +
                                   " reference samples");
        }
        for (std::size_t i = 0; i < lines.size(); ++i) {
            DecodedLine decoded = layout_line_from_json(lines[i]);
            if (decoded.layout) {
                predictions[i].layout = std::move(decoded.layout);
            } else {
                predictions[i].error = decoded.error;
            }
        }
    }

    // Join predictions with reference structure once.
    std::vector<std::optional<VisualRelationshipSet>> pred_sets(references.size());
    std::vector<std::string> pred_errors(references.size());
    for (std::size_t i = 0; i < references.size(); ++i) {
        if (!predictions[i].layout) {
            pred_errors[i] = predictions[i].error;
            continue;
        }
        try {
            pred_sets[i] =
                layout_to_visual_relationships(references[i].graph, *predictions[i].layout);
        } catch (const Error& e) {
            pred_errors[i] = e.what();
        }
    }

    std::filesystem::create_directories(options.out_dir);
    EvaluateSummary summary;
    summary.samples = references.size();
    for (const auto& e : pred_errors) {
        if (!e.empty()) ++summary.misaligned;
    }
    for (double t : config.t_ious) {
        SleuConfig sleu_config;
        sleu_config.t_iou = t;
        sleu_config.max_order = config.max_order;
        json samples_json = json::array();
        double total = 0;
        std::vector<SleuResult> results(references.size());
        parallel_for(references.size(), config.jobs, [&](std::size_t i) {
            if (pred_sets[i]) {
                results[i] = sleu_score(*pred_sets[i], references[i].refs, sleu_config);
            }
        });
        for (std::size_t i = 0; i < references.size(); ++i) {
            json entry;
            entry["id"] = references[i].id;
            if (pred_sets[i]) {
                entry["sleu"] = results[i].score;
                entry["p"] = results[i].per_order;
                entry["chosen_reference"] = results[i].chosen_reference;
                total += results[i].score;
            } else {
                // Misaligned or undecodable predictions score 0.
                entry["sleu"] = 0.0;
                entry["p"] = std::vector<double>(static_cast<std::size_t>(config.max_order), 0.0);
                entry["chosen_reference"] = 0;
                entry["error"] = pred_errors[i];
            }
            samples_json.push_back(std::move(entry));
        }
        const double mean = total / static_cast<double>(references.size());
        json report;
        report["t_iou"] = t;
        report["max_order"] = config.max_order;
        report["mean_sleu"] = mean;
        report["samples"] = std::move(samples_json);
        const std::filesystem::path report_path =
            options.out_dir / (options.report_prefix + "_tiou_" + format_threshold(t) + ".json");
        std::ofstream out(report_path);
        if (!out) throw IoError("cannot write report " + report_path.string());
        out << report.dump(2) << '\n';
        summary.means.emplace_back(t, mean);
        summary.reports.push_back(report_path);
        log << "t_iou " << format_threshold(t) << ": mean SLEU " << mean << '\n';
    }
    if (summary.misaligned > 0) {
        log << summary.misaligned << " prediction(s) scored 0 (misaligned or undecodable)\n";
    }
    return summary;
}

// ---- baseline ----

BaselineTrainSummary cmd_baseline_train(const BaselineTrainOptions& options,
                                        const PipelineConfig& config, std::ostream& log) {
    const std::vector<std::string> sf_lines = read_lines(options.sf);
    const std::vector<std::string> bacs_lines = read_lines(options.bacs);
    if (sf_lines.size() != bacs_lines.size()) {
        throw ConsistencyError("training files differ in length: " +
                               std::to_string(sf_lines.size()) + " sf vs " +
                               std::to_string(bacs_lines.size()) + " bacs");
    }
    std::vector<std::pair<SfSequence, BacsSequence>> pairs;
    pairs.reserve(sf_lines.size());
    for (std::size_t i = 0; i < sf_lines.size(); ++i) {
        try {
            SfSequence sf = parse_sf(sf_lines[i]);
            const std::vector<BacsToken> tokens = parse_bacs_tokens(
                bacs_lines[i], config.codec.grid_max, config.codec.ar_quantizer.bins);
            BacsSequence bacs = bacs_from_tokens(tokens, sf.size(), config.codec.mode,
                                                 config.codec.include_imgar);
            pairs.emplace_back(std::move(sf), std::move(bacs));
        } catch (const Error& e) {
            throw ParseError("training pair at line " + std::to_string(i) + ": " + e.what());
        }
    }
    const BaselineTable table = train_baseline(pairs, config.codec.grid_max);
    save_table(table, options.out_table);
    log << "trained on " << pairs.size() << " pairs -> " << options.out_table.string() << '\n';
    return BaselineTrainSummary{pairs.size()};
}

BaselinePredictSummary cmd_baseline_predict(const BaselinePredictOptions& options,
                                            const PipelineConfig& config, std::ostream& log) {
    const BaselineTable table = load_table(options.table);
    const std::vector<std::string> sf_lines = read_lines(options.sf);
    std::vector<std::string> out_lines(sf_lines.size());
    parallel_for(sf_lines.size(), config.jobs, [&](std::size_t i) {
        const SfSequence sf = parse_sf(sf_lines[i]);
        out_lines[i] = serialize_bacs(predict_baseline(sf, table, config.codec.include_imgar));
    });
    write_lines(out_lines, options.out_bacs);
    log << "predicted " << sf_lines.size() << " sequences -> " << options.out_bacs.string() << '\n';
    return BaselinePredictSummary{sf_lines.size()};
}

}  // namespace sgl
