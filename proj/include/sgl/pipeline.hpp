#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sgl/augment.hpp"
#include "sgl/bacs_codec.hpp"
#include "sgl/baseline.hpp"
#include "sgl/filter.hpp"
#include "sgl/sleu.hpp"

namespace sgl {

// Everything a pipeline run needs. Loaded from a config file (JSON or
// key=value lines), then overridden by command-line flags.
struct PipelineConfig {
    FilterConfig filter;
    CodecConfig codec;
    int max_variants = 50;
    std::vector<double> t_ious{0.0, 0.25, 0.5, 0.75};
    int max_order = 3;
    std::uint64_t seed = 0;
    int jobs = 1;

    AugmentConfig augment_config() const {
        return AugmentConfig{max_variants, filter.max_relationships, seed};
    }
};

// Accepts a JSON object or key=value lines (one per line, '#' comments).
// Unknown keys are errors. Recognized keys: grid_max, ar_interval, ar_min,
// ar_bins, mode, include_imgar, min_object_class_count,
// min_relationship_class_count, min_box_side, min_objects, max_objects,
// max_relationships, max_variants, t_ious, max_order, seed, jobs.
void apply_config_text(PipelineConfig& config, const std::string& text, const std::string& origin);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

std::vector<std::string> read_lines(const std::filesystem::path& path);
void write_lines(const std::vector<std::string>& lines, const std::filesystem::path& path);

// ---- ingest ----

struct IngestOptions {
    std::filesystem::path corpus;
    // Split name -> manifest path. Frequencies are counted over the first
    // split, which is therefore the training split.
    std::vector<std::pair<std::string, std::filesystem::path>> splits;
    std::filesystem::path out_dir;
};

struct SplitSummary {
    std::string name;
    std::size_t samples_in = 0;
    std::size_t samples_out = 0;
    std::size_t objects_out = 0;
    std::size_t relationships_out = 0;
};

struct IngestSummary {
    std::vector<SplitSummary> splits;
    std::size_t unassigned = 0;
};

IngestSummary cmd_ingest(const IngestOptions& options, const PipelineConfig& config,
                         std::ostream& log);

// ---- encode ----

struct EncodeOptions {
    std::filesystem::path corpus;
    std::filesystem::path out_prefix;  // writes <prefix>.sf/.nodes/.bacs
};

struct EncodeSummary {
    std::size_t samples = 0;
};

EncodeSummary cmd_encode(const EncodeOptions& options, const PipelineConfig& config,
                         std::ostream& log);

// ---- augment ----

struct AugmentOptions {
    std::filesystem::path corpus;
    std::filesystem::path out_prefix;
};

struct AugmentSummary {
    std::size_t samples = 0;
    std::size_t variants = 0;
};

AugmentSummary cmd_augment(const AugmentOptions& options, const PipelineConfig& config,
                           std::ostream& log);

// ---- decode ----

struct DecodeOptions {
    std::filesystem::path bacs;
    std::filesystem::path sf;
    std::filesystem::path nodes;
    std::filesystem::path out;  // restored layouts, one JSON object per line
};

struct DecodeSummary {
    std::size_t lines = 0;
    std::size_t misaligned = 0;
};

DecodeSummary cmd_decode(const DecodeOptions& options, const PipelineConfig& config,
                         std::ostream& log);

// Layout line (de)serialization for the decode output format.
std::string layout_line_to_json(const QuantizedLayout& layout, std::size_t line);
std::string layout_error_to_json(const std::string& error, std::size_t line);

struct DecodedLine {
    std::size_t line = 0;
    std::optional<QuantizedLayout> layout;
    std::string error;  // non-empty when the line could not be restored
};

DecodedLine layout_line_from_json(const std::string& text);

// ---- evaluate ----

struct EvaluateOptions {
    std::optional<std::filesystem::path> pred_bacs;     // exactly one of
    std::optional<std::filesystem::path> pred_layouts;  // these two
    std::vector<std::filesystem::path> refs;            // >= 1 reference corpora
    std::filesystem::path out_dir;
    std::string report_prefix = "report";
};

struct EvaluateSummary {
    std::size_t samples = 0;
    std::size_t misaligned = 0;
    std::vector<std::pair<double, double>> means;  // (t_iou, mean_sleu)
    std::vector<std::filesystem::path> reports;
};

EvaluateSummary cmd_evaluate(const EvaluateOptions& options, const PipelineConfig& config,
                             std::ostream& log);

// ---- baseline ----

struct BaselineTrainOptions {
    std::filesystem::path sf;
    std::filesystem::path bacs;
    std::filesystem::path out_table;
};

struct BaselineTrainSummary {
    std::size_t pairs = 0;
};

BaselineTrainSummary cmd_baseline_train(const BaselineTrainOptions& options,
                                        const PipelineConfig& config, std::ostream& log);

struct BaselinePredictOptions {
    std::filesystem::path table;
    std::filesystem::path sf;
    std::filesystem::path out_bacs;
};

struct BaselinePredictSummary {
    std::size_t sequences = 0;
};

BaselinePredictSummary cmd_baseline_predict(const BaselinePredictOptions& options,
                                            const PipelineConfig& config, std::ostream& log);

}  // namespace sgl
