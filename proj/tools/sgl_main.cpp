#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sgl/errors.hpp"
#include "sgl/pipeline.hpp"

namespace {

// Common flags shared by every subcommand. Values land in the config with
// precedence: built-in defaults < --config file < explicit flags.
struct CommonFlags {
    std::string config_path;
    std::uint64_t seed = 0;
    int jobs = 1;
    std::vector<double> t_ious;
    int grid_max = 40;
    std::string mode = "relative";
    bool imgar = false;

    CLI::Option* config_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* jobs_opt = nullptr;
    CLI::Option* t_iou_opt = nullptr;
    CLI::Option* grid_max_opt = nullptr;
    CLI::Option* mode_opt = nullptr;
    CLI::Option* imgar_opt = nullptr;

    void attach(CLI::App* app) {
        config_opt = app->add_option("--config", config_path,
                                     "Config file (JSON object or key=value lines)");
        seed_opt = app->add_option("--seed", seed, "Seed for all randomized steps");
        jobs_opt = app->add_option("--jobs", jobs, "Worker threads for per-sample work");
        t_iou_opt = app->add_option("--t-iou", t_ious, "IoU threshold (repeatable)");
        grid_max_opt = app->add_option("--grid-max", grid_max, "Long side of the quantized grid");
        mode_opt = app->add_option("--mode", mode, "Position encoding: relative or absolute")
                       ->check(CLI::IsMember({"relative", "absolute"}));
        imgar_opt = app->add_flag("--imgar,!--no-imgar", imgar,
                                  "Prepend the aspect-ratio token to BACS sequences");
    }

    sgl::PipelineConfig build() const {
        sgl::PipelineConfig config;
        if (config_opt->count() > 0) {
            config = sgl::load_pipeline_config(config_path);
        }
        if (seed_opt->count() > 0) config.seed = seed;
        if (jobs_opt->count() > 0) config.jobs = jobs;
        if (t_iou_opt->count() > 0) config.t_ious = t_ious;
        if (grid_max_opt->count() > 0) config.codec.grid_max = grid_max;
        if (mode_opt->count() > 0) {
            config.codec.mode =
                mode == "absolute" ? sgl::BacsMode::absolute : sgl::BacsMode::relative;
        }
        if (imgar_opt->count() > 0) config.codec.include_imgar = imgar;
        return config;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Scene-graph layout toolkit: sequence codecs, restoration and SLEU evaluation"};
    app.require_subcommand(1);

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Split and filter a corpus");
    std::string ingest_corpus;
    std::string train_manifest;
    std::string val_manifest;
    std::string test_manifest;
    std::string ingest_out;
    ingest->add_option("--corpus", ingest_corpus, "Corpus JSON file")->required();
    ingest->add_option("--train", train_manifest, "Training split manifest")->required();
    auto* val_opt = ingest->add_option("--val", val_manifest, "Validation split manifest");
    auto* test_opt = ingest->add_option("--test", test_manifest, "Test split manifest");
    ingest->add_option("--out-dir", ingest_out, "Output directory")->required();
    CommonFlags ingest_flags;
    ingest_flags.attach(ingest);

    // encode
    auto* encode = app.add_subcommand("encode", "Encode a corpus into .sf/.nodes/.bacs files");
    std::string encode_corpus;
    std::string encode_prefix;
    encode->add_option("--corpus", encode_corpus, "Corpus JSON file")->required();
    encode->add_option("--out-prefix", encode_prefix, "Output path prefix")->required();
    CommonFlags encode_flags;
    encode_flags.attach(encode);

    // augment
    auto* augment = app.add_subcommand("augment", "Expand a corpus into training variants");
    std::string augment_corpus;
    std::string augment_prefix;
    int max_variants = -1;
    augment->add_option("--corpus", augment_corpus, "Corpus JSON file")->required();
    augment->add_option("--out-prefix", augment_prefix, "Output path prefix")->required();
    auto* max_variants_opt =
        augment->add_option("--max-variants", max_variants, "Variant cap per sample");
    CommonFlags augment_flags;
    augment_flags.attach(augment);

    // decode
    auto* decode = app.add_subcommand("decode", "Restore layouts from a predicted BACS file");
    std::string decode_bacs;
    std::string decode_sf;
    std::string decode_nodes;
    std::string decode_out;
    decode->add_option("--pred", decode_bacs, "Predicted .bacs file")->required();
    decode->add_option("--sf", decode_sf, "Source .sf file")->required();
    decode->add_option("--nodes", decode_nodes, "Sidecar .nodes file")->required();
    decode->add_option("--out", decode_out, "Output layouts file (JSON lines)")->required();
    CommonFlags decode_flags;
    decode_flags.attach(decode);

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "Score predictions with SLEU");
    std::string eval_pred_bacs;
    std::string eval_pred_layouts;
    std::vector<std::string> eval_refs;
    std::string eval_out;
    std::string eval_prefix = "report";
    auto* pred_bacs_opt =
        evaluate->add_option("--pred-bacs", eval_pred_bacs, "Predicted .bacs file");
    auto* pred_layouts_opt =
        evaluate->add_option("--pred-layouts", eval_pred_layouts, "Restored layouts file");
    pred_bacs_opt->excludes(pred_layouts_opt);
    evaluate->add_option("--ref", eval_refs, "Reference corpus (repeatable)")->required();
    evaluate->add_option("--out-dir", eval_out, "Report output directory")->required();
    evaluate->add_option("--report-prefix", eval_prefix, "Report file name prefix");
    CommonFlags evaluate_flags;
    evaluate_flags.attach(evaluate);

    // baseline
    auto* baseline = app.add_subcommand("baseline", "Statistical SF-to-BACS translator");
    baseline->require_subcommand(1);
    auto* baseline_train = baseline->add_subcommand("train", "Fit geometry statistics");
    std::string train_sf;
    std::string train_bacs;
    std::string train_out;
    baseline_train->add_option("--sf", train_sf, "Training .sf file")->required();
    baseline_train->add_option("--bacs", train_bacs, "Training .bacs file")->required();
    baseline_train->add_option("--out", train_out, "Output table file")->required();
    CommonFlags train_flags;
    train_flags.attach(baseline_train);

    auto* baseline_predict = baseline->add_subcommand("predict", "Translate SF sequences");
    std::string predict_table;
    std::string predict_sf;
    std::string predict_out;
    baseline_predict->add_option("--table", predict_table, "Trained table file")->required();
    baseline_predict->add_option("--sf", predict_sf, "Input .sf file")->required();
    baseline_predict->add_option("--out", predict_out, "Output .bacs file")->required();
    CommonFlags predict_flags;
    predict_flags.attach(baseline_predict);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ingest) {
            sgl::IngestOptions options;
            options.corpus = ingest_corpus;
            options.splits.emplace_back("train", train_manifest);
            if (val_opt->count() > 0) options.splits.emplace_back("val", val_manifest);
            if (test_opt->count() > 0) options.splits.emplace_back("test", test_manifest);
            options.out_dir = ingest_out;
            sgl::cmd_ingest(options, ingest_flags.build(), std::cout);
        } else if (*encode) {
            sgl::cmd_encode(sgl::EncodeOptions{encode_corpus, encode_prefix},
                            encode_flags.build(), std::cout);
        } else if (*augment) {
            sgl::PipelineConfig config = augment_flags.build();
            if (max_variants_opt->count() > 0) config.max_variants = max_variants;
            sgl::cmd_augment(sgl::AugmentOptions{augment_corpus, augment_prefix}, config,
                             std::cout);
        } else if (*decode) {
            sgl::cmd_decode(sgl::DecodeOptions{decode_bacs, decode_sf, decode_nodes, decode_out},
                            decode_flags.build(), std::cout);
        } else if (*evaluate) {
            sgl::EvaluateOptions options;
            if (pred_bacs_opt->count() > 0) options.pred_bacs = eval_pred_bacs;
            if (pred_layouts_opt->count() > 0) options.pred_layouts = eval_pred_layouts;
            for (const auto& ref : eval_refs) options.refs.emplace_back(ref);
            options.out_dir = eval_out;
            options.report_prefix = eval_prefix;
            sgl::cmd_evaluate(options, evaluate_flags.build(), std::cout);
        } else if (*baseline_train) {
            sgl::cmd_baseline_train(sgl::BaselineTrainOptions{train_sf, train_bacs, train_out},
                                    train_flags.build(), std::cout);
        } else if (*baseline_predict) {
            sgl::cmd_baseline_predict(
                sgl::BaselinePredictOptions{predict_table, predict_sf, predict_out},
                predict_flags.build(), std::cout);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
