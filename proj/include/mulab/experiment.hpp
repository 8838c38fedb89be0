#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mulab/dataset.hpp"
#include "mulab/metrics.hpp"
#include "mulab/train.hpp"
#include "mulab/unlearn.hpp"

namespace mulab {

/// Dataset source: a synthetic blob spec or an IDX file quadruple.
struct DatasetSpec {
    enum class Kind { Synthetic, Idx };
    Kind kind = Kind::Synthetic;

    // synthetic
    int classes = 4;
    int per_class = 100;
    int test_per_class = 50;
    int dim = 2;
    double spread = 0.15;
    std::uint64_t seed = 0;

    // idx
    std::string train_images;
    std::string train_labels;
    std::string test_images;
    std::string test_labels;
    std::size_t limit = 0; ///< keep only the first N training rows; 0 = all
};

struct TaskSpec {
    SplitMode mode = SplitMode::RandomFraction;
    double fraction = 0.1;
    std::vector<int> class_ids;
    std::optional<std::size_t> oversample_to;
};

struct StageParams {
    std::size_t epochs = 1;
    double learning_rate = 0.01;
    std::size_t batch_size = 32;
};

/// Everything one experiment run needs. Parsed from a JSON config file;
/// command-line flags may override seeds and the output directory.
struct ExperimentConfig {
    DatasetSpec dataset;
    std::vector<std::size_t> architecture; ///< full width chain
    StageParams train;
    StageParams unlearn;
    TaskSpec task;
    std::vector<std::string> methods;
    std::vector<std::uint64_t> seeds;
    std::size_t relearn_epochs = 0; ///< 0 disables the relearn experiment
    std::string output_dir = "out";
};

inline const std::vector<std::string> kKnownMethods = {
    "retrain",
    "finetune",
    "neg_grad",
    "camu",
    "camu_ablation_no_counterfactual",
    "camu_ablation_no_repr_alignment",
};

/// Parses a JSON config document. Throws ConfigError on malformed JSON or
/// wrong field types; semantic problems are validate()'s job.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config_file(const std::string& path);

/// Human-readable diagnostics, each naming the field and violated
/// constraint. Empty iff the config is runnable.
std::vector<std::string> validate(const ExperimentConfig& config);

struct LoadedData {
    Dataset train;
    Dataset test;
};

/// Materializes the configured dataset. Throws ParseError on IDX problems.
LoadedData load_dataset(const DatasetSpec& spec);

struct RunManifest {
    std::string config_hash;
    std::string tool_version;
    std::string started;
    std::string finished;
    std::vector<std::string> report_paths;
    std::vector<MetricsReport> reports;        ///< per (method, seed), seed-major
    std::vector<MetricsReport> mean_reports;   ///< per method, config order
};

/// Executes the full protocol: per seed, train the original model, build the
/// splits and the joint dataset, run every requested method, evaluate, and
/// optionally run the relearn experiment. Writes reports.csv,
/// reports_mean.csv, relearn.csv (when enabled) and manifest.json under
/// output_dir. Throws ConfigError for invalid configs, ParseError for data
/// problems, DivergenceError (naming the method) for non-finite losses.
RunManifest run(const ExperimentConfig& config);

/// Stable 64-bit FNV-1a over the canonical serialized config.
std::string config_hash(const ExperimentConfig& config);

/// Two-decimal presentation table of the reports; raw CSVs keep full precision.
std::string render_summary(const std::vector<MetricsReport>& reports);

/// Entry point behind the executable: parses argv, runs, maps failures to
/// exit codes (0 ok, 2 invalid config, 3 data load failure, 4 divergence).
int cli_main(const std::vector<std::string>& args);

} // namespace mulab
