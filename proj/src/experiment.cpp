#include "mulab/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mulab/errors.hpp"
#include "mulab/idx.hpp"
#include "mulab/rng.hpp"
#include "mulab/version.hpp"

namespace mulab {

namespace {

using nlohmann::json;

std::string fmt_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_round(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

DatasetSpec parse_dataset(const json& j) {
    DatasetSpec spec;
    const std::string kind = j.value("type", "synthetic");
    if (kind == "synthetic") {
        spec.kind = DatasetSpec::Kind::Synthetic;
        spec.classes = j.value("classes", spec.classes);
        spec.per_class = j.value("per_class", spec.per_class);
        spec.test_per_class = j.value("test_per_class", spec.test_per_class);
        spec.dim = j.value("dim", spec.dim);
        spec.spread = j.value("spread", spec.spread);
        spec.seed = j.value("seed", spec.seed);
    } else if (kind == "idx") {
        spec.kind = DatasetSpec::Kind::Idx;
        spec.train_images = j.value("train_images", "");
        spec.train_labels = j.value("train_labels", "");
        spec.test_images = j.value("test_images", "");
        spec.test_labels = j.value("test_labels", "");
        spec.limit = j.value("limit", spec.limit);
    } else {
        throw ConfigError("dataset.type must be \"synthetic\" or \"idx\", got \"" + kind + "\"");
    }
    return spec;
}

TaskSpec parse_task(const json& j) {
    TaskSpec task;
    const std::string mode = j.value("mode", "random_fraction");
    if (mode == "random_fraction") {
        task.mode = SplitMode::RandomFraction;
        task.fraction = j.value("fraction", task.fraction);
    } else if (mode == "class_removal") {
        task.mode = SplitMode::ClassRemoval;
        task.class_ids = j.value("classes", std::vector<int>{});
    } else {
        throw ConfigError("task.mode must be \"random_fraction\" or \"class_removal\", got \"" + mode + "\"");
    }
    if (j.contains("oversample_to")) {
        task.oversample_to = j.at("oversample_to").get<std::size_t>();
    }
    return task;
}

StageParams parse_stage(const json& j, const StageParams& defaults) {
    StageParams stage = defaults;
    stage.epochs = j.value("epochs", stage.epochs);
    stage.learning_rate = j.value("learning_rate", stage.learning_rate);
    stage.batch_size = j.value("batch_size", stage.batch_size);
    return stage;
}

json config_to_json(const ExperimentConfig& config) {
    json j;
    if (config.dataset.kind == DatasetSpec::Kind::Synthetic) {
        j["dataset"] = {{"type", "synthetic"},       {"classes", config.dataset.classes},
                        {"per_class", config.dataset.per_class}, {"test_per_class", config.dataset.test_per_class},
                        {"dim", config.dataset.dim}, {"spread", config.dataset.spread},
                        {"seed", config.dataset.seed}};
    } else {
        j["dataset"] = {{"type", "idx"},
                        {"train_images", config.dataset.train_images},
                        {"train_labels", config.dataset.train_labels},
                        {"test_images", config.dataset.test_images},
                        {"test_labels", config.dataset.test_labels},
                        {"limit", config.dataset.limit}};
    }
    j["architecture"] = config.architecture;
    j["train"] = {{"epochs", config.train.epochs},
                  {"learning_rate", config.train.learning_rate},
                  {"batch_size", config.train.batch_size}};
    j["unlearn"] = {{"epochs", config.unlearn.epochs},
                    {"learning_rate", config.unlearn.learning_rate},
                    {"batch_size", config.unlearn.batch_size}};
    if (config.task.mode == SplitMode::RandomFraction) {
        j["task"] = {{"mode", "random_fraction"}, {"fraction", config.task.fraction}};
    } else {
        j["task"] = {{"mode", "class_removal"}, {"classes", config.task.class_ids}};
    }
    if (config.task.oversample_to) j["task"]["oversample_to"] = *config.task.oversample_to;
    j["methods"] = config.methods;
    j["seeds"] = config.seeds;
    j["relearn_epochs"] = config.relearn_epochs;
    j["output_dir"] = config.output_dir;
    return j;
}

} // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: JSON parse failure: ") + e.what());
    }
    try {
        ExperimentConfig config;
        if (j.contains("dataset")) config.dataset = parse_dataset(j.at("dataset"));
        config.architecture = j.value("architecture", config.architecture);
        if (j.contains("train")) config.train = parse_stage(j.at("train"), config.train);
        if (j.contains("unlearn")) config.unlearn = parse_stage(j.at("unlearn"), config.unlearn);
        if (j.contains("task")) config.task = parse_task(j.at("task"));
        config.methods = j.value("methods", config.methods);
        config.seeds = j.value("seeds", config.seeds);
        config.relearn_epochs = j.value("relearn_epochs", config.relearn_epochs);
        config.output_dir = j.value("output_dir", config.output_dir);
        return config;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: bad field type: ") + e.what());
    }
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::vector<std::string> validate(const ExperimentConfig& config) {
    std::vector<std::string> issues;
    auto check = [&](bool ok, const std::string& message) {
        if (!ok) issues.push_back(message);
    };

    if (config.dataset.kind == DatasetSpec::Kind::Synthetic) {
        check(config.dataset.classes >= 2, "dataset.classes: need at least 2 classes");
        check(config.dataset.per_class >= 1, "dataset.per_class: must be positive");
        check(config.dataset.test_per_class >= 1, "dataset.test_per_class: must be positive");
        check(config.dataset.dim >= 1, "dataset.dim: must be positive");
        check(config.dataset.spread >= 0.0, "dataset.spread: must be non-negative");
    } else {
        check(!config.dataset.train_images.empty(), "dataset.train_images: path required");
        check(!config.dataset.train_labels.empty(), "dataset.train_labels: path required");
        check(!config.dataset.test_images.empty(), "dataset.test_images: path required");
        check(!config.dataset.test_labels.empty(), "dataset.test_labels: path required");
    }

    check(config.architecture.size() >= 2, "architecture: need at least [input, classes] widths");
    for (std::size_t w : config.architecture) {
        if (w == 0) {
            issues.push_back("architecture: zero layer width");
            break;
        }
    }
    check(config.train.epochs >= 1, "train.epochs: must be at least 1");
    check(config.train.learning_rate > 0.0, "train.learning_rate: must be positive");
    check(config.train.batch_size >= 1, "train.batch_size: must be at least 1");
    check(config.unlearn.epochs >= 1, "unlearn.epochs: must be at least 1");
    check(config.unlearn.learning_rate > 0.0, "unlearn.learning_rate: must be positive");
    check(config.unlearn.batch_size >= 1, "unlearn.batch_size: must be at least 1");

    if (config.task.mode == SplitMode::RandomFraction) {
        check(config.task.fraction > 0.0 && config.task.fraction < 1.0,
              "task.fraction: must lie in (0, 1)");
    } else {
        check(!config.task.class_ids.empty(), "task.classes: class_removal needs at least one class id");
        for (int c : config.task.class_ids) {
            if (c < 0) {
                issues.push_back("task.classes: negative class id");
                break;
            }
        }
    }

    check(!config.methods.empty(), "methods: at least one method required");
    for (const auto& m : config.methods) {
        if (std::find(kKnownMethods.begin(), kKnownMethods.end(), m) == kKnownMethods.end()) {
            issues.push_back("methods: unknown method \"" + m + "\"");
        }
    }
    check(!config.seeds.empty(), "seeds: at least one seed required");
    check(!config.output_dir.empty(), "output_dir: path required");
    return issues;
}

LoadedData load_dataset(const DatasetSpec& spec) {
    LoadedData data;
    if (spec.kind == DatasetSpec::Kind::Synthetic) {
        Dataset all = synth_blobs(spec.classes, spec.per_class + spec.test_per_class, spec.dim, spec.spread,
                                  spec.seed);
        TrainTestSplit parts = holdout_last_per_class(all, spec.test_per_class);
        data.train = std::move(parts.train);
        data.test = std::move(parts.test);
    } else {
        data.train = load_idx(spec.train_images, spec.train_labels);
        data.test = load_idx(spec.test_images, spec.test_labels);
        if (spec.limit > 0 && spec.limit < data.train.size()) {
            std::vector<std::size_t> head(spec.limit);
            for (std::size_t i = 0; i < spec.limit; ++i) head[i] = i;
            data.train = take_rows(data.train, head);
        }
    }
    return data;
}

std::string config_hash(const ExperimentConfig& config) {
    const std::string canon = config_to_json(config).dump();
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : canon) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a:%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

namespace {

struct MethodOutcome {
    UnlearnResult result;
};

MethodOutcome run_method(const std::string& method, const Model& original, const SplitResult& splits,
                         const JointDataset& joint, const ExperimentConfig& config, std::uint64_t seed,
                         const TrainConfig& train_config) {
    UnlearnConfig ucfg;
    ucfg.epochs = config.unlearn.epochs;
    ucfg.learning_rate = config.unlearn.learning_rate;
    ucfg.batch_size = config.unlearn.batch_size;
    ucfg.seed = seed;

    MethodOutcome outcome;
    if (method == "retrain") {
        const auto start = std::chrono::steady_clock::now();
        outcome.result.model = retrain(splits.remaining, train_config);
        outcome.result.wall_time_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    } else if (method == "finetune") {
        outcome.result = finetune(original, splits.remaining, ucfg);
    } else if (method == "neg_grad") {
        outcome.result = neg_grad(original, splits.forgetting, splits.remaining, ucfg);
    } else if (method == "camu") {
        outcome.result = camu(original, joint, ucfg);
    } else if (method == "camu_ablation_no_counterfactual") {
        ucfg.use_counterfactual = false;
        outcome.result = camu(original, joint, ucfg);
    } else if (method == "camu_ablation_no_repr_alignment") {
        ucfg.use_repr_alignment = false;
        outcome.result = camu(original, joint, ucfg);
    } else {
        throw ConfigError("unknown method \"" + method + "\"");
    }
    return outcome;
}

void write_report_row(std::ofstream& out, const MetricsReport& report) {
    auto opt_field = [](const std::optional<double>& v) { return v ? fmt_full(*v) : std::string(); };
    std::string seed_list;
    for (std::size_t i = 0; i < report.seeds.size(); ++i) {
        if (i > 0) seed_list += ';';
        seed_list += std::to_string(report.seeds[i]);
    }
    out << report.method << ',' << task_name(report.task) << ',' << seed_list << ','
        << opt_field(report.r_train) << ',' << opt_field(report.f_train) << ',' << opt_field(report.test)
        << ',' << opt_field(report.r_test) << ',' << opt_field(report.f_test) << ',' << fmt_full(report.mia)
        << ',' << fmt_full(report.wall_time_seconds) << '\n';
}

constexpr const char* kCsvHeader = "method,task,seed,R_tr,F_tr,Ts,R_ts,F_ts,mia,wall_time_seconds";

} // namespace

RunManifest run(const ExperimentConfig& config) {
    const auto issues = validate(config);
    if (!issues.empty()) {
        std::string joined;
        for (const auto& issue : issues) joined += issue + "; ";
        throw ConfigError("invalid config: " + joined);
    }

    RunManifest manifest;
    manifest.config_hash = config_hash(config);
    manifest.tool_version = kToolVersion;
    manifest.started = iso_timestamp();

    LoadedData data = load_dataset(config.dataset);
    validate_dataset(data.train);

    if (config.architecture.front() != data.train.dim()) {
        throw ConfigError("architecture: input width " + std::to_string(config.architecture.front()) +
                          " != dataset feature width " + std::to_string(data.train.dim()));
    }
    if (config.architecture.back() < static_cast<std::size_t>(data.train.num_classes)) {
        throw ConfigError("architecture: output width " + std::to_string(config.architecture.back()) +
                          " < dataset classes " + std::to_string(data.train.num_classes));
    }

    const TaskKind task_kind =
        config.task.mode == SplitMode::RandomFraction ? TaskKind::RandomRemoval : TaskKind::ClassRemoval;

    struct RelearnRow {
        std::string method;
        std::uint64_t seed;
        std::size_t epoch;
        double gap;
    };
    std::vector<RelearnRow> relearn_rows;

    for (std::uint64_t seed : config.seeds) {
        TrainConfig train_config;
        train_config.architecture = config.architecture;
        train_config.epochs = config.train.epochs;
        train_config.learning_rate = config.train.learning_rate;
        train_config.batch_size = config.train.batch_size;
        train_config.seed = seed;

        Model original = train(data.train, train_config);

        SplitSpec split_spec;
        split_spec.mode = config.task.mode;
        split_spec.fraction = config.task.fraction;
        split_spec.class_ids = config.task.class_ids;
        split_spec.seed = seed;
        SplitResult splits = split(data.train, split_spec);

        JointDataset joint = prepare_joint(splits.forgetting, splits.remaining, seed, config.task.oversample_to);

        TaskSplits eval_splits;
        eval_splits.forgetting = splits.forgetting;
        eval_splits.remaining = splits.remaining;
        eval_splits.test = data.test;
        eval_splits.task = task_kind;
        eval_splits.forgotten_classes = config.task.class_ids;

        for (const auto& method : config.methods) {
            MethodOutcome outcome;
            try {
                outcome = run_method(method, original, splits, joint, config, seed, train_config);
            } catch (const DivergenceError& e) {
                throw DivergenceError("method " + method + ": " + e.what());
            }
            manifest.reports.push_back(
                evaluate(method, outcome.result.model, eval_splits, seed, outcome.result.wall_time_seconds));

            if (config.relearn_epochs >= 1) {
                RelearnConfig rcfg;
                rcfg.epochs = config.relearn_epochs;
                rcfg.learning_rate = config.unlearn.learning_rate;
                rcfg.batch_size = config.unlearn.batch_size;
                rcfg.seed = combine_seed(seed, 0x52454cULL);
                RelearnCurve curve = relearn_curve(outcome.result.model, eval_splits, rcfg);
                for (std::size_t e = 0; e < curve.gaps.size(); ++e) {
                    relearn_rows.push_back({method, seed, e, curve.gaps[e]});
                }
            }
        }
    }

    // seed-averaged reports, in config method order
    for (const auto& method : config.methods) {
        std::vector<MetricsReport> of_method;
        for (const auto& report : manifest.reports) {
            if (report.method == method) of_method.push_back(report);
        }
        manifest.mean_reports.push_back(average_reports(of_method));
    }

    namespace fs = std::filesystem;
    fs::create_directories(config.output_dir);
    const fs::path out_dir(config.output_dir);

    {
        std::ofstream out(out_dir / "reports.csv");
        out << kCsvHeader << '\n';
        for (const auto& report : manifest.reports) write_report_row(out, report);
        manifest.report_paths.push_back("reports.csv");
    }
    {
        std::ofstream out(out_dir / "reports_mean.csv");
        out << kCsvHeader << '\n';
        for (const auto& report : manifest.mean_reports) write_report_row(out, report);
        manifest.report_paths.push_back("reports_mean.csv");
    }
    if (config.relearn_epochs >= 1) {
        std::ofstream out(out_dir / "relearn.csv");
        out << "method,task,seed,epoch,gap\n";
        for (const auto& row : relearn_rows) {
            out << row.method << ',' << task_name(task_kind) << ',' << row.seed << ',' << row.epoch << ','
                << fmt_full(row.gap) << '\n';
        }
        manifest.report_paths.push_back("relearn.csv");
    }

    manifest.finished = iso_timestamp();
    {
        json j;
        j["tool"] = kToolName;
        j["version"] = manifest.tool_version;
        j["csv_schema"] = kCsvSchemaVersion;
        j["config_hash"] = manifest.config_hash;
        j["config"] = config_to_json(config);
        j["started"] = manifest.started;
        j["finished"] = manifest.finished;
        j["files"] = manifest.report_paths;
        std::ofstream out(out_dir / "manifest.json");
        out << j.dump(2) << '\n';
    }
    return manifest;
}

std::string render_summary(const std::vector<MetricsReport>& reports) {
    std::ostringstream out;
    auto field = [](const std::optional<double>& v) { return v ? fmt_round(*v) : std::string("-"); };
    out << "method                              task            seed       R_tr     F_tr       Ts     R_ts     F_ts      mia   time_s\n";
    for (const auto& report : reports) {
        std::string seed_list;
        for (std::size_t i = 0; i < report.seeds.size(); ++i) {
            if (i > 0) seed_list += ';';
            seed_list += std::to_string(report.seeds[i]);
        }
        char line[256];
        std::snprintf(line, sizeof line, "%-35s %-15s %-8s %8s %8s %8s %8s %8s %8s %8s\n",
                      report.method.c_str(), task_name(report.task).c_str(), seed_list.c_str(),
                      field(report.r_train).c_str(), field(report.f_train).c_str(), field(report.test).c_str(),
                      field(report.r_test).c_str(), field(report.f_test).c_str(), fmt_round(report.mia).c_str(),
                      fmt_round(report.wall_time_seconds).c_str());
        out << line;
    }
    return out.str();
}

int cli_main(const std::vector<std::string>& args) {
    CLI::App app{"Desk-scale machine unlearning experiment runner"};
    app.require_subcommand(1);

    auto* run_cmd = app.add_subcommand("run", "Execute an experiment config");
    std::string config_path;
    std::vector<std::uint64_t> seed_override;
    std::string out_override;
    bool summary = false;
    run_cmd->add_option("--config", config_path, "Path to the JSON experiment config")->required();
    run_cmd->add_option("--seed", seed_override, "Override the config's seed list (repeatable)");
    run_cmd->add_option("--out", out_override, "Override the config's output directory");
    run_cmd->add_flag("--summary", summary, "Print a rounded results table after the run");

    std::vector<const char*> argv;
    argv.push_back(kToolName);
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        ExperimentConfig config = load_config_file(config_path);
        if (!seed_override.empty()) config.seeds = seed_override;
        if (!out_override.empty()) config.output_dir = out_override;

        const auto issues = validate(config);
        if (!issues.empty()) {
            for (const auto& issue : issues) std::cerr << "config error: " << issue << '\n';
            return 2;
        }

        RunManifest manifest = run(config);
        if (summary) {
            std::cout << render_summary(manifest.reports);
            std::cout << "--- seed averages ---\n";
            std::cout << render_summary(manifest.mean_reports);
        }
        std::cout << "wrote " << manifest.report_paths.size() << " report files to " << config.output_dir
                  << " (config " << manifest.config_hash << ")\n";
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 3;
    } catch (const DivergenceError& e) {
        std::cerr << "divergence: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace mulab
