// Command-line driver: gen-synth, train, eval, noise-sweep.
//
// Exit codes: 0 success, 1 I/O or other failure, 2 invalid configuration or
// input, 3 numeric divergence.

#include "etgnn/checkpoint.hpp"
#include "etgnn/errors.hpp"
#include "etgnn/evaluation.hpp"
#include "etgnn/rng.hpp"
#include "etgnn/synthetic.hpp"
#include "etgnn/training.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace etgnn;

namespace {

enum ExitCode { kOk = 0, kIoFailure = 1, kInvalid = 2, kDiverged = 3 };

enum class Kind { Int, Real, Text, RealList, IntList, OptionalInt };

struct Key {
    const char* name;
    Kind kind;
    const char* help;
};

// Every key a config file may contain. Flags use the same names with dashes.
const std::vector<Key>& synthetic_keys() {
    static const std::vector<Key> keys{
        {"num_events", Kind::Int, "number of events (classes)"},
        {"messages_per_event", Kind::Int, "messages generated per event"},
        {"feature_dim", Kind::Int, "feature dimension"},
        {"class_separation", Kind::Real, "scale of the per-event feature centres"},
        {"element_pool_per_event", Kind::IntList, "hashtag,entity,user pool sizes per event"},
        {"elements_per_message", Kind::Int, "elements drawn per message and view"},
        {"cross_event_element_noise", Kind::Real, "probability an element comes from another event"},
        {"temporal_spread_days", Kind::Real, "width of each event's burst in days"},
    };
    return keys;
}

const std::vector<Key>& train_keys() {
    static const std::vector<Key> keys{
        {"learning_rate", Kind::Real, "Adam learning rate"},
        {"epochs", Kind::Int, "training epochs"},
        {"batch_size", Kind::Int, "nodes per batch"},
        {"lambda_e", Kind::Real, "evidence regulariser weight"},
        {"lambda_c", Kind::Real, "view consistency weight"},
        {"annealing_epochs", Kind::OptionalInt, "ramp lambda_e over this many epochs (0 disables)"},
        {"loss_scope", Kind::Text, "per_view_and_combined or combined_only"},
        {"grad_clip_norm", Kind::Real, "global gradient-norm clip, <= 0 disables"},
        {"adam_beta1", Kind::Real, "Adam beta1"},
        {"adam_beta2", Kind::Real, "Adam beta2"},
        {"adam_epsilon", Kind::Real, "Adam epsilon"},
        {"hidden1", Kind::Int, "first encoder layer width"},
        {"hidden2", Kind::Int, "second encoder layer width"},
        {"evidence_hidden", Kind::Int, "evidence network hidden width"},
        {"split_ratios", Kind::RealList, "train,val,test fractions"},
    };
    return keys;
}

const std::vector<Key>& sweep_keys() {
    static const std::vector<Key> keys{
        {"gammas", Kind::RealList, "noise intensities, ascending"},
        {"target_view", Kind::Text, "view receiving the noise: hashtag, entity or user"},
        {"simple_fusion", Kind::Text, "belief_sum or majority_vote"},
        {"attention_epochs", Kind::Int, "epochs for the attention-fusion baseline head"},
    };
    return keys;
}

json default_config() {
    const SyntheticConfig s;
    const TrainConfig t;
    const NoiseSweepConfig n;
    json c;
    c["seed"] = 1;
    c["num_events"] = s.num_events;
    c["messages_per_event"] = s.messages_per_event;
    c["feature_dim"] = s.feature_dim;
    c["class_separation"] = s.class_separation;
    c["element_pool_per_event"] = s.element_pool_per_event;
    c["elements_per_message"] = s.elements_per_message;
    c["cross_event_element_noise"] = s.cross_event_element_noise;
    c["temporal_spread_days"] = s.temporal_spread_days;
    c["learning_rate"] = t.learning_rate;
    c["epochs"] = t.epochs;
    c["batch_size"] = t.batch_size;
    c["lambda_e"] = t.loss_weights.lambda_e;
    c["lambda_c"] = t.loss_weights.lambda_c;
    c["annealing_epochs"] = nullptr;
    c["loss_scope"] = "per_view_and_combined";
    c["grad_clip_norm"] = t.grad_clip_norm;
    c["adam_beta1"] = t.adam_beta1;
    c["adam_beta2"] = t.adam_beta2;
    c["adam_epsilon"] = t.adam_epsilon;
    c["hidden1"] = t.hidden1;
    c["hidden2"] = t.hidden2;
    c["evidence_hidden"] = t.evidence_hidden;
    c["split_ratios"] = t.split_ratios;
    c["gammas"] = n.gammas;
    c["target_view"] = "hashtag";
    c["simple_fusion"] = "belief_sum";
    c["attention_epochs"] = t.epochs;
    return c;
}

template <typename T>
T get(const json& c, const char* key) {
    try {
        return c.at(key).get<T>();
    } catch (const json::exception&) {
        throw ValidationError(std::string("config key '") + key + "' has the wrong type");
    }
}

/// Flags registered for a subcommand, applied over the file config after parsing.
class Overrides {
public:
    void add(CLI::App& app, const std::vector<Key>& keys) {
        for (const Key& key : keys) {
            std::string flag = std::string("--") + key.name;
            std::replace(flag.begin(), flag.end(), '_', '-');
            Slot& slot = slots_[key.name];
            slot.kind = key.kind;
            if (key.kind == Kind::RealList || key.kind == Kind::IntList) {
                slot.option = app.add_option(flag, slot.list, key.help)->delimiter(',');
            } else {
                slot.option = app.add_option(flag, slot.text, key.help);
            }
        }
    }

    void apply(json& config) const {
        for (const auto& [name, slot] : slots_) {
            if (slot.option->count() == 0) {
                continue;
            }
            try {
                switch (slot.kind) {
                    case Kind::Int:
                        config[name] = std::stoll(slot.text);
                        break;
                    case Kind::OptionalInt:
                        config[name] = std::stoll(slot.text) > 0 ? json(std::stoll(slot.text)) : json(nullptr);
                        break;
                    case Kind::Real:
                        config[name] = std::stod(slot.text);
                        break;
                    case Kind::Text:
                        config[name] = slot.text;
                        break;
                    case Kind::RealList:
                    case Kind::IntList: {
                        json list = json::array();
                        for (const auto& item : slot.list) {
                            if (slot.kind == Kind::IntList) {
                                list.push_back(std::stoll(item));
                            } else {
                                list.push_back(std::stod(item));
                            }
                        }
                        config[name] = list;
                        break;
                    }
                }
            } catch (const std::logic_error&) {
                throw ValidationError("flag for '" + name + "' is not a valid number");
            }
        }
    }

private:
    struct Slot {
        Kind kind = Kind::Text;
        CLI::Option* option = nullptr;
        std::string text;
        std::vector<std::string> list;
    };
    std::map<std::string, Slot> slots_;
};

json load_config(const std::string& path, bool* seed_given = nullptr) {
    json config = default_config();
    if (path.empty()) {
        return config;
    }
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config '" + path + "'");
    }
    json file;
    try {
        file = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError("config '" + path + "' is not valid JSON: " + e.what());
    }
    if (!file.is_object()) {
        throw ValidationError("config '" + path + "' must be a flat JSON object");
    }
    for (const auto& [key, value] : file.items()) {
        if (!config.contains(key)) {
            throw ValidationError("config '" + path + "' has unknown key '" + key + "'");
        }
        config[key] = value;
    }
    if (seed_given != nullptr) {
        *seed_given = file.contains("seed");
    }
    return config;
}

SyntheticConfig synthetic_config(const json& c) {
    SyntheticConfig s;
    s.num_events = get<int>(c, "num_events");
    s.messages_per_event = get<int>(c, "messages_per_event");
    s.feature_dim = get<int>(c, "feature_dim");
    s.class_separation = get<double>(c, "class_separation");
    const auto pools = get<std::vector<int>>(c, "element_pool_per_event");
    if (pools.size() != kNumViews) {
        throw ValidationError("element_pool_per_event needs 3 entries (hashtag, entity, user)");
    }
    std::copy(pools.begin(), pools.end(), s.element_pool_per_event.begin());
    s.elements_per_message = get<int>(c, "elements_per_message");
    s.cross_event_element_noise = get<double>(c, "cross_event_element_noise");
    s.temporal_spread_days = get<double>(c, "temporal_spread_days");
    s.seed = derive_seed(get<std::uint64_t>(c, "seed"), "data");
    s.validate();
    return s;
}

LossScope parse_scope(const std::string& name) {
    if (name == "per_view_and_combined") {
        return LossScope::PerViewAndCombined;
    }
    if (name == "combined_only") {
        return LossScope::CombinedOnly;
    }
    throw ValidationError("loss_scope must be per_view_and_combined or combined_only, got '" + name + "'");
}

std::array<double, 3> split_ratios(const json& c) {
    const auto r = get<std::vector<double>>(c, "split_ratios");
    if (r.size() != 3) {
        throw ValidationError("split_ratios needs 3 entries (train, val, test)");
    }
    return {r[0], r[1], r[2]};
}

TrainConfig train_config(const json& c) {
    TrainConfig t;
    t.seed = get<std::uint64_t>(c, "seed");
    t.learning_rate = get<double>(c, "learning_rate");
    t.epochs = get<int>(c, "epochs");
    t.batch_size = get<int>(c, "batch_size");
    t.loss_weights.lambda_e = get<double>(c, "lambda_e");
    t.loss_weights.lambda_c = get<double>(c, "lambda_c");
    if (!c.at("annealing_epochs").is_null()) {
        t.loss_weights.annealing_epochs = get<int>(c, "annealing_epochs");
    }
    t.loss_scope = parse_scope(get<std::string>(c, "loss_scope"));
    t.grad_clip_norm = get<double>(c, "grad_clip_norm");
    t.adam_beta1 = get<double>(c, "adam_beta1");
    t.adam_beta2 = get<double>(c, "adam_beta2");
    t.adam_epsilon = get<double>(c, "adam_epsilon");
    t.hidden1 = get<Index>(c, "hidden1");
    t.hidden2 = get<Index>(c, "hidden2");
    t.evidence_hidden = get<Index>(c, "evidence_hidden");
    t.split_ratios = split_ratios(c);
    t.validate();
    return t;
}

NoiseSweepConfig sweep_config(const json& c, std::uint64_t seed) {
    NoiseSweepConfig n;
    n.gammas = get<std::vector<double>>(c, "gammas");
    n.target_view = parse_view(get<std::string>(c, "target_view"));
    const auto rule = get<std::string>(c, "simple_fusion");
    if (rule == "belief_sum") {
        n.simple_rule = SimpleFusionRule::BeliefSum;
    } else if (rule == "majority_vote") {
        n.simple_rule = SimpleFusionRule::MajorityVote;
    } else {
        throw ValidationError("simple_fusion must be belief_sum or majority_vote, got '" + rule + "'");
    }
    n.seed = derive_seed(seed, "noise");
    n.validate();
    return n;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        throw IoError("cannot write '" + path.string() + "'");
    }
}

void write_json(const fs::path& path, const json& value) { write_text(path, value.dump(2) + "\n"); }

void make_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
    }
}

json metrics_json(const Metrics& m) {
    return {{"accuracy", m.accuracy}, {"macro_f1", m.macro_f1}, {"weighted_f1", m.weighted_f1}};
}

std::string meta_double(double x) { return format_double(x); }

const std::string& meta(const TensorArchive& archive, const std::string& key) {
    const auto it = archive.meta.find(key);
    if (it == archive.meta.end()) {
        throw SchemaError("checkpoint is missing meta entry '" + key + "'");
    }
    return it->second;
}

/// Rebuilds the training split from the seed and ratios stored with the checkpoint.
void restore_split(MultiViewDataset& dataset, const TensorArchive& archive) {
    const std::uint64_t seed = std::stoull(meta(archive, "seed"));
    const std::array<double, 3> ratios{std::stod(meta(archive, "split_train")), std::stod(meta(archive, "split_val")),
                                       std::stod(meta(archive, "split_test"))};
    dataset.split = split_dataset(dataset, ratios, derive_seed(seed, "split"));
}

void check_compatible(const ModelParams& model, const MultiViewDataset& dataset) {
    if (model.dims.input_dim != dataset.feature_dim) {
        throw ValidationError("feature dimension mismatch: checkpoint expects " + std::to_string(model.dims.input_dim) +
                              ", dataset has " + std::to_string(dataset.feature_dim));
    }
    if (model.dims.num_classes != dataset.num_classes) {
        throw ValidationError("class count mismatch: checkpoint expects K=" + std::to_string(model.dims.num_classes) +
                              ", dataset has K=" + std::to_string(dataset.num_classes));
    }
}

std::vector<Index> split_nodes(const MultiViewDataset& dataset, const std::string& split) {
    if (split == "train") {
        return dataset.split->train;
    }
    if (split == "val") {
        return dataset.split->val;
    }
    if (split == "test") {
        return dataset.split->test;
    }
    if (split == "all") {
        std::vector<Index> all;
        for (Index i = 0; i < dataset.size(); ++i) {
            if (dataset.messages[static_cast<std::size_t>(i)].label) {
                all.push_back(i);
            }
        }
        return all;
    }
    throw ValidationError("split must be train, val, test or all, got '" + split + "'");
}

TensorArchive attention_to_archive(AttentionFusionParams& head) {
    TensorArchive archive;
    archive.meta["kind"] = "etgnn-attention-fusion";
    for (const auto& [name, p] : head.named_params()) {
        archive.tensors.push_back({name, p->value()});
    }
    return archive;
}

AttentionFusionParams attention_from_archive(const TensorArchive& archive, const ModelParams& model) {
    if (archive.meta.count("kind") == 0 || archive.meta.at("kind") != "etgnn-attention-fusion") {
        throw SchemaError("archive is not an attention-fusion head");
    }
    AttentionFusionParams head = init_attention_fusion(model.dims.hidden2, model.dims.num_classes, 0);
    for (const auto& [name, p] : head.named_params()) {
        const Matrix& value = archive.tensor(name);
        if (value.rows() != p->value().rows() || value.cols() != p->value().cols()) {
            throw ValidationError("attention head tensor '" + name + "' does not match the model dimensions");
        }
        p->mutable_value() = value;
    }
    head.trained = true;
    return head;
}

struct Common {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out;
};

void add_common(CLI::App& app, Common& common, const std::string& out_help) {
    app.add_option("--config", common.config_path, "flat JSON config file; flags take precedence");
    app.add_option("--seed", common.seed, "root seed for every random stream");
    app.add_option("--out", common.out, out_help);
}

json effective_config(const Common& common, const Overrides& overrides, bool* seed_given = nullptr) {
    bool in_file = false;
    json config = load_config(common.config_path, &in_file);
    overrides.apply(config);
    if (common.seed) {
        config["seed"] = *common.seed;
    }
    if (seed_given != nullptr) {
        *seed_given = in_file || common.seed.has_value();
    }
    return config;
}

int cmd_gen_synth(const Common& common, const Overrides& overrides) {
    const json config = effective_config(common, overrides);
    const SyntheticConfig s = synthetic_config(config);
    const MultiViewDataset dataset = generate_synthetic(s);
    const fs::path out = common.out.empty() ? fs::path("synthetic.jsonl") : fs::path(common.out);
    if (out.has_parent_path()) {
        make_dir(out.parent_path());
    }
    write_jsonl(dataset.messages, out);
    std::cout << "wrote " << out.string() << '\n'
              << "nodes " << dataset.size() << '\n'
              << "classes " << dataset.num_classes << '\n';
    for (const ViewKind v : kAllViews) {
        std::cout << "edges " << view_name(v) << ' ' << dataset.graph(v).edge_count() << '\n';
    }
    return kOk;
}

int cmd_train(const Common& common, const Overrides& overrides, const std::string& data_path) {
    const json config = effective_config(common, overrides);
    const TrainConfig t = train_config(config);
    MultiViewDataset dataset = ingest_jsonl(data_path);
    dataset.split = split_dataset(dataset, t.split_ratios, derive_seed(t.seed, "split"));

    const fs::path out = common.out.empty() ? fs::path("run") : fs::path(common.out);
    make_dir(out);
    const FitResult result = fit(dataset, t);

    TensorArchive archive = model_to_archive(result.model);
    archive.meta["seed"] = std::to_string(t.seed);
    archive.meta["split_train"] = meta_double(t.split_ratios[0]);
    archive.meta["split_val"] = meta_double(t.split_ratios[1]);
    archive.meta["split_test"] = meta_double(t.split_ratios[2]);
    archive.meta["best_epoch"] = std::to_string(result.best_epoch);
    save_archive(archive, out / "checkpoint");

    std::ofstream history(out / "history.csv", std::ios::binary);
    write_history_csv(result.history, history);
    if (!history) {
        throw IoError("cannot write history.csv");
    }

    const PredictionSet test = predict(result.model, dataset, dataset.split->test);
    json summary;
    summary["seed"] = t.seed;
    summary["dataset"] = data_path;
    summary["nodes"] = dataset.size();
    summary["classes"] = dataset.num_classes;
    summary["split_sizes"] = {dataset.split->train.size(), dataset.split->val.size(), dataset.split->test.size()};
    summary["epochs"] = result.history.size();
    summary["best_epoch"] = result.best_epoch;
    summary["best_val"] = metrics_json(result.best_val_metrics);
    if (!result.history.empty()) {
        const HistoryRow& last = result.history.back();
        summary["final"] = {{"epoch", last.epoch},
                            {"loss_total", last.loss_total},
                            {"val_accuracy", last.val_acc},
                            {"val_macro_f1", last.val_macro_f1}};
    }
    if (!test.records.empty()) {
        json m = metrics_json(compute_metrics(test.predicted(), test.labels(), dataset.num_classes));
        m["mean_uncertainty"] = test.mean_uncertainty();
        summary["test"] = m;
    }
    summary["config"] = config;
    write_json(out / "summary.json", summary);
    write_json(out / "effective_config.json", config);
    std::cout << summary.dump(2) << '\n';
    return kOk;
}

struct Loaded {
    ModelParams model;
    MultiViewDataset dataset;
    TensorArchive archive;
};

Loaded load_run(const std::string& checkpoint, const std::string& data_path) {
    Loaded l;
    l.archive = load_archive(checkpoint);
    l.model = model_from_archive(l.archive);
    l.dataset = ingest_jsonl(data_path);
    check_compatible(l.model, l.dataset);
    restore_split(l.dataset, l.archive);
    return l;
}

int cmd_eval(const Common& common, const std::string& checkpoint, const std::string& data_path,
             const std::string& split) {
    Loaded run = load_run(checkpoint, data_path);
    const auto nodes = split_nodes(run.dataset, split);
    if (nodes.empty()) {
        throw ValidationError("split '" + split + "' has no labelled nodes");
    }
    const PredictionSet preds = predict(run.model, run.dataset, nodes);
    json metrics = metrics_json(compute_metrics(preds.predicted(), preds.labels(), run.dataset.num_classes));
    metrics["mean_uncertainty"] = preds.mean_uncertainty();
    metrics["split"] = split;
    metrics["nodes"] = nodes.size();
    metrics["conflict_events"] = preds.conflict_events;
    metrics["checkpoint"] = checkpoint;
    metrics["dataset"] = data_path;
    metrics["seed"] = std::stoull(meta(run.archive, "seed"));

    const fs::path out = common.out.empty() ? fs::path("eval") : fs::path(common.out);
    make_dir(out);
    write_json(out / "metrics.json", metrics);
    std::ofstream csv(out / "predictions.csv", std::ios::binary);
    write_predictions_csv(preds, csv);
    if (!csv) {
        throw IoError("cannot write predictions.csv");
    }
    std::cout << metrics.dump(2) << '\n';
    return kOk;
}

int cmd_noise_sweep(const Common& common, const Overrides& overrides, const std::string& checkpoint,
                    const std::string& data_path, const std::string& attention_path) {
    Loaded run = load_run(checkpoint, data_path);
    bool seed_given = false;
    json config = effective_config(common, overrides, &seed_given);
    if (!seed_given) {
        config["seed"] = std::stoull(meta(run.archive, "seed"));
    }
    const auto seed = get<std::uint64_t>(config, "seed");
    const NoiseSweepConfig sweep = sweep_config(config, seed);

    const fs::path out = common.out.empty() ? fs::path("sweep") : fs::path(common.out);
    make_dir(out);
    AttentionFusionParams head;
    if (attention_path.empty()) {
        head = init_attention_fusion(run.model.dims.hidden2, run.model.dims.num_classes,
                                     derive_seed(seed, "attention"));
        AttentionTrainConfig ac;
        ac.epochs = get<int>(config, "attention_epochs");
        if (ac.epochs < 1) {
            throw ValidationError("attention_epochs must be at least 1");
        }
        train_attention_fusion(head, encode_all_views(run.model, run.dataset), run.dataset.labels(),
                               run.dataset.split->train, ac);
        save_archive(attention_to_archive(head), out / "attention");
    } else {
        head = attention_from_archive(load_archive(attention_path), run.model);
    }

    const auto rows = noise_sweep(run.model, run.dataset, run.dataset.split->test, head, sweep);
    std::ofstream csv(out / "sweep.csv", std::ios::binary);
    write_sweep_csv(rows, csv);
    if (!csv) {
        throw IoError("cannot write sweep.csv");
    }
    write_json(out / "effective_config.json", config);
    write_sweep_csv(rows, std::cout);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-view event detection with evidential fusion"};
    app.require_subcommand(1);

    Common gen_common;
    Overrides gen_overrides;
    CLI::App* gen = app.add_subcommand("gen-synth", "write a synthetic event dataset as JSON lines");
    add_common(*gen, gen_common, "output dataset file (default synthetic.jsonl)");
    gen_overrides.add(*gen, synthetic_keys());

    Common train_common;
    Overrides train_overrides;
    std::string train_data;
    CLI::App* train = app.add_subcommand("train", "fit a model and write checkpoint, history and summary");
    add_common(*train, train_common, "output directory (default run)");
    train->add_option("--data", train_data, "dataset in JSON lines")->required();
    train_overrides.add(*train, train_keys());

    Common eval_common;
    std::string eval_checkpoint;
    std::string eval_data;
    std::string eval_split = "test";
    CLI::App* eval = app.add_subcommand("eval", "score a checkpoint on one split");
    add_common(*eval, eval_common, "output directory (default eval)");
    eval->add_option("--checkpoint", eval_checkpoint, "checkpoint stem, e.g. run/checkpoint")->required();
    eval->add_option("--data", eval_data, "dataset in JSON lines")->required();
    eval->add_option("--split", eval_split, "train, val, test or all (default test)");

    Common sweep_common;
    Overrides sweep_overrides;
    std::string sweep_checkpoint;
    std::string sweep_data;
    std::string sweep_attention;
    CLI::App* sweep = app.add_subcommand("noise-sweep", "noise-vs-uncertainty and fusion robustness sweep");
    add_common(*sweep, sweep_common, "output directory (default sweep)");
    sweep->add_option("--checkpoint", sweep_checkpoint, "checkpoint stem, e.g. run/checkpoint")->required();
    sweep->add_option("--data", sweep_data, "dataset in JSON lines")->required();
    sweep->add_option("--attention", sweep_attention,
                      "attention-fusion head stem to load; trained on the train split when omitted");
    sweep_overrides.add(*sweep, sweep_keys());

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInvalid;
    }

    try {
        if (gen->parsed()) {
            return cmd_gen_synth(gen_common, gen_overrides);
        }
        if (train->parsed()) {
            return cmd_train(train_common, train_overrides, train_data);
        }
        if (eval->parsed()) {
            return cmd_eval(eval_common, eval_checkpoint, eval_data, eval_split);
        }
        return cmd_noise_sweep(sweep_common, sweep_overrides, sweep_checkpoint, sweep_data, sweep_attention);
    } catch (const DivergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kDiverged;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIoFailure;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    } catch (const SchemaError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    } catch (const ShapeError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIoFailure;
    }
}
