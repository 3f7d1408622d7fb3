#include "weekcast/experiment.hpp"

#include "weekcast/baselines/ann.hpp"
#include "weekcast/baselines/knn.hpp"
#include "weekcast/baselines/labeled.hpp"
#include "weekcast/baselines/linear_models.hpp"
#include "weekcast/baselines/trees.hpp"
#include "weekcast/error.hpp"
#include "weekcast/forecasters.hpp"
#include "weekcast/metrics.hpp"
#include "weekcast/text.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <memory>
#include <set>

namespace weekcast {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::vector<std::string> kCnnModels = {"cnn_uni5", "cnn_uni10", "cnn_multichannel", "cnn_multihead"};

const std::map<std::string, std::vector<std::string>>& override_keys() {
    static const std::map<std::string, std::vector<std::string>> keys = [] {
        std::map<std::string, std::vector<std::string>> k;
        for (const auto& m : kCnnModels) k[m] = {"batch_size", "epochs", "learning_rate"};
        k["logistic"] = {"epochs", "learning_rate", "threshold"};
        k["knn_classifier"] = {"k"};
        k["knn_regressor"] = {"k"};
        k["cart_classifier"] = {"max_depth", "min_leaf"};
        k["cart_regressor"] = {"max_depth", "min_leaf"};
        for (const char* m : {"bagging_classifier", "bagging_regressor", "forest_classifier", "forest_regressor"})
            k[m] = {"max_depth", "min_leaf", "n_models"};
        k["adaboost"] = {"rounds"};
        k["linear_regression"] = {};
        k["ann_classifier"] = {"batch_size", "epochs", "learning_rate"};
        k["ann_regressor"] = {"batch_size", "epochs", "learning_rate"};
        return k;
    }();
    return keys;
}

bool is_cnn(const std::string& model) {
    return std::find(kCnnModels.begin(), kCnnModels.end(), model) != kCnnModels.end();
}

void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigError("unknown key '" + key + "' in " + where);
        }
    }
}

template <typename T>
T get_as(const json& obj, const char* key, const std::string& where) {
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + "." + key + " has the wrong type");
    }
}

// Parsed text yields unsigned values, but documents built in code may hold
// signed ones.
bool is_count(const json& v) {
    return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

std::size_t get_count(const json& obj, const char* key, const std::string& where) {
    const json& v = obj.at(key);
    if (!is_count(v)) throw ConfigError(where + "." + key + " must be a non-negative integer");
    return v.get<std::size_t>();
}

Date get_date(const json& obj, const char* key, const std::string& where) {
    const auto text = get_as<std::string>(obj, key, where);
    const auto d = parse_iso_date(text);
    if (!d) throw ConfigError(where + "." + key + " is not a YYYY-MM-DD date: " + text);
    return *d;
}

std::string_view synthetic_name(SyntheticPattern p) {
    switch (p) {
    case SyntheticPattern::constant: return "constant";
    case SyntheticPattern::linear: return "linear";
    case SyntheticPattern::sine: return "sine";
    case SyntheticPattern::random_walk: return "random_walk";
    }
    return "?";
}

double override_or(const ExperimentConfig& config, const std::string& model, const std::string& key, double fallback) {
    const auto m = config.overrides.find(model);
    if (m == config.overrides.end()) return fallback;
    const auto v = m->second.find(key);
    return v == m->second.end() ? fallback : v->second;
}

std::size_t count_override(const ExperimentConfig& config, const std::string& model, const std::string& key,
                           std::size_t fallback) {
    return static_cast<std::size_t>(override_or(config, model, key, static_cast<double>(fallback)));
}

} // namespace

const std::vector<std::string>& known_models() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n = kCnnModels;
        for (const char* b : {"logistic", "knn_classifier", "knn_regressor", "cart_classifier", "cart_regressor",
                              "bagging_classifier", "bagging_regressor", "forest_classifier", "forest_regressor",
                              "adaboost", "linear_regression", "ann_classifier", "ann_regressor"})
            n.emplace_back(b);
        return n;
    }();
    return names;
}

ExperimentConfig parse_experiment_config(const json& doc, const std::string& base_dir) {
    reject_unknown_keys(doc,
                        {"data", "synthetic", "split", "models", "seeds", "overrides", "output_dir", "standardize",
                         "refit_weekly"},
                        "config");
    ExperimentConfig c;
    c.base_dir = base_dir;
    if (doc.contains("data")) c.data = get_as<std::string>(doc, "data", "config");
    if (doc.contains("synthetic")) {
        const json& s = doc.at("synthetic");
        reject_unknown_keys(s, {"pattern", "length", "seed", "start"}, "synthetic");
        SyntheticSource src;
        if (s.contains("pattern")) {
            try {
                src.pattern = parse_synthetic_pattern(get_as<std::string>(s, "pattern", "synthetic"));
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
        }
        if (s.contains("length")) src.length = get_count(s, "length", "synthetic");
        if (s.contains("seed")) src.seed = get_count(s, "seed", "synthetic");
        if (s.contains("start")) src.start = get_date(s, "start", "synthetic");
        c.synthetic = src;
    }
    if (doc.contains("split")) {
        const json& s = doc.at("split");
        reject_unknown_keys(s, {"rule", "train_end", "test_start", "train_weeks", "test_weeks"}, "split");
        if (s.contains("rule")) {
            const auto rule = get_as<std::string>(s, "rule", "split");
            if (rule == "date") c.split.rule = SplitKind::date;
            else if (rule == "weeks") c.split.rule = SplitKind::weeks;
            else throw ConfigError("split.rule must be 'date' or 'weeks', got '" + rule + "'");
        }
        if (s.contains("train_end")) c.split.train_end = get_date(s, "train_end", "split");
        if (s.contains("test_start")) c.split.test_start = get_date(s, "test_start", "split");
        if (s.contains("train_weeks")) c.split.train_weeks = get_count(s, "train_weeks", "split");
        if (s.contains("test_weeks")) c.split.test_weeks = get_count(s, "test_weeks", "split");
    }
    if (!doc.contains("models")) throw ConfigError("config.models is required");
    c.models = get_as<std::vector<std::string>>(doc, "models", "config");
    if (!doc.contains("seeds")) throw ConfigError("config.seeds is required");
    const json& seeds = doc.at("seeds");
    if (!seeds.is_array()) throw ConfigError("config.seeds must be an array");
    for (const auto& s : seeds) {
        if (!is_count(s)) throw ConfigError("seeds must be non-negative integers");
        c.seeds.push_back(s.get<std::uint64_t>());
    }
    if (doc.contains("overrides")) {
        const json& o = doc.at("overrides");
        if (!o.is_object()) throw ConfigError("config.overrides must be an object");
        for (const auto& [model, params] : o.items()) {
            if (!params.is_object()) throw ConfigError("overrides." + model + " must be an object");
            for (const auto& [key, value] : params.items()) {
                if (!value.is_number()) throw ConfigError("overrides." + model + "." + key + " must be a number");
                c.overrides[model][key] = value.get<double>();
            }
        }
    }
    if (doc.contains("output_dir")) c.output_dir = get_as<std::string>(doc, "output_dir", "config");
    if (doc.contains("standardize")) c.standardize = get_as<bool>(doc, "standardize", "config");
    if (doc.contains("refit_weekly")) c.refit_weekly = get_as<bool>(doc, "refit_weekly", "config");
    validate_config(c);
    return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const DataError& e) {
        throw ConfigError(e.what());
    }
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path + " is not valid JSON: " + e.what());
    }
    return parse_experiment_config(doc, fs::path(path).parent_path().string());
}

void validate_config(const ExperimentConfig& c) {
    if (c.data.empty() == !c.synthetic.has_value()) {
        throw ConfigError("exactly one of 'data' and 'synthetic' must be given");
    }
    if (c.models.empty()) throw ConfigError("at least one model must be selected");
    if (c.seeds.empty()) throw ConfigError("seeds must not be empty");
    const auto& known = known_models();
    std::set<std::string> seen;
    for (const auto& m : c.models) {
        if (std::find(known.begin(), known.end(), m) == known.end()) throw ConfigError("unknown model '" + m + "'");
        if (!seen.insert(m).second) throw ConfigError("model '" + m + "' selected twice");
    }
    if (std::set<std::uint64_t>(c.seeds.begin(), c.seeds.end()).size() != c.seeds.size()) {
        throw ConfigError("seeds must be distinct");
    }
    if (c.split.train_weeks == 0 || c.split.test_weeks == 0) throw ConfigError("split week counts must be positive");
    if (c.split.rule == SplitKind::date && !(c.split.train_end < c.split.test_start)) {
        throw ConfigError("split.train_end must precede split.test_start");
    }
    if (c.synthetic && c.synthetic->length < 2) throw ConfigError("synthetic.length must be at least 2");
    if (c.output_dir.empty()) throw ConfigError("output_dir must not be empty");

    for (const auto& [model, params] : c.overrides) {
        const auto allowed = override_keys().find(model);
        if (allowed == override_keys().end()) throw ConfigError("overrides name unknown model '" + model + "'");
        for (const auto& [key, value] : params) {
            const auto& keys = allowed->second;
            if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
                throw ConfigError("override '" + key + "' does not apply to " + model);
            }
            const std::string where = "overrides." + model + "." + key;
            if (!std::isfinite(value)) throw ConfigError(where + " must be finite");
            if (key == "learning_rate") {
                if (value <= 0) throw ConfigError(where + " must be positive");
            } else if (key == "threshold") {
                if (value <= 0 || value >= 1) throw ConfigError(where + " must lie in (0, 1)");
            } else {
                const double min = key == "max_depth" ? 0.0 : 1.0;
                if (value != std::floor(value) || value < min || value > 1e9) {
                    throw ConfigError(where + " must be an integer >= " + format_double(min));
                }
            }
        }
    }
}

json config_to_json(const ExperimentConfig& c) {
    json out;
    if (!c.data.empty()) out["data"] = c.data;
    if (c.synthetic) {
        out["synthetic"] = {{"pattern", synthetic_name(c.synthetic->pattern)},
                            {"length", c.synthetic->length},
                            {"seed", c.synthetic->seed},
                            {"start", format_iso_date(c.synthetic->start)}};
    }
    out["split"] = {{"rule", c.split.rule == SplitKind::date ? "date" : "weeks"},
                    {"train_end", format_iso_date(c.split.train_end)},
                    {"test_start", format_iso_date(c.split.test_start)},
                    {"train_weeks", c.split.train_weeks},
                    {"test_weeks", c.split.test_weeks}};
    out["models"] = c.models;
    out["seeds"] = c.seeds;
    out["overrides"] = json::object();
    for (const auto& [model, params] : c.overrides) out["overrides"][model] = params;
    out["output_dir"] = c.output_dir;
    out["standardize"] = c.standardize;
    out["refit_weekly"] = c.refit_weekly;
    return out;
}

std::string config_hash(const ExperimentConfig& config) {
    json canonical = config_to_json(config);
    canonical.erase("output_dir");
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : canonical.dump()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

SplitResult split_feature_table(const FeatureTable& table, const SplitRule& rule) {
    SplitResult out;
    out.rule_used = rule.rule;
    FeatureTable test_rows;
    if (rule.rule == SplitKind::date) {
        for (const auto& row : table) {
            if (row.date <= rule.train_end) out.train.push_back(row);
            else if (row.date >= rule.test_start) test_rows.push_back(row);
        }
        if (out.train.empty() || test_rows.empty()) {
            out.train.clear();
            test_rows.clear();
            out.rule_used = SplitKind::weeks;
        }
    }
    if (out.rule_used == SplitKind::weeks) {
        const std::size_t n_train = rule.train_weeks * kDaysPerWeek;
        if (table.size() < n_train + kDaysPerWeek) {
            throw DataError("week split needs " + std::to_string(n_train + kDaysPerWeek) + " feature rows, have " +
                            std::to_string(table.size()));
        }
        out.train.assign(table.begin(), table.begin() + static_cast<std::ptrdiff_t>(n_train));
        const std::size_t n_test = std::min(table.size() - n_train, rule.test_weeks * kDaysPerWeek);
        test_rows.assign(table.begin() + static_cast<std::ptrdiff_t>(n_train),
                         table.begin() + static_cast<std::ptrdiff_t>(n_train + n_test));
    }
    const auto weeks = chunk_into_weeks(std::span<const FeatureRow>(test_rows));
    out.test.assign(test_rows.begin(), test_rows.end() - static_cast<std::ptrdiff_t>(weeks.dropped_trailing));
    out.dropped_test_rows = weeks.dropped_trailing;
    out.test_weeks = weeks.weeks.size();
    out.train_weeks = out.train.size() / kDaysPerWeek;
    if (out.train_weeks == 0 || out.test_weeks == 0) {
        throw DataError("split leaves " + std::to_string(out.train_weeks) + " training and " +
                        std::to_string(out.test_weeks) + " test weeks; both must be at least 1");
    }
    return out;
}

FeatureTable load_feature_table(const ExperimentConfig& config) {
    if (config.synthetic) {
        const auto& s = *config.synthetic;
        return build_feature_table(generate_synthetic_series(s.length, s.pattern, s.seed, s.start));
    }
    fs::path path(config.data);
    if (path.is_relative() && !config.base_dir.empty()) path = fs::path(config.base_dir) / path;
    return build_feature_table(read_ohlcv_csv(path.string()).series);
}

double median(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("median of an empty set");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

namespace {

std::ptrdiff_t model_rank(const json& report) {
    const auto& known = known_models();
    return std::find(known.begin(), known.end(), report.at("model").get<std::string>()) - known.begin();
}

/// Distinct model names in catalogue order.
std::vector<std::string> models_in(const std::vector<json>& reports) {
    std::vector<const json*> sorted;
    for (const auto& r : reports) sorted.push_back(&r);
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const json* a, const json* b) { return model_rank(*a) < model_rank(*b); });
    std::vector<std::string> order;
    for (const json* r : sorted) {
        const auto m = r->at("model").get<std::string>();
        if (std::find(order.begin(), order.end(), m) == order.end()) order.push_back(m);
    }
    return order;
}

struct CellOutput {
    json report;
    std::string predictions_csv;
};

json protocol_json(const ExperimentConfig& config, const SplitResult& split) {
    return {{"split_rule", split.rule_used == SplitKind::date ? "date" : "weeks"},
            {"train_rows", split.train.size()},
            {"train_weeks", split.train_weeks},
            {"train_first", format_iso_date(split.train.front().date)},
            {"train_last", format_iso_date(split.train.back().date)},
            {"test_rows", split.test.size()},
            {"test_weeks", split.test_weeks},
            {"test_first", format_iso_date(split.test.front().date)},
            {"test_last", format_iso_date(split.test.back().date)},
            {"dropped_test_rows", split.dropped_test_rows},
            {"standardize", config.standardize},
            {"refit_weekly", config.refit_weekly}};
}

json forecast_metrics(const nn::Tensor& predictions, const nn::Tensor& actuals, json& report) {
    const ForecastReport fr = forecast_report(predictions, actuals);
    report["per_day_rmse"] = fr.per_day_rmse;
    return metrics_json(metric_rows(fr, "test_"));
}

CellOutput run_cnn(const ExperimentConfig& config, const std::string& model, std::uint64_t seed,
                   const SplitResult& split) {
    const ModelKind kind = ModelKind::from_name(model);
    nn::TrainingConfig tc = default_training_config(kind);
    tc.seed = seed;
    tc.epochs = count_override(config, model, "epochs", tc.epochs);
    tc.batch_size = count_override(config, model, "batch_size", tc.batch_size);
    tc.adam.learning_rate = override_or(config, model, "learning_rate", tc.adam.learning_rate);

    FeatureTable train = split.train;
    FeatureTable test = split.test;
    std::optional<ZScore> close_stats;
    if (config.standardize) {
        std::vector<Feature> percent;
        for (Feature f : kAllFeatures)
            if (is_percent_feature(f)) percent.push_back(f);
        const auto stats = fit_standardizer(train, percent);
        train = apply_standardizer(train, stats);
        test = apply_standardizer(test, stats);
        for (std::size_t i = 0; i < stats.features.size(); ++i)
            if (stats.features[i] == Feature::close_perc) close_stats = stats.stats[i];
    }

    const Forecaster forecaster = train_forecaster(kind, train, tc);
    WalkForwardResult wf = walk_forward_evaluate(forecaster, train, test, {config.refit_weekly, tc});
    if (close_stats) {
        for (auto& v : wf.predictions.values) v = v * close_stats->sd + close_stats->mean;
        for (std::size_t i = 0; i < split.test.size(); ++i) wf.actuals[i] = split.test[i].percent.close_perc;
    }

    CellOutput out;
    json& r = out.report;
    r["task"] = "forecast";
    r["hyperparameters"] = {{"n_in", kind.n_in},
                            {"epochs", tc.epochs},
                            {"batch_size", tc.batch_size},
                            {"learning_rate", tc.adam.learning_rate},
                            {"parameters", forecaster.spec.parameter_count()}};
    r["metrics"] = forecast_metrics(wf.predictions, wf.actuals, r);
    r["metrics"]["final_train_loss"] = forecaster.loss_trace.empty() ? json(nullptr) : json(forecaster.loss_trace.back());
    r["loss_trace"] = forecaster.loss_trace;
    out.predictions_csv = walk_forward_csv(wf);
    return out;
}

bool is_classifier(const std::string& model) {
    return model == "logistic" || model == "adaboost" || model.ends_with("_classifier");
}

CellOutput run_baseline(const ExperimentConfig& config, const std::string& model, std::uint64_t seed,
                        const SplitResult& split) {
    using namespace baselines;
    const TaskMode mode = is_classifier(model) ? TaskMode::classify : TaskMode::regress;

    // The first test sample pairs the last training day's features with the
    // first test day's target.
    FeatureTable test_table;
    test_table.push_back(split.train.back());
    test_table.insert(test_table.end(), split.test.begin(), split.test.end());
    const LabeledDataset raw_train = build_labeled_dataset(split.train, mode);
    const LabeledDataset raw_test = build_labeled_dataset(test_table, mode);
    const ColumnScaler scaler = ColumnScaler::fit(raw_train.features);
    const LabeledDataset train = scaled(raw_train, scaler);
    const LabeledDataset test = scaled(raw_test, scaler);

    std::function<double(std::span<const double>)> predict;
    json hyper = json::object();
    json summary;

    const auto tree_config = [&](std::size_t depth, std::size_t leaf) {
        CartConfig t;
        t.max_depth = count_override(config, model, "max_depth", depth);
        t.min_leaf = count_override(config, model, "min_leaf", leaf);
        hyper["max_depth"] = t.max_depth;
        hyper["min_leaf"] = t.min_leaf;
        return t;
    };

    if (model == "logistic") {
        LogisticConfig lc;
        lc.epochs = count_override(config, model, "epochs", lc.epochs);
        lc.learning_rate = override_or(config, model, "learning_rate", lc.learning_rate);
        const double threshold = override_or(config, model, "threshold", 0.5);
        hyper = {{"epochs", lc.epochs}, {"learning_rate", lc.learning_rate}, {"threshold", threshold}};
        auto fitted = std::make_shared<LogisticModel>(fit_logistic_regression(train, lc));
        summary = to_json(*fitted);
        predict = [fitted, threshold](std::span<const double> x) {
            return static_cast<double>(predict_logistic(*fitted, x, threshold).label);
        };
    } else if (model.starts_with("knn_")) {
        const std::size_t k = count_override(config, model, "k", 5);
        hyper = {{"k", k}};
        summary = {{"type", "knn"}, {"k", k}, {"training_samples", train.size()}};
        predict = [&train, k](std::span<const double> x) { return knn_predict(train, x, k); };
    } else if (model.starts_with("cart_")) {
        auto tree = std::make_shared<DecisionTree>(fit_cart(train, tree_config(6, 5)));
        summary = to_json(*tree);
        predict = [tree](std::span<const double> x) { return tree->predict(x); };
    } else if (model.starts_with("bagging_") || model.starts_with("forest_")) {
        EnsembleConfig ec;
        ec.tree = tree_config(ec.tree.max_depth, ec.tree.min_leaf);
        ec.n_models = count_override(config, model, "n_models", ec.n_models);
        ec.seed = seed;
        hyper["n_models"] = ec.n_models;
        const auto kind = model.starts_with("forest_") ? EnsembleKind::random_forest : EnsembleKind::bagging;
        auto ens = std::make_shared<EnsembleModel>(fit_ensemble(train, kind, ec));
        summary = to_json(*ens);
        predict = [ens](std::span<const double> x) { return ens->predict(x); };
    } else if (model == "adaboost") {
        AdaBoostConfig ac;
        ac.rounds = count_override(config, model, "rounds", ac.rounds);
        hyper = {{"rounds", ac.rounds}};
        auto ens = std::make_shared<EnsembleModel>(fit_adaboost(train, ac));
        summary = to_json(*ens);
        predict = [ens](std::span<const double> x) { return ens->predict(x); };
    } else if (model == "linear_regression") {
        auto lm = std::make_shared<LinearModel>(fit_linear_regression(train));
        summary = to_json(*lm);
        predict = [lm](std::span<const double> x) { return predict_linear(*lm, x); };
    } else if (model.starts_with("ann_")) {
        AnnConfig ac;
        ac.epochs = count_override(config, model, "epochs", ac.epochs);
        ac.batch_size = count_override(config, model, "batch_size", ac.batch_size);
        ac.seed = seed;
        ac.learning_rate = override_or(config, model, "learning_rate", ac.learning_rate);
        hyper = {{"epochs", ac.epochs}, {"batch_size", ac.batch_size}, {"learning_rate", ac.learning_rate}};
        auto ann = std::make_shared<AnnModel>(fit_ann(train, ac));
        summary = {{"type", "ann"}, {"parameters", ann->spec.parameter_count()}};
        predict = [ann](std::span<const double> x) { return ann_predict(*ann, x); };
    } else {
        throw ConfigError("unknown model '" + model + "'");
    }

    const auto predict_all = [&](const LabeledDataset& d) {
        std::vector<double> out(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) out[i] = predict(d.features.row(i));
        return out;
    };
    const std::vector<double> train_pred = predict_all(train);
    const std::vector<double> test_pred = predict_all(test);

    CellOutput out;
    json& r = out.report;
    r["hyperparameters"] = hyper;
    r["model_summary"] = summary;
    if (mode == TaskMode::classify) {
        r["task"] = "classify";
        const auto labels = [](const LabeledDataset& d) {
            std::vector<int> l(d.size());
            for (std::size_t i = 0; i < d.size(); ++i) l[i] = d.label(i);
            return l;
        };
        const auto as_int = [](const std::vector<double>& p) {
            std::vector<int> l(p.size());
            for (std::size_t i = 0; i < p.size(); ++i) l[i] = p[i] > 0.5 ? 1 : 0;
            return l;
        };
        const auto train_labels = labels(train);
        const auto test_labels = labels(test);
        const auto train_cm = confusion_matrix(train_labels, as_int(train_pred));
        const auto test_cm = confusion_matrix(test_labels, as_int(test_pred));
        MetricRows rows = metric_rows(classification_metrics(train_cm), "train_");
        const MetricRows test_rows = metric_rows(classification_metrics(test_cm), "test_");
        rows.insert(rows.end(), test_rows.begin(), test_rows.end());
        r["metrics"] = metrics_json(rows);
        r["confusion"] = {{"train", {{"tp", train_cm.tp}, {"fp", train_cm.fp}, {"tn", train_cm.tn}, {"fn", train_cm.fn}}},
                          {"test", {{"tp", test_cm.tp}, {"fp", test_cm.fp}, {"tn", test_cm.tn}, {"fn", test_cm.fn}}}};
        std::string csv = "date,actual,predicted\n";
        for (std::size_t i = 0; i < test.size(); ++i) {
            csv += format_iso_date(split.test[i].date) + ',' + std::to_string(test_labels[i]) + ',' +
                   std::to_string(test_pred[i] > 0.5 ? 1 : 0) + '\n';
        }
        out.predictions_csv = std::move(csv);
    } else {
        r["task"] = "regress";
        const std::size_t weeks = split.test_weeks;
        WalkForwardResult wf;
        wf.predictions = nn::Tensor({weeks, kHorizon}, test_pred);
        wf.actuals = nn::Tensor({weeks, kHorizon}, test.targets);
        r["metrics"] = forecast_metrics(wf.predictions, wf.actuals, r);
        double sse = 0.0;
        for (std::size_t i = 0; i < train.size(); ++i) sse += (train_pred[i] - train.targets[i]) * (train_pred[i] - train.targets[i]);
        r["metrics"]["train_rmse_overall"] = std::sqrt(sse / static_cast<double>(train.size()));
        out.predictions_csv = walk_forward_csv(wf);
    }
    return out;
}

std::string rmse_by_day_csv(std::vector<const json*> reports) {
    std::stable_sort(reports.begin(), reports.end(), [](const json* a, const json* b) {
        return a->at("seed").get<std::uint64_t>() < b->at("seed").get<std::uint64_t>();
    });
    std::string out = "day,median";
    for (const json* r : reports) out += ",seed_" + std::to_string(r->at("seed").get<std::uint64_t>());
    out += '\n';
    for (std::size_t d = 0; d <= kHorizon; ++d) {
        std::vector<double> values;
        for (const json* r : reports) {
            values.push_back(d < kHorizon ? r->at("per_day_rmse").at(d).get<double>()
                                          : r->at("metrics").at("test_rmse_overall").get<double>());
        }
        out += std::string(d < kHorizon ? kDayNames[d] : "overall") + ',' + format_double(median(values));
        for (double v : values) out += ',' + format_double(v);
        out += '\n';
    }
    return out;
}

void write_model_plots(const fs::path& dir, const std::vector<json>& reports) {
    for (const auto& m : models_in(reports)) {
        std::vector<const json*> cells;
        for (const auto& r : reports)
            if (r.at("model") == m && r.contains("per_day_rmse")) cells.push_back(&r);
        if (!cells.empty()) write_text_file((dir / ("rmse_by_day_" + m + ".csv")).string(), rmse_by_day_csv(cells));
    }
}

} // namespace

std::string summarize_reports(const std::vector<json>& reports) {
    std::string out = "model,metric,median,seeds\n";
    if (reports.empty()) return out;
    const std::vector<std::string> order = models_in(reports);
    const auto row = [&](const std::string& model, const std::string& metric, const std::vector<double>& values) {
        out += model + ',' + metric + ',' + (values.empty() ? std::string() : format_double(median(values))) + ',' +
               std::to_string(values.size()) + '\n';
    };
    for (const char* key : {"train_weeks", "test_weeks"}) {
        std::vector<double> values;
        for (const auto& r : reports)
            if (r.at("model") == order.front()) values.push_back(r.at("protocol").at(key).get<double>());
        row("protocol", key, values);
    }
    for (const auto& m : order) {
        std::vector<std::string> metrics;
        for (const auto& r : reports) {
            if (r.at("model") != m) continue;
            for (const auto& [name, v] : r.at("metrics").items())
                if (std::find(metrics.begin(), metrics.end(), name) == metrics.end()) metrics.push_back(name);
        }
        std::sort(metrics.begin(), metrics.end());
        for (const auto& name : metrics) {
            std::vector<double> values;
            for (const auto& r : reports) {
                if (r.at("model") != m) continue;
                const json& ms = r.at("metrics");
                if (ms.contains(name) && ms.at(name).is_number()) values.push_back(ms.at(name).get<double>());
            }
            row(m, name, values);
        }
    }
    return out;
}

void run_experiment(const ExperimentConfig& config, std::ostream& log) {
    validate_config(config);
    const FeatureTable table = load_feature_table(config);
    const SplitResult split = split_feature_table(table, config.split);
    const std::string hash = config_hash(config);
    log << "split (" << (split.rule_used == SplitKind::date ? "date" : "weeks") << " rule): " << split.train_weeks
        << " training weeks (" << split.train.size() << " rows), " << split.test_weeks << " test weeks\n";

    const fs::path dir(config.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create output directory " + dir.string() + ": " + ec.message());

    std::vector<json> reports;
    for (const auto& model : config.models) {
        for (const std::uint64_t seed : config.seeds) {
            CellOutput cell = is_cnn(model) ? run_cnn(config, model, seed, split) : run_baseline(config, model, seed, split);
            json report = {{"model", model}, {"seed", seed}, {"config_hash", hash}};
            report["protocol"] = protocol_json(config, split);
            report.update(cell.report);

            const std::string stem = model + "_" + std::to_string(seed);
            write_text_file((dir / ("report_" + stem + ".json")).string(), report.dump(2) + "\n");
            MetricRows rows;
            for (const auto& [name, v] : report.at("metrics").items()) {
                rows.emplace_back(name, v.is_number() ? std::optional<double>(v.get<double>()) : std::nullopt);
            }
            write_text_file((dir / ("report_" + stem + ".csv")).string(), metrics_csv(rows));
            write_text_file((dir / ("predictions_" + stem + ".csv")).string(), cell.predictions_csv);
            log << model << " seed " << seed << " done\n";
            reports.push_back(std::move(report));
        }
    }
    write_text_file((dir / "summary.csv").string(), summarize_reports(reports));
    write_model_plots(dir, reports);
}

std::string reaggregate_directory(const std::string& dir) {
    std::vector<fs::path> files;
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw DataError(dir + " is not a directory");
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (entry.is_regular_file() && name.starts_with("report_") && name.ends_with(".json")) files.push_back(entry.path());
    }
    if (files.empty()) throw DataError("no report_*.json files in " + dir);
    std::sort(files.begin(), files.end());
    std::vector<json> reports;
    for (const auto& f : files) {
        try {
            reports.push_back(json::parse(read_text_file(f.string())));
        } catch (const json::exception& e) {
            throw DataError(f.string() + ": " + e.what());
        }
    }
    std::string summary;
    try {
        summary = summarize_reports(reports);
        write_model_plots(dir, reports);
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed report: ") + e.what());
    }
    write_text_file((fs::path(dir) / "summary.csv").string(), summary);
    return summary;
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return 1;
    if (dynamic_cast<const DataError*>(&e)) return 2;
    if (dynamic_cast<const DivergenceError*>(&e) || dynamic_cast<const NumericError*>(&e)) return 3;
    return 4;
}

} // namespace weekcast
