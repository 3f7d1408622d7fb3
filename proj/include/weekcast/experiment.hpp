#pragma once

#include "weekcast/date.hpp"
#include "weekcast/features.hpp"
#include "weekcast/market_data.hpp"

#include "json.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace weekcast {

enum class SplitKind { date, weeks };

struct SplitRule {
    SplitKind rule = SplitKind::date;
    Date train_end{std::chrono::year{2018}, std::chrono::December, std::chrono::day{28}};
    Date test_start{std::chrono::year{2018}, std::chrono::December, std::chrono::day{31}};
    std::size_t train_weeks = 208;
    std::size_t test_weeks = 52;
};

/// Generated input used instead of a CSV file.
struct SyntheticSource {
    SyntheticPattern pattern = SyntheticPattern::random_walk;
    std::size_t length = 1301;
    std::uint64_t seed = 0;
    /// A Friday start puts the first feature row on a Monday.
    Date start{std::chrono::year{2015}, std::chrono::January, std::chrono::day{2}};
};

struct ExperimentConfig {
    std::string data;                        // CSV path; empty when synthetic is set
    std::optional<SyntheticSource> synthetic;
    SplitRule split;
    std::vector<std::string> models;
    std::vector<std::uint64_t> seeds;
    std::map<std::string, std::map<std::string, double>> overrides;
    std::string output_dir = "results";
    bool standardize = false;
    bool refit_weekly = false;
    /// Directory relative data paths resolve against; not part of the
    /// canonical form.
    std::string base_dir;
};

/// CNN kinds first, then baselines.
const std::vector<std::string>& known_models();

/// Parses and validates. Unknown keys, unknown models, empty model or seed
/// lists and bad override names throw ConfigError. Relative data paths are
/// resolved against `base_dir` when it is non-empty.
ExperimentConfig parse_experiment_config(const nlohmann::json& doc, const std::string& base_dir = {});
ExperimentConfig load_experiment_config(const std::string& path);
/// Throws ConfigError.
void validate_config(const ExperimentConfig& config);

/// Canonical form (base_dir excluded).
nlohmann::json config_to_json(const ExperimentConfig& config);
/// 16 hex digits of 64-bit FNV-1a over the canonical JSON without output_dir.
std::string config_hash(const ExperimentConfig& config);

struct SplitResult {
    FeatureTable train;
    FeatureTable test;  // complete weeks only
    std::size_t train_weeks = 0;
    std::size_t test_weeks = 0;
    SplitKind rule_used = SplitKind::date;
    std::size_t dropped_test_rows = 0;
};

/// Date rule: train = rows dated <= train_end, test = rows dated >=
/// test_start. When either side is empty the week-count rule applies instead:
/// the first train_weeks*5 rows train, up to test_weeks following weeks test.
/// Throws DataError unless both sides hold at least one complete week.
SplitResult split_feature_table(const FeatureTable& table, const SplitRule& rule);

FeatureTable load_feature_table(const ExperimentConfig& config);

/// Runs every (model, seed) cell and writes report_<model>_<seed>.json/.csv,
/// predictions_<model>_<seed>.csv, summary.csv and rmse_by_day_<model>.csv into
/// output_dir. Throws ConfigError, DataError or DivergenceError.
void run_experiment(const ExperimentConfig& config, std::ostream& log);

/// `model,metric,median,seeds` over per-seed reports; metrics that are
/// undefined for a seed are left out of that metric's median. Protocol rows
/// (train_weeks, test_weeks) use the model name "protocol".
std::string summarize_reports(const std::vector<nlohmann::json>& reports);

/// Reads every report_*.json in `dir` (sorted by name), rewrites summary.csv
/// and returns its content. Throws DataError when none exist.
std::string reaggregate_directory(const std::string& dir);

double median(std::vector<double> values);

/// 1 config, 2 data, 3 divergence, 4 anything else.
int exit_code_for(const std::exception& e);

} // namespace weekcast
