#include "weekcast/error.hpp"
#include "weekcast/experiment.hpp"
#include "weekcast/features.hpp"
#include "weekcast/market_data.hpp"
#include "weekcast/text.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <sstream>

using namespace weekcast;

namespace {

int cmd_ingest(const std::string& path) {
    const ParseResult parsed = read_ohlcv_csv(path);
    const auto& s = parsed.series;
    std::cout << s.size() << " rows\n";
    if (s.size() > 0) {
        std::cout << "range " << format_iso_date(s[0].date) << " .. " << format_iso_date(s[s.size() - 1].date) << "\n";
    }
    std::cout << "skipped null rows " << parsed.skipped_null_rows << "\n";
    return 0;
}

int cmd_features(const std::string& path, const std::string& out) {
    const FeatureTable table = build_feature_table(read_ohlcv_csv(path).series);
    const std::string csv = feature_table_csv(table);
    if (out.empty()) {
        std::cout << csv;
    } else {
        write_text_file(out, csv);
        std::cerr << table.size() << " feature rows written to " << out << "\n";
    }
    return 0;
}

int cmd_synth(const std::string& pattern, std::size_t length, std::uint64_t seed, const std::string& out) {
    SyntheticPattern p;
    try {
        p = parse_synthetic_pattern(pattern);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    const std::string csv = serialize_ohlcv_csv(generate_synthetic_series(length, p, seed, SyntheticSource{}.start));
    if (out.empty()) std::cout << csv;
    else write_text_file(out, csv);
    return 0;
}

struct RunArgs {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> models;
};

int cmd_run(const RunArgs& args) {
    if (args.config.empty()) throw ConfigError("run needs a config file (positional or --config)");
    ExperimentConfig config = load_experiment_config(args.config);
    if (!args.out.empty()) config.output_dir = args.out;
    if (args.seed) config.seeds = {*args.seed};
    if (!args.models.empty()) config.models = args.models;
    validate_config(config);
    run_experiment(config, std::cerr);
    std::cout << "reports written to " << config.output_dir << " (config " << config_hash(config) << ")\n";
    return 0;
}

int cmd_report(const std::string& dir) {
    std::cout << reaggregate_directory(dir);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weekly close_perc forecasting experiments"};
    app.require_subcommand(1);

    std::string path;
    auto* ingest = app.add_subcommand("ingest", "Validate an OHLCV CSV and print row count, date range and skipped nulls");
    ingest->add_option("csv", path, "Yahoo-format daily CSV")->required();

    std::string features_out;
    auto* features = app.add_subcommand("features", "Emit the nine-variable feature table as CSV");
    features->add_option("csv", path, "Yahoo-format daily CSV")->required();
    features->add_option("-o,--out", features_out, "Write to a file instead of stdout");

    std::string pattern = "random_walk";
    std::size_t length = 1301;
    std::uint64_t synth_seed = 0;
    std::string synth_out;
    auto* synth = app.add_subcommand("synth", "Write a deterministic synthetic OHLCV CSV");
    synth->add_option("--pattern", pattern, "constant, linear, sine or random_walk")->capture_default_str();
    synth->add_option("--length", length, "Number of daily bars")->capture_default_str();
    synth->add_option("--seed", synth_seed, "Generator seed")->capture_default_str();
    synth->add_option("-o,--out", synth_out, "Write to a file instead of stdout");

    RunArgs run_args;
    std::string positional_config;
    std::uint64_t seed_override = 0;
    auto* run = app.add_subcommand("run", "Train, walk-forward evaluate and write reports");
    run->add_option("config_file", positional_config, "Experiment config (JSON)");
    run->add_option("--config", run_args.config, "Experiment config (JSON)");
    run->add_option("--out", run_args.out, "Output directory (overrides output_dir)");
    auto* seed_opt = run->add_option("--seed", seed_override, "Run a single seed");
    run->add_option("--models", run_args.models, "Comma-separated model list")->delimiter(',');

    std::string report_dir;
    auto* report = app.add_subcommand("report", "Re-aggregate summary.csv from the reports in a directory");
    report->add_option("dir", report_dir, "Directory holding report_*.json")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*ingest) return cmd_ingest(path);
        if (*features) return cmd_features(path, features_out);
        if (*synth) return cmd_synth(pattern, length, synth_seed, synth_out);
        if (*run) {
            if (!positional_config.empty()) {
                if (!run_args.config.empty() && run_args.config != positional_config) {
                    throw ConfigError("config given both positionally and with --config");
                }
                run_args.config = positional_config;
            }
            if (*seed_opt) run_args.seed = seed_override;
            return cmd_run(run_args);
        }
        if (*report) return cmd_report(report_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
    return 1;
}
