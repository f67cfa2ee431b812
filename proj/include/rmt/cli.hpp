#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rmt/detect.hpp"
#include "rmt/errors.hpp"
#include "rmt/pipeline.hpp"
#include "rmt/report.hpp"

namespace rmt {

namespace cli_detail {

namespace fs = std::filesystem;

inline std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("input not found: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

inline fs::path prepare_out_dir(const std::string& out) {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw IoError("cannot create output directory " + out + ": " + ec.message());
    return fs::path(out);
}

inline TrafficPanel load_panel(const std::string& input, const std::string& kind, long long dt) {
    if (kind == "csv") {
        std::ifstream in(input, std::ios::binary);
        if (!in) throw IoError("input not found: " + input);
        return parse_csv(in);
    }
    if (kind == "mrtg-dir") {
        if (!fs::is_directory(input)) throw IoError("input not found: " + input);
        std::vector<fs::path> logs;
        for (const auto& entry : fs::directory_iterator(input))
            if (entry.path().extension() == ".log") logs.push_back(entry.path());
        std::sort(logs.begin(), logs.end());
        if (logs.empty()) throw IoError("no .log files under " + input);
        std::vector<TrafficPanel> panels;
        for (const auto& path : logs) {
            const std::string text = read_file(path);
            const std::string stem = path.stem().string();
            std::istringstream in_stream(text), out_stream(text);
            panels.push_back(parse_mrtg_log(in_stream, Direction::In, stem + ":in", dt));
            panels.push_back(parse_mrtg_log(out_stream, Direction::Out, stem + ":out", dt));
        }
        return merge_panels(panels);
    }
    throw ConfigError("unknown input kind \"" + kind + "\" (expected csv or mrtg-dir)");
}

// Common knobs shared by the panel-consuming commands.
struct PanelArgs {
    std::string input;
    std::string kind = "csv";
    long long dt = 300;
    int broadening = 8;
    int window = 0;
    int step = 0;
    int min_distinct = 2;
    std::uint64_t seed = 1;
    std::string out;
    std::string config;
};

inline void add_panel_options(CLI::App* cmd, PanelArgs& args) {
    cmd->add_option("--input", args.input, "panel CSV file or MRTG log directory");
    cmd->add_option("--kind", args.kind, "input kind: csv | mrtg-dir")
        ->check(CLI::IsMember({"csv", "mrtg-dir"}));
    cmd->add_option("--dt", args.dt, "sampling interval in seconds");
    cmd->add_option("--broadening", args.broadening, "unfolding broadening parameter a");
    cmd->add_option("--window", args.window, "window length in observations");
    cmd->add_option("--step", args.step, "window step in observations");
    cmd->add_option("--min-distinct", args.min_distinct, "distinct-count threshold for exclusion");
    cmd->add_option("--seed", args.seed, "seed for sampled statistics");
    cmd->add_option("--out", args.out, "output directory");
    cmd->add_option("--config", args.config, "flat key=value config file (flags win)");
}

// Flat key=value file whose keys mirror the long flags; values given on the
// command line keep precedence. Applied after parsing, so it must push
// results through each option's callback by hand.
inline void apply_config_file(CLI::App* cmd, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("config file not found: " + path);
    const auto trim = [](const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string text = trim(line);
        if (text.empty() || text[0] == '#') continue;
        const auto eq = text.find('=');
        const std::string key = eq == std::string::npos ? "" : trim(text.substr(0, eq));
        if (key.empty() || key == "config")
            throw ConfigError("config line " + std::to_string(lineno) +
                              " is not key=value: " + text);
        CLI::Option* opt = cmd->get_option_no_throw("--" + key);
        if (opt == nullptr) throw ConfigError("unknown config key \"" + key + "\"");
        if (opt->count() > 0) continue;
        try {
            opt->add_result(trim(text.substr(eq + 1)));
            opt->run_callback();
        } catch (const CLI::Error& e) {
            throw ConfigError("bad config value for \"" + key + "\": " + e.what());
        }
    }
}

inline void validate_common(const PanelArgs& args) {
    if (args.input.empty()) throw ConfigError("--input is required");
    if (args.out.empty()) throw ConfigError("--out is required");
    if (args.dt <= 0) throw ConfigError("dt must be positive");
    if (args.broadening < 1) throw ConfigError("broadening parameter a must be >= 1");
    if (args.window != 0 && args.window < 2 * args.broadening + 2)
        throw ConfigError("window must exceed 2a+1 = " + std::to_string(2 * args.broadening + 1));
}

struct Stage {
    std::string name = "startup";
};

inline int run_analyze(const PanelArgs& args, bool bulk_only, Stage& stage) {
    stage.name = "configuration";
    validate_common(args);
    const fs::path out_dir = prepare_out_dir(args.out);

    stage.name = "input";
    const TrafficPanel raw = load_panel(args.input, args.kind, args.dt);

    stage.name = "analysis";
    AnalyzeOptions opt;
    opt.broadening_a = args.broadening;
    opt.bulk_only = bulk_only;
    opt.window = args.window;
    opt.step = args.step;
    opt.min_distinct = args.min_distinct;
    opt.seed = args.seed;
    const AnalyzeResult result = analyze_panel(raw, opt);

    stage.name = "output";
    write_file(out_dir / "report.json", json(result.report).dump(2) + "\n");
    {
        std::ostringstream os;
        write_eigenvalue_density_csv(result.report.eigenvalues, result.report.mp, os);
        write_file(out_dir / "eigenvalue_density.csv", os.str());
    }
    {
        std::ostringstream os;
        write_ipr_csv(result.report.eigenvalues, result.report.ipr_series, os);
        write_file(out_dir / "ipr.csv", os.str());
    }
    if (result.unfolded_available) {
        std::ostringstream unfolded, nn, nnn;
        write_unfolded_csv(result.unfolded, unfolded);
        write_file(out_dir / "unfolded.csv", unfolded.str());
        write_spacing_csv(result.nn, wigner_goe_pdf, nn);
        write_file(out_dir / "nn_spacing.csv", nn.str());
        write_spacing_csv(result.nnn, gse_pdf, nnn);
        write_file(out_dir / "nnn_spacing.csv", nnn.str());
        if (!result.var_l.empty()) {
            std::ostringstream os;
            write_variance_csv(result.var_l, result.var_empirical, result.var_goe, os);
            write_file(out_dir / "number_variance.csv", os.str());
        }
    }
    for (const DeviatingVectorReport& d : result.report.deviating_vectors) {
        std::ostringstream os;
        write_components_csv(component_stats(result.spectrum.eigenvectors.col(d.index), d.index),
                             result.report.n, os);
        write_file(out_dir / ("components_" + std::to_string(d.index) + ".csv"), os.str());
    }
    if (!result.spectrum.bulk_indices.empty()) {
        const int mid =
            result.spectrum.bulk_indices[result.spectrum.bulk_indices.size() / 2];
        std::ostringstream os;
        write_components_csv(component_stats(result.spectrum.eigenvectors.col(mid), mid),
                             result.report.n, os);
        write_file(out_dir / "components_bulk.csv", os.str());
    }
    if (result.projection_available) {
        std::ostringstream corr, scatter;
        write_projection_corr_csv(result.report.labels, result.regression.correlations, corr);
        write_file(out_dir / "projection_corr.csv", corr.str());
        write_projection_scatter_csv(result.projection,
                                     result.returns.g.row(result.regression.best_index), scatter);
        write_file(out_dir / "projection_scatter.csv", scatter.str());
    }
    return 0;
}

inline int run_stability(const PanelArgs& args, int base_start, const std::vector<long>& lags,
                         Stage& stage) {
    stage.name = "configuration";
    validate_common(args);
    if (args.window <= 0) throw ConfigError("stability needs a positive --window");
    if (lags.empty()) throw ConfigError("stability needs at least one lag");
    const fs::path out_dir = prepare_out_dir(args.out);

    stage.name = "input";
    const TrafficPanel raw = load_panel(args.input, args.kind, args.dt);

    stage.name = "stability";
    auto [panel, excluded] = exclude_inactive(raw, args.min_distinct);
    (void)excluded;
    const NormalizedPanel normalized = normalize(log_returns(panel));
    const StabilityReport report =
        stability_report(normalized, Span{base_start, base_start + args.window}, lags);

    stage.name = "output";
    write_file(out_dir / "stability.json", json(report).dump(2) + "\n");
    for (const LagSummary& lag : report.lags) {
        if (!lag.ok) continue;
        std::ostringstream os;
        write_matrix_csv(lag.o, os);
        write_file(out_dir / ("overlap_" + std::to_string(lag.lag) + ".csv"), os.str());
    }
    return 0;
}

inline int run_synth(int n, int l, std::uint64_t seed, const std::string& inject_path,
                     const std::string& out, Stage& stage) {
    stage.name = "configuration";
    if (n == 0) throw ConfigError("--n is required");
    if (l == 0) throw ConfigError("--l is required");
    if (out.empty()) throw ConfigError("--out is required");
    const fs::path out_dir = prepare_out_dir(out);
    std::vector<InjectionSpec> specs;
    if (!inject_path.empty()) specs = parse_injection_specs(read_file(inject_path));

    stage.name = "generation";
    TrafficPanel panel = generate_null(n, l, seed);
    for (const InjectionSpec& spec : specs) panel = inject(panel, spec);
    const Eigen::MatrixXi mask = ground_truth(specs, n, l);

    stage.name = "output";
    std::ostringstream panel_os, mask_os;
    write_csv(panel, panel_os);
    write_file(out_dir / "panel.csv", panel_os.str());
    write_mask_csv(mask, mask_os);
    write_file(out_dir / "mask.csv", mask_os.str());
    return 0;
}

inline int run_detect(const std::string& baseline_path, const std::string& current_path,
                      const std::string& thresholds_path, const std::string& out, Stage& stage) {
    stage.name = "configuration";
    if (baseline_path.empty()) throw ConfigError("--baseline is required");
    if (current_path.empty()) throw ConfigError("--current is required");
    if (out.empty()) throw ConfigError("--out is required");
    const fs::path out_dir = prepare_out_dir(out);
    DetectionThresholds thresholds;
    if (!thresholds_path.empty()) thresholds = parse_thresholds(read_file(thresholds_path));

    stage.name = "input";
    AnalyzeReport baseline, current;
    try {
        baseline = json::parse(read_file(baseline_path)).get<AnalyzeReport>();
        current = json::parse(read_file(current_path)).get<AnalyzeReport>();
    } catch (const json::exception& e) {
        throw IoError(std::string("cannot parse report JSON: ") + e.what());
    }

    stage.name = "detection";
    const DetectReport verdict = detect(baseline, current, thresholds);

    stage.name = "output";
    write_file(out_dir / "verdict.json", json(verdict).dump(2) + "\n");
    return 0;
}

}  // namespace cli_detail

// Exit codes: 0 success, 1 configuration/spec error, 2 I/O or data error,
// 3 numerical failure.
inline int cli_main(std::vector<std::string> args) {
    CLI::App app{"random-matrix analysis of traffic-count panels"};
    app.require_subcommand(1);

    cli_detail::PanelArgs analyze_args;
    bool bulk_only = false;
    CLI::App* analyze = app.add_subcommand("analyze", "spectrum, eigenmode, and plot-data report");
    cli_detail::add_panel_options(analyze, analyze_args);
    analyze->add_flag("--bulk-only", bulk_only, "unfold only the in-bounds eigenvalues");

    cli_detail::PanelArgs stability_args;
    int base_start = 0;
    std::vector<long> lags;
    CLI::App* stability = app.add_subcommand("stability", "deviating-basis overlap across windows");
    cli_detail::add_panel_options(stability, stability_args);
    stability->add_option("--base-start", base_start, "first observation of the base window");
    stability->add_option("--lags", lags, "comma-separated window lags in observations")
        ->delimiter(',');

    int synth_n = 0, synth_l = 0;
    std::uint64_t synth_seed = 0;
    std::string inject_path, synth_out, synth_config;
    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic panel with injections");
    synth->add_option("--n", synth_n, "series count");
    synth->add_option("--l", synth_l, "observation count");
    synth->add_option("--seed", synth_seed, "generator seed");
    synth->add_option("--inject", inject_path, "JSON list of injection specs");
    synth->add_option("--out", synth_out, "output directory");
    synth->add_option("--config", synth_config, "flat key=value config file (flags win)");

    std::string baseline_path, current_path, thresholds_path, detect_out, detect_config;
    CLI::App* detect_cmd = app.add_subcommand("detect", "compare a run against its baseline");
    detect_cmd->add_option("--baseline", baseline_path, "baseline report.json");
    detect_cmd->add_option("--current", current_path, "current report.json");
    detect_cmd->add_option("--thresholds", thresholds_path, "key=value detection thresholds");
    detect_cmd->add_option("--out", detect_out, "output directory");
    detect_cmd->add_option("--config", detect_config, "flat key=value config file (flags win)");

    std::vector<const char*> argv;
    argv.push_back("rmtraffic");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "rmtraffic: " << e.what() << "\n";
        return 1;
    }

    CLI::App* sub = app.get_subcommands().front();
    const std::string command = sub->get_name();
    cli_detail::Stage stage;
    try {
        stage.name = "configuration";
        const std::string& config = analyze->parsed()     ? analyze_args.config
                                    : stability->parsed() ? stability_args.config
                                    : synth->parsed()     ? synth_config
                                                          : detect_config;
        if (!config.empty()) cli_detail::apply_config_file(sub, config);
        if (analyze->parsed()) return cli_detail::run_analyze(analyze_args, bulk_only, stage);
        if (stability->parsed())
            return cli_detail::run_stability(stability_args, base_start, lags, stage);
        if (synth->parsed())
            return cli_detail::run_synth(synth_n, synth_l, synth_seed, inject_path, synth_out, stage);
        return cli_detail::run_detect(baseline_path, current_path, thresholds_path, detect_out,
                                      stage);
    } catch (const ConfigError& e) {
        std::cerr << command << " failed at " << stage.name << ": " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << command << " failed at " << stage.name << ": " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << command << " failed at " << stage.name << ": " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << command << " failed at " << stage.name << ": " << e.what() << "\n";
        return 3;
    }
}

}  // namespace rmt
