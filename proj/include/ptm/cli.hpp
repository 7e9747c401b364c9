#ifndef PTM_CLI_HPP
#define PTM_CLI_HPP

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ptm/ptm.hpp"

namespace ptm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitValidation = 2;

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Pattern files: JSON object, or codebook text (with or without headers).
inline std::vector<CodePattern> load_patterns(const std::string& path) {
    const std::string text = read_file(path);
    const size_t first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) throw ParseError("empty pattern file", 1);
    if (text[first] == '{') return {pattern_from_json(nlohmann::json::parse(text))};
    if (text[first] == '[') {
        std::vector<CodePattern> out;
        for (const auto& j : nlohmann::json::parse(text)) out.push_back(pattern_from_json(j));
        return out;
    }
    return parse_codebook(text);
}

struct OutputTarget {
    std::ofstream file;
    std::ostream* stream = nullptr;

    std::ostream& get() { return *stream; }

    static OutputTarget make(const std::string& path, std::ostream& fallback) {
        OutputTarget t;
        if (path.empty()) {
            t.stream = &fallback;
        } else {
            t.file.open(path);
            if (!t.file) throw std::invalid_argument("cannot open output file: " + path);
            t.stream = &t.file;
        }
        return t;
    }
};

}  // namespace detail

/// Run the workbench CLI against the given argument list. Returns the exit
/// code (0 success, 2 validation error, 1 internal error).
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Beamforming workbench for a 2-bit programmable transmit-metamaterial lens"};
    app.require_subcommand(1);

    std::string config_path;
    std::string table_path;
    std::string out_path;
    app.add_option("--config", config_path, "System configuration JSON file");
    app.add_option("--state-table", table_path, "Cell state table JSON file");
    app.add_option("--out", out_path, "Write output to a file instead of stdout");

    // synthesize
    auto* synth = app.add_subcommand("synthesize", "Quantized pattern for a steering target");
    double theta_deg = 0.0;
    double phi_deg = 90.0;
    int bits = 2;
    std::string alphabet = "paper";
    std::string label;
    bool as_json = false;
    synth->add_option("--theta", theta_deg, "Target elevation in degrees")->required();
    synth->add_option("--phi", phi_deg, "Target azimuth in degrees (default 90, the states' plane)");
    synth->add_option("--bits", bits, "Uniform alphabet bit depth (1 or 2)");
    synth->add_option("--alphabet", alphabet, "paper | uniform")
        ->check(CLI::IsMember({"paper", "uniform"}));
    synth->add_option("--label", label, "Pattern label");
    synth->add_flag("--json", as_json, "Emit the pattern as JSON");

    // evaluate
    auto* eval = app.add_subcommand("evaluate", "Radiation pattern CSV for a pattern file");
    std::string pattern_path;
    std::string cut = "elevation";
    double step_deg = 1.0;
    double cut_phi_deg = -1.0;
    double radius_m = 0.0;
    eval->add_option("--pattern", pattern_path, "Pattern file")->required();
    eval->add_option("--cut", cut, "elevation | sphere")
        ->check(CLI::IsMember({"elevation", "sphere"}));
    eval->add_option("--step", step_deg, "Angular step in degrees");
    eval->add_option("--cut-phi", cut_phi_deg, "Cut azimuth (default: pattern target, else 90)");
    eval->add_option("--radius", radius_m, "Evaluation radius in meters (default: far field)");

    // states
    auto* states = app.add_subcommand("states", "Dump the built-in seven-state codebook");

    // metrics
    auto* metrics = app.add_subcommand("metrics", "Pattern figures of merit");
    std::string metrics_pattern_path;
    bool compare_paper = false;
    bool metrics_json = false;
    metrics->add_option("--pattern", metrics_pattern_path,
                        "Pattern file (default: built-in codebook)");
    metrics->add_flag("--compare-paper", compare_paper,
                      "Append published reference values and deltas");
    metrics->add_flag("--json", metrics_json, "Emit metrics as JSON");

    // track
    auto* track = app.add_subcommand("track", "Dynamic receiver-tracking simulation");
    std::string trajectory_path;
    std::string mode = "library";
    double rx_gain_dbi = 0.0;
    double hysteresis_db = 0.0;
    track->add_option("--trajectory", trajectory_path, "Trajectory CSV or JSON file")->required();
    track->add_option("--mode", mode, "library | resynthesize")
        ->check(CLI::IsMember({"library", "resynthesize"}));
    track->add_option("--rx-gain", rx_gain_dbi, "Receiver gain in dBi");
    track->add_option("--hysteresis", hysteresis_db, "Dwell margin in dB before switching state");

    // export-frame
    auto* exportf = app.add_subcommand("export-frame", "Bias-line control frame for a pattern");
    std::string frame_pattern_path;
    exportf->add_option("--pattern", frame_pattern_path, "Pattern file")->required();

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Frequency sweep of pattern metrics");
    double freq_start = 0.0;
    double freq_stop = 0.0;
    int steps = 0;
    std::string sweep_pattern_path;
    sweep->add_option("--freq-start", freq_start, "Start frequency in Hz")->required();
    sweep->add_option("--freq-stop", freq_stop, "Stop frequency in Hz")->required();
    sweep->add_option("--steps", steps, "Number of sweep points")->required();
    sweep->add_option("--pattern", sweep_pattern_path, "Pattern file (default: State IV)");

    try {
        std::vector<const char*> argv;
        argv.reserve(args.size() + 1);
        argv.push_back("ptmlens");
        for (const auto& a : args) argv.push_back(a.c_str());
        try {
            app.parse(static_cast<int>(argv.size()), argv.data());
        } catch (const CLI::CallForHelp& e) {
            out << app.help();
            return kExitOk;
        } catch (const CLI::ParseError& e) {
            err << e.what() << "\n";
            return kExitValidation;
        }

        SystemConfig config;
        if (!config_path.empty()) config = load_config_file(config_path);
        StateTable table = default_state_table();
        if (!table_path.empty()) table = load_state_table_file(table_path);

        detail::OutputTarget target = detail::OutputTarget::make(out_path, out);
        std::ostream& os = target.get();

        if (*synth) {
            SteeringTarget t{deg2rad(theta_deg), wrap_two_pi(deg2rad(phi_deg))};
            CodePattern p;
            if (alphabet == "paper") {
                p = synthesize_pattern(t, config, table);
            } else {
                if (bits < 1 || bits > 2)
                    throw std::invalid_argument(
                        "uniform synthesis onto 2-bit hardware supports --bits 1 or 2");
                const PhaseAlphabet a = uniform_alphabet(bits);
                const std::vector<size_t> idx = synthesize_indices(t, config, a);
                p = make_pattern(config.rows, config.cols);
                for (size_t i = 0; i < idx.size(); ++i)
                    p.states[i] = CellState(static_cast<int>(idx[i]));
                p.label = steering_label(t) + " uniform" + std::to_string(bits);
                p.target = t;
            }
            if (!label.empty()) p.label = label;
            if (as_json)
                os << pattern_to_json(p).dump(2) << "\n";
            else
                os << emit_codebook({p});
            return kExitOk;
        }

        if (*eval) {
            const CodePattern p = detail::load_patterns(pattern_path).front();
            ObservationGrid grid;
            if (cut == "elevation") {
                const double phi =
                    cut_phi_deg >= 0.0 ? deg2rad(cut_phi_deg)
                                       : (p.target ? p.target->phi_rad : deg2rad(90.0));
                grid = elevation_cut(phi, step_deg, -90.0, 90.0, radius_m);
            } else {
                grid = full_sphere(step_deg, step_deg, radius_m);
            }
            write_pattern_csv(os, radiation_pattern(p, grid, config, table));
            return kExitOk;
        }

        if (*states) {
            os << emit_codebook(builtin_state_library());
            return kExitOk;
        }

        if (*metrics) {
            const std::vector<CodePattern> patterns = metrics_pattern_path.empty()
                                                          ? builtin_state_library()
                                                          : detail::load_patterns(metrics_pattern_path);
            std::vector<std::pair<std::string, PatternMetrics>> rows;
            rows.reserve(patterns.size());
            for (const CodePattern& p : patterns)
                rows.emplace_back(p.label.empty() ? "(unlabeled)" : p.label,
                                  compute_metrics(p, config, table));
            if (metrics_json) {
                nlohmann::json j = nlohmann::json::array();
                for (const auto& [lbl, m] : rows) {
                    nlohmann::json e = metrics_to_json(m);
                    e["label"] = lbl;
                    j.push_back(e);
                }
                os << j.dump(2) << "\n";
            } else {
                write_metrics_table(os, rows, compare_paper);
            }
            return kExitOk;
        }

        if (*track) {
            std::ifstream in(trajectory_path);
            if (!in) throw std::invalid_argument("cannot open trajectory file: " + trajectory_path);
            const Trajectory traj = load_trajectory(in);
            TrackingOptions opt;
            opt.mode = mode == "library" ? TrackingMode::Library : TrackingMode::Resynthesize;
            opt.rx_gain_dbi = rx_gain_dbi;
            opt.hysteresis_db = hysteresis_db;
            const TrackingResult result = run_tracking(traj, config, table, opt);
            write_tracking_csv(os, result);
            os << "# summary " << tracking_summary_json(result).dump() << "\n";
            return kExitOk;
        }

        if (*exportf) {
            const CodePattern p = detail::load_patterns(frame_pattern_path).front();
            os << frame_to_text(encode_bias_frame(p));
            return kExitOk;
        }

        if (*sweep) {
            if (steps < 2) throw std::invalid_argument("sweep needs at least 2 steps");
            if (!(freq_start > 0.0) || !(freq_stop > freq_start))
                throw std::invalid_argument("sweep needs 0 < freq-start < freq-stop");
            const CodePattern p = sweep_pattern_path.empty()
                                      ? builtin_state_library()[3]
                                      : detail::load_patterns(sweep_pattern_path).front();
            os << "freq_hz,main_lobe_deg,peak_mag,sll_db,directivity_dbi\n";
            char buf[160];
            for (int i = 0; i < steps; ++i) {
                SystemConfig c = config;
                c.frequency_hz =
                    freq_start + (freq_stop - freq_start) * i / (steps - 1);
                const PatternMetrics m = compute_metrics(p, c, table);
                std::snprintf(buf, sizeof buf, "%.6e,%.3f,%.6e,%s,%.4f\n", c.frequency_hz,
                              m.lobe.theta_deg, m.lobe.magnitude,
                              m.sll_db ? std::to_string(*m.sll_db).c_str() : "",
                              m.directivity_dbi.value_or(0.0));
                os << buf;
            }
            return kExitOk;
        }

        err << "no subcommand given\n";
        return kExitValidation;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}

}  // namespace ptm::cli

#endif
