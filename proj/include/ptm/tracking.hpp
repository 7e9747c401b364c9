#ifndef PTM_TRACKING_HPP
#define PTM_TRACKING_HPP

#include <cstdio>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "ptm/common.hpp"
#include "ptm/field.hpp"
#include "ptm/metrics.hpp"
#include "ptm/synthesis.hpp"

namespace ptm {

struct TrajectoryStep {
    double t_s = 0.0;
    Vec3 position{};  // +z half-space
};

struct Trajectory {
    std::vector<TrajectoryStep> steps;

    void validate() const {
        if (steps.empty()) throw std::domain_error("trajectory is empty");
        for (const auto& s : steps)
            if (!(s.position.z > 0.0))
                throw std::invalid_argument("receiver positions must have z > 0");
    }
};

/// CSV columns: t_s, r_m, theta_deg, phi_deg. A header row is optional.
inline Trajectory trajectory_from_csv(std::istream& in) {
    Trajectory traj;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (lineno == 1 && line.find_first_not_of("0123456789.,+-eE \t") != std::string::npos)
            continue;  // header row
        std::istringstream ss(line);
        double t, r, th, ph;
        char c1, c2, c3;
        if (!(ss >> t >> c1 >> r >> c2 >> th >> c3 >> ph) || c1 != ',' || c2 != ',' || c3 != ',')
            throw ParseError("expected t_s,r_m,theta_deg,phi_deg", lineno);
        traj.steps.push_back({t, spherical_to_cartesian(r, deg2rad(th), deg2rad(ph))});
    }
    traj.validate();
    return traj;
}

inline Trajectory trajectory_from_json(const nlohmann::json& j) {
    Trajectory traj;
    const nlohmann::json& arr = j.is_array() ? j : j.at("steps");
    for (const auto& e : arr) {
        TrajectoryStep s;
        s.t_s = e.value("t_s", 0.0);
        if (e.contains("position_m")) {
            const auto& p = e.at("position_m");
            s.position = {p[0].get<double>(), p[1].get<double>(), p[2].get<double>()};
        } else {
            s.position = spherical_to_cartesian(e.at("r_m").get<double>(),
                                                deg2rad(e.at("theta_deg").get<double>()),
                                                deg2rad(e.value("phi_deg", 90.0)));
        }
        traj.steps.push_back(s);
    }
    traj.validate();
    return traj;
}

/// Sniffs JSON ('[' or '{') vs CSV.
inline Trajectory load_trajectory(std::istream& in) {
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const size_t first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && (text[first] == '[' || text[first] == '{'))
        return trajectory_from_json(nlohmann::json::parse(text));
    std::istringstream ss(text);
    return trajectory_from_csv(ss);
}

/// Best library pattern for a receiver position: argmax of |E|^2. Power ties
/// resolve to the smaller |target angle| (then the larger signed angle, then
/// the label), so the result never depends on library order.
inline size_t select_state(const Vec3& rx_position, const std::vector<CodePattern>& library,
                           const SystemConfig& config, const StateTable& table) {
    if (library.empty()) throw std::invalid_argument("empty pattern library");
    auto tie_key = [](const CodePattern& p) {
        const double t = p.target ? rad2deg(p.target->theta_rad)
                                  : std::numeric_limits<double>::infinity();
        return std::make_tuple(std::abs(t), -t, p.label);
    };
    size_t best = 0;
    double best_power = -1.0;
    for (size_t i = 0; i < library.size(); ++i) {
        const double p = std::norm(transmitted_field(rx_position, library[i], config, table));
        if (p > best_power ||
            (p == best_power && tie_key(library[i]) < tie_key(library[best]))) {
            best_power = p;
            best = i;
        }
    }
    return best;
}

/// Calibration constant tying model field magnitudes to the link budget: the
/// boresight State IV far field is pinned to that pattern's computed realized
/// gain, so 20*log10(C*|E|) behaves as gain minus spreading loss.
struct LinkCalibration {
    double scale = 1.0;

    static LinkCalibration make(const SystemConfig& config, const StateTable& table,
                                const MetricsOptions& opt = {}) {
        const std::vector<CodePattern> lib = builtin_state_library();
        const CodePattern& boresight = lib[3];  // State IV
        const RadiationPattern sphere = radiation_pattern(
            boresight, full_sphere(opt.sphere_theta_step_deg, opt.sphere_phi_step_deg), config,
            table);
        const double d = directivity(sphere);
        const double eta = feed_coupling_efficiency(config) *
                           transmission_efficiency(boresight, config, table);
        const double gain_db = realized_gain_dbi(d, eta);

        const double ref_distance = default_evaluation_radius(config);
        const double e0 = std::abs(transmitted_field(
            Vec3{0.0, 0.0, ref_distance}, boresight, config, table));
        const double want_db = gain_db - spreading_loss_db(ref_distance, config.wavelength());
        LinkCalibration cal;
        cal.scale = std::pow(10.0, want_db / 20.0) / e0;
        return cal;
    }
};

/// Delivered power in dBm: P_t + 20*log10(|E_normalized|) + rx gain.
inline double received_power_dbm(const CodePattern& pattern, const Vec3& rx_position,
                                 const SystemConfig& config, const StateTable& table,
                                 double rx_gain_dbi, const LinkCalibration& cal) {
    if (!(rx_position.z > 0.0))
        throw std::invalid_argument("receiver must be in the +z half-space");
    const double mag =
        cal.scale * std::abs(transmitted_field(rx_position, pattern, config, table));
    const double pt_dbm = dbm_from_watts(config.feed.radiated_power_w);
    return pt_dbm + db_from_amplitude_ratio(mag) + rx_gain_dbi;
}

inline double received_power_dbm(const CodePattern& pattern, const Vec3& rx_position,
                                 const SystemConfig& config, const StateTable& table,
                                 double rx_gain_dbi = 0.0) {
    return received_power_dbm(pattern, rx_position, config, table, rx_gain_dbi,
                              LinkCalibration::make(config, table));
}

enum class TrackingMode { Library, Resynthesize };

struct TrackingOptions {
    TrackingMode mode = TrackingMode::Library;
    double rx_gain_dbi = 0.0;
    double hysteresis_db = 0.0;  // library mode: dwell margin before switching
};

struct TrackingRecord {
    double t_s = 0.0;
    std::string state_label;
    double rx_theta_deg = 0.0;      // receiver elevation in its steering plane
    double achieved_theta_deg = 0.0;  // main lobe of the selected pattern
    double received_dbm = 0.0;
    double pointing_error_deg = 0.0;
};

struct TrackingResult {
    std::vector<TrackingRecord> records;
    double mean_power_dbm = 0.0;     // mean of per-step powers in linear terms
    double worst_handover_dip_db = 0.0;
};

namespace detail {

/// Signed elevation of a position relative to its steering plane: theta keeps
/// its magnitude from the polar angle and takes the sign that puts phi within
/// the [0, pi) azimuth half-plane convention used by the cuts.
inline double signed_elevation_deg(const Vec3& p, double& plane_phi_rad) {
    const Spherical s = cartesian_to_spherical(p);
    double phi = wrap_two_pi(s.phi);
    double theta = rad2deg(s.theta);
    if (s.theta == 0.0) {
        plane_phi_rad = deg2rad(90.0);
        return 0.0;
    }
    if (phi >= kPi) {
        phi -= kPi;
        theta = -theta;
    }
    plane_phi_rad = phi;
    return theta;
}

inline double pattern_lobe_deg(const CodePattern& p, const SystemConfig& config,
                               const StateTable& table, double cut_phi_rad) {
    const RadiationPattern cut =
        radiation_pattern(p, elevation_cut(cut_phi_rad, 1.0), config, table);
    return main_lobe(cut).theta_deg;
}

}  // namespace detail

/// Step through a trajectory, pick a pattern per step (library argmax or fresh
/// synthesis toward the receiver) and log the delivered power.
inline TrackingResult run_tracking(const Trajectory& trajectory, const SystemConfig& config,
                                   const StateTable& table, const TrackingOptions& opt = {}) {
    trajectory.validate();
    const std::vector<CodePattern> library = builtin_state_library();
    const LinkCalibration cal = LinkCalibration::make(config, table);

    // library-pattern lobes are fixed; compute them once in the states' plane
    std::vector<double> library_lobe_deg;
    if (opt.mode == TrackingMode::Library) {
        library_lobe_deg.reserve(library.size());
        for (const CodePattern& p : library)
            library_lobe_deg.push_back(
                detail::pattern_lobe_deg(p, config, table, deg2rad(90.0)));
    }

    TrackingResult result;
    result.records.reserve(trajectory.steps.size());
    std::optional<size_t> current;
    double linear_sum_mw = 0.0;

    for (const TrajectoryStep& step : trajectory.steps) {
        double plane_phi = deg2rad(90.0);
        const double rx_theta_deg = detail::signed_elevation_deg(step.position, plane_phi);

        TrackingRecord rec;
        rec.t_s = step.t_s;
        rec.rx_theta_deg = rx_theta_deg;

        if (opt.mode == TrackingMode::Library) {
            size_t pick = select_state(step.position, library, config, table);
            if (current && opt.hysteresis_db > 0.0 && pick != *current) {
                const double p_new =
                    std::norm(transmitted_field(step.position, library[pick], config, table));
                const double p_cur =
                    std::norm(transmitted_field(step.position, library[*current], config, table));
                if (db_from_power_ratio(p_new / p_cur) < opt.hysteresis_db) pick = *current;
            }
            current = pick;
            rec.state_label = library[pick].label;
            rec.achieved_theta_deg = library_lobe_deg[pick];
            rec.received_dbm = received_power_dbm(library[pick], step.position, config, table,
                                                  opt.rx_gain_dbi, cal);
        } else {
            SteeringTarget target;
            target.theta_rad = deg2rad(rx_theta_deg);
            target.phi_rad = plane_phi;
            const CodePattern p = synthesize_pattern(target, config, table);
            rec.state_label = p.label;
            rec.achieved_theta_deg = detail::pattern_lobe_deg(p, config, table, target.phi_rad);
            rec.received_dbm =
                received_power_dbm(p, step.position, config, table, opt.rx_gain_dbi, cal);
        }
        rec.pointing_error_deg = std::abs(rec.achieved_theta_deg - rec.rx_theta_deg);
        linear_sum_mw += std::pow(10.0, rec.received_dbm / 10.0);
        result.records.push_back(std::move(rec));
    }

    result.mean_power_dbm =
        10.0 * std::log10(linear_sum_mw / static_cast<double>(result.records.size()));
    double worst = 0.0;
    for (size_t i = 1; i < result.records.size(); ++i)
        if (result.records[i].state_label != result.records[i - 1].state_label)
            worst = std::min(worst,
                             result.records[i].received_dbm - result.records[i - 1].received_dbm);
    result.worst_handover_dip_db = worst;
    return result;
}

inline void write_tracking_csv(std::ostream& out, const TrackingResult& r) {
    out << "t_s,state,rx_theta_deg,achieved_theta_deg,received_dbm,pointing_error_deg\n";
    char buf[192];
    for (const TrackingRecord& rec : r.records) {
        std::snprintf(buf, sizeof buf, "%.3f,%s,%.3f,%.3f,%.4f,%.3f\n", rec.t_s,
                      rec.state_label.c_str(), rec.rx_theta_deg, rec.achieved_theta_deg,
                      rec.received_dbm, rec.pointing_error_deg);
        out << buf;
    }
}

inline nlohmann::json tracking_summary_json(const TrackingResult& r) {
    return {{"steps", r.records.size()},
            {"mean_power_dbm", r.mean_power_dbm},
            {"worst_handover_dip_db", r.worst_handover_dip_db}};
}

}  // namespace ptm

#endif
