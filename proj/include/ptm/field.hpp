#ifndef PTM_FIELD_HPP
#define PTM_FIELD_HPP

#include <cstdio>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ptm/cells.hpp"
#include "ptm/common.hpp"
#include "ptm/geometry.hpp"
#include "ptm/pattern.hpp"
#include "ptm/synthesis.hpp"

namespace ptm {

// Discretized equivalent-source model: each cell is one complex point source.
// The incident feed field, the cell's tabulated transmission coefficient and a
// cos^q element factor (with amplitude-beta leakage behind the lens) are summed
// coherently at the observation point.

/// Spherical-wave feed field at a point: cos^{q_f}(theta_feed) * e^{-j k0 d} / d,
/// zero behind the feed's boresight plane. Unit on-axis amplitude at 1 m.
inline complexd incident_field(const Vec3& point, const FeedModel& feed,
                               const SystemConfig& config) {
    const Vec3 v = point - feed.position;
    const double d = v.norm();
    if (d <= 0.0) throw std::domain_error("observation point coincides with the feed");
    const double cos_t = v.z / d;
    if (cos_t <= 0.0) return {0.0, 0.0};
    const double taper = std::pow(cos_t, feed.exponent);
    const double k0 = config.wavenumber();
    return std::polar(taper / d, -k0 * d);
}

/// Per-cell complex excitation: transmission coefficient of the assigned state.
struct CellCoefficients {
    int rows = 0;
    int cols = 0;
    std::vector<complexd> values;  // row-major
};

inline CellCoefficients cell_coefficients(const CodePattern& pattern, const StateTable& table) {
    CellCoefficients c;
    c.rows = pattern.rows;
    c.cols = pattern.cols;
    c.values.reserve(pattern.states.size());
    for (CellState s : pattern.states) c.values.push_back(state_response(s, table));
    return c;
}

inline CellCoefficients cell_coefficients(const std::vector<size_t>& indices,
                                          const PhaseAlphabet& alphabet, int rows, int cols) {
    CellCoefficients c;
    c.rows = rows;
    c.cols = cols;
    c.values.reserve(indices.size());
    for (size_t i : indices) c.values.push_back(std::polar(1.0, alphabet.phases[i]));
    return c;
}

/// Coherent sum over all cells of incident * transmission * element factor *
/// spherical spreading. The element factor is cos^q(theta) in front of the
/// lens and beta*|cos(theta)|^q behind it.
inline complexd transmitted_field(const Vec3& point, const CellCoefficients& coeffs,
                                  const SystemConfig& config) {
    const std::vector<Vec3> cells = lens_aperture(config);
    if (coeffs.values.size() != cells.size())
        throw std::invalid_argument("coefficient grid does not match the lens grid");
    const double k0 = config.wavenumber();
    complexd sum{0.0, 0.0};
    for (size_t i = 0; i < cells.size(); ++i) {
        const Vec3 v = point - cells[i];
        const double d = v.norm();
        if (d <= 0.0) throw std::domain_error("observation point coincides with a cell center");
        const double cos_t = v.z / d;
        double factor = std::pow(std::abs(cos_t), config.element_exponent);
        if (cos_t < 0.0) factor *= config.back_lobe_leakage;
        const complexd inc = incident_field(cells[i], config.feed, config);
        sum += inc * coeffs.values[i] * std::polar(factor / d, -k0 * d);
    }
    return sum;
}

inline complexd transmitted_field(const Vec3& point, const CodePattern& pattern,
                                  const SystemConfig& config, const StateTable& table) {
    return transmitted_field(point, cell_coefficients(pattern, table), config);
}

/// Default direction-mode evaluation radius: ten times the far-field boundary.
inline double default_evaluation_radius(const SystemConfig& config) {
    return 10.0 * region_boundaries(config).far_m;
}

struct Direction {
    double theta_rad;
    double phi_rad;
};

inline Vec3 direction_point(const Direction& dir, double radius) {
    return spherical_to_cartesian(radius, dir.theta_rad, dir.phi_rad);
}

/// Observation geometry: either a set of directions evaluated at a fixed
/// radius, or explicit 3-D points.
struct ObservationGrid {
    enum class Kind { Directions, Points };

    Kind kind = Kind::Directions;
    std::vector<Direction> directions;
    double radius_m = 0.0;  // direction mode; 0 means the default far radius
    std::vector<Vec3> points;

    // grid structure for direction mode (filled by the factories below)
    int theta_count = 0;
    int phi_count = 0;
    double theta_step_rad = 0.0;
    double theta_start_rad = 0.0;
    bool full_sphere = false;
    double cut_phi_rad = 0.0;

    size_t size() const {
        return kind == Kind::Directions ? directions.size() : points.size();
    }

    void validate() const {
        if (size() == 0) throw std::invalid_argument("observation grid is empty");
    }
};

/// Elevation cut: signed theta in [theta_min, theta_max] at fixed azimuth.
/// Negative theta is the (phi + pi) half-plane.
inline ObservationGrid elevation_cut(double phi_rad, double step_deg, double theta_min_deg = -90.0,
                                     double theta_max_deg = 90.0, double radius_m = 0.0) {
    if (!(step_deg > 0.0)) throw std::invalid_argument("angular step must be positive");
    ObservationGrid g;
    g.kind = ObservationGrid::Kind::Directions;
    g.radius_m = radius_m;
    g.cut_phi_rad = phi_rad;
    g.theta_step_rad = deg2rad(step_deg);
    g.theta_start_rad = deg2rad(theta_min_deg);
    const int n = static_cast<int>(std::floor((theta_max_deg - theta_min_deg) / step_deg + 0.5)) + 1;
    g.theta_count = n;
    g.phi_count = 1;
    g.directions.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        g.directions.push_back({deg2rad(theta_min_deg + i * step_deg), phi_rad});
    return g;
}

/// Full sphere: theta in [0, 180] inclusive, phi in [0, 360) exclusive.
inline ObservationGrid full_sphere(double theta_step_deg, double phi_step_deg,
                                   double radius_m = 0.0) {
    if (!(theta_step_deg > 0.0) || !(phi_step_deg > 0.0))
        throw std::invalid_argument("angular step must be positive");
    ObservationGrid g;
    g.kind = ObservationGrid::Kind::Directions;
    g.radius_m = radius_m;
    g.full_sphere = true;
    g.theta_step_rad = deg2rad(theta_step_deg);
    g.theta_start_rad = 0.0;
    g.theta_count = static_cast<int>(std::floor(180.0 / theta_step_deg + 0.5)) + 1;
    g.phi_count = static_cast<int>(std::floor(360.0 / phi_step_deg + 0.5));
    g.directions.reserve(static_cast<size_t>(g.theta_count) * g.phi_count);
    for (int i = 0; i < g.theta_count; ++i)
        for (int j = 0; j < g.phi_count; ++j)
            g.directions.push_back({deg2rad(i * theta_step_deg), deg2rad(j * phi_step_deg)});
    return g;
}

inline ObservationGrid point_grid(std::vector<Vec3> points) {
    ObservationGrid g;
    g.kind = ObservationGrid::Kind::Points;
    g.points = std::move(points);
    g.validate();
    return g;
}

/// Sampled complex field over an observation grid.
struct RadiationPattern {
    ObservationGrid grid;
    std::vector<complexd> samples;  // one per grid entry
    double frequency_hz = 0.0;
    std::optional<CodePattern> source_pattern;

    double magnitude(size_t i) const { return std::abs(samples[i]); }
    double peak_magnitude() const {
        double m = 0.0;
        for (const complexd& s : samples) m = std::max(m, std::abs(s));
        return m;
    }
};

inline RadiationPattern radiation_pattern(const CellCoefficients& coeffs,
                                          const ObservationGrid& grid,
                                          const SystemConfig& config) {
    grid.validate();
    RadiationPattern out;
    out.grid = grid;
    out.frequency_hz = config.frequency_hz;
    out.samples.reserve(grid.size());
    if (grid.kind == ObservationGrid::Kind::Directions) {
        const double radius =
            grid.radius_m > 0.0 ? grid.radius_m : default_evaluation_radius(config);
        out.grid.radius_m = radius;
        for (const Direction& d : grid.directions)
            out.samples.push_back(transmitted_field(direction_point(d, radius), coeffs, config));
    } else {
        for (const Vec3& p : grid.points)
            out.samples.push_back(transmitted_field(p, coeffs, config));
    }
    return out;
}

inline RadiationPattern radiation_pattern(const CodePattern& pattern, const ObservationGrid& grid,
                                          const SystemConfig& config, const StateTable& table) {
    RadiationPattern out = radiation_pattern(cell_coefficients(pattern, table), grid, config);
    out.source_pattern = pattern;
    return out;
}

/// |E| raster over a lens-parallel plane at z = z_plane.
struct SurfaceMap {
    double z_plane_m = 0.0;
    std::vector<double> x_m;
    std::vector<double> y_m;
    std::vector<double> magnitude;  // row-major over (y, x)

    double at(size_t iy, size_t ix) const { return magnitude[iy * x_m.size() + ix]; }
};

inline SurfaceMap efield_surface_map(const CellCoefficients& coeffs, double z_plane_m,
                                     const SystemConfig& config, double half_extent_m,
                                     int samples_per_axis, bool normalize = false) {
    if (!(z_plane_m > 0.0)) throw std::domain_error("surface map plane must have z > 0");
    if (samples_per_axis < 2) throw std::invalid_argument("need at least 2 samples per axis");
    SurfaceMap map;
    map.z_plane_m = z_plane_m;
    const int n = samples_per_axis;
    map.x_m.resize(static_cast<size_t>(n));
    map.y_m.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double t = -half_extent_m + 2.0 * half_extent_m * i / (n - 1);
        map.x_m[static_cast<size_t>(i)] = t;
        map.y_m[static_cast<size_t>(i)] = t;
    }
    map.magnitude.reserve(static_cast<size_t>(n) * n);
    for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix)
            map.magnitude.push_back(std::abs(transmitted_field(
                {map.x_m[static_cast<size_t>(ix)], map.y_m[static_cast<size_t>(iy)], z_plane_m},
                coeffs, config)));
    if (normalize) {
        double peak = 0.0;
        for (double m : map.magnitude) peak = std::max(peak, m);
        if (peak > 0.0)
            for (double& m : map.magnitude) m /= peak;
    }
    return map;
}

inline SurfaceMap efield_surface_map(const CodePattern& pattern, double z_plane_m,
                                     const SystemConfig& config, const StateTable& table,
                                     double half_extent_m, int samples_per_axis,
                                     bool normalize = false) {
    return efield_surface_map(cell_coefficients(pattern, table), z_plane_m, config, half_extent_m,
                              samples_per_axis, normalize);
}

/// CSV export: theta_deg, phi_deg, re, im, mag_db (normalized to the peak).
inline void write_pattern_csv(std::ostream& out, const RadiationPattern& p) {
    out << "theta_deg,phi_deg,re,im,mag_db\n";
    const double peak = p.peak_magnitude();
    char buf[160];
    for (size_t i = 0; i < p.samples.size(); ++i) {
        double th = 0.0, ph = 0.0;
        if (p.grid.kind == ObservationGrid::Kind::Directions) {
            th = rad2deg(p.grid.directions[i].theta_rad);
            ph = rad2deg(p.grid.directions[i].phi_rad);
        } else {
            const Spherical s = cartesian_to_spherical(p.grid.points[i]);
            th = rad2deg(s.theta);
            ph = rad2deg(wrap_two_pi(s.phi));
        }
        const double mag = std::abs(p.samples[i]);
        const double mag_db =
            peak > 0.0 && mag > 0.0 ? db_from_amplitude_ratio(mag / peak) : -300.0;
        std::snprintf(buf, sizeof buf, "%.4f,%.4f,%.9e,%.9e,%.4f\n", th, ph,
                      p.samples[i].real(), p.samples[i].imag(), mag_db);
        out << buf;
    }
}

/// CSV export: x_m, y_m, mag_norm.
inline void write_surface_map_csv(std::ostream& out, const SurfaceMap& map) {
    out << "x_m,y_m,mag_norm\n";
    char buf[96];
    for (size_t iy = 0; iy < map.y_m.size(); ++iy)
        for (size_t ix = 0; ix < map.x_m.size(); ++ix) {
            std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.9e\n", map.x_m[ix], map.y_m[iy],
                          map.at(iy, ix));
            out << buf;
        }
}

/// Optional one-step refinement of the ideal profile: evaluate the transmitted
/// field at the receiver, add k0 * r_rx * |E| as a phase offset and re-quantize.
/// Experimental; the baseline profile omits this term.
inline CodePattern synthesize_pattern_refined(const SteeringTarget& target,
                                              const SystemConfig& config, const StateTable& table,
                                              double receiver_distance_m) {
    if (!(receiver_distance_m > 0.0))
        throw std::domain_error("receiver distance must be positive");
    const CodePattern base = synthesize_pattern(target, config, table);
    const Vec3 rx = spherical_to_cartesian(receiver_distance_m, target.theta_rad, target.phi_rad);
    const double mag = std::abs(transmitted_field(rx, base, config, table));
    const double offset = config.wavenumber() * receiver_distance_m * mag;

    SystemConfig adjusted = config;
    adjusted.phase_offset_rad = config.phase_offset_rad + offset;
    CodePattern refined = synthesize_pattern(target, adjusted, table);
    refined.label = base.label + " refined";
    return refined;
}

}  // namespace ptm

#endif
