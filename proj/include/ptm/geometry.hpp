#ifndef PTM_GEOMETRY_HPP
#define PTM_GEOMETRY_HPP

#include <algorithm>
#include <fstream>
#include <istream>
#include <stdexcept>
#include <vector>

#include "json.hpp"
#include "ptm/common.hpp"

namespace ptm {

// Frame convention: the lens occupies the z = 0 plane, the feed sits on the
// -z side and radiation is evaluated on the +z side. Grid cells are listed
// row-major starting at the top-left cell (minimum x, maximum y).

struct FeedModel {
    Vec3 position{0.0, 0.0, -0.045};  // m, behind the lens
    double exponent = 1.0;            // cos^q_f field taper of the feed
    double radiated_power_w = 1.0;

    void validate() const {
        if (!(position.z < 0.0))
            throw std::invalid_argument("feed position must lie behind the lens (z < 0)");
        if (!(radiated_power_w > 0.0))
            throw std::invalid_argument("feed radiated power must be positive");
    }
};

struct SystemConfig {
    double frequency_hz = 4.0e9;
    int rows = 6;
    int cols = 6;
    double cell_pitch_m = 0.030;
    FeedModel feed{};
    double element_exponent = 1.0;    // cos^q field taper of each cell
    double back_lobe_leakage = 0.2;   // amplitude fraction radiated behind the lens
    double phase_offset_rad = 0.0;

    double wavelength() const { return kSpeedOfLight / frequency_hz; }
    double wavenumber() const { return kTwoPi * frequency_hz / kSpeedOfLight; }
    double aperture_width_x() const { return cols * cell_pitch_m; }
    double aperture_height_y() const { return rows * cell_pitch_m; }
    /// Maximum dimension of the lens: the active-aperture diagonal.
    double aperture_diagonal() const {
        return std::sqrt(aperture_width_x() * aperture_width_x() +
                         aperture_height_y() * aperture_height_y());
    }
    double physical_area() const { return aperture_width_x() * aperture_height_y(); }
    int cell_count() const { return rows * cols; }

    void validate() const {
        if (rows < 1 || cols < 1) throw std::invalid_argument("grid must be at least 1x1");
        if (!(cell_pitch_m > 0.0)) throw std::invalid_argument("cell pitch must be positive");
        if (!(frequency_hz > 0.0)) throw std::invalid_argument("frequency must be positive");
        if (!(back_lobe_leakage >= 0.0 && back_lobe_leakage < 1.0))
            throw std::invalid_argument("back lobe leakage must be in [0, 1)");
        feed.validate();
    }
};

enum class FieldRegion { ReactiveNear, RadiativeNear, Far };

inline const char* to_string(FieldRegion r) {
    switch (r) {
        case FieldRegion::ReactiveNear: return "reactive-near";
        case FieldRegion::RadiativeNear: return "radiative-near";
        case FieldRegion::Far: return "far";
    }
    return "?";
}

struct RegionBoundaries {
    double radiative_near_m;  // 0.62*sqrt(D^3/lambda)
    double far_m;             // 2*D^2/lambda
};

inline RegionBoundaries region_boundaries(double max_dimension_m, double wavelength_m) {
    if (!(max_dimension_m > 0.0) || !(wavelength_m > 0.0))
        throw std::domain_error("dimension and wavelength must be positive");
    const double d3 = max_dimension_m * max_dimension_m * max_dimension_m;
    return {0.62 * std::sqrt(d3 / wavelength_m),
            2.0 * max_dimension_m * max_dimension_m / wavelength_m};
}

inline RegionBoundaries region_boundaries(const SystemConfig& config) {
    return region_boundaries(config.aperture_diagonal(), config.wavelength());
}

inline FieldRegion classify_field_region(double r_m, const SystemConfig& config) {
    if (!(r_m > 0.0)) throw std::domain_error("radial distance must be positive");
    const RegionBoundaries b = region_boundaries(config);
    if (r_m <= b.radiative_near_m) return FieldRegion::ReactiveNear;
    if (r_m < b.far_m) return FieldRegion::RadiativeNear;
    return FieldRegion::Far;
}

/// Cell centers on z = 0, row-major from the top-left cell. The aperture is
/// centered on the origin: x spans cols*pitch, y spans rows*pitch.
inline std::vector<Vec3> lens_aperture(const SystemConfig& config) {
    config.validate();
    std::vector<Vec3> centers;
    centers.reserve(static_cast<size_t>(config.cell_count()));
    const double cx = (config.cols - 1) / 2.0;
    const double cy = (config.rows - 1) / 2.0;
    for (int r = 0; r < config.rows; ++r)
        for (int c = 0; c < config.cols; ++c)
            centers.push_back({(c - cx) * config.cell_pitch_m,
                               (cy - r) * config.cell_pitch_m, 0.0});
    return centers;
}

/// x = r cos(phi) sin(theta), y = r sin(phi) sin(theta), z = r cos(theta).
inline Vec3 spherical_to_cartesian(double r, double theta, double phi) {
    const double st = std::sin(theta);
    return {r * std::cos(phi) * st, r * std::sin(phi) * st, r * std::cos(theta)};
}

struct Spherical {
    double r;
    double theta;
    double phi;
};

inline Spherical cartesian_to_spherical(const Vec3& p) {
    const double r = p.norm();
    if (r == 0.0) return {0.0, 0.0, 0.0};
    return {r, std::acos(std::clamp(p.z / r, -1.0, 1.0)), std::atan2(p.y, p.x)};
}

inline SystemConfig config_from_json(const nlohmann::json& j) {
    SystemConfig c{};
    c.frequency_hz = j.value("frequency_hz", c.frequency_hz);
    c.rows = j.value("rows", c.rows);
    c.cols = j.value("cols", c.cols);
    c.cell_pitch_m = j.value("cell_pitch_m", c.cell_pitch_m);
    if (j.contains("feed")) {
        const auto& f = j.at("feed");
        if (f.contains("position_m")) {
            const auto& p = f.at("position_m");
            if (!p.is_array() || p.size() != 3)
                throw std::invalid_argument("feed.position_m must be an [x, y, z] array");
            c.feed.position = {p[0].get<double>(), p[1].get<double>(), p[2].get<double>()};
        }
        c.feed.exponent = f.value("exponent", c.feed.exponent);
        c.feed.radiated_power_w = f.value("power_w", c.feed.radiated_power_w);
    }
    c.element_exponent = j.value("element_exponent", c.element_exponent);
    c.back_lobe_leakage = j.value("back_lobe_leakage", c.back_lobe_leakage);
    c.phase_offset_rad = j.value("phase_offset_rad", c.phase_offset_rad);
    c.validate();
    return c;
}

inline SystemConfig load_config(std::istream& in) {
    nlohmann::json j;
    in >> j;
    return config_from_json(j);
}

inline SystemConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    return load_config(in);
}

}  // namespace ptm

#endif
