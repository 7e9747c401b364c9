#ifndef PTM_SYNTHESIS_HPP
#define PTM_SYNTHESIS_HPP

#include <array>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "ptm/cells.hpp"
#include "ptm/common.hpp"
#include "ptm/geometry.hpp"
#include "ptm/pattern.hpp"

namespace ptm {

/// Ideal continuous transmission phase per cell, wrapped to [0, 2*pi).
struct PhaseGrid {
    int rows = 0;
    int cols = 0;
    std::vector<double> phases;  // row-major

    double at(int r, int c) const { return phases[static_cast<size_t>(r) * cols + c]; }
};

/// Phase profile that collimates the spherical feed wave and tilts it toward
/// the target: phi_i = k0*(S_i - S_0 - x_i sin(theta) cos(phi) - y_i sin(theta) sin(phi)) + phi_0,
/// with S_i the feed-to-cell distance and S_0 the feed-to-center distance.
inline PhaseGrid ideal_phase_profile(const SteeringTarget& target, const SystemConfig& config) {
    target.validate();
    const std::vector<Vec3> cells = lens_aperture(config);
    const double k0 = config.wavenumber();
    const double s0 = config.feed.position.norm();
    const double ux = std::sin(target.theta_rad) * std::cos(target.phi_rad);
    const double uy = std::sin(target.theta_rad) * std::sin(target.phi_rad);

    PhaseGrid grid;
    grid.rows = config.rows;
    grid.cols = config.cols;
    grid.phases.reserve(cells.size());
    for (const Vec3& cell : cells) {
        const double si = distance(cell, config.feed.position);
        grid.phases.push_back(
            wrap_two_pi(k0 * (si - s0 - cell.x * ux - cell.y * uy) + config.phase_offset_rad));
    }
    return grid;
}

/// Index of the alphabet phase with minimum circular distance to phi.
/// Distances within 1e-12 rad count as ties and resolve to the lowest index.
inline size_t nearest_phase_index(double phi, std::span<const double> phases) {
    if (phases.empty()) throw std::invalid_argument("empty phase alphabet");
    size_t best = 0;
    double best_dist = circular_distance(phi, phases[0]);
    for (size_t i = 1; i < phases.size(); ++i) {
        const double d = circular_distance(phi, phases[i]);
        if (d < best_dist - 1e-12) {
            best = i;
            best_dist = d;
        }
    }
    return best;
}

inline CellState quantize_phase(double phi, const StateTable& table) {
    const std::vector<double> phases = table_phases(table);
    return CellState(static_cast<int>(nearest_phase_index(phi, phases)));
}

inline size_t quantize_phase(double phi, const PhaseAlphabet& alphabet) {
    return nearest_phase_index(phi, alphabet.phases);
}

inline std::string steering_label(const SteeringTarget& t) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "synth %+.1fdeg @ %.1fdeg", rad2deg(t.theta_rad),
                  rad2deg(t.phi_rad));
    return buf;
}

/// Element-wise quantization of the ideal profile onto the hardware states.
inline CodePattern synthesize_pattern(const SteeringTarget& target, const SystemConfig& config,
                                      const StateTable& table) {
    const PhaseGrid grid = ideal_phase_profile(target, config);
    CodePattern p = make_pattern(config.rows, config.cols);
    for (size_t i = 0; i < grid.phases.size(); ++i)
        p.states[i] = quantize_phase(grid.phases[i], table);
    p.label = steering_label(target);
    p.target = target;
    return p;
}

/// Alphabet-index synthesis for bit-depth studies; the result is an index grid
/// rather than a CodePattern since alphabets may exceed four states.
inline std::vector<size_t> synthesize_indices(const SteeringTarget& target,
                                              const SystemConfig& config,
                                              const PhaseAlphabet& alphabet) {
    const PhaseGrid grid = ideal_phase_profile(target, config);
    std::vector<size_t> idx;
    idx.reserve(grid.phases.size());
    for (double phi : grid.phases) idx.push_back(quantize_phase(phi, alphabet));
    return idx;
}

namespace detail {

// Built-in seven-state codebook, column-sequence strings verbatim from the
// vendor operating-configuration table. Column c maps top-to-bottom two
// characters per cell, upper-diode bit first. The steering plane is phi = 90deg.
struct BuiltinState {
    const char* label;
    double theta_deg;
    std::array<const char*, 6> columns;
};

inline constexpr std::array<BuiltinState, 7> kBuiltinStates{{
    {"State I", +30.0,
     {"011110010000", "101010101011", "110101101111", "110101101111", "101010101011",
      "011110010000"}},
    {"State II", +20.0,
     {"010101010110", "000001101111", "110010111111", "110010111111", "000001101111",
      "010101010110"}},
    {"State III", +10.0,
     {"010101010101", "000001101111", "011110111111", "011110111111", "000001101111",
      "010101010101"}},
    {"State IV", 0.0,
     {"010101010101", "000001101001", "011110110001", "011110110001", "000001101001",
      "010101010101"}},
    {"State V", -10.0,
     {"010110010000", "101101100100", "101111101000", "101111101000", "101101100100",
      "010110010000"}},
    {"State VI", -20.0,
     {"010110010000", "101110100100", "101111011000", "101111011000", "101110100100",
      "010110010000"}},
    {"State VII", -30.0,
     {"010100010100", "110000101111", "111111011000", "111111011000", "110000101111",
      "010100010100"}},
}};

}  // namespace detail

/// The seven labeled operating states, decoded from the built-in codebook.
/// Targets run +30..-30 degrees in 10-degree steps in the phi = 90deg plane.
inline std::vector<CodePattern> builtin_state_library() {
    std::vector<CodePattern> out;
    out.reserve(detail::kBuiltinStates.size());
    for (const auto& st : detail::kBuiltinStates) {
        std::vector<std::string> lines(st.columns.begin(), st.columns.end());
        CodePattern p = pattern_from_column_lines(lines, 6);
        p.label = st.label;
        p.target = SteeringTarget{deg2rad(st.theta_deg), deg2rad(90.0)};
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace ptm

#endif
