#ifndef PTM_PATTERN_HPP
#define PTM_PATTERN_HPP

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "ptm/cells.hpp"
#include "ptm/common.hpp"

namespace ptm {

/// Steering target direction. theta is the signed elevation off broadside in
/// [-pi/2, pi/2]; phi is the azimuth of the steering plane in [0, 2*pi).
struct SteeringTarget {
    double theta_rad = 0.0;
    double phi_rad = 0.0;

    void validate() const {
        if (!(theta_rad >= -kPi / 2 && theta_rad <= kPi / 2))
            throw std::invalid_argument("target elevation must be in [-pi/2, pi/2]");
        if (!(phi_rad >= 0.0 && phi_rad < kTwoPi))
            throw std::invalid_argument("target azimuth must be in [0, 2*pi)");
    }
};

/// Grid assignment of a digital state to every cell; one pattern = one beam.
struct CodePattern {
    int rows = 0;
    int cols = 0;
    std::vector<CellState> states;  // row-major
    std::string label;
    std::optional<SteeringTarget> target;

    CellState at(int r, int c) const { return states[static_cast<size_t>(r) * cols + c]; }
    CellState& at(int r, int c) { return states[static_cast<size_t>(r) * cols + c]; }

    bool same_grid(const CodePattern& o) const {
        return rows == o.rows && cols == o.cols && states == o.states;
    }

    /// Mirror across the given axis: flipping columns reverses the x axis,
    /// flipping rows reverses the y axis.
    CodePattern flipped_cols() const {
        CodePattern p = *this;
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) p.at(r, c) = at(r, cols - 1 - c);
        return p;
    }
    CodePattern flipped_rows() const {
        CodePattern p = *this;
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) p.at(r, c) = at(rows - 1 - r, c);
        return p;
    }
};

inline CodePattern make_pattern(int rows, int cols, CellState fill = CellState{0}) {
    CodePattern p;
    p.rows = rows;
    p.cols = cols;
    p.states.assign(static_cast<size_t>(rows) * cols, fill);
    return p;
}

// Pattern text format: one line per grid column, left to right. Each line has
// 2*rows binary characters running top to bottom, upper-diode bit first within
// each cell. A 6x6 pattern is six 12-character lines.

inline std::string pattern_to_text(const CodePattern& p) {
    std::string out;
    for (int c = 0; c < p.cols; ++c) {
        for (int r = 0; r < p.rows; ++r) {
            out += static_cast<char>('0' + p.at(r, c).upper_bit());
            out += static_cast<char>('0' + p.at(r, c).lower_bit());
        }
        out += '\n';
    }
    return out;
}

/// Parse column lines into a pattern. `first_line` is the 1-based line number
/// of `lines[0]` in the enclosing document, for error reporting.
inline CodePattern pattern_from_column_lines(const std::vector<std::string>& lines,
                                             int rows, int first_line = 1) {
    CodePattern p = make_pattern(rows, static_cast<int>(lines.size()));
    for (size_t c = 0; c < lines.size(); ++c) {
        const std::string& s = lines[c];
        const int lineno = first_line + static_cast<int>(c);
        if (static_cast<int>(s.size()) != 2 * rows)
            throw ParseError("column line must have " + std::to_string(2 * rows) +
                                 " binary characters, got " + std::to_string(s.size()),
                             lineno);
        for (int r = 0; r < rows; ++r) {
            const char hi = s[static_cast<size_t>(2 * r)];
            const char lo = s[static_cast<size_t>(2 * r) + 1];
            if ((hi != '0' && hi != '1') || (lo != '0' && lo != '1'))
                throw ParseError("column line may contain only '0' and '1'", lineno,
                                 2 * r + (hi == '0' || hi == '1' ? 2 : 1));
            p.at(r, static_cast<int>(c)) = CellState::from_bits(hi - '0', lo - '0');
        }
    }
    return p;
}

inline CodePattern pattern_from_text(const std::string& text, int rows = 6) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    if (lines.empty()) throw ParseError("empty pattern text", 1);
    return pattern_from_column_lines(lines, rows);
}

inline nlohmann::json pattern_to_json(const CodePattern& p) {
    nlohmann::json rows = nlohmann::json::array();
    for (int r = 0; r < p.rows; ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (int c = 0; c < p.cols; ++c) row.push_back(p.at(r, c).to_string());
        rows.push_back(row);
    }
    nlohmann::json j{{"rows", p.rows}, {"cols", p.cols}, {"states", rows}};
    if (!p.label.empty()) j["label"] = p.label;
    if (p.target) {
        j["target_deg"] = rad2deg(p.target->theta_rad);
        j["target_phi_deg"] = rad2deg(p.target->phi_rad);
    }
    return j;
}

inline CodePattern pattern_from_json(const nlohmann::json& j) {
    CodePattern p = make_pattern(j.at("rows").get<int>(), j.at("cols").get<int>());
    const auto& rows = j.at("states");
    if (static_cast<int>(rows.size()) != p.rows)
        throw std::invalid_argument("states row count mismatch");
    for (int r = 0; r < p.rows; ++r) {
        if (static_cast<int>(rows[static_cast<size_t>(r)].size()) != p.cols)
            throw std::invalid_argument("states column count mismatch");
        for (int c = 0; c < p.cols; ++c)
            p.at(r, c) = CellState::parse(rows[static_cast<size_t>(r)][static_cast<size_t>(c)].get<std::string>());
    }
    p.label = j.value("label", std::string{});
    if (j.contains("target_deg")) {
        SteeringTarget t;
        t.theta_rad = deg2rad(j.at("target_deg").get<double>());
        t.phi_rad = wrap_two_pi(deg2rad(j.value("target_phi_deg", 90.0)));
        p.target = t;
    }
    return p;
}

}  // namespace ptm

#endif
