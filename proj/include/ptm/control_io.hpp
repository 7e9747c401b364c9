#ifndef PTM_CONTROL_IO_HPP
#define PTM_CONTROL_IO_HPP

#include <array>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "ptm/common.hpp"
#include "ptm/pattern.hpp"

namespace ptm {

// Distribution-board control word: 72 diode bits as six 12-bit column
// sequences (SQ1..SQ6) plus 12 always-asserted ground lines, 84 lines total.

struct BiasFrame {
    std::array<std::string, 6> columns;  // 12 chars of {0,1} each
    std::array<bool, 12> ground;         // fixed trailer, all asserted

    BiasFrame() { ground.fill(true); }

    void validate() const {
        for (const auto& c : columns) {
            if (c.size() != 12) throw std::invalid_argument("bias column must hold 12 bits");
            for (char ch : c)
                if (ch != '0' && ch != '1')
                    throw std::invalid_argument("bias column may contain only '0' and '1'");
        }
    }
};

/// Pattern column c maps to SQ(c+1); within a column, cells run top to bottom,
/// upper-diode bit first.
inline BiasFrame encode_bias_frame(const CodePattern& pattern) {
    if (pattern.rows != 6 || pattern.cols != 6)
        throw std::invalid_argument("bias frames are defined for 6x6 patterns only");
    BiasFrame frame;
    for (int c = 0; c < 6; ++c) {
        std::string& s = frame.columns[static_cast<size_t>(c)];
        s.reserve(12);
        for (int r = 0; r < 6; ++r) {
            s += static_cast<char>('0' + pattern.at(r, c).upper_bit());
            s += static_cast<char>('0' + pattern.at(r, c).lower_bit());
        }
    }
    return frame;
}

inline CodePattern decode_bias_frame(const BiasFrame& frame) {
    frame.validate();
    const std::vector<std::string> lines(frame.columns.begin(), frame.columns.end());
    return pattern_from_column_lines(lines, 6);
}

/// Frame text: the six column sequences, one per line, then the ground trailer.
inline std::string frame_to_text(const BiasFrame& frame) {
    std::string out;
    for (const auto& c : frame.columns) {
        out += c;
        out += '\n';
    }
    for (bool g : frame.ground) out += g ? '1' : '0';
    out += '\n';
    return out;
}

inline int frame_hamming_distance(const BiasFrame& a, const BiasFrame& b) {
    int d = 0;
    for (size_t c = 0; c < 6; ++c)
        for (size_t i = 0; i < 12; ++i)
            if (a.columns[c][i] != b.columns[c][i]) ++d;
    return d;
}

// Codebook text format. Each entry is a header line
//   pattern "<label>" [target <theta_deg> [phi <phi_deg>]]
// followed by one line per grid column (2*rows binary characters each).
// Entries are separated by blank lines; '#' starts a comment.

inline std::string emit_codebook(const std::vector<CodePattern>& patterns) {
    std::string out;
    char buf[128];
    bool first = true;
    for (const CodePattern& p : patterns) {
        if (!first) out += '\n';
        first = false;
        out += "pattern \"" + p.label + "\"";
        if (p.target) {
            std::snprintf(buf, sizeof buf, " target %g phi %g", rad2deg(p.target->theta_rad),
                          rad2deg(p.target->phi_rad));
            out += buf;
        }
        out += '\n';
        out += pattern_to_text(p);
    }
    return out;
}

inline std::vector<CodePattern> parse_codebook(const std::string& text) {
    std::vector<CodePattern> out;
    std::vector<std::string> lines;
    {
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            lines.push_back(line);
        }
    }

    size_t i = 0;
    const auto is_blank = [](const std::string& s) {
        return s.find_first_not_of(" \t") == std::string::npos;
    };
    while (i < lines.size()) {
        if (is_blank(lines[i]) || lines[i][lines[i].find_first_not_of(" \t")] == '#') {
            ++i;
            continue;
        }
        const int header_line = static_cast<int>(i) + 1;
        std::string label;
        std::optional<SteeringTarget> target;
        if (lines[i].rfind("pattern", 0) == 0) {
            const std::string& h = lines[i];
            const size_t q1 = h.find('"');
            const size_t q2 = q1 == std::string::npos ? std::string::npos : h.find('"', q1 + 1);
            if (q1 == std::string::npos || q2 == std::string::npos)
                throw ParseError("pattern header needs a quoted label", header_line);
            label = h.substr(q1 + 1, q2 - q1 - 1);
            std::istringstream rest(h.substr(q2 + 1));
            std::string key;
            SteeringTarget t{0.0, deg2rad(90.0)};
            bool has_target = false;
            while (rest >> key) {
                double v;
                if (!(rest >> v)) throw ParseError("pattern header key needs a value", header_line);
                if (key == "target") {
                    t.theta_rad = deg2rad(v);
                    has_target = true;
                } else if (key == "phi") {
                    t.phi_rad = wrap_two_pi(deg2rad(v));
                } else {
                    throw ParseError("unknown pattern header key '" + key + "'", header_line);
                }
            }
            if (has_target) target = t;
            ++i;
        }
        std::vector<std::string> block;
        const int first_bits_line = static_cast<int>(i) + 1;
        while (i < lines.size() && !is_blank(lines[i])) {
            if (lines[i][lines[i].find_first_not_of(" \t")] == '#') {
                ++i;
                continue;
            }
            block.push_back(lines[i]);
            ++i;
        }
        if (block.empty()) throw ParseError("pattern block has no column lines", first_bits_line);
        if (block[0].size() % 2 != 0)
            throw ParseError("column line length must be even, got " +
                                 std::to_string(block[0].size()),
                             first_bits_line);
        const int rows = static_cast<int>(block[0].size()) / 2;
        CodePattern p = pattern_from_column_lines(block, rows, first_bits_line);
        p.label = label;
        p.target = target;
        out.push_back(std::move(p));
    }
    if (out.empty()) throw ParseError("codebook holds no patterns", 1);
    return out;
}

}  // namespace ptm

#endif
