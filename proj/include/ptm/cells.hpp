#ifndef PTM_CELLS_HPP
#define PTM_CELLS_HPP

#include <array>
#include <cstdint>
#include <fstream>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "ptm/common.hpp"

namespace ptm {

/// One 2-bit digital cell state b1b0: b1 = upper diode, b0 = lower diode,
/// 0 = OFF, 1 = ON.
class CellState {
public:
    CellState() = default;
    explicit constexpr CellState(int code) : code_(static_cast<uint8_t>(code)) {
        if (code < 0 || code > 3) throw std::invalid_argument("cell state code out of range");
    }

    static constexpr CellState from_bits(int upper, int lower) {
        return CellState((upper << 1) | lower);
    }

    constexpr int code() const { return code_; }
    constexpr int upper_bit() const { return (code_ >> 1) & 1; }
    constexpr int lower_bit() const { return code_ & 1; }

    std::string to_string() const {
        return {static_cast<char>('0' + upper_bit()), static_cast<char>('0' + lower_bit())};
    }

    static CellState parse(const std::string& s) {
        if (s.size() != 2 || (s[0] != '0' && s[0] != '1') || (s[1] != '0' && s[1] != '1'))
            throw std::invalid_argument("cell state must be two binary digits");
        return from_bits(s[0] - '0', s[1] - '0');
    }

    friend constexpr bool operator==(CellState a, CellState b) { return a.code_ == b.code_; }
    friend constexpr bool operator!=(CellState a, CellState b) { return a.code_ != b.code_; }

private:
    uint8_t code_ = 0;
};

/// Complex transmission response of the four cell states at one frequency.
struct StateTable {
    struct Entry {
        double amplitude = 1.0;    // linear, in (0, 1]
        double phase_rad = 0.0;    // wrapped to [0, 2*pi)
    };

    std::array<Entry, 4> entries{};
    double characterization_frequency_hz = 0.0;

    const Entry& entry(CellState s) const { return entries[static_cast<size_t>(s.code())]; }

    void validate() const {
        for (const auto& e : entries) {
            if (!(e.amplitude > 0.0 && e.amplitude <= 1.0))
                throw std::invalid_argument("state amplitude must be in (0, 1]");
            if (!(e.phase_rad >= 0.0 && e.phase_rad < kTwoPi))
                throw std::invalid_argument("state phase must be wrapped to [0, 2*pi)");
        }
    }
};

/// Complex coefficient amplitude*exp(j*phase) of one state.
inline complexd state_response(CellState state, const StateTable& table) {
    const auto& e = table.entry(state);
    return std::polar(e.amplitude, e.phase_rad);
}

/// Characterized response of the hardware cell: states 00/01/10/11 transmit at
/// 150/180/210/240 degrees with unit amplitude, measured at 3.7 GHz. Amplitudes
/// are a lossless default; measured values can be loaded over it.
inline StateTable default_state_table() {
    StateTable t;
    t.characterization_frequency_hz = 3.7e9;
    for (int code = 0; code < 4; ++code)
        t.entries[static_cast<size_t>(code)] = {1.0, wrap_two_pi(deg2rad(150.0 + 30.0 * code))};
    return t;
}

/// n-bit phase alphabet: 2^n distinct phases in [0, 2*pi).
struct PhaseAlphabet {
    int bits = 0;
    std::vector<double> phases;

    void validate() const {
        if (phases.size() != (size_t{1} << bits))
            throw std::invalid_argument("alphabet must hold 2^bits phases");
        for (size_t i = 0; i < phases.size(); ++i)
            for (size_t j = i + 1; j < phases.size(); ++j)
                if (circular_distance(phases[i], phases[j]) < 1e-12)
                    throw std::invalid_argument("alphabet phases must be distinct modulo 2*pi");
    }
};

/// 2^n phases uniformly spaced by 2*pi/2^n starting at 0. n = 1 gives {0, pi}.
inline PhaseAlphabet uniform_alphabet(int bits) {
    if (bits < 1 || bits > 4) throw std::domain_error("bit depth must be in [1, 4]");
    PhaseAlphabet a;
    a.bits = bits;
    const int n = 1 << bits;
    a.phases.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) a.phases.push_back(i * kTwoPi / n);
    return a;
}

/// Phases of the state-table entries in code order, for quantization.
inline std::vector<double> table_phases(const StateTable& table) {
    std::vector<double> p;
    p.reserve(4);
    for (const auto& e : table.entries) p.push_back(e.phase_rad);
    return p;
}

inline StateTable state_table_from_json(const nlohmann::json& j) {
    StateTable t = default_state_table();
    t.characterization_frequency_hz = j.value("freq_hz", t.characterization_frequency_hz);
    if (j.contains("states")) {
        for (const auto& [key, val] : j.at("states").items()) {
            const CellState s = CellState::parse(key);
            StateTable::Entry e = t.entries[static_cast<size_t>(s.code())];
            e.amplitude = val.value("amp", e.amplitude);
            if (val.contains("phase_deg")) e.phase_rad = wrap_two_pi(deg2rad(val.at("phase_deg").get<double>()));
            t.entries[static_cast<size_t>(s.code())] = e;
        }
    }
    t.validate();
    return t;
}

inline StateTable load_state_table(std::istream& in) {
    nlohmann::json j;
    in >> j;
    return state_table_from_json(j);
}

inline StateTable load_state_table_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open state table file: " + path);
    return load_state_table(in);
}

}  // namespace ptm

#endif
