#ifndef PTM_COMMON_HPP
#define PTM_COMMON_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ptm {

using complexd = std::complex<double>;

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Wrap an angle to [0, 2*pi).
inline double wrap_two_pi(double x) {
    double r = std::fmod(x, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    return r;
}

/// Wrap an angle to (-pi, pi].
inline double wrap_pm_pi(double x) {
    double r = -std::remainder(-x, kTwoPi);
    return r;
}

/// Circular distance between two angles, in [0, pi].
inline double circular_distance(double a, double b) {
    return std::abs(std::remainder(a - b, kTwoPi));
}

inline double db_from_power_ratio(double r) { return 10.0 * std::log10(r); }
inline double db_from_amplitude_ratio(double r) { return 20.0 * std::log10(r); }
inline double power_ratio_from_db(double db) { return std::pow(10.0, db / 10.0); }
inline double dbm_from_watts(double w) { return 10.0 * std::log10(w * 1e3); }

/// Free-space spreading loss 20*log10(4*pi*d/lambda) in dB.
inline double spreading_loss_db(double distance_m, double wavelength_m) {
    return db_from_amplitude_ratio(4.0 * kPi * distance_m / wavelength_m);
}

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

/// Parse failure with 1-based line/column location.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, int line, int column = 0)
        : std::runtime_error(what + " (line " + std::to_string(line) +
                             (column > 0 ? ", column " + std::to_string(column) : "") + ")"),
          line_(line),
          column_(column) {}

    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

}  // namespace ptm

#endif
