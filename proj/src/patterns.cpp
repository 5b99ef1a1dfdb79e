// SPDX-License-Identifier: Apache-2.0
#include "dynmod/patterns.hpp"

#include "dynmod/error.hpp"
#include "dynmod/io.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dynmod {

namespace {

constexpr double deg2rad = std::numbers::pi / 180.0;

constexpr const char* pattern_header = "angle_deg,mag_db_s1,phase_deg_s1,mag_db_s2,phase_deg_s2";

void require_finite(double v, const char* name)
{
    if (!std::isfinite(v)) {
        throw invalid_parameter(std::string(name) + " must be finite");
    }
}

} // namespace

std::string to_string(state_id s)
{
    return s == state_id::state1 ? "State1" : "State2";
}

// ---------------------------------------------------------------------------
// angle_grid

angle_grid::angle_grid(std::vector<double> angles_deg) : angles_(std::move(angles_deg))
{
    if (angles_.size() < 2) {
        throw invalid_parameter("angle grid needs at least 2 points");
    }
    for (std::size_t i = 0; i < angles_.size(); ++i) {
        if (!std::isfinite(angles_[i])) {
            throw invalid_parameter("angle grid contains a non-finite angle at index " + std::to_string(i));
        }
        if (i > 0 && !(angles_[i] > angles_[i - 1])) {
            throw invalid_parameter("angle grid is not strictly increasing at index " + std::to_string(i));
        }
    }
}

angle_grid angle_grid::uniform(double start_deg, double stop_deg, double step_deg)
{
    require_finite(start_deg, "grid start");
    require_finite(stop_deg, "grid stop");
    require_finite(step_deg, "grid step");
    if (step_deg <= 0.0 || stop_deg <= start_deg) {
        throw invalid_parameter("uniform grid needs step > 0 and stop > start");
    }
    // Tolerance absorbs spans like 360/0.5 that land a hair below an integer.
    const auto n = static_cast<std::size_t>(std::floor((stop_deg - start_deg) / step_deg + 1e-9)) + 1;
    std::vector<double> a(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = start_deg + static_cast<double>(i) * step_deg;
    }
    // Snap the final sample so a symmetric span stays exactly symmetric.
    if (std::abs(a.back() - stop_deg) < 1e-9 * step_deg) {
        a.back() = stop_deg;
    }
    return angle_grid(std::move(a));
}

// ---------------------------------------------------------------------------
// pattern_state

pattern_state::pattern_state(angle_grid grid, std::vector<cdouble> gain, state_id label)
    : grid_(std::move(grid)), gain_(std::move(gain)), label_(label)
{
    if (gain_.size() != grid_.size()) {
        throw invalid_parameter("pattern has " + std::to_string(gain_.size()) + " gains for " +
                                std::to_string(grid_.size()) + " angles");
    }
    for (const auto& g : gain_) {
        if (!std::isfinite(g.real()) || !std::isfinite(g.imag())) {
            throw invalid_parameter("pattern gain must be finite");
        }
    }
}

cdouble pattern_state::interpolate(double theta_deg) const
{
    if (!std::isfinite(theta_deg) || !grid_.contains(theta_deg)) {
        throw out_of_range("angle " + io::format_double(theta_deg) + " outside pattern span [" +
                           io::format_double(grid_.front()) + ", " + io::format_double(grid_.back()) + "]");
    }
    const auto a = grid_.angles();
    auto it = std::lower_bound(a.begin(), a.end(), theta_deg);
    const auto hi = static_cast<std::size_t>(it - a.begin());
    if (a[hi] == theta_deg) {
        return gain_[hi];
    }
    const std::size_t lo = hi - 1;
    const double t = (theta_deg - a[lo]) / (a[hi] - a[lo]);
    return gain_[lo] + t * (gain_[hi] - gain_[lo]);
}

// ---------------------------------------------------------------------------
// dynamic_antenna

dynamic_antenna::dynamic_antenna(pattern_state state1, pattern_state state2, cdouble weight2)
    : state1_(std::move(state1)), state2_(std::move(state2)), weight2_(weight2)
{
    if (!(state1_.grid() == state2_.grid())) {
        throw invalid_parameter("antenna states must share the same angle grid");
    }
    if (!std::isfinite(weight2_.real()) || !std::isfinite(weight2_.imag()) || weight2_ == cdouble{}) {
        throw invalid_parameter("state-2 weight must be finite and nonzero");
    }
}

dynamic_antenna dynamic_antenna::with_weight2(cdouble w) const
{
    return dynamic_antenna(state1_, state2_, w);
}

cdouble eval_gain(const dynamic_antenna& antenna, state_id state, double theta_deg)
{
    const cdouble g = antenna.state(state).interpolate(theta_deg);
    return state == state_id::state2 ? antenna.weight2() * g : g;
}

// ---------------------------------------------------------------------------
// Synthetic generators

dynamic_antenna synth_linear_phase_divergence(double slope_deg_per_deg, double center_deg,
                                              const angle_grid& grid)
{
    require_finite(slope_deg_per_deg, "phase slope");
    require_finite(center_deg, "center angle");
    std::vector<cdouble> g1(grid.size()), g2(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double half = 0.5 * slope_deg_per_deg * (grid[i] - center_deg) * deg2rad;
        g1[i] = std::polar(1.0, half);
        g2[i] = std::polar(1.0, -half);
    }
    return dynamic_antenna(pattern_state(grid, std::move(g1), state_id::state1),
                           pattern_state(grid, std::move(g2), state_id::state2));
}

dynamic_antenna synth_amplitude_divergence(double slope_db_per_deg, double center_deg,
                                           const angle_grid& grid)
{
    require_finite(slope_db_per_deg, "amplitude slope");
    require_finite(center_deg, "center angle");
    std::vector<cdouble> g1(grid.size()), g2(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double half_db = 0.5 * slope_db_per_deg * (grid[i] - center_deg);
        g1[i] = std::pow(10.0, half_db / 20.0);
        g2[i] = std::pow(10.0, -half_db / 20.0);
    }
    return dynamic_antenna(pattern_state(grid, std::move(g1), state_id::state1),
                           pattern_state(grid, std::move(g2), state_id::state2));
}

// ---------------------------------------------------------------------------
// Thin-wire dipole

void wire_dipole_spec::validate() const
{
    require_finite(total_length_wavelengths, "dipole length");
    require_finite(feed_offset_wavelengths, "feed offset");
    if (total_length_wavelengths <= 0.0) {
        throw invalid_parameter("dipole length must be positive");
    }
    if (std::abs(feed_offset_wavelengths) >= 0.5 * total_length_wavelengths) {
        throw invalid_parameter("feed point must lie strictly inside the wire (|offset| < length/2)");
    }
    require_finite(attenuation_np_per_wavelength, "attenuation");
    if (attenuation_np_per_wavelength < 0.0) {
        throw invalid_parameter("attenuation must be >= 0");
    }
    if (segments < 64) {
        throw invalid_parameter("dipole quadrature needs at least 64 segments");
    }
}

std::vector<cdouble> dipole_field(const wire_dipole_spec& spec, std::span<const double> angles_deg)
{
    spec.validate();
    constexpr double k = 2.0 * std::numbers::pi; // lengths in wavelengths
    const double half = 0.5 * spec.total_length_wavelengths;
    const double feed = spec.feed_offset_wavelengths;
    const double left_arm = feed + half;
    const double right_arm = half - feed;
    // Each arm gets its own midpoint cells so no cell straddles the feed,
    // where the two arm currents need not agree. The per-arm count depends
    // only on the arm length, which keeps mirrored feeds sample-symmetric.
    const cdouble gamma(spec.attenuation_np_per_wavelength, k);
    const cdouble j(0.0, 1.0);
    std::vector<double> z;
    std::vector<double> w;
    std::vector<cdouble> current;
    auto add_arm = [&](double from, double arm) {
        const auto cells = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::llround(spec.segments * arm / spec.total_length_wavelengths)));
        const double h = arm / static_cast<double>(cells);
        for (std::size_t i = 0; i < cells; ++i) {
            const double d = (static_cast<double>(i) + 0.5) * h; // distance from the feed
            z.push_back(from < feed ? feed - d : feed + d);
            w.push_back(h);
            current.push_back(std::sinh(gamma * (arm - d)) / j);
        }
    };
    add_arm(-half, left_arm);
    add_arm(half, right_arm);

    std::vector<cdouble> field(angles_deg.size());
    for (std::size_t a = 0; a < angles_deg.size(); ++a) {
        const double theta = angles_deg[a] * deg2rad;
        const double kc = k * std::cos(theta);
        cdouble acc{};
        for (std::size_t i = 0; i < z.size(); ++i) {
            acc += w[i] * current[i] * std::polar(1.0, kc * z[i]);
        }
        // Exact null along the wire axis.
        const double element = std::fmod(angles_deg[a], 180.0) == 0.0 ? 0.0 : std::sin(theta);
        field[a] = element * acc;
    }
    return field;
}

namespace {

double peak_magnitude(std::span<const cdouble> v)
{
    double m = 0.0;
    for (const auto& g : v) {
        m = std::max(m, std::abs(g));
    }
    return m;
}

} // namespace

pattern_state dipole_pattern(const wire_dipole_spec& spec, const angle_grid& grid, state_id label)
{
    auto field = dipole_field(spec, grid.angles());
    const double peak = peak_magnitude(field);
    if (!(peak > 0.0)) {
        throw degenerate_antenna("dipole field vanishes on every grid angle");
    }
    for (auto& g : field) {
        g /= peak;
    }
    return pattern_state(grid, std::move(field), label);
}

dynamic_antenna dipole_dynamic_antenna(const wire_dipole_spec& spec, const angle_grid& grid)
{
    spec.validate();
    if (spec.feed_offset_wavelengths == 0.0) {
        throw degenerate_antenna("center-fed dipole has identical states; feed offset must be nonzero");
    }
    wire_dipole_spec mirrored = spec;
    mirrored.feed_offset_wavelengths = -spec.feed_offset_wavelengths;
    auto f1 = dipole_field(spec, grid.angles());
    auto f2 = dipole_field(mirrored, grid.angles());
    const double peak = std::max(peak_magnitude(f1), peak_magnitude(f2));
    if (!(peak > 0.0)) {
        throw degenerate_antenna("dipole field vanishes on every grid angle");
    }
    for (auto& g : f1) {
        g /= peak;
    }
    for (auto& g : f2) {
        g /= peak;
    }
    return dynamic_antenna(pattern_state(grid, std::move(f1), state_id::state1),
                           pattern_state(grid, std::move(f2), state_id::state2));
}

// ---------------------------------------------------------------------------
// Pattern CSV

dynamic_antenna parse_pattern_csv(const std::string& text, const std::string& source)
{
    std::vector<double> angles;
    std::vector<cdouble> g1, g2;
    bool have_header = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) {
            eol = text.size();
        }
        const std::string_view line = io::trim(std::string_view(text).substr(pos, eol - pos));
        pos = eol + 1;
        ++line_no;
        if (line.empty() || line.front() == '#') {
            continue;
        }
        if (!have_header) {
            if (line != pattern_header) {
                throw parse_error(source, line_no, std::string("expected header '") + pattern_header + "'");
            }
            have_header = true;
            continue;
        }
        const auto fields = io::split(line, ',');
        if (fields.size() != 5) {
            throw parse_error(source, line_no,
                              "expected 5 columns, found " + std::to_string(fields.size()));
        }
        double v[5];
        for (std::size_t c = 0; c < 5; ++c) {
            if (!io::parse_double(fields[c], v[c])) {
                throw parse_error(source, line_no, "malformed number '" + std::string(fields[c]) + "'");
            }
        }
        if (!std::isfinite(v[0]) || !std::isfinite(v[2]) || !std::isfinite(v[4]) || std::isnan(v[1]) ||
            std::isnan(v[3]) || v[1] == INFINITY || v[3] == INFINITY) {
            throw parse_error(source, line_no, "non-finite value (only -inf is allowed, for dB magnitudes)");
        }
        if (!angles.empty() && !(v[0] > angles.back())) {
            throw parse_error(source, line_no, "angles must be strictly increasing");
        }
        angles.push_back(v[0]);
        g1.push_back(std::polar(std::pow(10.0, v[1] / 20.0), v[2] * deg2rad));
        g2.push_back(std::polar(std::pow(10.0, v[3] / 20.0), v[4] * deg2rad));
    }
    if (!have_header) {
        throw parse_error(source, line_no, "missing header");
    }
    if (angles.size() < 2) {
        throw parse_error(source, line_no, "pattern file needs at least 2 rows");
    }
    angle_grid grid(std::move(angles));
    return dynamic_antenna(pattern_state(grid, std::move(g1), state_id::state1),
                           pattern_state(grid, std::move(g2), state_id::state2));
}

dynamic_antenna load_pattern_csv(const std::filesystem::path& path)
{
    return parse_pattern_csv(io::read_text_file(path), path.string());
}

std::string format_pattern_csv(const dynamic_antenna& antenna)
{
    auto db = [](cdouble g) { return io::format_double(20.0 * std::log10(std::abs(g))); };
    auto deg = [](cdouble g) { return io::format_double(g == 0.0 ? 0.0 : std::arg(g) / deg2rad); };
    std::string out = pattern_header;
    out += '\n';
    const auto& grid = antenna.grid();
    const auto s1 = antenna.state1().gain();
    const auto s2 = antenna.state2().gain();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out += io::format_double(grid[i]);
        out += ',' + db(s1[i]) + ',' + deg(s1[i]) + ',' + db(s2[i]) + ',' + deg(s2[i]) + '\n';
    }
    return out;
}

void save_pattern_csv(const dynamic_antenna& antenna, const std::filesystem::path& path)
{
    io::write_text_file(path, format_pattern_csv(antenna));
}

} // namespace dynmod
