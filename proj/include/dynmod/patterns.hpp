// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace dynmod {

using cdouble = std::complex<double>;

enum class state_id : int { state1 = 1, state2 = 2 };

std::string to_string(state_id s);

// Ordered angle samples in degrees. Strictly increasing, finite, at least two
// points.
class angle_grid {
public:
    explicit angle_grid(std::vector<double> angles_deg);

    // Closed interval [start, stop] sampled every `step`. The last sample is
    // `stop` when (stop - start) is a multiple of step, otherwise the largest
    // sample not exceeding stop.
    static angle_grid uniform(double start_deg, double stop_deg, double step_deg);

    std::span<const double> angles() const noexcept { return angles_; }
    std::size_t size() const noexcept { return angles_.size(); }
    double operator[](std::size_t i) const noexcept { return angles_[i]; }
    double front() const noexcept { return angles_.front(); }
    double back() const noexcept { return angles_.back(); }
    bool contains(double theta_deg) const noexcept
    {
        return theta_deg >= angles_.front() && theta_deg <= angles_.back();
    }

    friend bool operator==(const angle_grid&, const angle_grid&) = default;

private:
    std::vector<double> angles_;
};

// Complex far-field gain of one feed state, one sample per grid angle.
class pattern_state {
public:
    pattern_state(angle_grid grid, std::vector<cdouble> gain, state_id label);

    const angle_grid& grid() const noexcept { return grid_; }
    std::span<const cdouble> gain() const noexcept { return gain_; }
    state_id label() const noexcept { return label_; }

    // Linear interpolation of the rectangular components between the two
    // bracketing samples. Exact at grid nodes.
    cdouble interpolate(double theta_deg) const;

private:
    angle_grid grid_;
    std::vector<cdouble> gain_;
    state_id label_;
};

// Two-state switched antenna. `weight2` multiplies every state-2 gain.
class dynamic_antenna {
public:
    dynamic_antenna(pattern_state state1, pattern_state state2, cdouble weight2 = {1.0, 0.0});

    const pattern_state& state1() const noexcept { return state1_; }
    const pattern_state& state2() const noexcept { return state2_; }
    const pattern_state& state(state_id s) const noexcept
    {
        return s == state_id::state1 ? state1_ : state2_;
    }
    cdouble weight2() const noexcept { return weight2_; }
    const angle_grid& grid() const noexcept { return state1_.grid(); }

    dynamic_antenna with_weight2(cdouble w) const;

private:
    pattern_state state1_;
    pattern_state state2_;
    cdouble weight2_;
};

// Each arm carries I(z) = sinh(gamma * (arm_length - |z - feed|)) / j with
// gamma = alpha + j*k. alpha = 0 is the lossless sinusoidal standing wave,
// which on a 1.5-wavelength wire fed at +-0.5 wavelength gives two identical
// states; the default damping adds the outgoing-wave part that makes the
// mirrored states differ in their sidelobes.
struct wire_dipole_spec {
    double total_length_wavelengths = 1.5;
    double feed_offset_wavelengths = 0.5;
    int segments = 2048;
    double attenuation_np_per_wavelength = 0.3;

    void validate() const;
};

// Unit-magnitude states whose phase difference (state1 minus state2) is
// slope * (theta - center). State phases are +diff/2 and -diff/2.
dynamic_antenna synth_linear_phase_divergence(double slope_deg_per_deg, double center_deg,
                                              const angle_grid& grid);

// Zero-phase states whose magnitude ratio in dB (state1 over state2) is
// slope * (theta - center), split symmetrically about 0 dB.
dynamic_antenna synth_amplitude_divergence(double slope_db_per_deg, double center_deg,
                                           const angle_grid& grid);

// Thin-wire standing-wave far field, theta measured from the wire axis.
// Normalized to unit peak magnitude over `grid`.
pattern_state dipole_pattern(const wire_dipole_spec& spec, const angle_grid& grid,
                             state_id label = state_id::state1);

// Un-normalized field, used by the normalizing wrappers and by tests.
std::vector<cdouble> dipole_field(const wire_dipole_spec& spec, std::span<const double> angles_deg);

// State 1 fed at +offset, state 2 at -offset, both scaled by the same factor
// so the larger of the two peaks is 1.
dynamic_antenna dipole_dynamic_antenna(const wire_dipole_spec& spec, const angle_grid& grid);

// Pattern file: angle_deg,mag_db_s1,phase_deg_s1,mag_db_s2,phase_deg_s2
dynamic_antenna load_pattern_csv(const std::filesystem::path& path);
dynamic_antenna parse_pattern_csv(const std::string& text, const std::string& source = "<memory>");
void save_pattern_csv(const dynamic_antenna& antenna, const std::filesystem::path& path);
std::string format_pattern_csv(const dynamic_antenna& antenna);

// Gain of `state` at theta. State 2 includes weight2.
cdouble eval_gain(const dynamic_antenna& antenna, state_id state, double theta_deg);

} // namespace dynmod
