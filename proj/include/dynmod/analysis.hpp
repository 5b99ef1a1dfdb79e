// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "dynmod/dynamics.hpp"
#include "dynmod/modem.hpp"
#include "dynmod/patterns.hpp"

#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace dynmod {

// How the eavesdropper equalizes at each angle.
enum class calibration_mode {
    state1, // divide by the state-1 gain at that angle
    mean,   // divide by the mean of the two (weighted) state gains
};

cdouble calibration_gain(const dynamic_antenna& antenna, double theta_deg, calibration_mode mode);

received_stream equalize(const received_stream& rx, cdouble gain);

struct magnitude_phase_error {
    double mag_error_rms = 0.0;
    double phase_error_deg = 0.0;
};

// RMS of (|r| - |s|) and mean of |wrap(arg r - arg s)| in degrees.
magnitude_phase_error mag_phase_error(std::span<const cdouble> received, std::span<const cdouble> reference);

struct sweep_options {
    int prbs_order = 11;
    std::uint32_t prbs_seed = 1;
    calibration_mode calibration = calibration_mode::state1;
    // Calibrated BER above this counts as "nothing demodulated".
    double undecodable_ber = 0.4;
    // 0 leaves the OpenMP default in place.
    int threads = 0;
};

struct angle_sweep_result {
    std::vector<double> angles_deg;
    std::vector<double> ber;
    std::vector<double> mag_error_rms;   // NaN where undecodable
    std::vector<double> phase_error_deg; // NaN where undecodable
    std::vector<std::uint8_t> decodable;
    std::string config_digest;

    std::size_t size() const noexcept { return angles_deg.size(); }
};

// Everything a single angle needs; built once per sweep and shared read-only.
struct sweep_workload {
    const dynamic_antenna* antenna = nullptr;
    const constellation_map* map = nullptr;
    channel_config channel;
    sweep_options options;
    bit_stream bits;
    symbol_stream symbols;
    std::vector<state_id> states;
};

sweep_workload prepare_sweep(const dynamic_antenna& antenna, const switch_schedule& schedule,
                             const constellation_map& map, const channel_config& channel, const angle_grid& grid,
                             std::size_t n_symbols, const sweep_options& options);

// Noise seed used for the angle at `index`; independent of thread layout.
std::uint64_t angle_subseed(std::uint64_t scenario_seed, std::size_t index);

struct angle_outcome {
    double ber = 0.5;
    double mag_error_rms = 0.0;
    double phase_error_deg = 0.0;
    bool decodable = false;
};

angle_outcome evaluate_angle(const sweep_workload& w, double theta_deg, std::size_t index);

// OpenMP kernel over angles.
angle_sweep_result sweep_ber(const dynamic_antenna& antenna, const switch_schedule& schedule,
                             const constellation_map& map, const channel_config& channel, const angle_grid& grid,
                             std::size_t n_symbols, const sweep_options& options = {});

// Serial reference kernel; bit-identical to sweep_ber.
angle_sweep_result sweep_ber_serial(const dynamic_antenna& antenna, const switch_schedule& schedule,
                                    const constellation_map& map, const channel_config& channel,
                                    const angle_grid& grid, std::size_t n_symbols, const sweep_options& options = {});

struct secure_region {
    double center_deg = 0.0;
    double lower_deg = 0.0;
    double upper_deg = 0.0;
    double width_deg = 0.0;
    double threshold_ber = 1e-3;
};

inline constexpr double fec_threshold_ber = 1e-3;

// Largest contiguous run of samples around `center_deg` with ber < threshold.
// An off-grid center needs both bracketing samples to pass.
secure_region extract_secure_region(const angle_sweep_result& result, double center_deg,
                                    double threshold = fec_threshold_ber);

struct threshold_entry {
    modulation_format format;
    double phase_deg = 0.0;   // symmetric in sign of rotation
    double amp_db = 0.0;      // min(amp_up_db, amp_down_db)
    double amp_up_db = 0.0;   // state 2 stronger than state 1
    double amp_down_db = 0.0; // state 2 weaker than state 1
};

struct threshold_catalog {
    std::vector<threshold_entry> entries;
};

inline constexpr double unbounded = std::numeric_limits<double>::infinity();

// True when the constellation scaled by `z` decodes every point back to itself.
bool distortion_error_free(const constellation_map& map, cdouble z);

threshold_entry format_thresholds(const modulation_format& format);
threshold_catalog build_threshold_catalog(std::span<const modulation_format> formats);

// Sweep CSV: angle_deg,ber,mag_error_rms,phase_error_deg,decodable
std::string format_sweep_csv(const angle_sweep_result& result);
angle_sweep_result parse_sweep_csv(const std::string& text, const std::string& source = "<memory>");
void export_sweep(const angle_sweep_result& result, const std::filesystem::path& path);
angle_sweep_result load_sweep_csv(const std::filesystem::path& path);

// Constellation CSV: i,q,state
std::string format_constellation_csv(const received_stream& rx);
void export_constellation(const received_stream& rx, const std::filesystem::path& path);

// Points closer than `tol` (Chebyshev distance) are counted once.
std::size_t count_distinct_points(std::span<const cdouble> points, double tol = 1e-9);

} // namespace dynmod
