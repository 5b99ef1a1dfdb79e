// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "dynmod/analysis.hpp"
#include "dynmod/dynamics.hpp"
#include "dynmod/modem.hpp"
#include "dynmod/patterns.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace dynmod {

struct grid_span {
    double start_deg = 0.0;
    double stop_deg = 180.0;
    double step_deg = 0.5;

    angle_grid to_grid() const { return angle_grid::uniform(start_deg, stop_deg, step_deg); }
};

struct antenna_source {
    enum class kind { linear_phase, amplitude, dipole, file };

    kind type = kind::linear_phase;
    double slope = 0.0; // deg/deg or dB/deg
    double center_deg = 90.0;
    wire_dipole_spec dipole;
    std::filesystem::path path; // resolved against the scenario directory
    grid_span grid;             // synthetic and dipole sources only
};

struct scenario {
    std::string name = "scenario";
    double broadside_deg = 90.0;
    antenna_source antenna;
    std::vector<modulation_format> formats;
    switch_schedule schedule;
    std::optional<double> snr_db;
    std::uint64_t noise_seed = 1;
    std::optional<double> reference_angle_deg;
    calibration_mode calibration = calibration_mode::state1;
    std::optional<grid_span> sweep; // defaults to the pattern grid
    std::size_t n_symbols = 30000;
    int prbs_order = 11;
    std::uint32_t prbs_seed = 1;
    std::optional<double> steering_angle_deg;
    double secure_threshold_ber = fec_threshold_ber;
    std::vector<double> constellation_angles_deg;
    std::filesystem::path output_dir = "out";
    int threads = 0;
    std::string digest; // FNV-1a of the canonical JSON document
};

// Throws parse_error naming the line for malformed JSON and for schema
// violations. Relative paths resolve against `base_dir`.
scenario parse_scenario(const std::string& json_text, const std::string& source,
                        const std::filesystem::path& base_dir);
scenario load_scenario(const std::filesystem::path& path);

dynamic_antenna build_antenna(const scenario& sc);

struct format_report {
    modulation_format format;
    angle_sweep_result sweep;
    secure_region region;
};

struct scenario_report {
    std::optional<cdouble> steering_weight;
    double secure_center_deg = 0.0;
    std::vector<format_report> formats;
    std::vector<std::filesystem::path> written;
};

// Runs every format, then writes all artifacts at once. Files go to
// temporaries first and are renamed into place only after every one of them
// was written; a failure leaves the output directory untouched.
scenario_report run_scenario(const scenario& sc);

std::string format_catalog_json(const threshold_catalog& catalog);
void run_threshold_catalog(std::span<const modulation_format> formats, const std::filesystem::path& out_path);

// Writes a set of files atomically (all or nothing).
void write_files_atomically(const std::vector<std::pair<std::filesystem::path, std::string>>& files);

} // namespace dynmod
