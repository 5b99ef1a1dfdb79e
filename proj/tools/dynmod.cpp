// SPDX-License-Identifier: Apache-2.0
//
// dynmod: batch front-end for the dynamic-antenna directional modulation
// simulator.
//
//   dynmod run <scenario.json>
//   dynmod thresholds --formats bpsk,qpsk,qam16 --out catalog.json
//   dynmod pattern --dipole-length 1.5 --feed-offset 0.5 --out pattern.csv
//
// DYNMOD_LOG selects the log level (trace, debug, info, warn, error, off).

#include "dynmod/error.hpp"
#include "dynmod/io.hpp"
#include "dynmod/scenario.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <numbers>

namespace {

void configure_logging()
{
    spdlog::set_default_logger(spdlog::stderr_color_mt("dynmod"));
    spdlog::set_pattern("[%l] %v");
    spdlog::set_level(spdlog::level::warn);
    if (const char* lvl = std::getenv("DYNMOD_LOG")) {
        spdlog::set_level(spdlog::level::from_str(lvl));
    }
}

int cmd_run(const std::string& scenario_path)
{
    const dynmod::scenario sc = dynmod::load_scenario(scenario_path);
    spdlog::info("scenario '{}' ({} formats, {} symbols/angle, digest {})", sc.name, sc.formats.size(), sc.n_symbols,
                 sc.digest);
    const auto report = dynmod::run_scenario(sc);
    if (report.steering_weight) {
        const auto w = *report.steering_weight;
        spdlog::info("steering weight |w| = {:.6g}, arg(w) = {:.6g} deg", std::abs(w),
                     std::arg(w) * 180.0 / std::numbers::pi);
    }
    for (const auto& f : report.formats) {
        spdlog::info("{}: secure region [{}, {}] deg, width {} deg", f.format.name(), f.region.lower_deg,
                     f.region.upper_deg, f.region.width_deg);
    }
    for (const auto& p : report.written) {
        spdlog::debug("wrote {}", p.string());
    }
    return 0;
}

int cmd_thresholds(const std::string& formats, const std::string& out)
{
    const auto list = dynmod::parse_format_list(formats);
    dynmod::run_threshold_catalog(list, out);
    spdlog::info("wrote threshold catalog for {} formats to {}", list.size(), out);
    return 0;
}

int cmd_pattern(const dynmod::wire_dipole_spec& spec, const dynmod::grid_span& span, const std::string& out)
{
    const auto antenna = dynmod::dipole_dynamic_antenna(spec, span.to_grid());
    dynmod::write_files_atomically({{out, dynmod::format_pattern_csv(antenna)}});
    spdlog::info("wrote {}-point two-state dipole pattern to {}", antenna.grid().size(), out);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    configure_logging();

    CLI::App app{"Dynamic-antenna directional modulation simulator"};
    app.require_subcommand(1);

    std::string scenario_path;
    auto* run = app.add_subcommand("run", "Run a scenario file and write sweep/summary artifacts");
    run->add_option("scenario", scenario_path, "Scenario JSON")->required();

    std::string formats;
    std::string catalog_out;
    auto* thr = app.add_subcommand("thresholds", "Compute the phase/amplitude error-threshold catalog");
    thr->add_option("--formats", formats, "Comma-separated formats, e.g. bpsk,qpsk,qam16")->required();
    thr->add_option("--out", catalog_out, "Output JSON path")->required();

    dynmod::wire_dipole_spec spec;
    dynmod::grid_span span{0.0, 180.0, 0.5};
    std::string pattern_out;
    auto* pat = app.add_subcommand("pattern", "Write the two-state thin-wire dipole pattern CSV");
    pat->add_option("--dipole-length", spec.total_length_wavelengths, "Total length in wavelengths")->required();
    pat->add_option("--feed-offset", spec.feed_offset_wavelengths, "Feed offset from center in wavelengths")
        ->required();
    pat->add_option("--segments", spec.segments, "Quadrature segments")->capture_default_str();
    pat->add_option("--attenuation", spec.attenuation_np_per_wavelength, "Current damping (Np per wavelength)")
        ->capture_default_str();
    pat->add_option("--start", span.start_deg, "First angle (deg)")->capture_default_str();
    pat->add_option("--stop", span.stop_deg, "Last angle (deg)")->capture_default_str();
    pat->add_option("--step", span.step_deg, "Angle step (deg)")->capture_default_str();
    pat->add_option("--out", pattern_out, "Output CSV path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            return cmd_run(scenario_path);
        }
        if (*thr) {
            return cmd_thresholds(formats, catalog_out);
        }
        if (*pat) {
            return cmd_pattern(spec, span, pattern_out);
        }
    } catch (const dynmod::error& e) {
        spdlog::error("{}", e.what());
        return 1;
    } catch (const std::exception& e) {
        spdlog::error("unexpected failure: {}", e.what());
        return 2;
    }
    return 0;
}
