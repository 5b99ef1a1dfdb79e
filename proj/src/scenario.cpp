// SPDX-License-Identifier: Apache-2.0
#include "dynmod/scenario.hpp"

#include "dynmod/error.hpp"
#include "dynmod/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>

#include <unistd.h>

namespace dynmod {

using json = nlohmann::json;

namespace {

std::size_t line_of_offset(const std::string& text, std::size_t offset)
{
    offset = std::min(offset, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

// Walks the object keys of `path` through the raw text to find the line a
// value was written on. Array indices are skipped; good enough to point a
// human at the right place.
std::size_t locate(const std::string& text, const std::vector<std::string>& path)
{
    std::size_t pos = 0;
    for (const auto& seg : path) {
        if (!seg.empty() && std::all_of(seg.begin(), seg.end(), ::isdigit)) {
            continue;
        }
        const std::string needle = "\"" + seg + "\"";
        std::size_t at = pos;
        while (true) {
            at = text.find(needle, at);
            if (at == std::string::npos) {
                return line_of_offset(text, pos);
            }
            std::size_t after = at + needle.size();
            while (after < text.size() && std::isspace(static_cast<unsigned char>(text[after]))) {
                ++after;
            }
            if (after < text.size() && text[after] == ':') {
                break;
            }
            at += needle.size();
        }
        pos = at;
    }
    return line_of_offset(text, pos);
}

std::string pointer_string(const std::vector<std::string>& path)
{
    std::string s;
    for (const auto& p : path) {
        s += "/" + p;
    }
    return s.empty() ? "/" : s;
}

class schema_reader {
public:
    schema_reader(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {}

    [[noreturn]] void fail(const std::vector<std::string>& path, const std::string& msg) const
    {
        throw parse_error(source_, locate(text_, path), pointer_string(path) + ": " + msg);
    }

    void expect_object(const json& j, const std::vector<std::string>& path,
                       std::initializer_list<const char*> allowed) const
    {
        if (!j.is_object()) {
            fail(path, "expected an object");
        }
        std::set<std::string> ok(allowed.begin(), allowed.end());
        for (const auto& [k, v] : j.items()) {
            if (!ok.count(k)) {
                auto p = path;
                p.push_back(k);
                fail(p, "unknown key");
            }
        }
    }

    double number(const json& j, const std::vector<std::string>& path) const
    {
        if (!j.is_number()) {
            fail(path, "expected a number");
        }
        const double v = j.get<double>();
        if (!std::isfinite(v)) {
            fail(path, "must be finite");
        }
        return v;
    }

    std::int64_t integer(const json& j, const std::vector<std::string>& path, std::int64_t lo, std::int64_t hi) const
    {
        if (!j.is_number_integer()) {
            fail(path, "expected an integer");
        }
        const auto v = j.get<std::int64_t>();
        if (v < lo || v > hi) {
            fail(path, "must be within [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        }
        return v;
    }

    std::string string(const json& j, const std::vector<std::string>& path) const
    {
        if (!j.is_string()) {
            fail(path, "expected a string");
        }
        return j.get<std::string>();
    }

    const json& require(const json& obj, const std::vector<std::string>& path, const char* key) const
    {
        if (!obj.contains(key)) {
            fail(path, std::string("missing required key '") + key + "'");
        }
        return obj.at(key);
    }

    grid_span span(const json& j, const std::vector<std::string>& path) const
    {
        expect_object(j, path, {"start_deg", "stop_deg", "step_deg"});
        grid_span g;
        g.start_deg = number(require(j, path, "start_deg"), sub(path, "start_deg"));
        g.stop_deg = number(require(j, path, "stop_deg"), sub(path, "stop_deg"));
        g.step_deg = number(require(j, path, "step_deg"), sub(path, "step_deg"));
        if (!(g.step_deg > 0.0) || !(g.stop_deg > g.start_deg)) {
            fail(path, "need step_deg > 0 and stop_deg > start_deg");
        }
        if ((g.stop_deg - g.start_deg) / g.step_deg > 1e6) {
            fail(path, "grid would exceed 10^6 samples");
        }
        return g;
    }

    static std::vector<std::string> sub(std::vector<std::string> p, const std::string& k)
    {
        p.push_back(k);
        return p;
    }

private:
    const std::string& text_;
    std::string source_;
};

std::string fnv1a_hex(const std::string& s)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace

scenario parse_scenario(const std::string& text, const std::string& source, const std::filesystem::path& base_dir)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw parse_error(source, line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0), e.what());
    }
    const schema_reader rd(text, source);
    using path_t = std::vector<std::string>;
    const path_t root;
    rd.expect_object(doc, root,
                     {"name", "broadside_deg", "antenna", "formats", "format", "schedule", "channel", "calibration",
                      "sweep", "n_symbols", "prbs", "steering_angle_deg", "secure_threshold_ber",
                      "constellation_angles_deg", "output_dir", "threads"});

    scenario sc;
    if (doc.contains("name")) {
        sc.name = rd.string(doc["name"], {"name"});
        if (sc.name.empty() || sc.name.find_first_of("/\\") != std::string::npos) {
            rd.fail({"name"}, "must be a non-empty file-name-safe string");
        }
    }
    sc.broadside_deg = rd.number(rd.require(doc, root, "broadside_deg"), {"broadside_deg"});

    // antenna
    {
        const path_t p{"antenna"};
        const json& a = rd.require(doc, root, "antenna");
        if (!a.is_object()) {
            rd.fail(p, "expected an object");
        }
        const std::string kind = rd.string(rd.require(a, p, "kind"), {"antenna", "kind"});
        auto& src = sc.antenna;
        if (kind == "linear_phase" || kind == "amplitude") {
            const char* slope_key = kind == "linear_phase" ? "slope_deg_per_deg" : "slope_db_per_deg";
            rd.expect_object(a, p, {"kind", slope_key, "center_deg", "grid"});
            src.type = kind == "linear_phase" ? antenna_source::kind::linear_phase : antenna_source::kind::amplitude;
            src.slope = rd.number(rd.require(a, p, slope_key), {"antenna", slope_key});
            src.center_deg = rd.number(rd.require(a, p, "center_deg"), {"antenna", "center_deg"});
            src.grid = rd.span(rd.require(a, p, "grid"), {"antenna", "grid"});
        } else if (kind == "dipole") {
            rd.expect_object(a, p,
                             {"kind", "length_wavelengths", "feed_offset_wavelengths", "segments",
                              "attenuation_np_per_wavelength", "grid"});
            src.type = antenna_source::kind::dipole;
            src.dipole.total_length_wavelengths =
                rd.number(rd.require(a, p, "length_wavelengths"), {"antenna", "length_wavelengths"});
            src.dipole.feed_offset_wavelengths =
                rd.number(rd.require(a, p, "feed_offset_wavelengths"), {"antenna", "feed_offset_wavelengths"});
            if (a.contains("segments")) {
                src.dipole.segments =
                    static_cast<int>(rd.integer(a["segments"], {"antenna", "segments"}, 64, 1 << 20));
            }
            if (a.contains("attenuation_np_per_wavelength")) {
                src.dipole.attenuation_np_per_wavelength = rd.number(
                    a["attenuation_np_per_wavelength"], {"antenna", "attenuation_np_per_wavelength"});
            }
            src.grid = rd.span(rd.require(a, p, "grid"), {"antenna", "grid"});
            try {
                src.dipole.validate();
            } catch (const invalid_parameter& e) {
                rd.fail(p, e.what());
            }
        } else if (kind == "file") {
            rd.expect_object(a, p, {"kind", "path"});
            src.type = antenna_source::kind::file;
            std::filesystem::path fp = rd.string(rd.require(a, p, "path"), {"antenna", "path"});
            src.path = fp.is_absolute() ? fp : base_dir / fp;
        } else {
            rd.fail({"antenna", "kind"}, "must be one of linear_phase, amplitude, dipole, file");
        }
    }

    // formats
    if (doc.contains("formats") == doc.contains("format")) {
        rd.fail(root, "exactly one of 'formats' (list) or 'format' (string) is required");
    }
    try {
        if (doc.contains("format")) {
            sc.formats.push_back(parse_format(rd.string(doc["format"], {"format"})));
        } else {
            const json& fl = doc["formats"];
            if (!fl.is_array() || fl.empty()) {
                rd.fail({"formats"}, "expected a non-empty list of format names");
            }
            for (std::size_t i = 0; i < fl.size(); ++i) {
                sc.formats.push_back(parse_format(rd.string(fl[i], {"formats", std::to_string(i)})));
            }
        }
    } catch (const invalid_parameter& e) {
        rd.fail({doc.contains("format") ? "format" : "formats"}, e.what());
    }

    if (doc.contains("schedule")) {
        const path_t p{"schedule"};
        const json& s = doc["schedule"];
        rd.expect_object(s, p, {"policy", "state", "symbols_per_dwell", "seed"});
        const std::string pol = rd.string(rd.require(s, p, "policy"), {"schedule", "policy"});
        if (pol == "alternating") {
            sc.schedule.policy = switch_policy::alternating;
        } else if (pol == "random") {
            sc.schedule.policy = switch_policy::random_equal_probability;
        } else if (pol == "fixed") {
            sc.schedule.policy = switch_policy::fixed_state;
            sc.schedule.fixed = rd.integer(rd.require(s, p, "state"), {"schedule", "state"}, 1, 2) == 1
                                    ? state_id::state1
                                    : state_id::state2;
        } else {
            rd.fail({"schedule", "policy"}, "must be one of alternating, random, fixed");
        }
        if (s.contains("symbols_per_dwell")) {
            sc.schedule.symbols_per_dwell =
                static_cast<int>(rd.integer(s["symbols_per_dwell"], {"schedule", "symbols_per_dwell"}, 1, 1 << 30));
        }
        if (s.contains("seed")) {
            sc.schedule.rng_seed =
                static_cast<std::uint64_t>(rd.integer(s["seed"], {"schedule", "seed"}, 0, INT64_MAX));
        }
    }

    if (doc.contains("channel")) {
        const path_t p{"channel"};
        const json& c = doc["channel"];
        rd.expect_object(c, p, {"snr_db", "noise_seed", "reference_angle_deg"});
        if (c.contains("snr_db") && !c["snr_db"].is_null()) {
            sc.snr_db = rd.number(c["snr_db"], {"channel", "snr_db"});
        }
        if (c.contains("noise_seed")) {
            sc.noise_seed =
                static_cast<std::uint64_t>(rd.integer(c["noise_seed"], {"channel", "noise_seed"}, 0, INT64_MAX));
        }
        if (c.contains("reference_angle_deg")) {
            sc.reference_angle_deg = rd.number(c["reference_angle_deg"], {"channel", "reference_angle_deg"});
        }
    }

    if (doc.contains("calibration")) {
        const std::string m = rd.string(doc["calibration"], {"calibration"});
        if (m == "state1") {
            sc.calibration = calibration_mode::state1;
        } else if (m == "mean") {
            sc.calibration = calibration_mode::mean;
        } else {
            rd.fail({"calibration"}, "must be 'state1' or 'mean'");
        }
    }
    if (doc.contains("sweep")) {
        sc.sweep = rd.span(doc["sweep"], {"sweep"});
    }
    if (doc.contains("n_symbols")) {
        sc.n_symbols = static_cast<std::size_t>(rd.integer(doc["n_symbols"], {"n_symbols"}, 1, 100'000'000));
    }
    if (doc.contains("prbs")) {
        const path_t p{"prbs"};
        const json& pr = doc["prbs"];
        rd.expect_object(pr, p, {"order", "seed"});
        if (pr.contains("order")) {
            sc.prbs_order = static_cast<int>(rd.integer(pr["order"], {"prbs", "order"}, 2, 31));
        }
        if (pr.contains("seed")) {
            sc.prbs_seed = static_cast<std::uint32_t>(
                rd.integer(pr["seed"], {"prbs", "seed"}, 1, (std::int64_t{1} << sc.prbs_order) - 1));
        }
    }
    if (doc.contains("steering_angle_deg") && !doc["steering_angle_deg"].is_null()) {
        sc.steering_angle_deg = rd.number(doc["steering_angle_deg"], {"steering_angle_deg"});
    }
    if (doc.contains("secure_threshold_ber")) {
        sc.secure_threshold_ber = rd.number(doc["secure_threshold_ber"], {"secure_threshold_ber"});
        if (!(sc.secure_threshold_ber > 0.0 && sc.secure_threshold_ber <= 0.5)) {
            rd.fail({"secure_threshold_ber"}, "must be within (0, 0.5]");
        }
    }
    if (doc.contains("constellation_angles_deg")) {
        const json& ca = doc["constellation_angles_deg"];
        if (!ca.is_array()) {
            rd.fail({"constellation_angles_deg"}, "expected a list of angles");
        }
        for (std::size_t i = 0; i < ca.size(); ++i) {
            sc.constellation_angles_deg.push_back(rd.number(ca[i], {"constellation_angles_deg", std::to_string(i)}));
        }
    }
    if (doc.contains("output_dir")) {
        std::filesystem::path od = rd.string(doc["output_dir"], {"output_dir"});
        sc.output_dir = od.is_absolute() ? od : base_dir / od;
    } else {
        sc.output_dir = base_dir / "out";
    }
    if (doc.contains("threads")) {
        sc.threads = static_cast<int>(rd.integer(doc["threads"], {"threads"}, 0, 1024));
    }

    sc.digest = fnv1a_hex(doc.dump());
    return sc;
}

scenario load_scenario(const std::filesystem::path& path)
{
    const std::string text = io::read_text_file(path);
    auto base = path.parent_path();
    if (base.empty()) {
        base = ".";
    }
    return parse_scenario(text, path.string(), base);
}

dynamic_antenna build_antenna(const scenario& sc)
{
    const auto& src = sc.antenna;
    switch (src.type) {
    case antenna_source::kind::linear_phase:
        return synth_linear_phase_divergence(src.slope, src.center_deg, src.grid.to_grid());
    case antenna_source::kind::amplitude:
        return synth_amplitude_divergence(src.slope, src.center_deg, src.grid.to_grid());
    case antenna_source::kind::dipole:
        return dipole_dynamic_antenna(src.dipole, src.grid.to_grid());
    case antenna_source::kind::file:
        if (!std::filesystem::exists(src.path)) {
            throw io_error("pattern file '" + src.path.string() + "' does not exist");
        }
        return load_pattern_csv(src.path);
    }
    throw invalid_parameter("unknown antenna source");
}

// ---------------------------------------------------------------------------

void write_files_atomically(const std::vector<std::pair<std::filesystem::path, std::string>>& files)
{
    namespace fs = std::filesystem;
    std::vector<fs::path> temps;
    std::vector<fs::path> created_dirs;
    auto cleanup = [&]() {
        std::error_code ec;
        for (const auto& t : temps) {
            fs::remove(t, ec);
        }
        for (auto it = created_dirs.rbegin(); it != created_dirs.rend(); ++it) {
            fs::remove(*it, ec); // only succeeds when still empty
        }
    };
    try {
        for (const auto& [path, content] : files) {
            const fs::path dir = path.parent_path().empty() ? fs::path(".") : path.parent_path();
            if (!fs::exists(dir)) {
                fs::path probe = dir;
                std::vector<fs::path> missing;
                while (!probe.empty() && !fs::exists(probe)) {
                    missing.push_back(probe);
                    probe = probe.parent_path();
                }
                fs::create_directories(dir);
                created_dirs.insert(created_dirs.end(), missing.rbegin(), missing.rend());
            }
            fs::path tmp = path;
            tmp += ".tmp-" + std::to_string(::getpid());
            temps.push_back(tmp);
            io::write_text_file(tmp, content);
        }
        for (const auto& [path, content] : files) {
            if (fs::is_directory(path)) {
                throw io_error("cannot write '" + path.string() + "': it is a directory");
            }
        }
        for (std::size_t i = 0; i < files.size(); ++i) {
            try {
                fs::rename(temps[i], files[i].first);
            } catch (...) {
                std::error_code ec;
                for (std::size_t j = 0; j < i; ++j) {
                    fs::remove(files[j].first, ec);
                }
                throw;
            }
        }
    } catch (const fs::filesystem_error& e) {
        cleanup();
        throw io_error(e.what());
    } catch (...) {
        cleanup();
        throw;
    }
}

namespace {

std::string angle_tag(double deg)
{
    std::string s = io::format_double(deg);
    for (auto& c : s) {
        if (c == '-') {
            c = 'm';
        } else if (c == '.') {
            c = 'p';
        }
    }
    return s;
}

json region_json(const secure_region& r)
{
    return {{"center_deg", r.center_deg},
            {"lower_deg", r.lower_deg},
            {"upper_deg", r.upper_deg},
            {"width_deg", r.width_deg},
            {"threshold_ber", r.threshold_ber}};
}

json threshold_value(double v)
{
    if (std::isinf(v)) {
        return "unbounded";
    }
    return v;
}

} // namespace

scenario_report run_scenario(const scenario& sc)
{
    if (sc.formats.empty()) {
        throw invalid_parameter("scenario lists no modulation formats");
    }
    scenario_report report;
    dynamic_antenna antenna = build_antenna(sc);
    if (sc.steering_angle_deg) {
        const cdouble w = steering_weight(antenna, *sc.steering_angle_deg);
        antenna = apply_steering(antenna, w);
        report.steering_weight = w;
    }
    report.secure_center_deg = sc.steering_angle_deg.value_or(sc.broadside_deg);

    const angle_grid grid = sc.sweep ? sc.sweep->to_grid() : antenna.grid();
    channel_config channel;
    channel.snr_db = sc.snr_db;
    channel.noise_seed = sc.noise_seed;
    channel.reference_angle_deg = sc.reference_angle_deg.value_or(report.secure_center_deg);

    sweep_options opts;
    opts.prbs_order = sc.prbs_order;
    opts.prbs_seed = sc.prbs_seed;
    opts.calibration = sc.calibration;
    opts.threads = sc.threads;

    std::vector<std::pair<std::filesystem::path, std::string>> files;
    json summary;
    summary["scenario"] = sc.name;
    summary["config_digest"] = sc.digest;
    summary["broadside_deg"] = sc.broadside_deg;
    summary["secure_center_deg"] = report.secure_center_deg;
    if (report.steering_weight) {
        const cdouble w = *report.steering_weight;
        summary["steering"] = {{"angle_deg", *sc.steering_angle_deg},
                               {"weight_re", w.real()},
                               {"weight_im", w.imag()},
                               {"magnitude", std::abs(w)},
                               {"magnitude_db", 20.0 * std::log10(std::abs(w))},
                               {"phase_deg", std::arg(w) * 180.0 / std::numbers::pi}};
    } else {
        summary["steering"] = nullptr;
    }
    summary["formats"] = json::array();

    for (const auto& fmt : sc.formats) {
        const constellation_map map = build_constellation(fmt);
        format_report fr;
        fr.format = fmt;
        fr.sweep = sweep_ber(antenna, sc.schedule, map, channel, grid, sc.n_symbols, opts);
        fr.sweep.config_digest = sc.digest;
        fr.region = extract_secure_region(fr.sweep, report.secure_center_deg, sc.secure_threshold_ber);

        const std::string base = sc.name + "_" + fmt.name();
        const auto sweep_path = sc.output_dir / (base + "_sweep.csv");
        files.emplace_back(sweep_path, format_sweep_csv(fr.sweep));

        json fj;
        fj["format"] = fmt.name();
        fj["sweep_csv"] = sweep_path.filename().string();
        fj["secure_region"] = region_json(fr.region);
        fj["constellations"] = json::array();

        if (!sc.constellation_angles_deg.empty()) {
            const sweep_workload w = prepare_sweep(antenna, sc.schedule, map, channel, grid, sc.n_symbols, opts);
            for (std::size_t j = 0; j < sc.constellation_angles_deg.size(); ++j) {
                const double theta = sc.constellation_angles_deg[j];
                channel_config ch = channel;
                ch.noise_seed = angle_subseed(channel.noise_seed, 1'000'000 + j);
                const received_stream rx = transmit(antenna, w.states, w.symbols, theta, ch);
                const cdouble cal = calibration_gain(antenna, theta, sc.calibration);
                const received_stream eq = cal == cdouble{} ? rx : equalize(rx, cal);
                const auto cpath = sc.output_dir / (base + "_constellation_" + angle_tag(theta) + ".csv");
                files.emplace_back(cpath, format_constellation_csv(eq));
                fj["constellations"].push_back({{"angle_deg", theta},
                                                {"csv", cpath.filename().string()},
                                                {"distinct_points", count_distinct_points(eq.symbols)}});
            }
        }
        summary["formats"].push_back(fj);
        report.formats.push_back(std::move(fr));
    }
    const auto summary_path = sc.output_dir / (sc.name + "_summary.json");
    files.emplace_back(summary_path, summary.dump(2) + "\n");

    write_files_atomically(files);
    for (const auto& f : files) {
        report.written.push_back(f.first);
    }
    return report;
}

std::string format_catalog_json(const threshold_catalog& catalog)
{
    json entries = json::array();
    for (const auto& e : catalog.entries) {
        entries.push_back({{"format", e.format.name()},
                           {"scheme", e.format.scheme == modulation_scheme::psk ? "psk" : "qam"},
                           {"order", e.format.order},
                           {"phase_threshold_deg", threshold_value(e.phase_deg)},
                           {"amp_threshold_db", threshold_value(e.amp_db)},
                           {"amp_up_threshold_db", threshold_value(e.amp_up_db)},
                           {"amp_down_threshold_db", threshold_value(e.amp_down_db)}});
    }
    json doc;
    doc["entries"] = entries;
    return doc.dump(2) + "\n";
}

void run_threshold_catalog(std::span<const modulation_format> formats, const std::filesystem::path& out_path)
{
    const threshold_catalog catalog = build_threshold_catalog(formats);
    write_files_atomically({{out_path, format_catalog_json(catalog)}});
}

} // namespace dynmod
