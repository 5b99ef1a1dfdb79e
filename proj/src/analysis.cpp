// SPDX-License-Identifier: Apache-2.0
#include "dynmod/analysis.hpp"

#include "dynmod/error.hpp"
#include "dynmod/io.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dynmod {

namespace {

constexpr double rad2deg = 180.0 / std::numbers::pi;
constexpr const char* sweep_header = "angle_deg,ber,mag_error_rms,phase_error_deg,decodable";
constexpr const char* constellation_header = "i,q,state";

} // namespace

cdouble calibration_gain(const dynamic_antenna& antenna, double theta_deg, calibration_mode mode)
{
    const cdouble g1 = eval_gain(antenna, state_id::state1, theta_deg);
    if (mode == calibration_mode::state1) {
        return g1;
    }
    return 0.5 * (g1 + eval_gain(antenna, state_id::state2, theta_deg));
}

received_stream equalize(const received_stream& rx, cdouble gain)
{
    if (gain == cdouble{}) {
        throw invalid_parameter("cannot equalize with a zero gain");
    }
    received_stream out;
    out.states = rx.states;
    out.symbols.resize(rx.symbols.size());
    for (std::size_t k = 0; k < rx.symbols.size(); ++k) {
        out.symbols[k] = rx.symbols[k] / gain;
    }
    return out;
}

magnitude_phase_error mag_phase_error(std::span<const cdouble> received, std::span<const cdouble> reference)
{
    if (received.size() != reference.size()) {
        throw length_mismatch("received and reference streams differ in length");
    }
    magnitude_phase_error e;
    if (received.empty()) {
        return e;
    }
    double sq = 0.0;
    double ph = 0.0;
    for (std::size_t k = 0; k < received.size(); ++k) {
        if (reference[k] == cdouble{}) {
            throw invalid_parameter("reference symbol " + std::to_string(k) + " is zero");
        }
        const double dm = std::abs(received[k]) - std::abs(reference[k]);
        sq += dm * dm;
        ph += std::abs(std::remainder(std::arg(received[k]) - std::arg(reference[k]), 2.0 * std::numbers::pi));
    }
    const auto n = static_cast<double>(received.size());
    e.mag_error_rms = std::sqrt(sq / n);
    e.phase_error_deg = ph / n * rad2deg;
    return e;
}

// ---------------------------------------------------------------------------
// Sweep plumbing shared by both kernels

sweep_workload prepare_sweep(const dynamic_antenna& antenna, const switch_schedule& schedule,
                             const constellation_map& map, const channel_config& channel, const angle_grid& grid,
                             std::size_t n_symbols, const sweep_options& options)
{
    if (!antenna.grid().contains(grid.front()) || !antenna.grid().contains(grid.back())) {
        throw out_of_range("sweep span [" + io::format_double(grid.front()) + ", " + io::format_double(grid.back()) +
                           "] exceeds the pattern span [" + io::format_double(antenna.grid().front()) + ", " +
                           io::format_double(antenna.grid().back()) + "]");
    }
    if (channel.snr_db && !antenna.grid().contains(channel.reference_angle_deg)) {
        throw out_of_range("SNR reference angle outside the pattern span");
    }
    sweep_workload w;
    w.antenna = &antenna;
    w.map = &map;
    w.channel = channel;
    w.options = options;
    w.bits = prbs_bits(options.prbs_order, options.prbs_seed,
                       n_symbols * static_cast<std::size_t>(map.bits_per_symbol()));
    w.symbols = map_bits(map, w.bits);
    w.states = expand_schedule(schedule, n_symbols);
    return w;
}

std::uint64_t angle_subseed(std::uint64_t scenario_seed, std::size_t index)
{
    // splitmix64 finalizer
    std::uint64_t z = scenario_seed + 0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(index) + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

angle_outcome evaluate_angle(const sweep_workload& w, double theta_deg, std::size_t index)
{
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    const angle_outcome undecodable{0.5, nan, nan, false};

    channel_config ch = w.channel;
    ch.noise_seed = angle_subseed(w.channel.noise_seed, index);
    const received_stream rx = transmit(*w.antenna, w.states, w.symbols, theta_deg, ch);

    const cdouble cal = calibration_gain(*w.antenna, theta_deg, w.options.calibration);
    if (cal == cdouble{}) {
        return undecodable;
    }
    symbol_stream eq(rx.symbols.size());
    for (std::size_t k = 0; k < eq.size(); ++k) {
        eq[k] = rx.symbols[k] / cal;
    }
    const bit_stream decided = demap_symbols(*w.map, eq);
    const double ber = count_bit_errors(w.bits, decided).ber;
    if (ber > w.options.undecodable_ber) {
        return undecodable;
    }
    const auto mpe = mag_phase_error(eq, w.symbols);
    return {ber, mpe.mag_error_rms, mpe.phase_error_deg, true};
}

// ---------------------------------------------------------------------------
// Secure region

secure_region extract_secure_region(const angle_sweep_result& result, double center_deg, double threshold)
{
    if (result.size() == 0 || !(center_deg >= result.angles_deg.front() && center_deg <= result.angles_deg.back())) {
        throw out_of_range("secure-region center " + io::format_double(center_deg) + " outside the sweep span");
    }
    secure_region region;
    region.center_deg = center_deg;
    region.lower_deg = center_deg;
    region.upper_deg = center_deg;
    region.threshold_ber = threshold;

    const auto& a = result.angles_deg;
    const auto& ber = result.ber;
    const auto it = std::lower_bound(a.begin(), a.end(), center_deg);
    std::size_t hi = static_cast<std::size_t>(it - a.begin());
    std::size_t lo = (a[hi] == center_deg) ? hi : hi - 1;
    if (!(ber[lo] < threshold) || !(ber[hi] < threshold)) {
        return region;
    }
    while (lo > 0 && ber[lo - 1] < threshold) {
        --lo;
    }
    while (hi + 1 < a.size() && ber[hi + 1] < threshold) {
        ++hi;
    }
    region.lower_deg = a[lo];
    region.upper_deg = a[hi];
    region.width_deg = region.upper_deg - region.lower_deg;
    return region;
}

// ---------------------------------------------------------------------------
// CSV artifacts

std::string format_sweep_csv(const angle_sweep_result& r)
{
    std::string out = sweep_header;
    out += '\n';
    for (std::size_t i = 0; i < r.size(); ++i) {
        out += io::format_double(r.angles_deg[i]) + ',' + io::format_double(r.ber[i]) + ',' +
               io::format_double(r.mag_error_rms[i]) + ',' + io::format_double(r.phase_error_deg[i]) + ',' +
               (r.decodable[i] ? '1' : '0') + '\n';
    }
    return out;
}

angle_sweep_result parse_sweep_csv(const std::string& text, const std::string& source)
{
    angle_sweep_result r;
    bool have_header = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) {
            eol = text.size();
        }
        const auto line = io::trim(std::string_view(text).substr(pos, eol - pos));
        pos = eol + 1;
        ++line_no;
        if (line.empty() || line.front() == '#') {
            continue;
        }
        if (!have_header) {
            if (line != sweep_header) {
                throw parse_error(source, line_no, std::string("expected header '") + sweep_header + "'");
            }
            have_header = true;
            continue;
        }
        const auto f = io::split(line, ',');
        if (f.size() != 5) {
            throw parse_error(source, line_no, "expected 5 columns, found " + std::to_string(f.size()));
        }
        double v[4];
        for (std::size_t c = 0; c < 4; ++c) {
            if (!io::parse_double(f[c], v[c])) {
                throw parse_error(source, line_no, "malformed number '" + std::string(f[c]) + "'");
            }
        }
        const auto flag = io::trim(f[4]);
        if (flag != "0" && flag != "1") {
            throw parse_error(source, line_no, "decodable must be 0 or 1");
        }
        if (!std::isfinite(v[0]) || !(v[1] >= 0.0 && v[1] <= 0.5)) {
            throw parse_error(source, line_no, "angle must be finite and ber within [0, 0.5]");
        }
        if (!r.angles_deg.empty() && !(v[0] > r.angles_deg.back())) {
            throw parse_error(source, line_no, "angles must be strictly increasing");
        }
        r.angles_deg.push_back(v[0]);
        r.ber.push_back(v[1]);
        r.mag_error_rms.push_back(v[2]);
        r.phase_error_deg.push_back(v[3]);
        r.decodable.push_back(flag == "1" ? 1 : 0);
    }
    if (!have_header) {
        throw parse_error(source, line_no, "missing header");
    }
    return r;
}

void export_sweep(const angle_sweep_result& result, const std::filesystem::path& path)
{
    io::write_text_file(path, format_sweep_csv(result));
}

angle_sweep_result load_sweep_csv(const std::filesystem::path& path)
{
    return parse_sweep_csv(io::read_text_file(path), path.string());
}

std::string format_constellation_csv(const received_stream& rx)
{
    if (rx.symbols.size() != rx.states.size()) {
        throw length_mismatch("received stream has mismatched symbol and state counts");
    }
    std::string out = constellation_header;
    out += '\n';
    for (std::size_t k = 0; k < rx.symbols.size(); ++k) {
        out += io::format_double(rx.symbols[k].real()) + ',' + io::format_double(rx.symbols[k].imag()) + ',' +
               std::to_string(static_cast<int>(rx.states[k])) + '\n';
    }
    return out;
}

void export_constellation(const received_stream& rx, const std::filesystem::path& path)
{
    io::write_text_file(path, format_constellation_csv(rx));
}

std::size_t count_distinct_points(std::span<const cdouble> points, double tol)
{
    std::vector<cdouble> sorted(points.begin(), points.end());
    std::sort(sorted.begin(), sorted.end(), [](cdouble a, cdouble b) {
        return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
    });
    std::vector<cdouble> distinct;
    for (const auto& p : sorted) {
        bool seen = false;
        for (auto d = distinct.rbegin(); d != distinct.rend() && p.real() - d->real() <= tol; ++d) {
            if (std::abs(d->imag() - p.imag()) <= tol) {
                seen = true;
                break;
            }
        }
        if (!seen) {
            distinct.push_back(p);
        }
    }
    return distinct.size();
}

} // namespace dynmod
