// SPDX-License-Identifier: Apache-2.0
#include "dynmod/analysis.hpp"

#include <cmath>
#include <functional>
#include <numbers>

namespace dynmod {

namespace {

constexpr double deg2rad = std::numbers::pi / 180.0;

// Largest x in [0, limit] with pred(x) true, given pred is true on [0, t]
// and false above t. Coarse scan brackets t, bisection narrows it to
// `resolution`; returns `unbounded` when pred holds on the whole range.
double search_threshold(const std::function<bool(double)>& pred, double limit, double coarse, double resolution)
{
    double pass = 0.0;
    for (double x = coarse; x <= limit + 1e-12; x += coarse) {
        if (pred(x)) {
            pass = x;
            continue;
        }
        double lo = pass;
        double hi = x;
        while (hi - lo > resolution) {
            const double mid = 0.5 * (lo + hi);
            (pred(mid) ? lo : hi) = mid;
        }
        return lo;
    }
    return unbounded;
}

constexpr double phase_limit_deg = 180.0;
constexpr double amp_limit_db = 60.0;
constexpr double coarse_step = 0.25;
constexpr double bisection_resolution = 1e-4;

} // namespace

bool distortion_error_free(const constellation_map& map, cdouble z)
{
    const auto pts = map.points();
    for (std::size_t p = 0; p < pts.size(); ++p) {
        if (map.decide(z * pts[p]) != p) {
            return false;
        }
    }
    return true;
}

threshold_entry format_thresholds(const modulation_format& format)
{
    const constellation_map map = build_constellation(format);
    threshold_entry e;
    e.format = format;

    e.phase_deg = search_threshold(
        [&](double deg) {
            return distortion_error_free(map, std::polar(1.0, deg * deg2rad)) &&
                   distortion_error_free(map, std::polar(1.0, -deg * deg2rad));
        },
        phase_limit_deg, coarse_step, bisection_resolution);

    e.amp_up_db = search_threshold(
        [&](double db) { return distortion_error_free(map, std::pow(10.0, db / 20.0)); }, amp_limit_db, coarse_step,
        bisection_resolution);
    e.amp_down_db = search_threshold(
        [&](double db) { return distortion_error_free(map, std::pow(10.0, -db / 20.0)); }, amp_limit_db,
        coarse_step, bisection_resolution);
    e.amp_db = std::min(e.amp_up_db, e.amp_down_db);
    return e;
}

threshold_catalog build_threshold_catalog(std::span<const modulation_format> formats)
{
    threshold_catalog c;
    c.entries.reserve(formats.size());
    for (const auto& f : formats) {
        c.entries.push_back(format_thresholds(f));
    }
    return c;
}

} // namespace dynmod
