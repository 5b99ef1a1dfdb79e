// SPDX-License-Identifier: Apache-2.0
#include "dynmod/analysis.hpp"

namespace dynmod {

angle_sweep_result sweep_ber_serial(const dynamic_antenna& antenna, const switch_schedule& schedule,
                                    const constellation_map& map, const channel_config& channel,
                                    const angle_grid& grid, std::size_t n_symbols, const sweep_options& options)
{
    const sweep_workload w = prepare_sweep(antenna, schedule, map, channel, grid, n_symbols, options);
    const std::size_t n = grid.size();
    angle_sweep_result r;
    r.angles_deg.assign(grid.angles().begin(), grid.angles().end());
    r.ber.resize(n);
    r.mag_error_rms.resize(n);
    r.phase_error_deg.resize(n);
    r.decodable.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const angle_outcome o = evaluate_angle(w, grid[i], i);
        r.ber[i] = o.ber;
        r.mag_error_rms[i] = o.mag_error_rms;
        r.phase_error_deg[i] = o.phase_error_deg;
        r.decodable[i] = o.decodable ? 1 : 0;
    }
    return r;
}

} // namespace dynmod
