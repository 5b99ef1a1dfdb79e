// SPDX-License-Identifier: Apache-2.0
#include "dynmod/analysis.hpp"

#include <exception>

#include <omp.h>

namespace dynmod {

angle_sweep_result sweep_ber(const dynamic_antenna& antenna, const switch_schedule& schedule,
                             const constellation_map& map, const channel_config& channel, const angle_grid& grid,
                             std::size_t n_symbols, const sweep_options& options)
{
    const sweep_workload w = prepare_sweep(antenna, schedule, map, channel, grid, n_symbols, options);
    const auto n = static_cast<long>(grid.size());
    angle_sweep_result r;
    r.angles_deg.assign(grid.angles().begin(), grid.angles().end());
    r.ber.resize(grid.size());
    r.mag_error_rms.resize(grid.size());
    r.phase_error_deg.resize(grid.size());
    r.decodable.resize(grid.size());

    const int threads = options.threads > 0 ? options.threads : omp_get_max_threads();
    std::exception_ptr failure;

    // Each iteration writes only its own slot; noise seeds depend on the
    // index, not the thread, so the result matches the serial kernel.
    #pragma omp parallel for schedule(dynamic, 4) num_threads(threads)
    for (long i = 0; i < n; ++i) {
        try {
            const auto idx = static_cast<std::size_t>(i);
            const angle_outcome o = evaluate_angle(w, grid[idx], idx);
            r.ber[idx] = o.ber;
            r.mag_error_rms[idx] = o.mag_error_rms;
            r.phase_error_deg[idx] = o.phase_error_deg;
            r.decodable[idx] = o.decodable ? 1 : 0;
        } catch (...) {
            #pragma omp critical(dynmod_sweep_failure)
            if (!failure) {
                failure = std::current_exception();
            }
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return r;
}

} // namespace dynmod
