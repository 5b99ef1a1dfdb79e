// SPDX-License-Identifier: Apache-2.0
#include "dynmod/dynamics.hpp"

#include "dynmod/error.hpp"
#include "dynmod/io.hpp"

#include <cmath>
#include <random>

namespace dynmod {

std::vector<state_id> expand_schedule(const switch_schedule& schedule, std::size_t n_symbols)
{
    if (schedule.symbols_per_dwell < 1) {
        throw invalid_parameter("symbols_per_dwell must be >= 1");
    }
    const auto dwell = static_cast<std::size_t>(schedule.symbols_per_dwell);
    std::vector<state_id> out(n_symbols);
    switch (schedule.policy) {
    case switch_policy::fixed_state:
        std::fill(out.begin(), out.end(), schedule.fixed);
        break;
    case switch_policy::alternating:
        for (std::size_t k = 0; k < n_symbols; ++k) {
            out[k] = ((k / dwell) % 2 == 0) ? state_id::state1 : state_id::state2;
        }
        break;
    case switch_policy::random_equal_probability: {
        std::mt19937_64 rng(schedule.rng_seed);
        state_id current = state_id::state1;
        for (std::size_t k = 0; k < n_symbols; ++k) {
            if (k % dwell == 0) {
                current = (rng() >> 63) == 0 ? state_id::state1 : state_id::state2;
            }
            out[k] = current;
        }
        break;
    }
    }
    return out;
}

received_stream transmit(const dynamic_antenna& antenna, std::span<const state_id> states,
                         std::span<const cdouble> symbols, double theta_deg, const channel_config& channel)
{
    if (states.size() != symbols.size()) {
        throw length_mismatch("state sequence and symbol stream differ in length");
    }
    const cdouble g1 = eval_gain(antenna, state_id::state1, theta_deg);
    cdouble g2 = eval_gain(antenna, state_id::state2, theta_deg);
    if (std::abs(g2 - g1) <= gain_coincidence_tol) {
        g2 = g1;
    }

    received_stream rx;
    rx.symbols.resize(symbols.size());
    rx.states.assign(states.begin(), states.end());
    for (std::size_t k = 0; k < symbols.size(); ++k) {
        rx.symbols[k] = (states[k] == state_id::state1 ? g1 : g2) * symbols[k];
    }

    if (channel.snr_db && !symbols.empty()) {
        if (!std::isfinite(*channel.snr_db)) {
            throw invalid_parameter("snr_db must be finite");
        }
        double es = 0.0;
        for (const auto& s : symbols) {
            es += std::norm(s);
        }
        es /= static_cast<double>(symbols.size());
        const double p_ref = 0.5 * (std::norm(eval_gain(antenna, state_id::state1, channel.reference_angle_deg)) +
                                    std::norm(eval_gain(antenna, state_id::state2, channel.reference_angle_deg)));
        const double noise_power = es * p_ref / std::pow(10.0, *channel.snr_db / 10.0);
        std::mt19937_64 rng(channel.noise_seed);
        std::normal_distribution<double> gauss(0.0, std::sqrt(0.5 * noise_power));
        for (auto& r : rx.symbols) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            r += cdouble(re, im);
        }
    }
    return rx;
}

received_stream transmit(const dynamic_antenna& antenna, const switch_schedule& schedule,
                         std::span<const cdouble> symbols, double theta_deg, const channel_config& channel)
{
    const auto states = expand_schedule(schedule, symbols.size());
    return transmit(antenna, states, symbols, theta_deg, channel);
}

cdouble steering_weight(const dynamic_antenna& antenna, double theta0_deg)
{
    const cdouble g1 = eval_gain(antenna, state_id::state1, theta0_deg);
    const cdouble g2 = eval_gain(antenna, state_id::state2, theta0_deg);
    if (std::abs(g2) <= gain_coincidence_tol) {
        throw unsteerable_angle("state 2 has a null at " + io::format_double(theta0_deg) + " deg; cannot steer there");
    }
    if (g1 == g2) {
        return {1.0, 0.0};
    }
    return g1 / g2;
}

dynamic_antenna apply_steering(const dynamic_antenna& antenna, cdouble w)
{
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag()) || w == cdouble{}) {
        throw invalid_parameter("steering weight must be finite and nonzero");
    }
    return antenna.with_weight2(w);
}

} // namespace dynmod
