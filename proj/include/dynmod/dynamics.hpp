// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "dynmod/modem.hpp"
#include "dynmod/patterns.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace dynmod {

enum class switch_policy { alternating, random_equal_probability, fixed_state };

struct switch_schedule {
    switch_policy policy = switch_policy::alternating;
    state_id fixed = state_id::state1; // fixed_state only
    int symbols_per_dwell = 1;
    std::uint64_t rng_seed = 0; // random_equal_probability only

    static switch_schedule alternating(int dwell = 1) { return {switch_policy::alternating, state_id::state1, dwell, 0}; }
    static switch_schedule fixed_state(state_id s) { return {switch_policy::fixed_state, s, 1, 0}; }
    static switch_schedule random(std::uint64_t seed, int dwell = 1)
    {
        return {switch_policy::random_equal_probability, state_id::state1, dwell, seed};
    }
};

std::vector<state_id> expand_schedule(const switch_schedule& schedule, std::size_t n_symbols);

struct channel_config {
    std::optional<double> snr_db; // nullopt: noise-free
    std::uint64_t noise_seed = 0;
    double reference_angle_deg = 0.0; // angle at which snr_db holds
};

struct received_stream {
    symbol_stream symbols;
    std::vector<state_id> states;
};

// Gains closer than this are one radiated field; switching between them is
// not modulation and the state-1 value is used for both.
inline constexpr double gain_coincidence_tol = 1e-12;

// r_k = G_{state k}(theta) * s_k + n_k.
//
// Noise is circular Gaussian with power mean|s|^2 * P_ref / 10^(snr/10),
// where P_ref is the mean of the two states' power gains at the reference
// angle.
received_stream transmit(const dynamic_antenna& antenna, std::span<const state_id> states,
                         std::span<const cdouble> symbols, double theta_deg, const channel_config& channel);

received_stream transmit(const dynamic_antenna& antenna, const switch_schedule& schedule,
                         std::span<const cdouble> symbols, double theta_deg, const channel_config& channel);

// Correction w with w * eval_gain(state2, theta0) == eval_gain(state1, theta0).
// Relative to the antenna's current weighting, so a steered antenna yields 1.
cdouble steering_weight(const dynamic_antenna& antenna, double theta0_deg);

// Replaces weight2 (does not compose with the previous one).
dynamic_antenna apply_steering(const dynamic_antenna& antenna, cdouble w);

} // namespace dynmod
