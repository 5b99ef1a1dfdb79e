// SPDX-License-Identifier: Apache-2.0
#include "dynmod/dynamics.hpp"
#include "dynmod/error.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace dynmod;

namespace {

constexpr double deg = std::numbers::pi / 180.0;

dynamic_antenna linear_antenna() { return synth_linear_phase_divergence(1.111, 90.0, angle_grid::uniform(0, 180, 0.5)); }

symbol_stream qpsk_symbols(std::size_t n)
{
    const auto map = build_constellation(modulation_scheme::psk, 4);
    return map_bits(map, prbs_bits(11, 1, 2 * n));
}

} // namespace

TEST_CASE("schedule expansion")
{
    const auto alt = expand_schedule(switch_schedule::alternating(), 6);
    CHECK(alt == std::vector<state_id>{state_id::state1, state_id::state2, state_id::state1, state_id::state2,
                                       state_id::state1, state_id::state2});
    const auto dwell = expand_schedule(switch_schedule::alternating(3), 7);
    CHECK(dwell[2] == state_id::state1);
    CHECK(dwell[3] == state_id::state2);
    CHECK(dwell[6] == state_id::state1);

    const auto fixed = expand_schedule(switch_schedule::fixed_state(state_id::state2), 5);
    for (auto s : fixed) {
        CHECK(s == state_id::state2);
    }
    CHECK_THROWS_AS(expand_schedule(switch_schedule::alternating(0), 4), invalid_parameter);
    CHECK(expand_schedule(switch_schedule::alternating(), 0).empty());
}

TEST_CASE("random schedule is reproducible and balanced")
{
    const auto a = expand_schedule(switch_schedule::random(42), 100000);
    const auto b = expand_schedule(switch_schedule::random(42), 100000);
    const auto c = expand_schedule(switch_schedule::random(43), 100000);
    CHECK(a == b);
    CHECK(a != c);
    std::size_t n2 = 0;
    for (auto s : a) {
        n2 += s == state_id::state2;
    }
    CHECK(std::abs(static_cast<double>(n2) / 1e5 - 0.5) < 0.01);

    const auto d = expand_schedule(switch_schedule::random(9, 4), 4000);
    for (std::size_t k = 0; k < d.size(); ++k) {
        CHECK(d[k] == d[k - k % 4]);
    }
}

TEST_CASE("noise-free transmit applies the per-state gain")
{
    const auto ant = linear_antenna();
    const auto sym = qpsk_symbols(100);
    const auto rx = transmit(ant, switch_schedule::alternating(), sym, 120.0, {});
    const cdouble g1 = eval_gain(ant, state_id::state1, 120.0);
    const cdouble g2 = eval_gain(ant, state_id::state2, 120.0);
    for (std::size_t k = 0; k < sym.size(); ++k) {
        const cdouble g = k % 2 == 0 ? g1 : g2;
        CHECK(rx.symbols[k] == g * sym[k]);
    }
    CHECK(std::arg(g1 / g2) / deg == doctest::Approx(33.33));
}

TEST_CASE("transmit rejects mismatched lengths")
{
    const auto ant = linear_antenna();
    const auto sym = qpsk_symbols(10);
    const std::vector<state_id> st(9, state_id::state1);
    CHECK_THROWS_AS(transmit(ant, st, sym, 90.0, {}), length_mismatch);
}

TEST_CASE("static direction yields identical streams for every policy")
{
    const auto ant = linear_antenna();
    const auto sym = qpsk_symbols(1000);
    const auto fixed = transmit(ant, switch_schedule::fixed_state(state_id::state1), sym, 90.0, {});
    for (const auto& sched : {switch_schedule::alternating(), switch_schedule::random(3), switch_schedule::alternating(7)}) {
        CHECK(transmit(ant, sched, sym, 90.0, {}).symbols == fixed.symbols);
    }
}

TEST_CASE("noise power matches the requested SNR")
{
    const auto ant = linear_antenna();
    const auto sym = qpsk_symbols(200000);
    channel_config ch;
    ch.snr_db = 10.0;
    ch.noise_seed = 11;
    ch.reference_angle_deg = 90.0;
    const auto clean = transmit(ant, switch_schedule::alternating(), sym, 90.0, {});
    const auto noisy = transmit(ant, switch_schedule::alternating(), sym, 90.0, ch);
    double ps = 0.0, pn = 0.0;
    for (std::size_t k = 0; k < sym.size(); ++k) {
        ps += std::norm(clean.symbols[k]);
        pn += std::norm(noisy.symbols[k] - clean.symbols[k]);
    }
    CHECK(10.0 * std::log10(ps / pn) == doctest::Approx(10.0).epsilon(0.005));

    const auto again = transmit(ant, switch_schedule::alternating(), sym, 90.0, ch);
    CHECK(again.symbols == noisy.symbols);
    ch.noise_seed = 12;
    CHECK(transmit(ant, switch_schedule::alternating(), sym, 90.0, ch).symbols != noisy.symbols);
}

TEST_CASE("steering weight equalizes the states at the target")
{
    const auto ant = linear_antenna();
    const cdouble w = steering_weight(ant, 120.0);
    CHECK(std::abs(w) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::arg(w) / deg == doctest::Approx(33.33).epsilon(1e-9));
    const auto steered = apply_steering(ant, w);
    CHECK(std::abs(eval_gain(steered, state_id::state2, 120.0) - eval_gain(steered, state_id::state1, 120.0)) < 1e-12);
    // A steered antenna needs no further correction.
    CHECK(std::abs(steering_weight(steered, 120.0) - 1.0) < 1e-12);
    // Broadside is no longer static once steered away from it.
    CHECK(std::abs(eval_gain(steered, state_id::state2, 90.0) - eval_gain(steered, state_id::state1, 90.0)) > 0.1);
    CHECK(steering_weight(ant, 90.0) == cdouble(1.0, 0.0));
}

TEST_CASE("steering weight reflects amplitude imbalance")
{
    const auto ant = synth_amplitude_divergence(0.25, 0.0, angle_grid::uniform(-60, 60, 1));
    const cdouble w = steering_weight(ant, 20.0);
    CHECK(20.0 * std::log10(std::abs(w)) == doctest::Approx(5.0));
    CHECK(std::abs(std::arg(w)) < 1e-12);
}

TEST_CASE("steering at a state-2 null fails")
{
    const angle_grid g({0.0, 1.0, 2.0});
    const dynamic_antenna ant(pattern_state(g, {1.0, 1.0, 1.0}, state_id::state1),
                              pattern_state(g, {1.0, 0.0, 1.0}, state_id::state2));
    CHECK_THROWS_AS(steering_weight(ant, 1.0), unsteerable_angle);
    CHECK_THROWS_AS(apply_steering(ant, cdouble{}), invalid_parameter);
    CHECK_THROWS_AS(apply_steering(ant, cdouble(INFINITY, 0.0)), invalid_parameter);
}
