// SPDX-License-Identifier: Apache-2.0
#include "dynmod/error.hpp"
#include "dynmod/modem.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

using namespace dynmod;

namespace {

std::vector<modulation_format> all_formats()
{
    return {{modulation_scheme::psk, 2},  {modulation_scheme::psk, 4},   {modulation_scheme::psk, 8},
            {modulation_scheme::psk, 16}, {modulation_scheme::qam, 4},   {modulation_scheme::qam, 16},
            {modulation_scheme::qam, 64}, {modulation_scheme::qam, 256}, {modulation_scheme::qam, 1024}};
}

int hamming(std::uint32_t a, std::uint32_t b) { return oracle::popcount(a ^ b); }

} // namespace

TEST_CASE("prbs matches an explicit shift-register model")
{
    for (int order = 2; order <= 20; ++order) {
        const std::uint32_t taps = prbs_generator::default_taps(order);
        oracle::array_lfsr ref;
        ref.stage.assign(static_cast<std::size_t>(order), 0);
        const std::uint32_t seed = 1u | (0x5A5A5u & ((1u << order) - 1u));
        for (int i = 0; i < order; ++i) {
            ref.stage[static_cast<std::size_t>(i)] = static_cast<int>((seed >> i) & 1u);
        }
        for (int i = 0; i < order; ++i) {
            if ((taps >> i) & 1u) {
                ref.taps.push_back(i + 1);
            }
        }
        REQUIRE(ref.taps.size() >= 2);
        CHECK(ref.taps.back() == order);
        prbs_generator gen(order, seed);
        bool same = true;
        for (int k = 0; k < 5000; ++k) {
            same = same && gen.next() == ref.step();
        }
        CHECK_MESSAGE(same, "order " << order);
    }
}

TEST_CASE("prbs is maximal length")
{
    for (int order = 2; order <= 20; ++order) {
        prbs_generator gen(order, 1);
        const std::uint32_t start = gen.state();
        std::uint64_t period = 0;
        do {
            gen.next();
            ++period;
        } while (gen.state() != start && period <= (1ull << order));
        CHECK_MESSAGE(period == (1ull << order) - 1, "order " << order);
    }
}

TEST_CASE("prbs balance over one period")
{
    const int order = 11;
    const auto bits = prbs_bits(order, 1, (1u << order) - 1u);
    std::size_t ones = 0;
    for (auto b : bits) {
        ones += b;
    }
    CHECK(ones == (1u << (order - 1)));
}

TEST_CASE("prbs rejects bad parameters")
{
    CHECK_THROWS_AS(prbs_generator(1, 1), invalid_parameter);
    CHECK_THROWS_AS(prbs_generator(32, 1), invalid_parameter);
    CHECK_THROWS_AS(prbs_generator(7, 0), invalid_parameter);
    CHECK_THROWS_AS(prbs_generator(7, 128), invalid_parameter);
    CHECK_NOTHROW(prbs_generator(7, 127));
}

TEST_CASE("format names parse back")
{
    for (const auto& f : all_formats()) {
        CHECK(parse_format(f.name()) == f);
    }
    CHECK(parse_format("8PSK") == modulation_format{modulation_scheme::psk, 8});
    CHECK(parse_format("16-QAM") == modulation_format{modulation_scheme::qam, 16});
    CHECK(parse_format("qam_64") == modulation_format{modulation_scheme::qam, 64});
    CHECK(parse_format("QPSK") == modulation_format{modulation_scheme::psk, 4});
    CHECK_THROWS_AS(parse_format("qam32"), invalid_parameter);
    CHECK_THROWS_AS(parse_format("psk3"), invalid_parameter);
    CHECK_THROWS_AS(parse_format("fsk"), invalid_parameter);
    CHECK_THROWS_AS(parse_format(""), invalid_parameter);
    try {
        parse_format("qam8");
    } catch (const invalid_parameter& e) {
        CHECK(std::string(e.what()).find("supported") != std::string::npos);
    }
    const auto list = parse_format_list("bpsk,qam16,psk8");
    CHECK(list.size() == 3);
    CHECK_THROWS_AS(parse_format_list(","), invalid_parameter);
}

TEST_CASE("constellations are unit energy with distinct points and labels")
{
    for (const auto& f : all_formats()) {
        const auto map = build_constellation(f);
        const auto pts = map.points();
        REQUIRE(pts.size() == static_cast<std::size_t>(f.order));
        CHECK(map.bits_per_symbol() == std::countr_zero(static_cast<unsigned>(f.order)));
        double e = 0.0;
        for (const auto& p : pts) {
            e += std::norm(p);
        }
        CHECK(e / static_cast<double>(pts.size()) == doctest::Approx(1.0).epsilon(1e-12));
        std::set<std::uint32_t> labels(map.labels().begin(), map.labels().end());
        CHECK(labels.size() == pts.size());
        CHECK(*labels.rbegin() == static_cast<std::uint32_t>(f.order - 1));
        for (std::size_t p = 0; p < pts.size(); ++p) {
            CHECK(map.index_of_label(map.labels()[p]) == p);
        }
    }
}

TEST_CASE("gray property: nearest neighbours differ in one bit")
{
    for (const auto& f : all_formats()) {
        const auto map = build_constellation(f);
        const auto pts = map.points();
        double dmin = INFINITY;
        for (std::size_t a = 0; a < pts.size(); ++a) {
            for (std::size_t b = a + 1; b < pts.size(); ++b) {
                dmin = std::min(dmin, std::abs(pts[a] - pts[b]));
            }
        }
        bool ok = true;
        for (std::size_t a = 0; a < pts.size(); ++a) {
            for (std::size_t b = a + 1; b < pts.size(); ++b) {
                if (std::abs(pts[a] - pts[b]) < dmin * (1.0 + 1e-9)) {
                    ok = ok && hamming(map.labels()[a], map.labels()[b]) == 1;
                }
            }
        }
        CHECK_MESSAGE(ok, f.name());
    }
}

TEST_CASE("reference point placement")
{
    const auto bpsk = build_constellation(modulation_scheme::psk, 2);
    CHECK(bpsk.points()[0] == cdouble(1.0, 0.0));
    CHECK(bpsk.points()[1] == cdouble(-1.0, 0.0));

    const auto qpsk = build_constellation(modulation_scheme::psk, 4);
    const cdouble p00 = qpsk.points()[qpsk.index_of_label(0)];
    CHECK(p00.real() == doctest::Approx(std::sqrt(0.5)));
    CHECK(p00.imag() == doctest::Approx(std::sqrt(0.5)));

    const auto q16 = build_constellation(modulation_scheme::qam, 16);
    CHECK(q16.levels_per_axis() == 4);
    CHECK(q16.scale() == doctest::Approx(1.0 / std::sqrt(10.0)));
    const cdouble corner = q16.points()[q16.index_of_label(0)];
    CHECK(corner.real() == doctest::Approx(-3.0 / std::sqrt(10.0)));
    CHECK(corner.imag() == doctest::Approx(-3.0 / std::sqrt(10.0)));
}

TEST_CASE("fast demapper agrees with brute-force nearest point")
{
    std::mt19937_64 rng(2024);
    for (const auto& f : all_formats()) {
        const auto map = build_constellation(f);
        std::normal_distribution<double> g(0.0, 0.8);
        std::size_t mismatch = 0;
        for (int i = 0; i < 10000; ++i) {
            const cdouble r(g(rng), g(rng));
            if (map.decide(r) != oracle::nearest_point(map.points(), r)) {
                ++mismatch;
            }
        }
        CHECK_MESSAGE(mismatch == 0, f.name());
    }
}

TEST_CASE("psk demapper depends on phase only")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
    std::uniform_real_distribution<double> mag(1e-3, 1e3);
    for (int m : {2, 4, 8, 32}) {
        const auto map = build_constellation(modulation_scheme::psk, m);
        bool ok = true;
        for (int i = 0; i < 5000; ++i) {
            const cdouble r = std::polar(mag(rng), ang(rng));
            ok = ok && map.decide(r) == oracle::nearest_phase(map.points(), r);
            ok = ok && map.decide(r) == map.decide(r * 1e-4);
        }
        CHECK(ok);
    }
}

TEST_CASE("qam decision boundaries tie to the lower index")
{
    const auto map = build_constellation(modulation_scheme::qam, 16);
    const double s = map.scale();
    // Midway between the two lowest levels on both axes.
    CHECK(map.decide(cdouble(-2.0 * s, -2.0 * s)) == 0);
    CHECK(map.decide(cdouble(0.0, 0.0)) == 1 * 4 + 1);
}

TEST_CASE("map and demap round trip")
{
    for (const auto& f : all_formats()) {
        const auto map = build_constellation(f);
        const auto bits = prbs_bits(15, 77, static_cast<std::size_t>(map.bits_per_symbol()) * 4000);
        const auto sym = map_bits(map, bits);
        CHECK(sym.size() == 4000);
        CHECK(demap_symbols(map, sym) == bits);
    }
}

TEST_CASE("map_bits and count_bit_errors error paths")
{
    const auto map = build_constellation(modulation_scheme::qam, 16);
    const bit_stream odd{1, 0, 1};
    CHECK_THROWS_AS(map_bits(map, odd), length_mismatch);
    const bit_stream bad{0, 2, 0, 1};
    CHECK_THROWS_AS(map_bits(map, bad), invalid_parameter);
    const bit_stream a{0, 1, 1, 0};
    const bit_stream b{0, 1, 0, 0};
    const bit_stream c{0, 1};
    CHECK(count_bit_errors(a, b).errors == 1);
    CHECK(count_bit_errors(a, b).ber == doctest::Approx(0.25));
    CHECK_THROWS_AS(count_bit_errors(a, c), length_mismatch);
    CHECK(count_bit_errors({}, {}).ber == 0.0);
}

TEST_CASE("unsupported orders are rejected")
{
    CHECK_THROWS_AS(constellation_map(modulation_scheme::qam, 8), invalid_parameter);
    CHECK_THROWS_AS(constellation_map(modulation_scheme::qam, 32), invalid_parameter);
    CHECK_THROWS_AS(constellation_map(modulation_scheme::psk, 6), invalid_parameter);
    CHECK_THROWS_AS(constellation_map(modulation_scheme::psk, 1), invalid_parameter);
}
