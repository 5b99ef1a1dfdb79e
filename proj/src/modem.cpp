// SPDX-License-Identifier: Apache-2.0
#include "dynmod/modem.hpp"

#include "dynmod/error.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <numbers>

namespace dynmod {

// ---------------------------------------------------------------------------
// PRBS

namespace {

// Maximal-length feedback polynomials, listed as tap stages (XAPP052 table).
// The unit tests check the full 2^n - 1 period for orders up to 20.
struct tap_entry {
    int order;
    int taps[4];
};

constexpr tap_entry tap_table[] = {
    {2, {2, 1, 0, 0}},      {3, {3, 2, 0, 0}},      {4, {4, 3, 0, 0}},      {5, {5, 3, 0, 0}},
    {6, {6, 5, 0, 0}},      {7, {7, 6, 0, 0}},      {8, {8, 6, 5, 4}},      {9, {9, 5, 0, 0}},
    {10, {10, 7, 0, 0}},    {11, {11, 9, 0, 0}},    {12, {12, 6, 4, 1}},    {13, {13, 4, 3, 1}},
    {14, {14, 5, 3, 1}},    {15, {15, 14, 0, 0}},   {16, {16, 15, 13, 4}},  {17, {17, 14, 0, 0}},
    {18, {18, 11, 0, 0}},   {19, {19, 6, 2, 1}},    {20, {20, 17, 0, 0}},   {21, {21, 19, 0, 0}},
    {22, {22, 21, 0, 0}},   {23, {23, 18, 0, 0}},   {24, {24, 23, 22, 17}}, {25, {25, 22, 0, 0}},
    {26, {26, 6, 2, 1}},    {27, {27, 5, 2, 1}},    {28, {28, 25, 0, 0}},   {29, {29, 27, 0, 0}},
    {30, {30, 6, 4, 1}},    {31, {31, 28, 0, 0}},
};

} // namespace

std::uint32_t prbs_generator::default_taps(int order)
{
    for (const auto& e : tap_table) {
        if (e.order == order) {
            std::uint32_t mask = 0;
            for (int t : e.taps) {
                if (t > 0) {
                    mask |= 1u << (t - 1);
                }
            }
            return mask;
        }
    }
    throw invalid_parameter("PRBS order must be in 2..31, got " + std::to_string(order));
}

prbs_generator::prbs_generator(int order, std::uint32_t seed)
    : order_(order), state_(seed), taps_(default_taps(order)), mask_(static_cast<std::uint32_t>((1ull << order) - 1))
{
    if (seed == 0) {
        throw invalid_parameter("PRBS seed must be nonzero");
    }
    if ((seed & ~mask_) != 0) {
        throw invalid_parameter("PRBS seed " + std::to_string(seed) + " does not fit in " +
                                std::to_string(order) + " bits");
    }
}

std::uint8_t prbs_generator::next()
{
    const auto out = static_cast<std::uint8_t>((state_ >> (order_ - 1)) & 1u);
    const auto fb = static_cast<std::uint32_t>(std::popcount(state_ & taps_) & 1);
    state_ = ((state_ << 1) | fb) & mask_;
    return out;
}

bit_stream prbs_bits(int order, std::uint32_t seed, std::size_t n_bits)
{
    prbs_generator gen(order, seed);
    bit_stream bits(n_bits);
    for (auto& b : bits) {
        b = gen.next();
    }
    return bits;
}

// ---------------------------------------------------------------------------
// Formats

std::string modulation_format::name() const
{
    if (scheme == modulation_scheme::psk) {
        if (order == 2) {
            return "bpsk";
        }
        if (order == 4) {
            return "qpsk";
        }
        return "psk" + std::to_string(order);
    }
    return "qam" + std::to_string(order);
}

namespace {

bool is_pow2(int v) { return v > 0 && (v & (v - 1)) == 0; }

bool valid_psk(int m) { return is_pow2(m) && m >= 2 && m <= 1024; }

bool valid_qam(int m)
{
    if (!is_pow2(m) || m < 4 || m > 4096) {
        return false;
    }
    return (std::countr_zero(static_cast<unsigned>(m)) % 2) == 0;
}

} // namespace

std::string supported_formats_help()
{
    return "bpsk, qpsk, psk<M> (M power of two, 8..1024), qam<M> (M in 4,16,64,256,1024,4096)";
}

modulation_format parse_format(const std::string& raw)
{
    std::string name;
    for (char c : raw) {
        if (c != '-' && c != '_' && c != ' ') {
            name += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        }
    }
    auto fail = [&]() -> modulation_format {
        throw invalid_parameter("unsupported modulation format '" + raw + "'; supported: " + supported_formats_help());
    };
    if (name == "bpsk") {
        return {modulation_scheme::psk, 2};
    }
    if (name == "qpsk") {
        return {modulation_scheme::psk, 4};
    }
    if (name.size() < 4) {
        return fail();
    }
    // Accept both "psk8"/"qam16" and "8psk"/"16qam".
    std::string tag, digits;
    if (name.starts_with("psk") || name.starts_with("qam")) {
        tag = name.substr(0, 3);
        digits = name.substr(3);
    } else if (name.ends_with("psk") || name.ends_with("qam")) {
        tag = name.substr(name.size() - 3);
        digits = name.substr(0, name.size() - 3);
    } else {
        return fail();
    }
    if (digits.empty() || digits.size() > 5 ||
        !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        return fail();
    }
    const modulation_format f{tag == "psk" ? modulation_scheme::psk : modulation_scheme::qam, std::stoi(digits)};
    const bool ok = f.scheme == modulation_scheme::psk ? valid_psk(f.order) : valid_qam(f.order);
    if (!ok) {
        return fail();
    }
    return f;
}

std::vector<modulation_format> parse_format_list(const std::string& comma_separated)
{
    std::vector<modulation_format> out;
    std::size_t pos = 0;
    while (pos <= comma_separated.size()) {
        auto next = comma_separated.find(',', pos);
        if (next == std::string::npos) {
            next = comma_separated.size();
        }
        std::string item = comma_separated.substr(pos, next - pos);
        if (!item.empty()) {
            out.push_back(parse_format(item));
        }
        pos = next + 1;
    }
    if (out.empty()) {
        throw invalid_parameter("empty format list; supported: " + supported_formats_help());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Constellation

std::uint32_t gray_encode(std::uint32_t v) noexcept { return v ^ (v >> 1); }

constellation_map::constellation_map(modulation_scheme scheme, int order) : format_{scheme, order}
{
    const bool ok = scheme == modulation_scheme::psk ? valid_psk(order) : valid_qam(order);
    if (!ok) {
        throw invalid_parameter("unsupported " + std::string(scheme == modulation_scheme::psk ? "PSK" : "QAM") +
                                " order " + std::to_string(order) + "; supported: " + supported_formats_help());
    }
    bits_ = std::countr_zero(static_cast<unsigned>(order));
    const auto m = static_cast<std::size_t>(order);
    points_.resize(m);
    labels_.resize(m);
    by_label_.resize(m);

    if (scheme == modulation_scheme::psk) {
        phase_offset_ = order == 2 ? 0.0 : std::numbers::pi / order;
        for (std::size_t k = 0; k < m; ++k) {
            points_[k] = std::polar(1.0, phase_offset_ + 2.0 * std::numbers::pi * static_cast<double>(k) / order);
            labels_[k] = gray_encode(static_cast<std::uint32_t>(k));
        }
        if (order == 2) {
            points_ = {cdouble(1.0, 0.0), cdouble(-1.0, 0.0)};
        }
    } else {
        levels_ = 1 << (bits_ / 2);
        const int half_bits = bits_ / 2;
        scale_ = 1.0 / std::sqrt(2.0 * (static_cast<double>(levels_) * levels_ - 1.0) / 3.0);
        for (int i = 0; i < levels_; ++i) {
            for (int q = 0; q < levels_; ++q) {
                const auto p = static_cast<std::size_t>(i * levels_ + q);
                points_[p] = cdouble((2 * i - levels_ + 1) * scale_, (2 * q - levels_ + 1) * scale_);
                labels_[p] = (gray_encode(static_cast<std::uint32_t>(i)) << half_bits) |
                             gray_encode(static_cast<std::uint32_t>(q));
            }
        }
        axis_thresholds_.resize(static_cast<std::size_t>(levels_ - 1));
        for (int j = 0; j < levels_ - 1; ++j) {
            axis_thresholds_[static_cast<std::size_t>(j)] = (2 * j - levels_ + 2) * scale_;
        }
    }
    for (std::size_t p = 0; p < m; ++p) {
        by_label_[labels_[p]] = p;
    }
}

std::size_t constellation_map::slice_axis(double v) const noexcept
{
    // Count of thresholds strictly below v; a value on a threshold stays low.
    return static_cast<std::size_t>(
        std::lower_bound(axis_thresholds_.begin(), axis_thresholds_.end(), v) - axis_thresholds_.begin());
}

std::size_t constellation_map::decide(cdouble r) const noexcept
{
    const auto m = static_cast<long>(format_.order);
    if (format_.scheme == modulation_scheme::psk) {
        const double sector = 2.0 * std::numbers::pi / static_cast<double>(m);
        const double t = (std::arg(r) - phase_offset_) / sector - 0.5;
        const double k = std::ceil(t);
        auto wrap = [m](long v) { return static_cast<std::size_t>(((v % m) + m) % m); };
        const auto ki = static_cast<long>(k);
        if (t == k) {
            return std::min(wrap(ki), wrap(ki + 1));
        }
        return wrap(ki);
    }
    const std::size_t i = slice_axis(r.real());
    const std::size_t q = slice_axis(r.imag());
    return i * static_cast<std::size_t>(levels_) + q;
}

symbol_stream map_bits(const constellation_map& map, std::span<const std::uint8_t> bits)
{
    const auto b = static_cast<std::size_t>(map.bits_per_symbol());
    if (bits.size() % b != 0) {
        throw length_mismatch("bit stream length " + std::to_string(bits.size()) + " is not a multiple of " +
                              std::to_string(b) + " bits per symbol; pad explicitly");
    }
    symbol_stream out(bits.size() / b);
    const auto points = map.points();
    for (std::size_t s = 0; s < out.size(); ++s) {
        std::uint32_t label = 0;
        for (std::size_t j = 0; j < b; ++j) {
            const auto bit = bits[s * b + j];
            if (bit > 1) {
                throw invalid_parameter("bit stream contains a value other than 0 or 1");
            }
            label = (label << 1) | bit;
        }
        out[s] = points[map.index_of_label(label)];
    }
    return out;
}

bit_stream demap_symbols(const constellation_map& map, std::span<const cdouble> received)
{
    const auto b = map.bits_per_symbol();
    bit_stream out(received.size() * static_cast<std::size_t>(b));
    const auto labels = map.labels();
    for (std::size_t s = 0; s < received.size(); ++s) {
        const std::uint32_t label = labels[map.decide(received[s])];
        for (int j = 0; j < b; ++j) {
            out[s * static_cast<std::size_t>(b) + static_cast<std::size_t>(j)] =
                static_cast<std::uint8_t>((label >> (b - 1 - j)) & 1u);
        }
    }
    return out;
}

bit_error_count count_bit_errors(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx)
{
    if (tx.size() != rx.size()) {
        throw length_mismatch("bit streams differ in length: " + std::to_string(tx.size()) + " vs " +
                              std::to_string(rx.size()));
    }
    bit_error_count c;
    for (std::size_t i = 0; i < tx.size(); ++i) {
        c.errors += (tx[i] != rx[i]) ? 1u : 0u;
    }
    c.ber = tx.empty() ? 0.0 : static_cast<double>(c.errors) / static_cast<double>(tx.size());
    return c;
}

} // namespace dynmod
