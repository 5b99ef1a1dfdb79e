// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace dynmod {

using cdouble = std::complex<double>;
using bit_stream = std::vector<std::uint8_t>;
using symbol_stream = std::vector<cdouble>;

/// Fibonacci LFSR over a maximal-length polynomial. Output is the last stage,
/// feedback is the XOR of the tapped stages.
class prbs_generator {
public:
    prbs_generator(int order, std::uint32_t seed);

    std::uint8_t next();
    int order() const noexcept { return order_; }
    std::uint32_t state() const noexcept { return state_; }
    std::uint32_t taps() const noexcept { return taps_; }

    /// Tap mask (bit i = stage i+1) of the built-in polynomial for `order`.
    static std::uint32_t default_taps(int order);

private:
    int order_;
    std::uint32_t state_;
    std::uint32_t taps_;
    std::uint32_t mask_;
};

bit_stream prbs_bits(int order, std::uint32_t seed, std::size_t n_bits);

enum class modulation_scheme { psk, qam };

struct modulation_format {
    modulation_scheme scheme = modulation_scheme::psk;
    int order = 2;

    /// "bpsk", "qpsk", "psk8", "qam16", ... Parses the same names back with
    /// parse_format.
    std::string name() const;
    friend bool operator==(const modulation_format&, const modulation_format&) = default;
};

modulation_format parse_format(const std::string& name);
std::vector<modulation_format> parse_format_list(const std::string& comma_separated);
std::string supported_formats_help();

/// Gray-coded unit-energy alphabet.
///
/// PSK: point k sits at offset + 2*pi*k/M with label gray(k). The offset is 0
/// for BPSK and pi/M otherwise, so QPSK lands on the diagonals with label 00
/// in the first quadrant.
///
/// Square QAM: point index iI*L + iQ sits at ((2*iI - L + 1), (2*iQ - L + 1))
/// times a unit-energy scale, with label gray(iI) << b | gray(iQ).
class constellation_map {
public:
    constellation_map(modulation_scheme scheme, int order);

    modulation_scheme scheme() const noexcept { return format_.scheme; }
    int order() const noexcept { return format_.order; }
    const modulation_format& format() const noexcept { return format_; }
    int bits_per_symbol() const noexcept { return bits_; }
    std::span<const cdouble> points() const noexcept { return points_; }
    std::span<const std::uint32_t> labels() const noexcept { return labels_; }

    /// Point index of the label.
    std::size_t index_of_label(std::uint32_t label) const { return by_label_.at(label); }

    /// Fast decision: sector slicing for PSK, per-axis slicing for QAM. Ties go
    /// to the lower point index.
    std::size_t decide(cdouble r) const noexcept;

    // PSK only
    double phase_offset() const noexcept { return phase_offset_; }
    // QAM only
    int levels_per_axis() const noexcept { return levels_; }
    double scale() const noexcept { return scale_; }

private:
    std::size_t slice_axis(double v) const noexcept;

    modulation_format format_;
    int bits_ = 0;
    std::vector<cdouble> points_;
    std::vector<std::uint32_t> labels_;
    std::vector<std::size_t> by_label_;
    double phase_offset_ = 0.0;
    int levels_ = 0;
    double scale_ = 1.0;
    std::vector<double> axis_thresholds_;
};

inline constellation_map build_constellation(modulation_scheme scheme, int order)
{
    return constellation_map(scheme, order);
}
inline constellation_map build_constellation(const modulation_format& f)
{
    return constellation_map(f.scheme, f.order);
}

symbol_stream map_bits(const constellation_map& map, std::span<const std::uint8_t> bits);
bit_stream demap_symbols(const constellation_map& map, std::span<const cdouble> received);

struct bit_error_count {
    std::size_t errors = 0;
    double ber = 0.0;
};

bit_error_count count_bit_errors(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx);

std::uint32_t gray_encode(std::uint32_t v) noexcept;

} // namespace dynmod
