#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>

#include "mergegame/error.hpp"

namespace mergegame {

/// Face printed on a tile. Zero is reserved for "no tile".
using Face = std::uint64_t;

enum class VariantKind { Cirulli2048, Saming2048, Threes, Fives, Game1024, Fibonacci };

enum class Movement {
    SlideToWall, // tiles travel until they hit a wall or another tile
    ShiftByOne,  // every tile moves at most one cell
    SamingScan,  // far-to-near scan, merged tile stays put for the turn
};

namespace detail {

// F_1 .. F_92 fit in 64 bits; anything beyond is never produced on a desk-scale board.
inline constexpr auto kFibonacci = [] {
    std::array<Face, 92> fib{};
    fib[0] = 1;
    fib[1] = 1;
    for (std::size_t i = 2; i < fib.size(); ++i) {
        fib[i] = fib[i - 1] + fib[i - 2];
    }
    return fib;
}();

constexpr bool is_power_of_two(Face v) { return v != 0 && std::has_single_bit(v); }

// v == base * 2^i for some i >= 0
constexpr bool is_scaled_power(Face v, Face base) {
    return v != 0 && v % base == 0 && is_power_of_two(v / base);
}

constexpr std::optional<std::size_t> fibonacci_index(Face v) {
    for (std::size_t i = 0; i < kFibonacci.size(); ++i) {
        if (kFibonacci[i] == v) {
            return i;
        }
        if (kFibonacci[i] > v) {
            break;
        }
    }
    return std::nullopt;
}

} // namespace detail

/// A rule bundle. The movement discipline is fixed by the kind.
class Variant {
public:
    constexpr Variant() = default;
    constexpr explicit Variant(VariantKind kind) : kind_(kind) {}

    constexpr VariantKind kind() const { return kind_; }

    constexpr Movement movement() const {
        switch (kind_) {
        case VariantKind::Threes:
        case VariantKind::Fives: return Movement::ShiftByOne;
        case VariantKind::Saming2048: return Movement::SamingScan;
        default: return Movement::SlideToWall;
        }
    }

    constexpr bool is_2048_family() const {
        return kind_ == VariantKind::Cirulli2048 || kind_ == VariantKind::Saming2048 ||
               kind_ == VariantKind::Game1024;
    }

    constexpr bool operator==(const Variant&) const = default;

private:
    VariantKind kind_ = VariantKind::Cirulli2048;
};

constexpr std::string_view name_of(VariantKind kind) {
    switch (kind) {
    case VariantKind::Cirulli2048: return "cirulli2048";
    case VariantKind::Saming2048: return "saming2048";
    case VariantKind::Threes: return "threes";
    case VariantKind::Fives: return "fives";
    case VariantKind::Game1024: return "1024";
    case VariantKind::Fibonacci: return "fibonacci";
    }
    return "unknown";
}

inline VariantKind variant_from_name(std::string_view name) {
    for (auto kind : {VariantKind::Cirulli2048, VariantKind::Saming2048, VariantKind::Threes,
                      VariantKind::Fives, VariantKind::Game1024, VariantKind::Fibonacci}) {
        if (name_of(kind) == name) {
            return kind;
        }
    }
    if (name == "2048") {
        return VariantKind::Cirulli2048;
    }
    throw Error(ErrorCode::UnsupportedVariant, "unknown variant '" + std::string(name) + "'");
}

constexpr std::string_view name_of(Variant v) { return name_of(v.kind()); }

/// Whether `face` may appear on a board of this variant.
constexpr bool is_valid_face(Variant variant, Face face) {
    switch (variant.kind()) {
    case VariantKind::Threes: return face == 1 || face == 2 || detail::is_scaled_power(face, 3);
    case VariantKind::Fives: return face == 2 || face == 3 || detail::is_scaled_power(face, 5);
    case VariantKind::Fibonacci: return detail::fibonacci_index(face).has_value();
    default: return face >= 2 && detail::is_power_of_two(face);
    }
}

/// Face produced when `a` and `b` combine, or nothing. Symmetric.
constexpr std::optional<Face> merge_result(Variant variant, Face a, Face b) {
    if (a == 0 || b == 0) {
        return std::nullopt;
    }
    switch (variant.kind()) {
    case VariantKind::Threes:
        if ((a == 1 && b == 2) || (a == 2 && b == 1)) {
            return 3;
        }
        if (a == b && a >= 3) {
            return 2 * a;
        }
        return std::nullopt;
    case VariantKind::Fives:
        if ((a == 2 && b == 3) || (a == 3 && b == 2)) {
            return 5;
        }
        if (a == b && a >= 5) {
            return 2 * a;
        }
        return std::nullopt;
    case VariantKind::Fibonacci: {
        // The sum of two Fibonacci numbers is Fibonacci exactly when they are
        // neighbours in the sequence (1+1 included, since F_1 = F_2).
        if (a == b) {
            return a == 1 ? std::optional<Face>(2) : std::nullopt;
        }
        if (!detail::fibonacci_index(a) || !detail::fibonacci_index(b)) {
            return std::nullopt;
        }
        if (detail::fibonacci_index(a + b)) {
            return a + b;
        }
        return std::nullopt;
    }
    default:
        if (a == b) {
            return 2 * a;
        }
        return std::nullopt;
    }
}

} // namespace mergegame
