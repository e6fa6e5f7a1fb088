#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <variant>

#include "wandkit/perm.hpp"

namespace wandkit {

enum class Sort { Ref, Int, Bool, Perm };

std::string to_string(Sort s);

/// Reference value, an index into the universe's reference table. Index 0 is null.
struct Ref {
    std::uint16_t index = 0;

    bool is_null() const { return index == 0; }
    auto operator<=>(const Ref&) const = default;
};

inline constexpr Ref kNull{0};

/// A runtime value. Heap locations only ever hold Ref, Int or Bool values; Perm
/// values arise from permission introspection and rational literals.
using Value = std::variant<Ref, std::int64_t, bool, Perm>;

Sort sort_of(const Value& v);

} // namespace wandkit
