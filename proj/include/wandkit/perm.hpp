#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

namespace wandkit {

/// Exact permission amount. Arithmetic never rounds; the universe granularity
/// only bounds which amounts are enumerated.
using Perm = boost::rational<std::int64_t>;

inline const Perm kNoPerm{0};
inline const Perm kFullPerm{1};

std::string to_string(const Perm& p);

/// Parses "1", "0", "1/2", "write" (= 1) and "none" (= 0).
std::optional<Perm> parse_perm(std::string_view text);

inline Perm min_perm(const Perm& a, const Perm& b) { return a < b ? a : b; }
inline Perm max_perm(const Perm& a, const Perm& b) { return a < b ? b : a; }

} // namespace wandkit
