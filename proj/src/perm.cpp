#include "wandkit/perm.hpp"

#include <charconv>

namespace wandkit {

std::string to_string(const Perm& p) {
    if (p.denominator() == 1) return std::to_string(p.numerator());
    return std::to_string(p.numerator()) + "/" + std::to_string(p.denominator());
}

namespace {

std::optional<std::int64_t> parse_int(std::string_view s) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

} // namespace

std::optional<Perm> parse_perm(std::string_view text) {
    if (text == "write") return kFullPerm;
    if (text == "none") return kNoPerm;
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) {
        auto n = parse_int(text);
        if (!n) return std::nullopt;
        return Perm(*n);
    }
    auto n = parse_int(text.substr(0, slash));
    auto d = parse_int(text.substr(slash + 1));
    if (!n || !d || *d <= 0) return std::nullopt;
    return Perm(*n, *d);
}

} // namespace wandkit
