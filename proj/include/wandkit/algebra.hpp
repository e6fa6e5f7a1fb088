#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wandkit/enumerate.hpp"
#include "wandkit/state.hpp"

namespace wandkit {

/// Contract of a separation algebra: partial addition, unit, core and stability.
template <class A>
concept SeparationAlgebra = requires(const typename A::Element& x) {
    { A::add(x, x) } -> std::same_as<std::optional<typename A::Element>>;
    { A::unit() } -> std::same_as<typename A::Element>;
    { A::core(x) } -> std::same_as<typename A::Element>;
    { A::stable(x) } -> std::same_as<bool>;
    { x == x } -> std::convertible_to<bool>;
    { x < x } -> std::convertible_to<bool>;
};

/// The fractional-permission state model.
struct IdfAlgebra {
    using Element = State;
    static std::optional<State> add(const State& a, const State& b) { return wandkit::add(a, b); }
    static State unit() { return State{}; }
    static State core(const State& a) { return wandkit::core(a); }
    static bool stable(const State& a) { return is_stable(a); }
};

enum class Axiom {
    Neutral,
    Commutativity,
    Associativity,
    CoreA,
    CoreB,
    CoreC,
    StabilityD,
    PositivityE,
    CancellativityF
};

std::string to_string(Axiom a);

template <class Element>
struct LawReport {
    Axiom axiom;
    bool pass = true;
    std::vector<Element> counterexample;
    std::uint64_t instances = 0; // number of premise-satisfying instances examined
};

using AlgebraLawReport = LawReport<State>;

/// Checks every axiom over all tuples drawn from `carrier`, which must be
/// closed under the algebra's operations for the result to be meaningful.
template <SeparationAlgebra A>
std::vector<LawReport<typename A::Element>> check_axioms_over(std::vector<typename A::Element> carrier) {
    using E = typename A::Element;
    std::sort(carrier.begin(), carrier.end());
    carrier.erase(std::unique(carrier.begin(), carrier.end()), carrier.end());
    const std::size_t n = carrier.size();
    auto index_of = [&](const E& x) -> std::int64_t {
        auto it = std::lower_bound(carrier.begin(), carrier.end(), x);
        if (it == carrier.end() || !(*it == x)) return -2; // outside the carrier
        return it - carrier.begin();
    };
    // sum[i*n+j]: index of carrier[i] + carrier[j], -1 when undefined. Large
    // carriers compute sums on demand instead of tabulating them.
    constexpr std::size_t kTableLimit = 6000;
    const bool tabulated = n <= kTableLimit;
    std::vector<std::int64_t> sum(tabulated ? n * n : 0, -1);
    auto compute = [&](std::size_t i, std::size_t j) -> std::int64_t {
        if (auto s = A::add(carrier[i], carrier[j])) return index_of(*s);
        return -1;
    };
    if (tabulated) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) sum[i * n + j] = compute(i, j);
        }
    }
    auto at = [&](std::int64_t i, std::int64_t j) -> std::int64_t {
        if (i < 0 || j < 0) return -1;
        const auto ui = static_cast<std::size_t>(i);
        const auto uj = static_cast<std::size_t>(j);
        return tabulated ? sum[ui * n + uj] : compute(ui, uj);
    };
    std::vector<std::int64_t> core(n);
    std::vector<bool> pure(n);
    for (std::size_t i = 0; i < n; ++i) {
        core[i] = index_of(A::core(carrier[i]));
        pure[i] = at(i, i) == static_cast<std::int64_t>(i);
    }
    const std::int64_t e = index_of(A::unit());

    std::vector<LawReport<E>> out;
    auto report = [&](Axiom ax) -> LawReport<E>& {
        out.push_back(LawReport<E>{ax, true, {}, 0});
        return out.back();
    };
    auto fail = [&](LawReport<E>& r, std::initializer_list<std::size_t> idx) {
        if (!r.pass) return;
        r.pass = false;
        for (auto i : idx) r.counterexample.push_back(carrier[i]);
    };
    {
        auto& r = report(Axiom::Neutral);
        if (e < 0) {
            r.pass = false;
        } else {
            for (std::size_t i = 0; i < n; ++i, ++r.instances) {
                if (at(e, i) != static_cast<std::int64_t>(i)) fail(r, {i});
            }
        }
    }
    {
        auto& r = report(Axiom::Commutativity);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j, ++r.instances) {
                if (at(i, j) != at(j, i)) fail(r, {i, j});
            }
        }
    }
    {
        auto& r = report(Axiom::Associativity);
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = 0; b < n; ++b) {
                const auto ab = at(a, b);
                for (std::size_t c = 0; c < n; ++c) {
                    const auto bc = at(b, c);
                    if (ab < 0 && bc < 0) continue;
                    ++r.instances;
                    if (at(ab, c) != at(a, bc)) fail(r, {a, b, c});
                }
            }
        }
    }
    {
        auto& r = report(Axiom::CoreA);
        for (std::size_t x = 0; x < n; ++x, ++r.instances) {
            if (core[x] < 0 || at(x, core[x]) != static_cast<std::int64_t>(x) || at(core[x], core[x]) != core[x]) {
                fail(r, {x});
            }
        }
    }
    {
        auto& r = report(Axiom::CoreB);
        for (std::size_t x = 0; x < n; ++x) {
            for (std::size_t c = 0; c < n; ++c) {
                if (at(x, c) != static_cast<std::int64_t>(x)) continue;
                ++r.instances;
                bool found = false;
                for (std::size_t rr = 0; rr < n && !found; ++rr) found = at(c, rr) == core[x];
                if (!found) fail(r, {x, c});
            }
        }
    }
    {
        auto& r = report(Axiom::CoreC);
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = 0; b < n; ++b) {
                const auto c = at(a, b);
                if (c < 0) continue;
                ++r.instances;
                if (core[c] != at(core[a], core[b])) fail(r, {a, b});
            }
        }
    }
    {
        auto& r = report(Axiom::StabilityD);
        if (e < 0 || !A::stable(carrier[e])) r.pass = false;
        for (std::size_t a = 0; a < n; ++a) {
            if (!A::stable(carrier[a])) continue;
            for (std::size_t b = 0; b < n; ++b) {
                const auto c = at(a, b);
                if (c < 0 || !A::stable(carrier[b])) continue;
                ++r.instances;
                if (!A::stable(carrier[c])) fail(r, {a, b});
            }
        }
    }
    {
        auto& r = report(Axiom::PositivityE);
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = 0; b < n; ++b) {
                const auto c = at(a, b);
                if (c < 0 || !pure[c]) continue;
                ++r.instances;
                if (!pure[a]) fail(r, {a, b});
            }
        }
    }
    {
        auto& r = report(Axiom::CancellativityF);
        for (std::size_t b = 0; b < n; ++b) {
            std::map<std::pair<std::int64_t, std::int64_t>, std::size_t> seen; // (a, |x|) -> x
            for (std::size_t x = 0; x < n; ++x) {
                const auto a = at(b, x);
                if (a < 0) continue;
                ++r.instances;
                auto [it, fresh] = seen.emplace(std::make_pair(a, core[x]), x);
                if (!fresh && it->second != x) fail(r, {b, it->second, x});
            }
        }
    }
    return out;
}

/// Enumerates the universe (refusing more than `budget` states) and runs the law suite.
std::vector<AlgebraLawReport> check_axioms(const Universe& u, std::size_t budget = kDefaultBudget);

} // namespace wandkit
