#pragma once

#include <random>
#include <string>
#include <vector>

#include "wandkit/ast.hpp"
#include "wandkit/state.hpp"
#include "wandkit/universe.hpp"

namespace wandkit::testkit {

using Rng = std::mt19937;

/// Two or three locations over refs x, y with small domains; granularity 2.
Universe random_universe(Rng& rng, int max_locations = 3);

struct AssertionShape {
    int depth = 2;
    bool allow_or = true;
    bool allow_imp = true;
    bool fractions = true;
};

/// Self-framing by construction: every read is preceded by an acc for it.
Assertion random_assertion(Rng& rng, const Universe& u, const AssertionShape& shape = {});
Assertion random_wand(Rng& rng, const Universe& u, const AssertionShape& shape = {},
                      WandKind kind = WandKind::Standard);

/// Random stable state; `full_bias` is the chance of holding a location at all.
State random_stable_state(Rng& rng, const Universe& u, double hold_chance = 0.7);

template <class T>
const T& pick(Rng& rng, const std::vector<T>& xs) {
    return xs[std::uniform_int_distribution<std::size_t>(0, xs.size() - 1)(rng)];
}

inline bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

} // namespace wandkit::testkit
