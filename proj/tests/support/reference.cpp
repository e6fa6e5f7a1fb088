#include "reference.hpp"

#include <fstream>
#include <sstream>

#include "wandkit/enumerate.hpp"

#ifndef WANDKIT_CORPUS_DIR
#define WANDKIT_CORPUS_DIR "corpus"
#endif

namespace wandkit::testkit {

std::string corpus_path(const std::string& name) { return std::string(WANDKIT_CORPUS_DIR) + "/" + name; }

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Universe corpus_universe(const std::string& name) { return parse_universe(read_text(corpus_path(name))); }

std::vector<State> all_states(const Universe& u) { return EnumerationPlan(u).states(); }

std::vector<State> stable_states(const Universe& u) {
    EnumerationPlan plan(u);
    plan.stable_only = true;
    return plan.states();
}

std::vector<State> all_remainders(const State& a, const State& b, const std::vector<State>& carrier) {
    std::vector<State> out;
    for (const auto& r : carrier) {
        auto s = add(b, r);
        if (s && *s == a) out.push_back(r);
    }
    return out;
}

bool alpha_search_compatible(const State& sigma_A, const State& sigma_w) {
    for (std::int64_t d = 1; d <= 1024; d *= 2) {
        auto scaled = mult(Perm(1, d), sigma_w);
        if (scaled && compatible(sigma_A, *scaled)) return true;
    }
    return false;
}

bool alpha_search_scaled(const State& candidate, const State& sigma) {
    for (std::int64_t d = 1; d <= 12; ++d) {
        for (std::int64_t n = 1; n <= d; ++n) {
            auto scaled = mult(Perm(n, d), sigma);
            if (scaled && *scaled == candidate) return true;
        }
    }
    return false;
}

bool sat_star_by_splits(const State& sigma, const Assertion& a, const Assertion& b, const Universe& u,
                        const std::vector<State>& carrier) {
    const Store empty;
    for (const auto& s1 : carrier) {
        if (!geq(sigma, s1) || !sat(s1, a, u, empty)) continue;
        for (const auto& s2 : carrier) {
            auto s = add(s1, s2);
            if (s && *s == sigma && sat(s2, b, u, empty)) return true;
        }
    }
    return false;
}

} // namespace wandkit::testkit
