#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wandkit/ast.hpp"
#include "wandkit/semantics.hpp"
#include "wandkit/state.hpp"
#include "wandkit/universe.hpp"

namespace wandkit {

/// Conjunction of guards collected from implications on the way down.
struct PathCondition {
    std::vector<Expr> conjuncts;

    PathCondition with(const Expr& b) const {
        PathCondition pc = *this;
        pc.conjuncts.push_back(b);
        return pc;
    }
};

/// pc(sigma) evaluated on sigma's heap; an unframed conjunct counts as true.
bool holds(const PathCondition& pc, const State& sigma, const Universe& u, const Store& store);

enum class TransformerKind { Identity, CombinableR };

struct Transformer {
    TransformerKind kind = TransformerKind::Identity;
    State anchor; // the LHS state of CombinableR

    State operator()(const State& s) const;
    friend bool operator==(const Transformer& a, const Transformer& b) {
        return a.kind == b.kind && a.anchor == b.anchor;
    }
    friend bool operator<(const Transformer& a, const Transformer& b) {
        if (a.kind != b.kind) return a.kind < b.kind;
        return a.anchor < b.anchor;
    }
};

struct WitnessPair {
    State a; // sigma_A
    State b; // sigma_B
    Transformer t;

    friend bool operator==(const WitnessPair& x, const WitnessPair& y) {
        return x.a == y.a && x.b == y.b && x.t == y.t;
    }
    friend bool operator<(const WitnessPair& x, const WitnessPair& y);
};

/// Sorted, duplicate-free.
using WitnessSet = std::vector<WitnessPair>;
void normalize(WitnessSet& s);

struct Context {
    State outer;
    WitnessSet witnesses;
    State extracted; // footprint extracted so far (used by the lifted Extract)
};

enum class Rule { Implication, Star, Atom, Extract, Disjunction };
std::string to_string(Rule r);

struct AtomChoice {
    State a;
    State b;
    State choice;
};

struct Derivation {
    Rule rule = Rule::Atom;
    std::vector<AtomChoice> choices;                  // Atom
    State extracted;                                   // Extract
    std::vector<std::pair<State, State>> left_pairs;   // Disjunction: pairs sent to the left disjunct
    std::vector<Derivation> children;

    static Derivation atom(std::vector<AtomChoice> choices);
    static Derivation extract(State w, Derivation child);
    static Derivation star(Derivation l, Derivation r);
    static Derivation implication(Derivation child);
    static Derivation disjunction(std::vector<std::pair<State, State>> left, Derivation l, Derivation r);
};

struct CheckEnv {
    const Universe& universe;
    const Store& store;
    bool lifted = false;
};

struct CheckResult {
    bool ok = false;
    Context context;
    std::string error; // first violated premise
    std::string path;  // rule path to the failing node, e.g. "extract/star.1/atom"
};

/// Re-validates every rule premise of `d` for the configuration <b, pc, ctx>.
CheckResult check_derivation(const Assertion& b, const PathCondition& pc, const Context& ctx, const Derivation& d,
                             const CheckEnv& env);

/// Applies Extract of `w` to a context (no premise checks beyond definedness).
/// Returns nullopt when the outer state does not contain w or a transformer delta is undefined.
std::optional<Context> apply_extract(const Context& ctx, const State& w, bool lifted);

/// Pairs (sigma_A, e) for the stable states satisfying `a`; only the minimal ones if requested.
WitnessSet init_witness_set(const Assertion& a, const Universe& u, const Store& store, bool minimal,
                            bool combinable = false);

/// Attaches CombinableR(sigma_A) transformers (or Identity) to every pair.
WitnessSet with_transformers(const std::vector<State>& lhs_states, bool combinable);

/// Extract-first derivation for a given footprint: Extract w at the root, then
/// Star/Implication decomposition with a per-pair backtracking search for Atom
/// choices. nullopt when no choices exist.
std::optional<Derivation> canonical_derivation(const Assertion& b, const Context& ctx, const State& w,
                                               const CheckEnv& env);

// Text serialization of derivation trees.
std::string print_derivation(const Derivation& d, const Universe& u, int indent = 0);
class TokenStream;
Derivation parse_derivation(TokenStream& ts, const Universe& u);

} // namespace wandkit
