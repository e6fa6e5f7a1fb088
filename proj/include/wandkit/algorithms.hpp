#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wandkit/ast.hpp"
#include "wandkit/package_logic.hpp"
#include "wandkit/parse.hpp"
#include "wandkit/semantics.hpp"
#include "wandkit/state.hpp"
#include "wandkit/universe.hpp"

namespace wandkit {

enum class Algorithm { Fia, Sound, Combinable };
std::string to_string(Algorithm a);
std::optional<Algorithm> parse_algorithm(std::string_view name);

// ---------------------------------------------------------------------------
// Proof scripts
// ---------------------------------------------------------------------------

struct ScriptStmt;
using ProofScript = std::vector<ScriptStmt>;

enum class ScriptKind { Assert, Fold, Unfold, Apply, If };

struct ScriptStmt {
    ScriptKind kind = ScriptKind::Assert;
    Assertion assertion; // Assert: A; Fold/Unfold: the predicate atom; Apply: the wand
    Expr cond;           // If
    ProofScript then_branch;
    ProofScript else_branch;
    SourcePos pos;
};

std::string print_script(const ProofScript& ps, int indent = 0);

// ---------------------------------------------------------------------------
// Building blocks
// ---------------------------------------------------------------------------

struct AlgoEnv {
    const Universe& universe;
    const Store& store;
    bool allow_perm = false; // verifier-level assertions may use perm()
};

/// Adds the resources of `a` to `base`. Locations that gain permission without
/// a heap value fork into one state per domain value; Or forks per branch;
/// pure parts filter. Overflowing or heap-conflicting additions are dropped.
std::vector<State> inhale_states(const State& base, const Assertion& a, const AlgoEnv& env);

/// Zero-mask states with a value for every location (the T0 of the package algorithm).
std::vector<State> empty_total_states(const Universe& u);

/// Minimal states satisfying `a`, built from `t` by following the assertion
/// left to right; pc-false states pass through unchanged.
std::vector<State> cons_lhs(const std::vector<State>& t, const PathCondition& pc, const Assertion& a,
                            const AlgoEnv& env);

/// Stable, duplicate-free, dominance-pruned LHS states of `lhs` (via cons_lhs over T0).
std::vector<State> lhs_cases(const Assertion& lhs, const AlgoEnv& env);

struct ProveResult {
    bool ok = false;
    Context context;
    Derivation derivation;
    std::string error;
};

/// Proof search for B in the given context (Star/Implication traversal, Atom
/// directly when covered, otherwise Extract of a minimal stable state then Atom).
ProveResult prove_rhs(const Context& ctx, const PathCondition& pc, const Assertion& b, Algorithm algo,
                      const AlgoEnv& env);

struct ScriptResult {
    bool ok = false;
    Context context;
    std::string error;
    bool transformed = false; // fold/unfold/apply rewrote witness states
};

ScriptResult run_script(const Context& ctx, const ProofScript& script, Algorithm algo, const AlgoEnv& env);

// ---------------------------------------------------------------------------
// Packaging
// ---------------------------------------------------------------------------

enum class WitnessMode { Minimal, Explicit };

struct PackageOutcome {
    bool ok = false;
    std::string diagnostic;
    State footprint;                                     // sound / combinable
    std::vector<std::pair<State, State>> case_footprints; // fia: (LHS case, footprint)
    std::vector<State> post_states;
    std::optional<Derivation> derivation;
    // Where the derivation starts: the initial minimal witness set, or the
    // explicit post-script context when the script rewrote witness states.
    WitnessMode witness_mode = WitnessMode::Minimal;
    Context derivation_context;
};

PackageOutcome package_sound(const State& outer, const Assertion& wand, const ProofScript& script,
                             const AlgoEnv& env);
PackageOutcome package_combinable(const State& outer, const Assertion& wand, const ProofScript& script,
                                  const AlgoEnv& env);
PackageOutcome package_fia(const State& outer, const Assertion& wand, const ProofScript& script, const AlgoEnv& env);
PackageOutcome package(Algorithm algo, const State& outer, const Assertion& wand, const ProofScript& script,
                       const AlgoEnv& env);

} // namespace wandkit
