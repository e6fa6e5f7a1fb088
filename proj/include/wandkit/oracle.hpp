#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wandkit/ast.hpp"
#include "wandkit/enumerate.hpp"
#include "wandkit/semantics.hpp"
#include "wandkit/state.hpp"
#include "wandkit/universe.hpp"

namespace wandkit {

struct OracleOptions {
    int granularity = 0; // 0: the universe's
    /// Replace predicate atoms by their (scaled) bodies before evaluation.
    bool unfold_predicates = true;
    /// Quantify wand LHS states over stable states only (equivalent for
    /// intuitionistic right-hand sides, and much faster).
    bool stable_lhs_only = false;
    std::size_t budget = kDefaultBudget;
};

struct CombinableVerdict {
    bool combinable = true;
    // p, q, sigma_1 |= A^p, sigma_2 |= A^q such that sigma_1 + sigma_2 fails A^(p+q)
    std::optional<std::tuple<Perm, Perm, State, State>> counterexample;
};

struct Verdict {
    bool holds = true;
    std::optional<State> counterexample;
};

/// Brute-force semantics over an enumerated universe. Wand atoms are decided
/// by quantifying over all enumerated LHS states.
class Oracle {
public:
    explicit Oracle(const Universe& u, Store store = {}, OracleOptions opts = {});

    const Universe& universe() const { return universe_; }
    const OracleOptions& options() const { return opts_; }

    /// Enumeration of every state the oracle quantifies over for `a`.
    EnumerationPlan plan_for(const Assertion& a, bool stable_only = false) const;

    bool holds(const State& s, const Assertion& a) const;
    std::vector<State> sat_states(const Assertion& a, const EnumerationPlan& plan) const;
    std::vector<State> sat_states(const Assertion& a) const;

    /// Footprint check for the standard wand, or the stricter one for --*c (kind Combinable).
    /// `witness` receives an LHS state whose combination falsifies the RHS.
    bool is_footprint(const State& w, const Assertion& wand, WandKind kind, std::optional<State>* witness = nullptr) const;
    bool is_footprint(const State& w, const Assertion& wand, std::optional<State>* witness = nullptr) const {
        return is_footprint(w, wand, wand->wand_kind, witness);
    }

    /// Minimal stable footprints. `below` restricts candidates to states it
    /// dominates; `applicable_only` drops footprints compatible with no LHS state.
    std::vector<State> minimal_footprints(const Assertion& wand, WandKind kind, const std::optional<State>& below,
                                          bool applicable_only) const;

    CombinableVerdict check_combinable(const Assertion& a) const;
    Verdict check_entailment(const Assertion& a, const Assertion& b) const;
    /// monoPure of `e` (or of its negation) read as a semantic assertion.
    Verdict check_mono_pure(const Expr& e, bool negated = false) const;
    Verdict is_binary(const Assertion& a) const;

    /// Predicate atoms replaced by their scaled bodies (when unfolding is enabled).
    Assertion prepare(const Assertion& a) const;

private:
    bool wand_holds(const State& s, const Assertion& closed_wand) const;
    std::shared_ptr<const std::vector<State>> lhs_states(const Assertion& lhs) const;

    const Universe& universe_;
    Store store_;
    OracleOptions opts_;
    WandSemantics semantics_;

    mutable std::mutex mu_;
    mutable std::map<std::string, std::shared_ptr<const std::vector<State>>> lhs_cache_;
    mutable std::map<std::pair<std::string, State>, bool> wand_cache_;
};

/// Expands predicate atoms into their bodies, scaled by the atom's fraction.
Assertion expand_predicates(const Assertion& a, const Universe& u);

} // namespace wandkit
