#pragma once

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wandkit/ast.hpp"
#include "wandkit/state.hpp"
#include "wandkit/universe.hpp"

namespace wandkit {

using Store = std::map<std::string, Value>;

/// Type errors and unbound names. Unframed reads are not errors; they make
/// eval return nullopt.
class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct EvalContext {
    const Universe& universe;
    const Store& store;
    const State& state;
    /// Reads need positive field permission in `state` (verifier statements).
    bool require_perm = false;
    /// perm() is only meaningful at verifier level.
    bool allow_perm = false;
};

std::optional<Value> eval(const Expr& e, const EvalContext& ctx);
/// Evaluates a condition; nullopt when unframed. Throws EvalError for non-boolean results.
std::optional<bool> eval_bool(const Expr& e, const EvalContext& ctx);

/// Replaces store variables by literals so the assertion no longer depends on the store.
Assertion close_over(const Assertion& a, const Universe& u, const Store& store);
/// Resource id of the recorded instance of a wand under the store.
WandKey wand_key(const Assertion& wand, const Universe& u, const Store& store);
/// Resolved resource of a predicate atom; nullopt when an argument is unframed.
std::optional<PredKey> pred_key(const Assertion& pred, const EvalContext& ctx);

/// Antichain of minimal states that satisfy `a` given the values in `heap`.
/// Returned states carry heap entries only for locations they hold permission to.
/// Order follows the assertion left to right; dominated entries are dropped.
std::vector<State> demands(const Assertion& a, const Universe& u, const Store& store, const State& heap,
                           bool allow_perm = false);

/// Removes every state that strictly dominates another one or duplicates an earlier one.
std::vector<State> prune_dominated(std::vector<State> states);

/// Decides whether a closed wand atom holds in a state (footprint semantics).
using WandSemantics = std::function<bool(const State&, const Assertion& closed_wand)>;

/// Satisfaction. Without `wand_semantics`, wand atoms are recorded resources
/// (WandKey held with amount 1). With it, they are decided semantically; a star
/// with a semantic wand under it is rejected with EvalError.
bool sat(const State& s, const Assertion& a, const Universe& u, const Store& store,
         const WandSemantics* wand_semantics = nullptr, bool allow_perm = false);

/// Syntactic self-framing check. Fails on impure implication guards and on perm()
/// inside wands; `diagnostic` receives the reason.
bool wf(const Assertion& a, std::string* diagnostic = nullptr);

bool contains_wand(const Assertion& a);

} // namespace wandkit
