#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "wandkit/perm.hpp"
#include "wandkit/universe.hpp"
#include "wandkit/value.hpp"

namespace wandkit {

/// Predicate instance resource: name applied to closed argument values.
struct PredKey {
    std::string name;
    std::vector<Value> args;
};

/// Recorded wand instance resource, keyed by the printed closed wand.
struct WandKey {
    std::string text;
};

bool operator==(const PredKey& a, const PredKey& b);
bool operator<(const PredKey& a, const PredKey& b);
bool operator==(const WandKey& a, const WandKey& b);
bool operator<(const WandKey& a, const WandKey& b);

using ResourceId = std::variant<LocId, PredKey, WandKey>;

inline bool is_field(const ResourceId& id) { return std::holds_alternative<LocId>(id); }
std::string resource_name(const ResourceId& id, const Universe& u);

/// An element of the separation algebra: a permission mask over resources and
/// a partial heap over field locations. Both maps are kept sorted; the mask
/// never stores zero amounts.
class State {
public:
    using MaskEntry = std::pair<ResourceId, Perm>;
    using HeapEntry = std::pair<LocId, Value>;

    State() = default;

    const std::vector<MaskEntry>& mask() const { return mask_; }
    const std::vector<HeapEntry>& heap() const { return heap_; }

    Perm perm(const ResourceId& id) const;
    const Value* value(LocId l) const;

    void set_perm(const ResourceId& id, const Perm& amount);
    void add_perm(const ResourceId& id, const Perm& amount) { set_perm(id, perm(id) + amount); }
    void set_value(LocId l, const Value& v);
    void erase_value(LocId l);

    bool is_unit() const { return mask_.empty() && heap_.empty(); }
    bool mask_empty() const { return mask_.empty(); }

    /// Every amount lies in [0, 1].
    bool valid() const;

    friend bool operator==(const State& a, const State& b) { return a.mask_ == b.mask_ && a.heap_ == b.heap_; }
    friend bool operator!=(const State& a, const State& b) { return !(a == b); }
    friend bool operator<(const State& a, const State& b);

private:
    std::vector<MaskEntry> mask_;
    std::vector<HeapEntry> heap_;
};

/// The neutral element e.
inline State unit() { return State{}; }

std::optional<State> add(const State& a, const State& b);
bool compatible(const State& a, const State& b);
State core(const State& a);
bool is_stable(const State& a);
bool geq(const State& a, const State& b);
/// The largest r with a = b + r; nullopt unless geq(a, b).
std::optional<State> sub(const State& a, const State& b);

/// alpha * sigma; undefined when some scaled amount exceeds 1.
std::optional<State> mult(const Perm& alpha, const State& sigma);
bool in_scaled(const State& candidate, const State& sigma);
/// Whether some alpha in (0,1] makes sigma_A compatible with alpha * sigma_w.
bool exists_compatible_scaled(const State& sigma_A, const State& sigma_w);
/// The R transform of combinable wands.
State restrict(const State& sigma_A, const State& sigma_w);
/// Keeps amount-1 entries only; heap unchanged.
State bin(const State& sigma);

/// Drops heap entries without positive field permission.
State stabilize(const State& sigma);
/// sub(initial, final) reduced to its positive-permission part.
std::optional<State> extract_footprint(const State& initial, const State& final_state);
/// Per-resource maximum of the masks; heap taken from both (callers ensure agreement).
State join(const State& a, const State& b);
/// State with the given heap and no permissions.
State heap_only(const State& sigma);

std::string to_string(const State& s, const Universe& u);
/// Parses the printed form, e.g. {x.f@1=y, y.g@1/2, P(x)@1, wand"acc(x.f) --* acc(x.f)"@1}.
/// Throws ParseError.
State parse_state(std::string_view text, const Universe& u);
class TokenStream;
State parse_state(TokenStream& ts, const Universe& u);

} // namespace wandkit
