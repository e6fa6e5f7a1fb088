#include "wandkit/enumerate.hpp"

#include <algorithm>
#include <sstream>

namespace wandkit {

namespace {

std::string budget_message(double estimate, std::size_t budget) {
    std::ostringstream os;
    os << "enumeration of " << estimate << " states exceeds the budget of " << budget;
    return os.str();
}

struct Choice {
    std::optional<Perm> amount; // nullopt: no entry at all
    std::optional<Value> value;
};

std::vector<Choice> location_choices(const EnumerationPlan& plan, LocId id) {
    const Location& loc = plan.universe->loc(id);
    const auto amounts = lattice(plan.effective_granularity());
    const State* below = plan.below ? &*plan.below : nullptr;
    std::vector<Choice> out;
    if (!plan.total_heap_only) out.push_back({std::nullopt, std::nullopt});
    for (const auto& v : loc.domain) {
        if (below) {
            const Value* bv = below->value(id);
            if (!bv || *bv != v) continue;
        }
        if (!plan.stable_only) out.push_back({kNoPerm, v});
        if (plan.zero_mask_only) continue;
        for (const auto& p : amounts) {
            if (below && below->perm(id) < p) continue;
            out.push_back({p, v});
        }
    }
    return out;
}

std::vector<Perm> resource_choices(const EnumerationPlan& plan, const ResourceId& id) {
    std::vector<Perm> out{kNoPerm};
    if (plan.zero_mask_only) return out;
    for (const auto& p : lattice(plan.effective_granularity())) {
        if (plan.below && plan.below->perm(id) < p) continue;
        out.push_back(p);
    }
    return out;
}

} // namespace

BudgetExceeded::BudgetExceeded(double estimate, std::size_t budget)
    : std::runtime_error(budget_message(estimate, budget)), estimate_(estimate) {}

std::vector<Perm> lattice(int granularity) {
    std::vector<Perm> out;
    for (int k = 1; k <= granularity; ++k) out.emplace_back(k, granularity);
    return out;
}

double EnumerationPlan::estimate() const {
    double n = 1;
    for (std::size_t i = 0; i < universe->num_locations(); ++i) {
        n *= static_cast<double>(location_choices(*this, LocId{static_cast<std::uint32_t>(i)}).size());
    }
    for (const auto& r : extra_resources) n *= static_cast<double>(resource_choices(*this, r).size());
    return n;
}

std::vector<State> EnumerationPlan::states() const {
    const double est = estimate();
    if (est > static_cast<double>(budget)) throw BudgetExceeded(est, budget);

    std::vector<State> out{State{}};
    for (std::size_t i = 0; i < universe->num_locations(); ++i) {
        const LocId id{static_cast<std::uint32_t>(i)};
        const auto choices = location_choices(*this, id);
        std::vector<State> next;
        next.reserve(out.size() * choices.size());
        for (const auto& s : out) {
            for (const auto& c : choices) {
                State t = s;
                if (c.value) t.set_value(id, *c.value);
                if (c.amount) t.set_perm(id, *c.amount);
                next.push_back(std::move(t));
            }
        }
        out = std::move(next);
    }
    for (const auto& r : extra_resources) {
        const auto choices = resource_choices(*this, r);
        std::vector<State> next;
        for (const auto& s : out) {
            for (const auto& p : choices) {
                State t = s;
                t.set_perm(r, p);
                next.push_back(std::move(t));
            }
        }
        out = std::move(next);
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace wandkit
