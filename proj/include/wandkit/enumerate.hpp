#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "wandkit/state.hpp"
#include "wandkit/universe.hpp"

namespace wandkit {

class BudgetExceeded : public std::runtime_error {
public:
    BudgetExceeded(double estimate, std::size_t budget);
    double estimate() const { return estimate_; }

private:
    double estimate_;
};

inline constexpr std::size_t kDefaultBudget = 1'000'000;

/// Describes a finite set of states over a universe. Per location the choices
/// are: absent, value without permission, or value with amount k/g (k = 1..g).
/// Extra resources (predicate/wand instances) range over {0, 1/g, ..., 1}.
struct EnumerationPlan {
    const Universe* universe = nullptr;
    int granularity = 0; // 0: use the universe's
    bool stable_only = false;
    bool total_heap_only = false;
    bool zero_mask_only = false;
    std::optional<State> below; // only states the given state dominates
    std::vector<ResourceId> extra_resources;
    std::size_t budget = kDefaultBudget;

    explicit EnumerationPlan(const Universe& u) : universe(&u) {}

    int effective_granularity() const { return granularity > 0 ? granularity : universe->granularity; }
    double estimate() const;
    /// All states of the plan in ascending state order. Throws BudgetExceeded.
    std::vector<State> states() const;
};

/// Permission amounts 1/g, ..., 1.
std::vector<Perm> lattice(int granularity);

} // namespace wandkit
