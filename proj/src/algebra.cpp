#include "wandkit/algebra.hpp"

namespace wandkit {

std::string to_string(Axiom a) {
    switch (a) {
    case Axiom::Neutral: return "neutral";
    case Axiom::Commutativity: return "commutativity";
    case Axiom::Associativity: return "associativity";
    case Axiom::CoreA: return "core-a";
    case Axiom::CoreB: return "core-b";
    case Axiom::CoreC: return "core-c";
    case Axiom::StabilityD: return "stability-d";
    case Axiom::PositivityE: return "positivity-e";
    case Axiom::CancellativityF: return "cancellativity-f";
    }
    return "?";
}

std::vector<AlgebraLawReport> check_axioms(const Universe& u, std::size_t budget) {
    EnumerationPlan plan(u);
    plan.budget = budget;
    return check_axioms_over<IdfAlgebra>(plan.states());
}

} // namespace wandkit
