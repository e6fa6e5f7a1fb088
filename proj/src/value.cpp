#include "wandkit/value.hpp"

namespace wandkit {

std::string to_string(Sort s) {
    switch (s) {
    case Sort::Ref: return "Ref";
    case Sort::Int: return "Int";
    case Sort::Bool: return "Bool";
    case Sort::Perm: return "Perm";
    }
    return "?";
}

Sort sort_of(const Value& v) {
    switch (v.index()) {
    case 0: return Sort::Ref;
    case 1: return Sort::Int;
    case 2: return Sort::Bool;
    default: return Sort::Perm;
    }
}

} // namespace wandkit
