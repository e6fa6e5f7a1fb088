#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wandkit/ast.hpp"
#include "wandkit/value.hpp"

namespace wandkit {

/// Index into the universe's location table.
struct LocId {
    std::uint32_t index = 0;
    auto operator<=>(const LocId&) const = default;
};

struct FieldDecl {
    std::string name;
    Sort sort = Sort::Int;
    std::vector<Value> domain; // default domain for locations of this field
};

struct Location {
    Ref receiver;
    std::string field;
    std::vector<Value> domain;
};

struct PredicateDef {
    std::string name;
    std::vector<std::string> params; // all reference-typed
    Assertion body;
};

/// A finite configuration bounding every enumeration: references, heap
/// locations with their value domains, non-recursive predicates and the
/// permission granularity used when enumerating amounts.
class Universe {
public:
    int granularity = 2;
    std::vector<std::string> refs{"null"}; // refs[0] is null
    std::vector<FieldDecl> fields;
    std::vector<Location> locations;
    std::vector<PredicateDef> predicates;

    std::optional<Ref> find_ref(std::string_view name) const;
    const std::string& ref_name(Ref r) const { return refs.at(r.index); }

    const FieldDecl* find_field(std::string_view name) const;
    std::optional<LocId> find_loc(Ref receiver, std::string_view field) const;
    const Location& loc(LocId id) const { return locations.at(id.index); }
    std::string loc_name(LocId id) const;
    std::size_t num_locations() const { return locations.size(); }

    const PredicateDef* find_predicate(std::string_view name) const;

    std::string value_to_string(const Value& v) const;
    std::optional<Value> parse_value(std::string_view text, Sort sort) const;

    /// Adds a location with the field's default domain unless `domain` is given.
    /// Throws std::invalid_argument on unknown refs/fields or null receivers.
    LocId add_location(std::string_view receiver, std::string_view field,
                       std::optional<std::vector<Value>> domain = std::nullopt);

    /// Rejects recursive or ill-scoped predicate definitions; returns the problem.
    std::optional<std::string> validate() const;
};

/// Parses the line-based universe format (see README).
/// Throws ParseError on malformed input.
Universe parse_universe(std::string_view text);
class TokenStream;
/// Reads directives up to a closing '}' or end of input (used for inline universes).
Universe parse_universe_directives(TokenStream& ts);
std::string print_universe(const Universe& u);
Universe load_universe_file(const std::string& path);

} // namespace wandkit
