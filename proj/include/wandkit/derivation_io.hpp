#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wandkit/algorithms.hpp"
#include "wandkit/package_logic.hpp"
#include "wandkit/universe.hpp"

namespace wandkit {

/// One self-contained package-logic judgment: universe, closed wand, outer
/// state, initial witness set and the derivation tree for the wand's RHS.
struct DerivationDocument {
    Universe universe;
    std::optional<std::string> universe_path; // printed as a reference instead of inline
    Assertion wand;
    State outer;
    WitnessMode witnesses = WitnessMode::Minimal;
    WitnessSet explicit_witnesses;
    State extracted;
    Derivation proof;
    std::optional<State> expected_footprint;
};

std::string print_derivation_document(const DerivationDocument& doc);
std::string print_derivation_documents(const std::vector<DerivationDocument>& docs);

/// Parses one or more documents separated by `---`. Relative universe paths
/// resolve against `base_dir`. Throws ParseError.
std::vector<DerivationDocument> parse_derivation_documents(std::string_view text, const std::string& base_dir = ".");

struct DocumentCheck {
    bool ok = false;
    std::string message;
    std::string path;
    State footprint;
};

DocumentCheck check_document(const DerivationDocument& doc);

} // namespace wandkit
