#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wandkit/algorithms.hpp"
#include "wandkit/derivation_io.hpp"
#include "wandkit/program.hpp"
#include "wandkit/semantics.hpp"
#include "wandkit/state.hpp"

namespace wandkit {

struct VerifyOptions {
    Algorithm algorithm = Algorithm::Sound;
    bool audit = false;            // rerun packaged footprints through the oracle
    bool emit_derivations = false; // keep a derivation document per sound/combinable package
    unsigned threads = 1;
    bool timing = false;
};

struct World {
    Store store;
    State state;

    friend bool operator==(const World& a, const World& b) { return a.store == b.store && a.state == b.state; }
    friend bool operator<(const World& a, const World& b) {
        if (a.store != b.store) return a.store < b.store;
        return a.state < b.state;
    }
};

struct StmtRecord {
    SourcePos pos;
    StmtKind kind = StmtKind::Assert;
    std::string text;
    std::size_t worlds_in = 0;
    std::size_t worlds_out = 0;
    bool ok = true;
    std::string diagnostic;
    std::optional<World> witness; // the first failing world
};

struct FootprintRecord {
    std::size_t world = 0;          // index into the worlds reaching the package
    std::optional<State> lhs_case;  // fia only
    State footprint;
    std::optional<bool> audit_valid;
    std::optional<State> audit_counterexample;
    std::optional<bool> derivation_accepted;
    std::string derivation_error;
};

struct PackageRecord {
    SourcePos pos;
    std::string wand;
    std::vector<FootprintRecord> footprints;
    std::vector<DerivationDocument> derivations;
};

struct MethodReport {
    std::string name;
    bool verified = true;
    std::vector<StmtRecord> statements;
    std::vector<PackageRecord> packages;
    std::size_t final_worlds = 0;
    double seconds = 0;
};

struct Report {
    Algorithm algorithm = Algorithm::Sound;
    bool verified = true;
    bool audited = false;
    std::size_t audit_violations = 0;
    std::vector<MethodReport> methods;
    double seconds = 0;
};

Report verify(const Program& p, const VerifyOptions& opts);

/// Deterministic JSON rendering; timing fields appear only when requested.
std::string report_to_json(const Report& r, const Program& p, bool include_timing);
/// Human-readable summary, one line per statement outcome and package.
std::string report_to_text(const Report& r, const Program& p);

std::vector<DerivationDocument> report_derivations(const Report& r);

} // namespace wandkit
