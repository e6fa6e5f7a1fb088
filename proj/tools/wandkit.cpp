// Command-line front end: verify programs, check derivations, query the oracle
// and run the algebra law suite.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "wandkit/algebra.hpp"
#include "wandkit/derivation_io.hpp"
#include "wandkit/enumerate.hpp"
#include "wandkit/oracle.hpp"
#include "wandkit/parse.hpp"
#include "wandkit/program.hpp"
#include "wandkit/verifier.hpp"

using namespace wandkit;

namespace {

constexpr int kOk = 0;
constexpr int kRejected = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write " + path);
    out << text;
}

std::string dir_of(const std::string& path) {
    auto parent = std::filesystem::path(path).parent_path();
    return parent.empty() ? "." : parent.string();
}

struct VerifyArgs {
    std::string file;
    std::string algorithm = "sound";
    std::string emit;
    std::string json;
    bool audit = false;
    unsigned threads = 1;
    bool timing = false;
};

int run_verify(const VerifyArgs& a) {
    auto algo = parse_algorithm(a.algorithm);
    if (!algo) throw UsageError("unknown algorithm " + a.algorithm);
    const Program p = parse_program(slurp(a.file), dir_of(a.file));
    VerifyOptions opts;
    opts.algorithm = *algo;
    opts.audit = a.audit;
    opts.emit_derivations = !a.emit.empty();
    opts.threads = a.threads;
    opts.timing = a.timing;
    const Report r = verify(p, opts);
    std::cout << report_to_text(r, p);
    if (a.timing) std::cout << "time: " << r.seconds << " s\n";
    if (!a.json.empty()) write_file(a.json, report_to_json(r, p, a.timing));
    if (!a.emit.empty()) write_file(a.emit, print_derivation_documents(report_derivations(r)));
    return r.verified ? kOk : kRejected;
}

int run_check_derivation(const std::string& file) {
    const auto docs = parse_derivation_documents(slurp(file), dir_of(file));
    bool all = true;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        const DocumentCheck c = check_document(docs[i]);
        std::cout << "document " << i + 1 << ": ";
        if (c.ok) {
            std::cout << "accepted, footprint " << to_string(c.footprint, docs[i].universe) << "\n";
        } else {
            all = false;
            std::cout << "rejected";
            if (!c.path.empty()) std::cout << " at " << c.path;
            std::cout << ": " << c.message << "\n";
        }
    }
    return all ? kOk : kRejected;
}

struct OracleArgs {
    std::string universe;
    std::string wand;
    std::string state;
    std::string assertion;
    std::string lhs;
    std::string rhs;
    std::string below;
    std::string kind;
    bool applicable_only = false;
    int granularity = 0;
    std::size_t budget = kDefaultBudget;
};

Assertion parse_wand_arg(const std::string& text) {
    Assertion w = parse_assertion(text);
    if (w.kind() != AssertionKind::Wand) throw UsageError("expected a wand: " + text);
    return w;
}

int run_oracle(const std::string& query, const OracleArgs& a) {
    const Universe u = load_universe_file(a.universe);
    OracleOptions opts;
    opts.granularity = a.granularity;
    opts.budget = a.budget;
    Oracle oracle(u, {}, opts);
    if (query == "footprint") {
        const Assertion w = parse_wand_arg(a.wand);
        const State s = parse_state(a.state, u);
        WandKind kind = w->wand_kind;
        if (a.kind == "standard") kind = WandKind::Standard;
        if (a.kind == "combinable") kind = WandKind::Combinable;
        std::optional<State> cex;
        const bool ok = oracle.is_footprint(s, w, kind, &cex);
        std::cout << (ok ? "footprint" : "not a footprint") << "\n";
        if (cex) std::cout << "counterexample lhs state: " << to_string(*cex, u) << "\n";
        return ok ? kOk : kRejected;
    }
    if (query == "combinable") {
        const CombinableVerdict v = oracle.check_combinable(parse_assertion(a.assertion));
        std::cout << (v.combinable ? "combinable" : "not combinable") << "\n";
        if (v.counterexample) {
            const auto& [p, q, s1, s2] = *v.counterexample;
            std::cout << "p = " << to_string(p) << ", q = " << to_string(q) << "\n"
                      << "sigma1 = " << to_string(s1, u) << "\nsigma2 = " << to_string(s2, u) << "\n";
        }
        return v.combinable ? kOk : kRejected;
    }
    if (query == "entail") {
        const Verdict v = oracle.check_entailment(parse_assertion(a.lhs), parse_assertion(a.rhs));
        std::cout << (v.holds ? "entailed" : "not entailed") << "\n";
        if (v.counterexample) std::cout << "counterexample: " << to_string(*v.counterexample, u) << "\n";
        return v.holds ? kOk : kRejected;
    }
    if (query == "minimal") {
        const Assertion w = parse_wand_arg(a.wand);
        std::optional<State> below;
        if (!a.below.empty()) below = parse_state(a.below, u);
        WandKind kind = w->wand_kind;
        if (a.kind == "standard") kind = WandKind::Standard;
        if (a.kind == "combinable") kind = WandKind::Combinable;
        for (const auto& s : oracle.minimal_footprints(w, kind, below, a.applicable_only)) {
            std::cout << to_string(s, u) << "\n";
        }
        return kOk;
    }
    throw UsageError("unknown oracle query " + query);
}

int run_laws(const std::string& file, std::size_t budget) {
    const Universe u = load_universe_file(file);
    bool all = true;
    for (const auto& r : check_axioms(u, budget)) {
        std::cout << (r.pass ? "PASS " : "FAIL ") << to_string(r.axiom) << " (" << r.instances << " instances)";
        if (!r.pass) {
            all = false;
            std::cout << " counterexample:";
            for (const auto& s : r.counterexample) std::cout << " " << to_string(s, u);
        }
        std::cout << "\n";
    }
    return all ? kOk : kRejected;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"wandkit: magic wand packaging, checking and verification"};
    app.require_subcommand(1);

    VerifyArgs va;
    auto* verify_cmd = app.add_subcommand("verify", "Verify a program");
    verify_cmd->add_option("file", va.file, "Program file")->required();
    verify_cmd->add_option("--algorithm", va.algorithm, "fia, sound or combinable")
        ->check(CLI::IsMember({"fia", "sound", "combinable"}));
    verify_cmd->add_option("--emit-derivation", va.emit, "Write derivation documents to this path");
    verify_cmd->add_option("--json", va.json, "Write the JSON report to this path");
    verify_cmd->add_flag("--audit", va.audit, "Check every packaged footprint with the oracle");
    verify_cmd->add_option("--threads", va.threads, "Worker threads")->check(CLI::Range(1u, 256u));
    verify_cmd->add_flag("--timing", va.timing, "Report wall-clock times");

    std::string deriv_file;
    auto* check_cmd = app.add_subcommand("check-derivation", "Check derivation documents");
    check_cmd->add_option("file", deriv_file, "Derivation file")->required();

    OracleArgs oa;
    auto* oracle_cmd = app.add_subcommand("oracle", "Brute-force semantic queries");
    oracle_cmd->require_subcommand(1);
    auto common = [&](CLI::App* c) {
        c->add_option("--universe", oa.universe, "Universe file")->required();
        c->add_option("--granularity", oa.granularity, "Permission lattice granularity");
        c->add_option("--budget", oa.budget, "Enumeration budget");
    };
    auto* q_fp = oracle_cmd->add_subcommand("footprint", "Is the state a footprint of the wand?");
    common(q_fp);
    q_fp->add_option("--wand", oa.wand)->required();
    q_fp->add_option("--state", oa.state)->required();
    q_fp->add_option("--kind", oa.kind)->check(CLI::IsMember({"standard", "combinable"}));
    auto* q_comb = oracle_cmd->add_subcommand("combinable", "Is the assertion combinable?");
    common(q_comb);
    q_comb->add_option("--assertion", oa.assertion)->required();
    auto* q_ent = oracle_cmd->add_subcommand("entail", "Does lhs entail rhs?");
    common(q_ent);
    q_ent->add_option("--lhs", oa.lhs)->required();
    q_ent->add_option("--rhs", oa.rhs)->required();
    auto* q_min = oracle_cmd->add_subcommand("minimal", "Minimal stable footprints of a wand");
    common(q_min);
    q_min->add_option("--wand", oa.wand)->required();
    q_min->add_option("--below", oa.below, "Only footprints below this state");
    q_min->add_flag("--applicable-only", oa.applicable_only, "Drop footprints compatible with no lhs state");
    q_min->add_option("--kind", oa.kind)->check(CLI::IsMember({"standard", "combinable"}));

    std::string laws_file;
    std::size_t laws_budget = kDefaultBudget;
    auto* laws_cmd = app.add_subcommand("laws", "Check the separation algebra axioms exhaustively");
    laws_cmd->add_option("universe", laws_file, "Universe file")->required();
    laws_cmd->add_option("--budget", laws_budget, "Enumeration budget");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*verify_cmd) return run_verify(va);
        if (*check_cmd) return run_check_derivation(deriv_file);
        if (*laws_cmd) return run_laws(laws_file, laws_budget);
        for (auto* q : {q_fp, q_comb, q_ent, q_min}) {
            if (*q) return run_oracle(q->get_name(), oa);
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kUsage;
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
