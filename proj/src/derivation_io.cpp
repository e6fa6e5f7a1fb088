#include "wandkit/derivation_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "wandkit/enumerate.hpp"
#include "wandkit/parse.hpp"

namespace wandkit {

namespace {

std::string inline_universe(const Universe& u) {
    std::istringstream in(print_universe(u));
    std::string line;
    std::getline(in, line); // header
    std::string out = "universe {\n";
    while (std::getline(in, line)) out += "  " + line + "\n";
    return out + "}\n";
}

std::string pair_text(const WitnessPair& p, const Universe& u) {
    std::string out = "(" + to_string(p.a, u) + " " + to_string(p.b, u);
    if (p.t.kind == TransformerKind::CombinableR) out += " anchor " + to_string(p.t.anchor, u);
    return out + ")";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

} // namespace

std::string print_derivation_document(const DerivationDocument& doc) {
    const Universe& u = doc.universe;
    std::ostringstream os;
    os << "derivation v1\n";
    if (doc.universe_path) {
        os << "universe \"" << *doc.universe_path << "\"\n";
    } else {
        os << inline_universe(u);
    }
    os << "wand " << to_string(doc.wand) << "\n";
    os << "outer " << to_string(doc.outer, u) << "\n";
    if (doc.witnesses == WitnessMode::Minimal) {
        os << "witnesses minimal\n";
    } else {
        os << "witnesses explicit (";
        for (const auto& p : doc.explicit_witnesses) os << "\n  " << pair_text(p, u);
        os << ")\n";
        if (!doc.extracted.is_unit()) os << "extracted " << to_string(doc.extracted, u) << "\n";
    }
    if (doc.expected_footprint) os << "footprint " << to_string(*doc.expected_footprint, u) << "\n";
    os << "proof\n" << print_derivation(doc.proof, u) << "\n";
    return os.str();
}

std::string print_derivation_documents(const std::vector<DerivationDocument>& docs) {
    std::string out;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (i) out += "---\n";
        out += print_derivation_document(docs[i]);
    }
    return out;
}

std::vector<DerivationDocument> parse_derivation_documents(std::string_view text, const std::string& base_dir) {
    TokenStream ts(tokenize(text));
    std::vector<DerivationDocument> docs;
    do {
        DerivationDocument doc;
        ts.expect("derivation");
        if (ts.expect_ident() != "v1") ts.fail("unsupported derivation format version");
        ts.expect("universe");
        if (ts.peek().kind == TokKind::String) {
            const Token path = ts.next();
            doc.universe_path = path.text;
            std::filesystem::path p(path.text);
            if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
            try {
                doc.universe = parse_universe(read_file(p.string()));
            } catch (const std::runtime_error& e) {
                throw ParseError(path.pos, e.what());
            }
        } else {
            ts.expect("{");
            doc.universe = parse_universe_directives(ts);
            ts.expect("}");
        }
        const Universe& u = doc.universe;
        ts.expect("wand");
        const SourcePos wand_pos = ts.peek().pos;
        doc.wand = parse_assertion(ts);
        if (doc.wand.kind() != AssertionKind::Wand) throw ParseError(wand_pos, "expected a wand");
        ts.expect("outer");
        doc.outer = parse_state(ts, u);
        ts.expect("witnesses");
        const std::string mode = ts.expect_ident();
        if (mode == "minimal") {
            doc.witnesses = WitnessMode::Minimal;
        } else if (mode == "explicit") {
            doc.witnesses = WitnessMode::Explicit;
            ts.expect("(");
            while (ts.accept("(")) {
                WitnessPair p;
                p.a = parse_state(ts, u);
                p.b = parse_state(ts, u);
                if (ts.accept("anchor")) {
                    p.t.kind = TransformerKind::CombinableR;
                    p.t.anchor = parse_state(ts, u);
                }
                ts.expect(")");
                doc.explicit_witnesses.push_back(std::move(p));
            }
            ts.expect(")");
            normalize(doc.explicit_witnesses);
            if (ts.accept("extracted")) doc.extracted = parse_state(ts, u);
        } else {
            ts.fail("expected 'minimal' or 'explicit'");
        }
        if (ts.accept("footprint")) doc.expected_footprint = parse_state(ts, u);
        ts.expect("proof");
        doc.proof = parse_derivation(ts, u);
        docs.push_back(std::move(doc));
    } while (ts.accept("---"));
    if (!ts.at_end()) ts.fail("trailing input");
    return docs;
}

DocumentCheck check_document(const DerivationDocument& doc) {
    DocumentCheck out;
    const Universe& u = doc.universe;
    const Store empty;
    const bool combinable = doc.wand->wand_kind == WandKind::Combinable;
    Context ctx;
    ctx.outer = doc.outer;
    try {
        if (doc.witnesses == WitnessMode::Minimal) {
            ctx.witnesses = init_witness_set(doc.wand->left, u, empty, true, combinable);
        } else {
            ctx.witnesses = doc.explicit_witnesses;
            ctx.extracted = doc.extracted;
        }
        if (!ctx.outer.valid()) {
            out.message = "outer state is not valid";
            return out;
        }
        CheckEnv env{u, empty, combinable};
        CheckResult r = check_derivation(doc.wand->right, PathCondition{}, ctx, doc.proof, env);
        if (!r.ok) {
            out.message = r.error;
            out.path = r.path;
            return out;
        }
        auto fp = extract_footprint(doc.outer, r.context.outer);
        if (!fp) {
            out.message = "final outer state is not below the initial one";
            return out;
        }
        out.footprint = *fp;
        if (doc.expected_footprint && !(*doc.expected_footprint == *fp)) {
            out.message = "footprint " + to_string(*fp, u) + " differs from the declared " +
                          to_string(*doc.expected_footprint, u);
            return out;
        }
        out.ok = true;
    } catch (const EvalError& e) {
        out.message = e.what();
    } catch (const BudgetExceeded& e) {
        out.message = e.what();
    }
    return out;
}

} // namespace wandkit
