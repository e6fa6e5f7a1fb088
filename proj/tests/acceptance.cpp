// Acceptance run: one line per criterion, nonzero exit if any fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>

#include "campaigns.hpp"
#include "reference.hpp"
#include "wandkit/algebra.hpp"
#include "wandkit/algorithms.hpp"
#include "wandkit/derivation_io.hpp"
#include "wandkit/oracle.hpp"
#include "wandkit/program.hpp"
#include "wandkit/verifier.hpp"

using namespace wandkit;
using namespace wandkit::testkit;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int run_cli(const std::string& args) {
    const std::string cmd = std::string(WANDKIT_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Program load(const std::string& name) { return parse_program(read_text(corpus_path(name)), corpus_path("")); }

bool contains(const std::vector<State>& xs, const State& s) { return std::find(xs.begin(), xs.end(), s) != xs.end(); }

std::string yn(bool b) { return b ? "yes" : "no"; }

Outcome laws() {
    const auto reports = check_axioms(corpus_universe("laws.universe"));
    std::uint64_t instances = 0;
    std::size_t failed = 0;
    for (const auto& r : reports) {
        instances += r.instances;
        failed += r.pass ? 0 : 1;
    }
    return {failed == 0 && !reports.empty(),
            std::to_string(reports.size()) + " axioms, " + std::to_string(instances) + " instances, " +
                std::to_string(failed) + " failing"};
}

Outcome unsoundness() {
    const std::string file = corpus_path("two_cases.wnd");
    const int fia = run_cli("verify " + file + " --algorithm fia");
    const int sound = run_cli("verify " + file + " --algorithm sound");
    VerifyOptions o;
    o.algorithm = Algorithm::Fia;
    const Program p = load("two_cases.wnd");
    const bool fia_lib = verify(p, o).verified;
    o.algorithm = Algorithm::Sound;
    const bool sound_lib = verify(p, o).verified;
    return {fia == 0 && sound == 1 && fia_lib && !sound_lib,
            "exit codes fia=" + std::to_string(fia) + " sound=" + std::to_string(sound)};
}

Outcome sound_footprint() {
    const Program p = load("two_cases.wnd");
    VerifyOptions o;
    o.emit_derivations = true;
    const Report r = verify(p, o);
    const std::string json = report_to_json(r, p, false);
    const bool in_json = json.find("\"footprint\": \"{y.g@1=0, z.g@1=0}\"") != std::string::npos;
    const State expected = parse_state("{y.g@1=0, z.g@1=0}", p.universe);
    bool recorded = false;
    if (!r.methods.empty() && !r.methods[0].packages.empty()) {
        const auto& fps = r.methods[0].packages[0].footprints;
        recorded = !fps.empty() && std::all_of(fps.begin(), fps.end(), [&](const FootprintRecord& f) {
            return f.footprint == expected;
        });
    }
    const auto docs = report_derivations(r);
    bool checked = !docs.empty();
    bool oracle = !docs.empty();
    for (const auto& d : docs) {
        const DocumentCheck c = check_document(d);
        checked = checked && c.ok && c.footprint == expected;
        oracle = oracle && Oracle(d.universe).is_footprint(expected, d.wand);
    }
    return {in_json && recorded && checked && oracle,
            "json " + yn(in_json) + ", report " + yn(recorded) + ", checker " + yn(checked) + ", oracle " + yn(oracle)};
}

Outcome from_campaign(const CampaignResult& r, std::size_t min_cases, std::size_t min_checked) {
    return {r.passed() && r.cases >= min_cases && r.checked >= min_checked, r.summary()};
}

Outcome section4() {
    const Universe u = corpus_universe("u2.universe");
    const Oracle o(u);
    const Assertion w = parse_assertion("acc(x.f, 1/2) --* acc(x.g)");
    const Assertion wc = parse_assertion("acc(x.f, 1/2) --*c acc(x.g)");
    const State sf = parse_state("{x.f@1=y}", u);
    const State sg = parse_state("{x.g@1=0}", u);
    const auto half = add(*mult(Perm(1, 2), sf), *mult(Perm(1, 2), sg));
    const bool f = o.holds(sf, w);
    const bool g = o.holds(sg, w);
    const bool mixed = half && !o.is_footprint(*half, w);
    const bool def1 = !o.is_footprint(sf, wc, WandKind::Combinable);
    const bool comb = o.check_combinable(wc).combinable;
    return {f && g && mixed && def1 && comb, "sf|=w " + yn(f) + ", sg|=w " + yn(g) + ", half-half rejected " + yn(mixed) +
                                                 ", sf not a combinable footprint " + yn(def1) + ", --*c combinable " + yn(comb)};
}

Outcome wand_w_prime() {
    const Universe u = corpus_universe("quarters.universe");
    const Oracle o(u);
    const Assertion w = parse_assertion("acc(x.f) * (x.f == y || x.f == z) * acc(x.f.g, 1/2) --* acc(y.g)");
    const State a = parse_state("{y.g@1=0}", u);
    const State b = parse_state("{y.g@1/2=0, z.g@1=0}", u);
    const State mix = parse_state("{y.g@3/4=0, z.g@1/2=0}", u);
    const bool ha = o.is_footprint(a, w);
    const bool hb = o.is_footprint(b, w);
    const bool combined = add(*mult(Perm(1, 2), a), *mult(Perm(1, 2), b)) == mix;
    const bool hm = o.is_footprint(mix, w);
    const bool comb = o.check_combinable(w).combinable;
    return {ha && hb && combined && !hm && !comb, "acc(y.g) " + yn(ha) + ", acc(y.g,1/2)*acc(z.g) " + yn(hb) +
                                                      ", half-half " + yn(hm) + ", combinable " + yn(comb)};
}

Outcome plurality() {
    const Universe u = corpus_universe("u2.universe");
    const Assertion w = parse_assertion("acc(x.b, 1/2) --* acc(x.b, 1/2) * (x.b ==> acc(x.f))");
    const State outer = parse_state("{x.f@1=y, x.b@1=false}", u);
    const State f1 = parse_state("{x.f@1=y}", u);
    const State f2 = parse_state("{x.b@1/2=false}", u);
    const auto mins = Oracle(u).minimal_footprints(w, WandKind::Standard, outer, false);
    const bool both = contains(mins, f1) && contains(mins, f2);
    const Store st;
    const PackageOutcome s = package_sound(outer, w, {}, AlgoEnv{u, st});
    const bool one = s.ok && (s.footprint == f1 || s.footprint == f2);
    const State other = s.footprint == f1 ? f2 : f1;
    bool shipped = false;
    const auto docs = parse_derivation_documents(read_text(corpus_path("plurality_half_b.deriv")), corpus_path(""));
    for (const auto& d : docs) {
        const DocumentCheck c = check_document(d);
        shipped = shipped || (c.ok && c.footprint == other);
    }
    return {both && one && shipped, std::to_string(mins.size()) + " minimal footprints, both present " + yn(both) +
                                        ", sound picks " + (s.ok ? to_string(s.footprint, u) : "nothing") +
                                        ", shipped derivation accepted " + yn(shipped)};
}

Outcome determinism() {
    std::size_t programs = 0;
    std::string mismatch;
    for (const char* name : {"two_cases.wnd", "combinable.wnd", "predicates.wnd", "rejected.wnd", "plurality.wnd", "trivial.wnd"}) {
        const Program p = load(name);
        for (const Algorithm algo : {Algorithm::Fia, Algorithm::Sound, Algorithm::Combinable}) {
            VerifyOptions o;
            o.algorithm = algo;
            o.audit = true;
            o.emit_derivations = true;
            const std::string first = report_to_json(verify(p, o), p, false);
            const std::string second = report_to_json(verify(p, o), p, false);
            o.threads = 4;
            const std::string parallel = report_to_json(verify(p, o), p, false);
            ++programs;
            if (first != second || first != parallel) mismatch = std::string(name) + " " + to_string(algo);
        }
    }
    return {mismatch.empty(), std::to_string(programs) + " program/algorithm runs" +
                                  (mismatch.empty() ? ", identical" : ", differs: " + mismatch)};
}

} // namespace

int main() {
    Rng rng(2024);
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"algebra laws", laws},
        {"fia accepts and sound rejects the unsound program", unsoundness},
        {"sound footprint of the two-case wand", sound_footprint},
        {"soundness audit", [&] { return from_campaign(soundness_campaign(rng, 500), 500, 1); }},
        {"completeness probe", [&] { return from_campaign(completeness_campaign(rng, 100), 100, 1); }},
        {"non-combinable standard wand", section4},
        {"non-combinable wand with fractional left-hand side", wand_w_prime},
        {"combinable wand properties", [&] { return from_campaign(combinable_campaign(rng, 200), 200, 200); }},
        {"footprint plurality", plurality},
        {"deterministic reports", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::ostringstream line;
        line.setf(std::ios::fixed);
        line.precision(2);
        line << (o.pass ? "[PASS] " : "[FAIL] ") << i + 1 << " " << criteria[i].first << ": " << o.detail << " (" << secs
             << "s)";
        std::cout << line.str() << std::endl;
        failed += o.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
