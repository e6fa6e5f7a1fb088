#include "wandkit/verifier.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <set>
#include <thread>

#include <json.hpp>

#include "wandkit/enumerate.hpp"
#include "wandkit/oracle.hpp"

namespace wandkit {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Results land at their input index, so the output never depends on scheduling.
template <class R>
std::vector<R> parallel_map(std::size_t n, unsigned threads, const std::function<R(std::size_t)>& f) {
    std::vector<R> out(n);
    const std::size_t workers = std::min<std::size_t>(std::max(1u, threads), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
        return out;
    }
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) out[i] = f(i);
        });
    }
    for (auto& t : pool) t.join();
    return out;
}

void sort_unique(std::vector<World>& ws) {
    std::sort(ws.begin(), ws.end());
    ws.erase(std::unique(ws.begin(), ws.end()), ws.end());
}

// Heap values without permission survive consumption (no havoc).
State keep_stale_values(State post, const State& before) {
    for (const auto& [l, v] : before.heap()) {
        if (!post.value(l)) post.set_value(l, v);
    }
    return post;
}

struct FootprintInfo {
    std::optional<State> lhs_case;
    State footprint;
    std::optional<DerivationDocument> doc;
};

struct Step {
    std::vector<World> next;
    std::optional<std::string> error;
    std::vector<FootprintInfo> footprints;
};

class Executor {
public:
    Executor(const Program& p, const VerifyOptions& opts) : p_(p), u_(p.universe), opts_(opts) {}

    MethodReport run(const Method& m) {
        MethodReport rep;
        rep.name = m.name;
        report_ = &rep;
        World w0;
        for (const auto& param : m.params) w0.store[param.name] = Value{*u_.find_ref(param.name)};
        std::vector<World> worlds{w0};
        for (const auto& r : m.requires_) {
            Stmt s;
            s.kind = StmtKind::Inhale;
            s.pos = m.pos;
            s.assertion = r;
            if (!exec(s, worlds)) {
                rep.verified = false;
                return rep;
            }
        }
        if (!exec_block(m.body, worlds)) {
            rep.verified = false;
            return rep;
        }
        rep.final_worlds = worlds.size();
        return rep;
    }

private:
    AlgoEnv env(const World& w, bool allow_perm = true) const { return AlgoEnv{u_, w.store, allow_perm}; }

    bool exec_block(const std::vector<Stmt>& body, std::vector<World>& worlds) {
        std::vector<std::string> declared;
        for (const auto& s : body) {
            if (!exec(s, worlds)) return false;
            if (s.kind == StmtKind::VarDecl) declared.push_back(s.name);
        }
        if (!declared.empty()) {
            for (auto& w : worlds) {
                for (const auto& name : declared) w.store.erase(name);
            }
            sort_unique(worlds);
        }
        return true;
    }

    bool exec(const Stmt& s, std::vector<World>& worlds) {
        StmtRecord rec;
        rec.pos = s.pos;
        rec.kind = s.kind;
        rec.text = statement_text(s);
        rec.worlds_in = worlds.size();
        if (s.kind == StmtKind::If) return exec_if(s, worlds, std::move(rec));

        const std::vector<World>& in = worlds;
        std::vector<Step> steps = parallel_map<Step>(in.size(), opts_.threads, [&](std::size_t i) {
            Step st;
            try {
                step(s, in[i], st);
            } catch (const EvalError& e) {
                st.error = e.what();
            } catch (const BudgetExceeded& e) {
                st.error = e.what();
            }
            return st;
        });
        for (std::size_t i = 0; i < steps.size(); ++i) {
            if (steps[i].error) {
                rec.ok = false;
                rec.diagnostic = *steps[i].error;
                rec.witness = in[i];
                report_->statements.push_back(std::move(rec));
                return false;
            }
        }
        if (s.kind == StmtKind::Package) record_package(s, in, steps);
        std::vector<World> next;
        for (auto& st : steps) {
            for (auto& w : st.next) next.push_back(std::move(w));
        }
        sort_unique(next);
        worlds = std::move(next);
        rec.worlds_out = worlds.size();
        report_->statements.push_back(std::move(rec));
        return true;
    }

    bool exec_if(const Stmt& s, std::vector<World>& worlds, StmtRecord rec) {
        std::vector<World> yes, no;
        for (const auto& w : worlds) {
            std::optional<bool> c;
            std::string err;
            try {
                c = eval_bool(s.cond, EvalContext{u_, w.store, w.state, true, true});
                if (!c) err = "condition " + to_string(s.cond) + " reads a location without permission";
            } catch (const EvalError& e) {
                err = e.what();
            }
            if (!c) {
                rec.ok = false;
                rec.diagnostic = err;
                rec.witness = w;
                report_->statements.push_back(std::move(rec));
                return false;
            }
            (*c ? yes : no).push_back(w);
        }
        rec.worlds_out = worlds.size();
        report_->statements.push_back(std::move(rec));
        if (!exec_block(s.then_body, yes)) return false;
        if (!exec_block(s.else_body, no)) return false;
        yes.insert(yes.end(), no.begin(), no.end());
        sort_unique(yes);
        worlds = std::move(yes);
        return true;
    }

    Value eval_value(const Expr& e, const World& w) const {
        auto v = eval(e, EvalContext{u_, w.store, w.state, true, true});
        if (!v) throw EvalError(to_string(e) + " reads a location without permission");
        return *v;
    }

    // The first demand the world can pay for, taken from its stable part.
    std::optional<State> covered_demand(const Assertion& a, const World& w) const {
        const State stable = stabilize(w.state);
        for (const auto& d : demands(a, u_, w.store, stable, true)) {
            if (geq(w.state, d)) return d;
        }
        return std::nullopt;
    }

    void step(const Stmt& s, const World& w, Step& st) const {
        switch (s.kind) {
        case StmtKind::Inhale:
            for (auto& state : inhale_states(w.state, s.assertion, env(w))) st.next.push_back({w.store, state});
            return;
        case StmtKind::Assert:
            if (!sat(stabilize(w.state), s.assertion, u_, w.store, nullptr, true)) {
                st.error = "assertion " + to_string(s.assertion) + " might not hold";
                return;
            }
            st.next.push_back(w);
            return;
        case StmtKind::Exhale: {
            auto d = covered_demand(s.assertion, w);
            if (!d) {
                st.error = "exhale of " + to_string(s.assertion) + " might fail";
                return;
            }
            st.next.push_back({w.store, *sub(w.state, *d)});
            return;
        }
        case StmtKind::VarDecl: {
            World n = w;
            if (s.value) {
                n.store[s.name] = eval_value(s.value, w);
            } else {
                switch (s.sort) {
                case Sort::Ref: n.store[s.name] = Value{kNull}; break;
                case Sort::Int: n.store[s.name] = Value{std::int64_t{0}}; break;
                case Sort::Bool: n.store[s.name] = Value{false}; break;
                case Sort::Perm: n.store[s.name] = Value{kNoPerm}; break;
                }
            }
            if (sort_of(n.store[s.name]) != s.sort) {
                st.error = "initializer of " + s.name + " has sort " + to_string(sort_of(n.store[s.name]));
                return;
            }
            st.next.push_back(std::move(n));
            return;
        }
        case StmtKind::Assign: {
            World n = w;
            const Value v = eval_value(s.value, w);
            if (sort_of(v) != sort_of(w.store.at(s.name))) {
                st.error = "assignment of a " + to_string(sort_of(v)) + " value to " + s.name;
                return;
            }
            n.store[s.name] = v;
            st.next.push_back(std::move(n));
            return;
        }
        case StmtKind::FieldAssign: {
            const Value recv = eval_value(s.target->kids[0], w);
            const Ref* r = std::get_if<Ref>(&recv);
            if (!r || r->is_null()) {
                st.error = "receiver of " + to_string(s.target) + " is null or not a reference";
                return;
            }
            auto loc = u_.find_loc(*r, s.target->name);
            if (!loc || w.state.perm(*loc) != kFullPerm) {
                st.error = "no write permission to " + u_.ref_name(*r) + "." + s.target->name;
                return;
            }
            const Value v = eval_value(s.value, w);
            const auto& dom = u_.loc(*loc).domain;
            if (std::find(dom.begin(), dom.end(), v) == dom.end()) {
                st.error = "value " + u_.value_to_string(v) + " lies outside the domain of " + u_.loc_name(*loc);
                return;
            }
            World n = w;
            n.state.set_value(*loc, v);
            st.next.push_back(std::move(n));
            return;
        }
        case StmtKind::Package: package_step(s, w, st); return;
        case StmtKind::Apply: {
            const Assertion& wand = s.assertion;
            auto d = covered_demand(Assertion::star(wand, wand->left), w);
            if (!d) {
                st.error = "apply of " + to_string(wand) + " might fail: no wand instance or left-hand side";
                return;
            }
            const State rest = *sub(w.state, *d);
            for (auto& state : inhale_states(rest, wand->right, env(w))) st.next.push_back({w.store, state});
            return;
        }
        case StmtKind::If: return;
        }
    }

    void package_step(const Stmt& s, const World& w, Step& st) const {
        const State outer = stabilize(w.state);
        const AlgoEnv e = env(w, false);
        PackageOutcome out = package(opts_.algorithm, outer, s.assertion, s.script, e);
        if (!out.ok) {
            st.error = "package failed: " + out.diagnostic;
            return;
        }
        for (const auto& post : out.post_states) st.next.push_back({w.store, keep_stale_values(post, w.state)});
        if (opts_.algorithm == Algorithm::Fia) {
            for (const auto& [c, fp] : out.case_footprints) st.footprints.push_back({c, fp, std::nullopt});
            if (out.case_footprints.empty()) st.footprints.push_back({std::nullopt, State{}, std::nullopt});
            return;
        }
        FootprintInfo info{std::nullopt, out.footprint, std::nullopt};
        if ((opts_.emit_derivations || opts_.audit) && out.derivation) {
            DerivationDocument doc;
            doc.universe = u_;
            const Assertion closed = close_over(s.assertion, u_, w.store);
            const WandKind kind = opts_.algorithm == Algorithm::Combinable ? WandKind::Combinable : WandKind::Standard;
            doc.wand = Assertion::wand(closed->left, closed->right, kind);
            doc.witnesses = out.witness_mode;
            if (out.witness_mode == WitnessMode::Minimal) {
                doc.outer = outer;
                doc.expected_footprint = out.footprint;
            } else {
                doc.outer = out.derivation_context.outer;
                doc.explicit_witnesses = out.derivation_context.witnesses;
                doc.extracted = out.derivation_context.extracted;
            }
            doc.proof = *out.derivation;
            info.doc = std::move(doc);
        }
        st.footprints.push_back(std::move(info));
    }

    void record_package(const Stmt& s, const std::vector<World>& in, const std::vector<Step>& steps) {
        PackageRecord pr;
        pr.pos = s.pos;
        pr.wand = to_string(s.assertion);
        const WandKind kind = opts_.algorithm == Algorithm::Combinable ? WandKind::Combinable : WandKind::Standard;
        struct Job {
            std::size_t world;
            const FootprintInfo* info;
        };
        std::vector<Job> jobs;
        for (std::size_t i = 0; i < steps.size(); ++i) {
            for (const auto& f : steps[i].footprints) jobs.push_back({i, &f});
        }
        std::vector<FootprintRecord> recs = parallel_map<FootprintRecord>(jobs.size(), opts_.threads, [&](std::size_t j) {
            const Job& job = jobs[j];
            FootprintRecord fr;
            fr.world = job.world;
            fr.lhs_case = job.info->lhs_case;
            fr.footprint = job.info->footprint;
            if (opts_.audit) {
                const Assertion closed = close_over(s.assertion, u_, in[job.world].store);
                Oracle oracle(u_);
                std::optional<State> cex;
                try {
                    fr.audit_valid = oracle.is_footprint(fr.footprint, closed, kind, &cex);
                    if (cex) fr.audit_counterexample = cex;
                } catch (const BudgetExceeded& e) {
                    fr.audit_valid = false;
                }
                if (job.info->doc) {
                    DocumentCheck dc = check_document(*job.info->doc);
                    fr.derivation_accepted = dc.ok;
                    if (!dc.ok) fr.derivation_error = dc.path.empty() ? dc.message : dc.path + ": " + dc.message;
                }
            }
            return fr;
        });
        for (std::size_t j = 0; j < jobs.size(); ++j) {
            if (recs[j].audit_valid && !*recs[j].audit_valid) ++audit_violations;
            if (recs[j].derivation_accepted && !*recs[j].derivation_accepted) ++audit_violations;
            if (opts_.emit_derivations && jobs[j].info->doc) pr.derivations.push_back(*jobs[j].info->doc);
        }
        pr.footprints = std::move(recs);
        report_->packages.push_back(std::move(pr));
    }

    const Program& p_;
    const Universe& u_;
    const VerifyOptions& opts_;
    MethodReport* report_ = nullptr;

public:
    std::size_t audit_violations = 0;
};

using nlohmann::ordered_json;

ordered_json state_json(const State& s, const Universe& u) { return to_string(s, u); }

ordered_json world_json(const World& w, const Universe& u) {
    ordered_json store = ordered_json::object();
    for (const auto& [k, v] : w.store) store[k] = u.value_to_string(v);
    ordered_json j;
    j["store"] = std::move(store);
    j["state"] = state_json(w.state, u);
    return j;
}

ordered_json pos_json(SourcePos p) {
    ordered_json j;
    j["line"] = p.line;
    j["column"] = p.column;
    return j;
}

} // namespace

Report verify(const Program& p, const VerifyOptions& opts) {
    const auto t0 = Clock::now();
    Report r;
    r.algorithm = opts.algorithm;
    r.audited = opts.audit;
    Executor ex(p, opts);
    for (const auto& m : p.methods) {
        const auto tm = Clock::now();
        MethodReport mr = ex.run(m);
        mr.seconds = seconds_since(tm);
        r.verified = r.verified && mr.verified;
        r.methods.push_back(std::move(mr));
    }
    r.audit_violations = ex.audit_violations;
    r.seconds = seconds_since(t0);
    return r;
}

std::string report_to_json(const Report& r, const Program& p, bool include_timing) {
    const Universe& u = p.universe;
    ordered_json j;
    j["format"] = "wandkit-report v1";
    j["algorithm"] = to_string(r.algorithm);
    j["verified"] = r.verified;
    if (r.audited) j["audit_violations"] = r.audit_violations;
    ordered_json methods = ordered_json::array();
    for (const auto& m : r.methods) {
        ordered_json jm;
        jm["name"] = m.name;
        jm["verified"] = m.verified;
        if (m.verified) jm["final_worlds"] = m.final_worlds;
        ordered_json stmts = ordered_json::array();
        for (const auto& s : m.statements) {
            ordered_json js = pos_json(s.pos);
            js["kind"] = to_string(s.kind);
            js["text"] = s.text;
            js["verdict"] = s.ok ? "ok" : "error";
            js["worlds_in"] = s.worlds_in;
            if (s.ok) {
                js["worlds_out"] = s.worlds_out;
            } else {
                js["diagnostic"] = s.diagnostic;
                if (s.witness) js["world"] = world_json(*s.witness, u);
            }
            stmts.push_back(std::move(js));
        }
        jm["statements"] = std::move(stmts);
        ordered_json pkgs = ordered_json::array();
        for (const auto& pk : m.packages) {
            ordered_json jp = pos_json(pk.pos);
            jp["wand"] = pk.wand;
            ordered_json fps = ordered_json::array();
            for (const auto& f : pk.footprints) {
                ordered_json jf;
                jf["world"] = f.world;
                if (f.lhs_case) jf["lhs_case"] = state_json(*f.lhs_case, u);
                jf["footprint"] = state_json(f.footprint, u);
                if (f.audit_valid) {
                    jf["audit"] = *f.audit_valid ? "valid" : "violation";
                    if (f.audit_counterexample) jf["audit_counterexample"] = state_json(*f.audit_counterexample, u);
                }
                if (f.derivation_accepted) {
                    jf["derivation"] = *f.derivation_accepted ? "accepted" : "rejected";
                    if (!f.derivation_error.empty()) jf["derivation_error"] = f.derivation_error;
                }
                fps.push_back(std::move(jf));
            }
            jp["footprints"] = std::move(fps);
            pkgs.push_back(std::move(jp));
        }
        jm["packages"] = std::move(pkgs);
        if (include_timing) jm["seconds"] = m.seconds;
        methods.push_back(std::move(jm));
    }
    j["methods"] = std::move(methods);
    if (include_timing) j["seconds"] = r.seconds;
    return j.dump(2) + "\n";
}

std::string report_to_text(const Report& r, const Program& p) {
    const Universe& u = p.universe;
    std::string out;
    for (const auto& m : r.methods) {
        for (const auto& s : m.statements) {
            if (s.ok) continue;
            out += std::to_string(s.pos.line) + ":" + std::to_string(s.pos.column) + ": error in " + m.name + ": " +
                   s.diagnostic + "\n";
            if (s.witness) out += "  world: " + world_json(*s.witness, u).dump() + "\n";
        }
        for (const auto& pk : m.packages) {
            for (const auto& f : pk.footprints) {
                out += std::to_string(pk.pos.line) + ":" + std::to_string(pk.pos.column) + ": footprint ";
                if (f.lhs_case) out += "for case " + to_string(*f.lhs_case, u) + " ";
                out += to_string(f.footprint, u);
                if (f.audit_valid && !*f.audit_valid) out += " [audit: not a footprint]";
                if (f.derivation_accepted && !*f.derivation_accepted) out += " [audit: derivation rejected]";
                out += "\n";
            }
        }
        out += m.name + ": " + (m.verified ? "verified" : "rejected") + "\n";
    }
    if (r.audited) out += "audit violations: " + std::to_string(r.audit_violations) + "\n";
    out += r.verified ? "VERIFIED\n" : "REJECTED\n";
    return out;
}

std::vector<DerivationDocument> report_derivations(const Report& r) {
    std::vector<DerivationDocument> out;
    for (const auto& m : r.methods) {
        for (const auto& pk : m.packages) out.insert(out.end(), pk.derivations.begin(), pk.derivations.end());
    }
    return out;
}

} // namespace wandkit
