#include "wandkit/program.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace wandkit {

std::string to_string(StmtKind k) {
    switch (k) {
    case StmtKind::Inhale: return "inhale";
    case StmtKind::Exhale: return "exhale";
    case StmtKind::Assert: return "assert";
    case StmtKind::VarDecl: return "var";
    case StmtKind::Assign: return "assign";
    case StmtKind::FieldAssign: return "field-assign";
    case StmtKind::If: return "if";
    case StmtKind::Package: return "package";
    case StmtKind::Apply: return "apply";
    }
    return "?";
}

namespace {

std::optional<Sort> sort_named(std::string_view s) {
    if (s == "Ref") return Sort::Ref;
    if (s == "Int") return Sort::Int;
    if (s == "Bool") return Sort::Bool;
    if (s == "Perm") return Sort::Perm;
    return std::nullopt;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// Scope and name checks.
class Checker {
public:
    explicit Checker(const Universe& u) : u_(u) {}

    void push() { scopes_.emplace_back(); }
    void pop() { scopes_.pop_back(); }
    void declare(const std::string& name, SourcePos pos) {
        for (const auto& s : scopes_) {
            if (s.count(name)) throw ParseError(pos, "variable " + name + " is already declared");
        }
        scopes_.back().insert(name);
    }

    void expr(const Expr& e, SourcePos pos) const {
        const auto& n = e.node();
        switch (n.kind) {
        case ExprKind::Var:
            if (n.name != "null" && !bound(n.name) && !u_.find_ref(n.name)) {
                throw ParseError(pos, "undeclared variable " + n.name);
            }
            break;
        case ExprKind::Field:
        case ExprKind::PermOf:
            if (!u_.find_field(n.name)) throw ParseError(pos, "undeclared field " + n.name);
            break;
        default: break;
        }
        for (const auto& k : n.kids) expr(k, pos);
    }

    void assertion(const Assertion& a, SourcePos pos) const {
        const auto& n = a.node();
        switch (n.kind) {
        case AssertionKind::Star:
        case AssertionKind::Or:
            assertion(n.left, pos);
            assertion(n.right, pos);
            break;
        case AssertionKind::Wand: {
            assertion(n.left, pos);
            assertion(n.right, pos);
            std::string diag;
            if (!wf(a, &diag)) throw ParseError(pos, "ill-formed wand " + to_string(a) + ": " + diag);
            break;
        }
        case AssertionKind::Imp:
            expr(n.expr, pos);
            assertion(n.left, pos);
            break;
        case AssertionKind::Pure: expr(n.expr, pos); break;
        case AssertionKind::Acc:
            expr(n.expr, pos);
            if (!u_.find_field(n.name)) throw ParseError(pos, "undeclared field " + n.name);
            break;
        case AssertionKind::Pred: {
            const PredicateDef* def = u_.find_predicate(n.name);
            if (!def) throw ParseError(pos, "undeclared predicate " + n.name);
            if (def->params.size() != n.args.size()) throw ParseError(pos, "wrong number of arguments to " + n.name);
            for (const auto& arg : n.args) expr(arg, pos);
            break;
        }
        }
    }

    bool bound(const std::string& name) const {
        for (const auto& s : scopes_) {
            if (s.count(name)) return true;
        }
        return false;
    }

private:
    const Universe& u_;
    std::vector<std::set<std::string>> scopes_;
};

class ProgramParser {
public:
    ProgramParser(TokenStream& ts, const Universe& u) : ts_(ts), u_(u), check_(u) {}

    Method method() {
        Method m;
        m.pos = ts_.expect("method").pos;
        m.name = ts_.expect_ident();
        check_.push();
        ts_.expect("(");
        if (!ts_.is(")")) {
            do {
                const Token t = ts_.peek();
                Param p;
                p.name = ts_.expect_ident();
                ts_.expect(":");
                const std::string sort = ts_.expect_ident();
                if (sort != "Ref") throw ParseError(t.pos, "method parameters must be references");
                if (!u_.find_ref(p.name)) throw ParseError(t.pos, "parameter " + p.name + " names no reference of the universe");
                check_.declare(p.name, t.pos);
                m.params.push_back(std::move(p));
            } while (ts_.accept(","));
        }
        ts_.expect(")");
        while (ts_.is("requires")) {
            const SourcePos pos = ts_.next().pos;
            Assertion a = parse_assertion(ts_);
            check_.assertion(a, pos);
            m.requires_.push_back(std::move(a));
        }
        m.body = block();
        check_.pop();
        return m;
    }

private:
    std::vector<Stmt> block() {
        ts_.expect("{");
        check_.push();
        std::vector<Stmt> out;
        while (!ts_.is("}")) {
            if (ts_.at_end()) ts_.fail("unterminated block");
            out.push_back(statement());
            ts_.accept(";");
        }
        ts_.expect("}");
        check_.pop();
        return out;
    }

    Assertion checked_assertion(SourcePos pos) {
        Assertion a = parse_assertion(ts_);
        check_.assertion(a, pos);
        return a;
    }

    Assertion wand(SourcePos pos, const char* what) {
        Assertion a = checked_assertion(pos);
        if (a.kind() != AssertionKind::Wand) throw ParseError(pos, std::string(what) + " expects a wand, got " + to_string(a));
        return a;
    }

    Stmt statement() {
        Stmt s;
        const Token head = ts_.peek();
        s.pos = head.pos;
        if (ts_.accept("inhale")) {
            s.kind = StmtKind::Inhale;
            s.assertion = checked_assertion(s.pos);
        } else if (ts_.accept("exhale")) {
            s.kind = StmtKind::Exhale;
            s.assertion = checked_assertion(s.pos);
        } else if (ts_.accept("assert")) {
            s.kind = StmtKind::Assert;
            s.assertion = checked_assertion(s.pos);
        } else if (ts_.accept("var")) {
            s.kind = StmtKind::VarDecl;
            s.name = ts_.expect_ident();
            ts_.expect(":");
            const Token st = ts_.peek();
            auto sort = sort_named(ts_.expect_ident());
            if (!sort) throw ParseError(st.pos, "unknown sort " + st.text);
            s.sort = *sort;
            if (ts_.accept(":=")) {
                s.value = parse_expr(ts_);
                check_.expr(s.value, s.pos);
            }
            check_.declare(s.name, s.pos);
        } else if (ts_.accept("if")) {
            s.kind = StmtKind::If;
            ts_.expect("(");
            s.cond = parse_expr(ts_);
            check_.expr(s.cond, s.pos);
            ts_.expect(")");
            s.then_body = block();
            if (ts_.accept("else")) {
                if (ts_.is("if")) {
                    s.else_body.push_back(statement());
                } else {
                    s.else_body = block();
                }
            }
        } else if (ts_.accept("package")) {
            s.kind = StmtKind::Package;
            s.assertion = wand(s.pos, "package");
            if (ts_.is("{")) s.script = script_block();
        } else if (ts_.accept("apply")) {
            s.kind = StmtKind::Apply;
            s.assertion = wand(s.pos, "apply");
        } else {
            Expr lhs = parse_expr(ts_);
            ts_.expect(":=");
            s.value = parse_expr(ts_);
            check_.expr(s.value, s.pos);
            if (lhs->kind == ExprKind::Var) {
                s.kind = StmtKind::Assign;
                s.name = lhs->name;
                if (!check_.bound(s.name)) throw ParseError(s.pos, "assignment to undeclared variable " + s.name);
            } else if (lhs->kind == ExprKind::Field) {
                s.kind = StmtKind::FieldAssign;
                s.target = lhs;
                check_.expr(lhs, s.pos);
            } else {
                throw ParseError(s.pos, "invalid assignment target " + to_string(lhs));
            }
        }
        return s;
    }

    ProofScript script_block() {
        ts_.expect("{");
        ProofScript out;
        while (!ts_.is("}")) {
            if (ts_.at_end()) ts_.fail("unterminated proof script");
            out.push_back(script_statement());
            ts_.accept(";");
        }
        ts_.expect("}");
        return out;
    }

    ScriptStmt script_statement() {
        ScriptStmt s;
        s.pos = ts_.peek().pos;
        if (ts_.accept("assert")) {
            s.kind = ScriptKind::Assert;
            s.assertion = checked_assertion(s.pos);
        } else if (ts_.is("fold") || ts_.is("unfold")) {
            s.kind = ts_.next().text == "fold" ? ScriptKind::Fold : ScriptKind::Unfold;
            s.assertion = checked_assertion(s.pos);
            if (s.assertion.kind() != AssertionKind::Pred) {
                throw ParseError(s.pos, "fold/unfold expects a predicate instance");
            }
        } else if (ts_.accept("apply")) {
            s.kind = ScriptKind::Apply;
            s.assertion = wand(s.pos, "apply");
        } else if (ts_.accept("if")) {
            s.kind = ScriptKind::If;
            ts_.expect("(");
            s.cond = parse_expr(ts_);
            check_.expr(s.cond, s.pos);
            ts_.expect(")");
            s.then_branch = script_block();
            if (ts_.accept("else")) s.else_branch = script_block();
        } else {
            ts_.fail("expected a proof script statement");
        }
        return s;
    }

    TokenStream& ts_;
    const Universe& u_;
    Checker check_;
};

void print_block(std::ostream& os, const std::vector<Stmt>& body, int indent);

void print_stmt(std::ostream& os, const Stmt& s, int indent) {
    const std::string pad(static_cast<std::size_t>(indent), ' ');
    switch (s.kind) {
    case StmtKind::If:
        os << pad << "if (" << to_string(s.cond) << ") {\n";
        print_block(os, s.then_body, indent + 2);
        os << pad << "}";
        if (!s.else_body.empty()) {
            os << " else {\n";
            print_block(os, s.else_body, indent + 2);
            os << pad << "}";
        }
        os << "\n";
        return;
    case StmtKind::Package:
        os << pad << "package " << to_string(s.assertion);
        if (!s.script.empty()) os << " {\n" << print_script(s.script, indent + 2) << pad << "}";
        os << "\n";
        return;
    default: os << pad << statement_text(s) << "\n";
    }
}

void print_block(std::ostream& os, const std::vector<Stmt>& body, int indent) {
    for (const auto& s : body) print_stmt(os, s, indent);
}

} // namespace

std::string statement_text(const Stmt& s) {
    switch (s.kind) {
    case StmtKind::Inhale: return "inhale " + to_string(s.assertion);
    case StmtKind::Exhale: return "exhale " + to_string(s.assertion);
    case StmtKind::Assert: return "assert " + to_string(s.assertion);
    case StmtKind::VarDecl: {
        std::string out = "var " + s.name + ": " + to_string(s.sort);
        if (s.value) out += " := " + to_string(s.value);
        return out;
    }
    case StmtKind::Assign: return s.name + " := " + to_string(s.value);
    case StmtKind::FieldAssign: return to_string(s.target) + " := " + to_string(s.value);
    case StmtKind::If: return "if (" + to_string(s.cond) + ")";
    case StmtKind::Package: return "package " + to_string(s.assertion);
    case StmtKind::Apply: return "apply " + to_string(s.assertion);
    }
    return "?";
}

Program parse_program(std::string_view text, const std::string& base_dir) {
    TokenStream ts(tokenize(text));
    Program p;
    ts.expect("program");
    if (ts.expect_ident() != "v1") ts.fail("unsupported program format version");
    ts.expect("universe");
    if (ts.peek().kind == TokKind::String) {
        const Token path = ts.next();
        p.universe_path = path.text;
        std::filesystem::path fp(path.text);
        if (fp.is_relative()) fp = std::filesystem::path(base_dir) / fp;
        try {
            p.universe = parse_universe(read_file(fp.string()));
        } catch (const ParseError& e) {
            throw ParseError(path.pos, std::string("in universe file: ") + e.what());
        } catch (const std::runtime_error& e) {
            throw ParseError(path.pos, e.what());
        }
    } else {
        ts.expect("{");
        p.universe = parse_universe_directives(ts);
        ts.expect("}");
    }
    ProgramParser parser(ts, p.universe);
    std::set<std::string> names;
    while (!ts.at_end()) {
        const SourcePos pos = ts.peek().pos;
        Method m = parser.method();
        if (!names.insert(m.name).second) throw ParseError(pos, "duplicate method " + m.name);
        p.methods.push_back(std::move(m));
    }
    return p;
}

std::string print_program(const Program& p) {
    std::ostringstream os;
    os << "program v1\n";
    if (p.universe_path) {
        os << "universe \"" << *p.universe_path << "\"\n";
    } else {
        std::istringstream in(print_universe(p.universe));
        std::string line;
        std::getline(in, line);
        os << "universe {\n";
        while (std::getline(in, line)) os << "  " << line << "\n";
        os << "}\n";
    }
    for (const auto& m : p.methods) {
        os << "\nmethod " << m.name << "(";
        for (std::size_t i = 0; i < m.params.size(); ++i) {
            os << (i ? ", " : "") << m.params[i].name << ": " << to_string(m.params[i].sort);
        }
        os << ")\n";
        for (const auto& r : m.requires_) os << "  requires " << to_string(r) << "\n";
        os << "{\n";
        print_block(os, m.body, 2);
        os << "}\n";
    }
    return os.str();
}

} // namespace wandkit
