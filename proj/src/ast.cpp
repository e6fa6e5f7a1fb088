#include <optional>
#include "wandkit/ast.hpp"

#include <stdexcept>

namespace wandkit {

namespace {

std::shared_ptr<ExprNode> make_expr(ExprKind kind) {
    auto n = std::make_shared<ExprNode>();
    n->kind = kind;
    return n;
}

std::shared_ptr<AssertionNode> make_assertion(AssertionKind kind) {
    auto n = std::make_shared<AssertionNode>();
    n->kind = kind;
    return n;
}

} // namespace

// ---------------------------------------------------------------------------
// Expr construction
// ---------------------------------------------------------------------------

Expr Expr::var(std::string name) {
    auto n = make_expr(ExprKind::Var);
    n->name = std::move(name);
    return Expr(n);
}

Expr Expr::ref_lit(std::string name) {
    auto n = make_expr(ExprKind::RefLit);
    n->name = std::move(name);
    return Expr(n);
}

Expr Expr::int_lit(std::int64_t v) {
    auto n = make_expr(ExprKind::IntLit);
    n->int_value = v;
    return Expr(n);
}

Expr Expr::bool_lit(bool v) {
    auto n = make_expr(ExprKind::BoolLit);
    n->bool_value = v;
    return Expr(n);
}

Expr Expr::perm_lit(Perm p) {
    auto n = make_expr(ExprKind::PermLit);
    n->perm_value = p;
    return Expr(n);
}

Expr Expr::field(Expr receiver, std::string field) {
    auto n = make_expr(ExprKind::Field);
    n->name = std::move(field);
    n->kids = {std::move(receiver)};
    return Expr(n);
}

Expr Expr::negate(Expr e) {
    auto n = make_expr(ExprKind::Not);
    n->kids = {std::move(e)};
    return Expr(n);
}

Expr Expr::binary(BinOp op, Expr l, Expr r) {
    auto n = make_expr(ExprKind::Binary);
    n->op = op;
    n->kids = {std::move(l), std::move(r)};
    return Expr(n);
}

Expr Expr::ternary(Expr c, Expr t, Expr e) {
    auto n = make_expr(ExprKind::Ternary);
    n->kids = {std::move(c), std::move(t), std::move(e)};
    return Expr(n);
}

Expr Expr::perm_of(Expr receiver, std::string field) {
    auto n = make_expr(ExprKind::PermOf);
    n->name = std::move(field);
    n->kids = {std::move(receiver)};
    return Expr(n);
}

std::string to_string(BinOp op) {
    switch (op) {
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::And: return "&&";
    case BinOp::Or: return "||";
    case BinOp::Implies: return "==>";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

namespace {

// Expression precedence levels, loosest first.
constexpr int kTernary = 1;
constexpr int kImplies = 2;
constexpr int kOr = 3;
constexpr int kAnd = 4;
constexpr int kCmp = 5;
constexpr int kUnary = 6;
constexpr int kPostfix = 7;

int expr_level(const Expr& e) {
    switch (e->kind) {
    case ExprKind::Ternary: return kTernary;
    case ExprKind::Binary:
        switch (e->op) {
        case BinOp::Implies: return kImplies;
        case BinOp::Or: return kOr;
        case BinOp::And: return kAnd;
        default: return kCmp;
        }
    case ExprKind::Not: return kUnary;
    case ExprKind::IntLit: return e->int_value < 0 ? kUnary : kPostfix;
    default: return kPostfix;
    }
}

std::string print_expr(const Expr& e, int min_level);

std::string print_expr_body(const Expr& e) {
    const auto& n = e.node();
    switch (n.kind) {
    case ExprKind::Var:
    case ExprKind::RefLit: return n.name;
    case ExprKind::IntLit: return std::to_string(n.int_value);
    case ExprKind::BoolLit: return n.bool_value ? "true" : "false";
    case ExprKind::PermLit:
        if (n.perm_value == kFullPerm) return "write";
        if (n.perm_value == kNoPerm) return "none";
        return to_string(n.perm_value);
    case ExprKind::Field: return print_expr(n.kids[0], kPostfix) + "." + n.name;
    case ExprKind::PermOf: return "perm(" + print_expr(n.kids[0], kPostfix) + "." + n.name + ")";
    case ExprKind::Not: return "!" + print_expr(n.kids[0], kUnary);
    case ExprKind::Ternary:
        return print_expr(n.kids[0], kCmp) + " ? " + print_expr(n.kids[1], kOr) + " : " +
               print_expr(n.kids[2], kOr);
    case ExprKind::Binary: {
        const int lvl = expr_level(e);
        int left_min = lvl;
        int right_min = lvl + 1;
        if (n.op == BinOp::Implies) {
            left_min = lvl + 1;
            right_min = lvl;
        } else if (lvl == kCmp) {
            left_min = right_min = kUnary;
        }
        return print_expr(n.kids[0], left_min) + " " + to_string(n.op) + " " +
               print_expr(n.kids[1], right_min);
    }
    }
    return "?";
}

std::string print_expr(const Expr& e, int min_level) {
    std::string body = print_expr_body(e);
    if (expr_level(e) < min_level) return "(" + body + ")";
    return body;
}

// Assertion precedence levels.
constexpr int aWand = 1;
constexpr int aImp = 2;
constexpr int aOr = 3;
constexpr int aStar = 4;
constexpr int aAtom = 5;

int pure_level(const Expr& e) {
    switch (expr_level(e)) {
    case kTernary: return 0;
    case kImplies: return aImp;
    case kOr: return aOr;
    case kAnd: return aStar;
    default: return aAtom;
    }
}

int assertion_level(const Assertion& a) {
    switch (a.kind()) {
    case AssertionKind::Wand: return aWand;
    case AssertionKind::Imp: return aImp;
    case AssertionKind::Or: return aOr;
    case AssertionKind::Star: return aStar;
    case AssertionKind::Pure: return pure_level(a->expr);
    default: return aAtom;
    }
}

std::string print_assertion(const Assertion& a, int min_level);

std::string print_args(const std::vector<Expr>& args) {
    std::string out;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) out += ", ";
        out += print_expr(args[i], 0);
    }
    return out;
}

std::string print_assertion_body(const Assertion& a) {
    const auto& n = a.node();
    switch (n.kind) {
    case AssertionKind::Star:
        return print_assertion(n.left, aStar) + " * " + print_assertion(n.right, aStar + 1);
    case AssertionKind::Or:
        return print_assertion(n.left, aOr) + " || " + print_assertion(n.right, aOr + 1);
    case AssertionKind::Imp:
        return print_assertion(Assertion::pure(n.expr), aOr) + " ==> " + print_assertion(n.left, aImp);
    case AssertionKind::Wand:
        return print_assertion(n.left, aWand + 1) +
               (n.wand_kind == WandKind::Combinable ? " --*c " : " --* ") +
               print_assertion(n.right, aWand);
    case AssertionKind::Pure: return print_expr(n.expr, 0);
    case AssertionKind::Acc: {
        std::string loc = print_expr(n.expr, kPostfix) + "." + n.name;
        if (n.amount == kFullPerm) return "acc(" + loc + ")";
        return "acc(" + loc + ", " + to_string(n.amount) + ")";
    }
    case AssertionKind::Pred: {
        std::string inst = n.name + "(" + print_args(n.args) + ")";
        if (n.amount == kFullPerm) return inst;
        return "acc(" + inst + ", " + to_string(n.amount) + ")";
    }
    }
    return "?";
}

// The parser folds pure operands of *, || and ==> into one expression; print
// such nodes in that folded form so printing and parsing agree.
std::optional<Expr> folded_pure(const Assertion& a) {
    const auto& n = a.node();
    switch (n.kind) {
    case AssertionKind::Pure: return n.expr;
    case AssertionKind::Star:
    case AssertionKind::Or: {
        auto l = folded_pure(n.left);
        auto r = l ? folded_pure(n.right) : std::nullopt;
        if (!r) return std::nullopt;
        return Expr::binary(n.kind == AssertionKind::Star ? BinOp::And : BinOp::Or, *l, *r);
    }
    case AssertionKind::Imp: {
        auto body = folded_pure(n.left);
        if (!body) return std::nullopt;
        return Expr::binary(BinOp::Implies, n.expr, *body);
    }
    default: return std::nullopt;
    }
}

std::string print_assertion(const Assertion& a, int min_level) {
    if (a.kind() != AssertionKind::Pure) {
        if (auto e = folded_pure(a)) return print_assertion(Assertion::pure(*e), min_level);
    }
    std::string body = print_assertion_body(a);
    if (assertion_level(a) < min_level) return "(" + body + ")";
    return body;
}

} // namespace

std::string to_string(const Expr& e) { return print_expr(e, 0); }
std::string to_string(const Assertion& a) { return print_assertion(a, 0); }

bool operator==(const Expr& a, const Expr& b) { return to_string(a) == to_string(b); }
bool operator==(const Assertion& a, const Assertion& b) { return to_string(a) == to_string(b); }

// ---------------------------------------------------------------------------
// Expr utilities
// ---------------------------------------------------------------------------

bool mentions_perm(const Expr& e) {
    if (e->kind == ExprKind::PermOf) return true;
    for (const auto& k : e->kids) {
        if (mentions_perm(k)) return true;
    }
    return false;
}

void collect_vars(const Expr& e, std::set<std::string>& out) {
    if (e->kind == ExprKind::Var) out.insert(e->name);
    for (const auto& k : e->kids) collect_vars(k, out);
}

Expr substitute(const Expr& e, const std::map<std::string, Expr>& bindings) {
    const auto& n = e.node();
    switch (n.kind) {
    case ExprKind::Var: {
        auto it = bindings.find(n.name);
        return it == bindings.end() ? e : it->second;
    }
    case ExprKind::RefLit:
    case ExprKind::IntLit:
    case ExprKind::BoolLit:
    case ExprKind::PermLit: return e;
    case ExprKind::Field: return Expr::field(substitute(n.kids[0], bindings), n.name);
    case ExprKind::PermOf: return Expr::perm_of(substitute(n.kids[0], bindings), n.name);
    case ExprKind::Not: return Expr::negate(substitute(n.kids[0], bindings));
    case ExprKind::Binary:
        return Expr::binary(n.op, substitute(n.kids[0], bindings), substitute(n.kids[1], bindings));
    case ExprKind::Ternary:
        return Expr::ternary(substitute(n.kids[0], bindings), substitute(n.kids[1], bindings),
                             substitute(n.kids[2], bindings));
    }
    return e;
}

// ---------------------------------------------------------------------------
// Assertion construction
// ---------------------------------------------------------------------------

Assertion Assertion::star(Assertion l, Assertion r) {
    auto n = make_assertion(AssertionKind::Star);
    n->left = std::move(l);
    n->right = std::move(r);
    return Assertion(n);
}

Assertion Assertion::imp(Expr guard, Assertion body) {
    auto n = make_assertion(AssertionKind::Imp);
    n->expr = std::move(guard);
    n->left = std::move(body);
    return Assertion(n);
}

Assertion Assertion::disj(Assertion l, Assertion r) {
    auto n = make_assertion(AssertionKind::Or);
    n->left = std::move(l);
    n->right = std::move(r);
    return Assertion(n);
}

Assertion Assertion::pure(Expr e) {
    auto n = make_assertion(AssertionKind::Pure);
    n->expr = std::move(e);
    return Assertion(n);
}

Assertion Assertion::acc(Expr receiver, std::string field, Perm amount) {
    auto n = make_assertion(AssertionKind::Acc);
    n->expr = std::move(receiver);
    n->name = std::move(field);
    n->amount = amount;
    return Assertion(n);
}

Assertion Assertion::pred(std::string name, std::vector<Expr> args, Perm fraction) {
    auto n = make_assertion(AssertionKind::Pred);
    n->name = std::move(name);
    n->args = std::move(args);
    n->amount = fraction;
    return Assertion(n);
}

Assertion Assertion::wand(Assertion lhs, Assertion rhs, WandKind kind) {
    auto n = make_assertion(AssertionKind::Wand);
    n->left = std::move(lhs);
    n->right = std::move(rhs);
    n->wand_kind = kind;
    return Assertion(n);
}

AssertionKind Assertion::kind() const { return node_->kind; }

bool Assertion::is_atom() const {
    const auto k = kind();
    return k != AssertionKind::Star && k != AssertionKind::Imp;
}

// ---------------------------------------------------------------------------
// Assertion utilities
// ---------------------------------------------------------------------------

bool is_pure(const Assertion& a) {
    switch (a.kind()) {
    case AssertionKind::Pure: return true;
    case AssertionKind::Acc:
    case AssertionKind::Pred:
    case AssertionKind::Wand: return false;
    case AssertionKind::Imp: return is_pure(a->left);
    case AssertionKind::Star:
    case AssertionKind::Or: return is_pure(a->left) && is_pure(a->right);
    }
    return false;
}

bool mentions_perm(const Assertion& a) {
    const auto& n = a.node();
    switch (n.kind) {
    case AssertionKind::Pure:
    case AssertionKind::Acc: return mentions_perm(n.expr);
    case AssertionKind::Pred:
        for (const auto& e : n.args) {
            if (mentions_perm(e)) return true;
        }
        return false;
    case AssertionKind::Imp: return mentions_perm(n.expr) || mentions_perm(n.left);
    case AssertionKind::Star:
    case AssertionKind::Or:
    case AssertionKind::Wand: return mentions_perm(n.left) || mentions_perm(n.right);
    }
    return false;
}

void collect_vars(const Assertion& a, std::set<std::string>& out) {
    const auto& n = a.node();
    switch (n.kind) {
    case AssertionKind::Pure:
    case AssertionKind::Acc: collect_vars(n.expr, out); break;
    case AssertionKind::Pred:
        for (const auto& e : n.args) collect_vars(e, out);
        break;
    case AssertionKind::Imp:
        collect_vars(n.expr, out);
        collect_vars(n.left, out);
        break;
    case AssertionKind::Star:
    case AssertionKind::Or:
    case AssertionKind::Wand:
        collect_vars(n.left, out);
        collect_vars(n.right, out);
        break;
    }
}

Assertion substitute(const Assertion& a, const std::map<std::string, Expr>& bindings) {
    const auto& n = a.node();
    switch (n.kind) {
    case AssertionKind::Star: return Assertion::star(substitute(n.left, bindings), substitute(n.right, bindings));
    case AssertionKind::Or: return Assertion::disj(substitute(n.left, bindings), substitute(n.right, bindings));
    case AssertionKind::Imp: return Assertion::imp(substitute(n.expr, bindings), substitute(n.left, bindings));
    case AssertionKind::Pure: return Assertion::pure(substitute(n.expr, bindings));
    case AssertionKind::Acc: return Assertion::acc(substitute(n.expr, bindings), n.name, n.amount);
    case AssertionKind::Pred: {
        std::vector<Expr> args;
        for (const auto& e : n.args) args.push_back(substitute(e, bindings));
        return Assertion::pred(n.name, std::move(args), n.amount);
    }
    case AssertionKind::Wand:
        return Assertion::wand(substitute(n.left, bindings), substitute(n.right, bindings), n.wand_kind);
    }
    return a;
}

Assertion scale(const Assertion& a, const Perm& factor) {
    const auto& n = a.node();
    switch (n.kind) {
    case AssertionKind::Star: return Assertion::star(scale(n.left, factor), scale(n.right, factor));
    case AssertionKind::Or: return Assertion::disj(scale(n.left, factor), scale(n.right, factor));
    case AssertionKind::Imp: return Assertion::imp(n.expr, scale(n.left, factor));
    case AssertionKind::Pure: return a;
    case AssertionKind::Acc: return Assertion::acc(n.expr, n.name, n.amount * factor);
    case AssertionKind::Pred: return Assertion::pred(n.name, n.args, n.amount * factor);
    case AssertionKind::Wand:
        // Wand instances are whole resources; a fraction of one is not expressible here.
        throw std::invalid_argument("cannot scale a magic wand atom");
    }
    return a;
}

Expr to_expr(const Assertion& a) {
    const auto& n = a.node();
    switch (n.kind) {
    case AssertionKind::Pure: return n.expr;
    case AssertionKind::Star: return Expr::binary(BinOp::And, to_expr(n.left), to_expr(n.right));
    case AssertionKind::Or: return Expr::binary(BinOp::Or, to_expr(n.left), to_expr(n.right));
    case AssertionKind::Imp: return Expr::binary(BinOp::Implies, n.expr, to_expr(n.left));
    default: throw std::invalid_argument("assertion is not pure: " + to_string(a));
    }
}

} // namespace wandkit
