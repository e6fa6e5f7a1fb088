#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "wandkit/perm.hpp"

namespace wandkit {

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

enum class ExprKind {
    Var,     // program variable, or a reference constant when no variable is bound
    RefLit,  // reference constant produced by closing a term over a store
    IntLit,
    BoolLit,
    PermLit,
    Field,   // kids[0].name
    Not,
    Binary,
    Ternary, // kids[0] ? kids[1] : kids[2]
    PermOf   // perm(kids[0].name)
};

enum class BinOp { Eq, Ne, Lt, Le, Gt, Ge, And, Or, Implies };

std::string to_string(BinOp op);

struct ExprNode;

/// Immutable expression handle. Copies share structure.
class Expr {
public:
    Expr() = default;

    static Expr var(std::string name);
    static Expr ref_lit(std::string name);
    static Expr int_lit(std::int64_t v);
    static Expr bool_lit(bool v);
    static Expr perm_lit(Perm p);
    static Expr field(Expr receiver, std::string field);
    static Expr negate(Expr e);
    static Expr binary(BinOp op, Expr l, Expr r);
    static Expr ternary(Expr c, Expr t, Expr e);
    static Expr perm_of(Expr receiver, std::string field);

    const ExprNode& node() const { return *node_; }
    const ExprNode* operator->() const { return node_.get(); }
    explicit operator bool() const { return node_ != nullptr; }

private:
    explicit Expr(std::shared_ptr<const ExprNode> n) : node_(std::move(n)) {}
    std::shared_ptr<const ExprNode> node_;
};

struct ExprNode {
    ExprKind kind = ExprKind::BoolLit;
    std::string name; // variable / reference / field name
    std::int64_t int_value = 0;
    bool bool_value = false;
    Perm perm_value{0};
    BinOp op = BinOp::Eq;
    std::vector<Expr> kids;
};

std::string to_string(const Expr& e);
bool operator==(const Expr& a, const Expr& b);

bool mentions_perm(const Expr& e);
void collect_vars(const Expr& e, std::set<std::string>& out);
Expr substitute(const Expr& e, const std::map<std::string, Expr>& bindings);

// ---------------------------------------------------------------------------
// Assertions
// ---------------------------------------------------------------------------

enum class AssertionKind { Star, Imp, Or, Pure, Acc, Pred, Wand };
enum class WandKind { Standard, Combinable };

struct AssertionNode;

/// Immutable assertion handle.
///
/// Star, Imp and Or are the connectives the package logic decomposes; Pure, Acc,
/// Pred and Wand are the semantic atoms. Acc and Pred use at-least semantics.
class Assertion {
public:
    Assertion() = default;

    static Assertion star(Assertion l, Assertion r);
    static Assertion imp(Expr guard, Assertion body);
    static Assertion disj(Assertion l, Assertion r);
    static Assertion pure(Expr e);
    static Assertion acc(Expr receiver, std::string field, Perm amount = kFullPerm);
    static Assertion pred(std::string name, std::vector<Expr> args, Perm fraction = kFullPerm);
    static Assertion wand(Assertion lhs, Assertion rhs, WandKind kind = WandKind::Standard);

    static Assertion truth() { return pure(Expr::bool_lit(true)); }

    const AssertionNode& node() const { return *node_; }
    const AssertionNode* operator->() const { return node_.get(); }
    explicit operator bool() const { return node_ != nullptr; }

    AssertionKind kind() const;
    bool is_atom() const;

private:
    explicit Assertion(std::shared_ptr<const AssertionNode> n) : node_(std::move(n)) {}
    std::shared_ptr<const AssertionNode> node_;
};

struct AssertionNode {
    AssertionKind kind = AssertionKind::Pure;
    Assertion left;  // Star/Or left, Imp body, Wand lhs
    Assertion right; // Star/Or right, Wand rhs
    Expr expr;       // Pure expression, Imp guard, Acc receiver
    std::string name; // Acc field, Pred name
    std::vector<Expr> args;
    Perm amount{1};
    WandKind wand_kind = WandKind::Standard;
};

std::string to_string(const Assertion& a);
bool operator==(const Assertion& a, const Assertion& b);

/// True when the assertion holds no Acc, Pred or Wand atom.
bool is_pure(const Assertion& a);
bool mentions_perm(const Assertion& a);
void collect_vars(const Assertion& a, std::set<std::string>& out);
Assertion substitute(const Assertion& a, const std::map<std::string, Expr>& bindings);

/// Multiplies every Acc amount and Pred fraction by `factor`.
Assertion scale(const Assertion& a, const Perm& factor);

/// Converts a resource-free assertion into the equivalent boolean expression.
Expr to_expr(const Assertion& pure_assertion);

} // namespace wandkit
