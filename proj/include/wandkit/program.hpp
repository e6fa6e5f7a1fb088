#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wandkit/algorithms.hpp"
#include "wandkit/ast.hpp"
#include "wandkit/parse.hpp"
#include "wandkit/universe.hpp"
#include "wandkit/value.hpp"

namespace wandkit {

enum class StmtKind { Inhale, Exhale, Assert, VarDecl, Assign, FieldAssign, If, Package, Apply };
std::string to_string(StmtKind k);

struct Stmt {
    StmtKind kind = StmtKind::Assert;
    SourcePos pos;
    Assertion assertion; // Inhale/Exhale/Assert/Package/Apply
    std::string name;    // VarDecl/Assign target
    Sort sort = Sort::Ref;
    Expr target;         // FieldAssign: the field access written to
    Expr value;          // Assign/FieldAssign/VarDecl initializer (may be empty)
    Expr cond;           // If
    std::vector<Stmt> then_body;
    std::vector<Stmt> else_body;
    ProofScript script;  // Package
};

struct Param {
    std::string name;
    Sort sort = Sort::Ref;
};

struct Method {
    std::string name;
    SourcePos pos;
    std::vector<Param> params;
    std::vector<Assertion> requires_;
    std::vector<Stmt> body;
};

struct Program {
    Universe universe;
    std::optional<std::string> universe_path;
    std::vector<Method> methods;
};

/// Parses and type-checks a program. Throws ParseError (syntax and type
/// errors, with line/column). Relative universe paths resolve against base_dir.
Program parse_program(std::string_view text, const std::string& base_dir = ".");
std::string print_program(const Program& p);
/// One-line rendering of a statement head (used in reports).
std::string statement_text(const Stmt& s);

} // namespace wandkit
