#pragma once

// AST for MiniJ, the small object-oriented subject language the
// selection pipeline operates on.

#include <memory>
#include <string>
#include <vector>

namespace selertion::ast {

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Expr {
    enum class Tag {
        IntLit,
        FloatLit,
        StringLit,
        BoolLit,
        NullLit,
        Name,
        New,          // new Ident(args)
        Call,         // receiver.name(args); receiver null for bare calls
        FieldAccess,  // receiver.name
        Unary,        // op in text, operand in lhs
        Binary,       // op in text, lhs/rhs
        Throw,        // throw(Name) builtin
        ListLit,      // [elem, ...] -- only valid as a params initializer
        TupleLit      // (elem, ...) inside a list literal
    };

    Tag tag;
    std::string text;       // lexeme for literals, identifier for Name, op for
                            // Unary/Binary, callee/class name for Call/New/Throw/FieldAccess
    long long intVal = 0;
    double floatVal = 0.0;
    bool boolVal = false;
    ExprPtr lhs, rhs;       // Unary operand in lhs; Call/FieldAccess receiver in lhs
    std::vector<ExprPtr> args;
    int line = 0, col = 0;
};

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

struct Stmt {
    enum class Tag { VarDecl, Assign, ExprStmt, Assert, Return, If, While, For };

    Tag tag;
    std::string typeName;       // VarDecl
    std::string name;           // VarDecl variable name; Assert builtin name
    ExprPtr target;             // Assign target: Name or FieldAccess
    ExprPtr expr;               // VarDecl init / Assign value / ExprStmt / Return value
    ExprPtr cond;               // If / While / For
    std::vector<ExprPtr> args;  // Assert arguments
    StmtPtr init, update;       // For
    std::vector<StmtPtr> body;      // If-then / While / For
    std::vector<StmtPtr> elseBody;  // If-else
    int line = 0, col = 0;
};

struct Annotation {
    std::string name;
    std::vector<std::pair<std::string, std::string>> params;
};

struct Param {
    std::string typeName;
    std::string name;
};

struct MethodDecl {
    std::vector<Annotation> annotations;
    bool isStatic = false;
    bool isCtor = false;
    std::string returnType;  // "void" or a type name; empty for constructors
    std::string name;
    std::vector<Param> params;
    std::vector<StmtPtr> body;
    int line = 0;

    bool has_annotation(const std::string& n) const {
        for (auto& a : annotations)
            if (a.name == n) return true;
        return false;
    }
    std::string annotation_value(const std::string& annot, const std::string& key) const {
        for (auto& a : annotations) {
            if (a.name != annot) continue;
            for (auto& [k, v] : a.params)
                if (k == key) return v;
        }
        return {};
    }
};

struct FieldDecl {
    bool isStatic = false;
    std::string typeName;
    std::string name;
    ExprPtr init;
    int line = 0;
};

struct ClassDecl;
using ClassDeclPtr = std::unique_ptr<ClassDecl>;

// Ordered member record, needed for the CH/OT/M/nested partition check.
enum class MemberKind { Field, Method, Nested, EnumConsts };

struct ClassDecl {
    std::vector<Annotation> annotations;
    bool isEnum = false;
    std::string name;
    std::string superName;  // empty when no extends clause
    std::vector<FieldDecl> fields;
    std::vector<MethodDecl> methods;
    std::vector<ClassDeclPtr> nested;
    std::vector<std::string> enumConsts;
    std::vector<MemberKind> memberOrder;
    int line = 0;

    bool has_annotation(const std::string& n) const {
        for (auto& a : annotations)
            if (a.name == n) return true;
        return false;
    }
};

struct File {
    std::vector<ClassDeclPtr> classes;
};

}  // namespace selertion::ast
