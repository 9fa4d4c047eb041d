#pragma once

// Canonical pretty printer. Output is the normal form used for smart
// checksums: comments are gone (the lexer drops them) and whitespace is
// normalized, so two sources with the same token structure print
// identically. Re-parsing the output yields a structurally identical AST.

#include <string>

#include "selertion/ast.hpp"

namespace selertion {

class Printer {
public:
    std::string print(const ast::File& f) {
        out_.clear();
        for (auto& c : f.classes) print_class(*c, 0);
        return out_;
    }

    std::string print_class_text(const ast::ClassDecl& c) {
        out_.clear();
        print_class(c, 0);
        return out_;
    }

    std::string print_method_text(const ast::MethodDecl& m) {
        out_.clear();
        print_method(m, 0);
        return out_;
    }

    std::string print_stmt_text(const ast::Stmt& st) {
        out_.clear();
        print_stmt(st, 0);
        return out_;
    }

    std::string print_expr_text(const ast::Expr& e) {
        out_.clear();
        print_expr(e, 0);
        return out_;
    }

private:
    void indent(int depth) { out_.append(size_t(depth) * 2, ' '); }

    void print_annotations(const std::vector<ast::Annotation>& annots, int depth) {
        for (auto& a : annots) {
            indent(depth);
            out_ += "@" + a.name;
            if (!a.params.empty()) {
                out_ += "(";
                for (size_t i = 0; i < a.params.size(); ++i) {
                    if (i) out_ += ", ";
                    out_ += a.params[i].first + "=" + a.params[i].second;
                }
                out_ += ")";
            }
            out_ += "\n";
        }
    }

    void print_class(const ast::ClassDecl& c, int depth) {
        print_annotations(c.annotations, depth);
        indent(depth);
        out_ += c.isEnum ? "enum " : "class ";
        out_ += c.name;
        if (!c.superName.empty()) out_ += " extends " + c.superName;
        out_ += " {\n";
        // members in original order
        size_t fi = 0, mi = 0, ni = 0;
        bool constsPrinted = false;
        for (ast::MemberKind k : c.memberOrder) {
            switch (k) {
                case ast::MemberKind::EnumConsts:
                    if (!constsPrinted && !c.enumConsts.empty()) {
                        indent(depth + 1);
                        for (size_t i = 0; i < c.enumConsts.size(); ++i) {
                            if (i) out_ += ", ";
                            out_ += c.enumConsts[i];
                        }
                        out_ += ";\n";
                        constsPrinted = true;
                    }
                    break;
                case ast::MemberKind::Field: print_field(c.fields[fi++], depth + 1); break;
                case ast::MemberKind::Method: print_method(c.methods[mi++], depth + 1); break;
                case ast::MemberKind::Nested: print_class(*c.nested[ni++], depth + 1); break;
            }
        }
        indent(depth);
        out_ += "}\n";
    }

    void print_field(const ast::FieldDecl& f, int depth) {
        indent(depth);
        if (f.isStatic) out_ += "static ";
        out_ += f.typeName + " " + f.name;
        if (f.init) {
            out_ += " = ";
            print_expr(*f.init, 0);
        }
        out_ += ";\n";
    }

    void print_method(const ast::MethodDecl& m, int depth) {
        print_annotations(m.annotations, depth);
        indent(depth);
        if (m.isStatic) out_ += "static ";
        if (!m.isCtor) out_ += m.returnType + " ";
        out_ += m.name + "(";
        for (size_t i = 0; i < m.params.size(); ++i) {
            if (i) out_ += ", ";
            out_ += m.params[i].typeName + " " + m.params[i].name;
        }
        out_ += ") {\n";
        for (auto& st : m.body) print_stmt(*st, depth + 1);
        indent(depth);
        out_ += "}\n";
    }

    void print_stmt(const ast::Stmt& st, int depth) {
        using Tag = ast::Stmt::Tag;
        indent(depth);
        switch (st.tag) {
            case Tag::VarDecl:
                out_ += st.typeName + " " + st.name;
                if (st.expr) {
                    out_ += " = ";
                    print_expr(*st.expr, 0);
                }
                out_ += ";\n";
                break;
            case Tag::Assign:
                print_expr(*st.target, 0);
                out_ += " = ";
                print_expr(*st.expr, 0);
                out_ += ";\n";
                break;
            case Tag::ExprStmt:
                print_expr(*st.expr, 0);
                out_ += ";\n";
                break;
            case Tag::Assert:
                out_ += st.name + "(";
                for (size_t i = 0; i < st.args.size(); ++i) {
                    if (i) out_ += ", ";
                    print_expr(*st.args[i], 0);
                }
                out_ += ");\n";
                break;
            case Tag::Return:
                out_ += "return";
                if (st.expr) {
                    out_ += " ";
                    print_expr(*st.expr, 0);
                }
                out_ += ";\n";
                break;
            case Tag::If:
                out_ += "if (";
                print_expr(*st.cond, 0);
                out_ += ") {\n";
                for (auto& s : st.body) print_stmt(*s, depth + 1);
                indent(depth);
                out_ += "}";
                if (!st.elseBody.empty()) {
                    if (st.elseBody.size() == 1 && st.elseBody[0]->tag == Tag::If) {
                        out_ += " else ";
                        // chained else-if on one logical line
                        std::string saved = std::move(out_);
                        out_.clear();
                        print_stmt(*st.elseBody[0], depth);
                        std::string chained = std::move(out_);
                        // drop the indent the nested call emitted
                        chained.erase(0, size_t(depth) * 2);
                        out_ = std::move(saved) + chained;
                        return;
                    }
                    out_ += " else {\n";
                    for (auto& s : st.elseBody) print_stmt(*s, depth + 1);
                    indent(depth);
                    out_ += "}";
                }
                out_ += "\n";
                break;
            case Tag::While:
                out_ += "while (";
                print_expr(*st.cond, 0);
                out_ += ") {\n";
                for (auto& s : st.body) print_stmt(*s, depth + 1);
                indent(depth);
                out_ += "}\n";
                break;
            case Tag::For:
                out_ += "for (";
                print_simple(*st.init);
                out_ += "; ";
                print_expr(*st.cond, 0);
                out_ += "; ";
                print_simple(*st.update);
                out_ += ") {\n";
                for (auto& s : st.body) print_stmt(*s, depth + 1);
                indent(depth);
                out_ += "}\n";
                break;
        }
    }

    void print_simple(const ast::Stmt& st) {
        using Tag = ast::Stmt::Tag;
        if (st.tag == Tag::VarDecl) {
            out_ += st.typeName + " " + st.name;
            if (st.expr) {
                out_ += " = ";
                print_expr(*st.expr, 0);
            }
        } else if (st.tag == Tag::Assign) {
            print_expr(*st.target, 0);
            out_ += " = ";
            print_expr(*st.expr, 0);
        } else {
            print_expr(*st.expr, 0);
        }
    }

    static int prec(const std::string& op) {
        if (op == "||") return 1;
        if (op == "&&") return 2;
        if (op == "==" || op == "!=") return 3;
        if (op == "<" || op == "<=" || op == ">" || op == ">=") return 4;
        if (op == "+" || op == "-") return 5;
        return 6;  // * / %
    }

    void print_expr(const ast::Expr& e, int parentPrec) {
        using Tag = ast::Expr::Tag;
        switch (e.tag) {
            case Tag::IntLit:
            case Tag::FloatLit:
            case Tag::BoolLit:
            case Tag::NullLit:
            case Tag::Name:
                out_ += e.text;
                break;
            case Tag::StringLit: {
                out_ += '"';
                for (char c : e.text) {
                    switch (c) {
                        case '\n': out_ += "\\n"; break;
                        case '\t': out_ += "\\t"; break;
                        case '"': out_ += "\\\""; break;
                        case '\\': out_ += "\\\\"; break;
                        default: out_ += c;
                    }
                }
                out_ += '"';
                break;
            }
            case Tag::New:
                out_ += "new " + e.text + "(";
                print_args(e.args);
                out_ += ")";
                break;
            case Tag::Call:
                if (e.lhs) {
                    print_expr(*e.lhs, 7);
                    out_ += ".";
                }
                out_ += e.text + "(";
                print_args(e.args);
                out_ += ")";
                break;
            case Tag::FieldAccess:
                print_expr(*e.lhs, 7);
                out_ += "." + e.text;
                break;
            case Tag::Throw:
                out_ += "throw(" + e.text + ")";
                break;
            case Tag::Unary:
                out_ += e.text;
                print_expr(*e.lhs, 7);
                break;
            case Tag::Binary: {
                int p = prec(e.text);
                bool needParens = p < parentPrec;
                if (needParens) out_ += "(";
                print_expr(*e.lhs, p);
                out_ += " " + e.text + " ";
                print_expr(*e.rhs, p + 1);
                if (needParens) out_ += ")";
                break;
            }
            case Tag::ListLit:
                out_ += "[";
                print_args(e.args);
                out_ += "]";
                break;
            case Tag::TupleLit:
                out_ += "(";
                print_args(e.args);
                out_ += ")";
                break;
        }
    }

    void print_args(const std::vector<ast::ExprPtr>& args) {
        for (size_t i = 0; i < args.size(); ++i) {
            if (i) out_ += ", ";
            print_expr(*args[i], 0);
        }
    }

    std::string out_;
};

inline std::string pretty_print(const ast::File& f) {
    Printer p;
    return p.print(f);
}

}  // namespace selertion
