#pragma once

#include <set>

#include "selertion/ast.hpp"
#include "selertion/lexer.hpp"

namespace selertion {

inline bool is_builtin_type(const std::string& t) {
    return t == "int" || t == "float" || t == "bool" || t == "string";
}

inline bool is_assert_name(const std::string& n) {
    return n == "assertEq" || n == "assertTrue" || n == "assertNear";
}

class Parser {
public:
    explicit Parser(std::string_view src) {
        Lexer lex(src);
        toks_ = lex.tokenize();
    }

    ast::File parse_file() {
        ast::File file;
        std::set<std::string> names;
        while (!at_end()) {
            auto cls = parse_class();
            if (!names.insert(cls->name).second)
                fail("duplicate class name '" + cls->name + "' in file");
            file.classes.push_back(std::move(cls));
        }
        return file;
    }

private:
    const Token& peek(size_t off = 0) const {
        size_t i = std::min(pos_ + off, toks_.size() - 1);
        return toks_[i];
    }
    bool at_end() const { return peek().kind == Token::Kind::End; }

    [[noreturn]] void fail(const std::string& msg) {
        throw ParseError(msg, peek().line, peek().col);
    }

    const Token& advance() { return toks_[pos_++]; }

    bool check(Token::Kind k, const std::string& text) const {
        return peek().kind == k && peek().text == text;
    }
    bool check_punct(const std::string& p) const { return check(Token::Kind::Punct, p); }
    bool check_ident(const std::string& t) const { return check(Token::Kind::Ident, t); }

    bool match_punct(const std::string& p) {
        if (!check_punct(p)) return false;
        advance();
        return true;
    }
    bool match_ident(const std::string& t) {
        if (!check_ident(t)) return false;
        advance();
        return true;
    }

    void expect_punct(const std::string& p) {
        if (!match_punct(p)) fail("expected '" + p + "'");
    }

    std::string expect_any_ident() {
        if (peek().kind != Token::Kind::Ident) fail("expected identifier");
        return advance().text;
    }

    std::vector<ast::Annotation> parse_annotations() {
        std::vector<ast::Annotation> out;
        while (check_punct("@")) {
            advance();
            ast::Annotation a;
            a.name = expect_any_ident();
            if (match_punct("(")) {
                do {
                    std::string key = expect_any_ident();
                    expect_punct("=");
                    if (peek().kind != Token::Kind::Ident && peek().kind != Token::Kind::Int &&
                        peek().kind != Token::Kind::Float && peek().kind != Token::Kind::String)
                        fail("expected annotation value");
                    a.params.emplace_back(key, advance().text);
                } while (match_punct(","));
                expect_punct(")");
            }
            out.push_back(std::move(a));
        }
        return out;
    }

    ast::ClassDeclPtr parse_class() {
        auto annotations = parse_annotations();
        auto cls = std::make_unique<ast::ClassDecl>();
        cls->annotations = std::move(annotations);
        cls->line = peek().line;
        if (match_ident("enum")) {
            cls->isEnum = true;
        } else if (!match_ident("class")) {
            fail("expected 'class' or 'enum'");
        }
        cls->name = expect_any_ident();
        if (match_ident("extends")) cls->superName = expect_any_ident();
        expect_punct("{");
        while (!check_punct("}")) {
            if (at_end()) fail("unexpected end of file in class body");
            parse_member(*cls);
        }
        expect_punct("}");
        return cls;
    }

    void parse_member(ast::ClassDecl& cls) {
        // enum constants: Ident ("," Ident)* ";"
        if (cls.isEnum && peek().kind == Token::Kind::Ident && !is_member_keyword(peek().text) &&
            (peek(1).text == "," || peek(1).text == ";")) {
            do {
                cls.enumConsts.push_back(expect_any_ident());
            } while (match_punct(","));
            expect_punct(";");
            cls.memberOrder.push_back(ast::MemberKind::EnumConsts);
            return;
        }
        auto annotations = parse_annotations();
        if (check_ident("class") || check_ident("enum")) {
            auto nested = parse_class();
            nested->annotations = std::move(annotations);
            cls.nested.push_back(std::move(nested));
            cls.memberOrder.push_back(ast::MemberKind::Nested);
            return;
        }
        bool isStatic = match_ident("static");
        // constructor: ClassName "(" ...
        if (check_ident(cls.name) && peek(1).text == "(") {
            if (isStatic || !annotations.empty()) fail("constructor cannot be static or annotated");
            ast::MethodDecl m;
            m.isCtor = true;
            m.line = peek().line;
            m.name = expect_any_ident();
            parse_method_rest(m);
            cls.methods.push_back(std::move(m));
            cls.memberOrder.push_back(ast::MemberKind::Method);
            return;
        }
        std::string type = expect_any_ident();
        std::string name = expect_any_ident();
        if (check_punct("(")) {
            ast::MethodDecl m;
            m.annotations = std::move(annotations);
            m.isStatic = isStatic;
            m.returnType = type;
            m.name = name;
            m.line = peek().line;
            parse_method_rest(m);
            cls.methods.push_back(std::move(m));
            cls.memberOrder.push_back(ast::MemberKind::Method);
        } else {
            if (!annotations.empty()) fail("fields cannot be annotated");
            if (type == "void") fail("field cannot have type void");
            ast::FieldDecl f;
            f.isStatic = isStatic;
            f.typeName = type;
            f.name = name;
            f.line = peek().line;
            if (match_punct("=")) f.init = parse_expr();
            expect_punct(";");
            cls.fields.push_back(std::move(f));
            cls.memberOrder.push_back(ast::MemberKind::Field);
        }
    }

    static bool is_member_keyword(const std::string& t) {
        return t == "class" || t == "enum" || t == "static" || t == "void";
    }

    void parse_method_rest(ast::MethodDecl& m) {
        expect_punct("(");
        if (!check_punct(")")) {
            do {
                ast::Param p;
                p.typeName = expect_any_ident();
                p.name = expect_any_ident();
                m.params.push_back(std::move(p));
            } while (match_punct(","));
        }
        expect_punct(")");
        expect_punct("{");
        while (!check_punct("}")) {
            if (at_end()) fail("unexpected end of file in method body");
            m.body.push_back(parse_stmt());
        }
        expect_punct("}");
    }

    std::vector<ast::StmtPtr> parse_block() {
        expect_punct("{");
        std::vector<ast::StmtPtr> body;
        while (!check_punct("}")) {
            if (at_end()) fail("unexpected end of file in block");
            body.push_back(parse_stmt());
        }
        expect_punct("}");
        return body;
    }

    ast::StmtPtr parse_stmt() {
        auto st = std::make_unique<ast::Stmt>();
        st->line = peek().line;
        st->col = peek().col;
        if (match_ident("return")) {
            st->tag = ast::Stmt::Tag::Return;
            if (!check_punct(";")) st->expr = parse_expr();
            expect_punct(";");
            return st;
        }
        if (match_ident("if")) {
            st->tag = ast::Stmt::Tag::If;
            expect_punct("(");
            st->cond = parse_expr();
            expect_punct(")");
            st->body = parse_block();
            if (match_ident("else")) {
                if (check_ident("if")) {
                    st->elseBody.push_back(parse_stmt());
                } else {
                    st->elseBody = parse_block();
                }
            }
            return st;
        }
        if (match_ident("while")) {
            st->tag = ast::Stmt::Tag::While;
            expect_punct("(");
            st->cond = parse_expr();
            expect_punct(")");
            st->body = parse_block();
            return st;
        }
        if (match_ident("for")) {
            st->tag = ast::Stmt::Tag::For;
            expect_punct("(");
            st->init = parse_simple_stmt();
            expect_punct(";");
            st->cond = parse_expr();
            expect_punct(";");
            st->update = parse_simple_stmt();
            expect_punct(")");
            st->body = parse_block();
            return st;
        }
        if (peek().kind == Token::Kind::Ident && is_assert_name(peek().text) &&
            peek(1).text == "(") {
            st->tag = ast::Stmt::Tag::Assert;
            st->name = advance().text;
            expect_punct("(");
            if (!check_punct(")")) {
                do {
                    st->args.push_back(parse_expr());
                } while (match_punct(","));
            }
            expect_punct(")");
            expect_punct(";");
            return st;
        }
        st = parse_simple_stmt();
        expect_punct(";");
        return st;
    }

    // varDecl / assign / exprStmt without the trailing semicolon
    ast::StmtPtr parse_simple_stmt() {
        auto st = std::make_unique<ast::Stmt>();
        st->line = peek().line;
        st->col = peek().col;
        bool typeStart = peek().kind == Token::Kind::Ident &&
                         (is_builtin_type(peek().text) ||
                          (peek(1).kind == Token::Kind::Ident && !is_stmt_keyword(peek(1).text)));
        if (typeStart && peek(1).kind == Token::Kind::Ident) {
            st->tag = ast::Stmt::Tag::VarDecl;
            st->typeName = advance().text;
            st->name = expect_any_ident();
            if (match_punct("=")) st->expr = parse_expr();
            return st;
        }
        auto e = parse_expr();
        if (match_punct("=")) {
            if (e->tag != ast::Expr::Tag::Name && e->tag != ast::Expr::Tag::FieldAccess)
                fail("invalid assignment target");
            st->tag = ast::Stmt::Tag::Assign;
            st->target = std::move(e);
            st->expr = parse_expr();
            return st;
        }
        st->tag = ast::Stmt::Tag::ExprStmt;
        st->expr = std::move(e);
        return st;
    }

    static bool is_stmt_keyword(const std::string& t) {
        return t == "new" || t == "true" || t == "false" || t == "null" || t == "throw";
    }

    ast::ExprPtr parse_expr() { return parse_or(); }

    ast::ExprPtr make_binary(const std::string& op, ast::ExprPtr lhs, ast::ExprPtr rhs) {
        auto e = std::make_unique<ast::Expr>();
        e->tag = ast::Expr::Tag::Binary;
        e->text = op;
        e->line = lhs->line;
        e->col = lhs->col;
        e->lhs = std::move(lhs);
        e->rhs = std::move(rhs);
        return e;
    }

    ast::ExprPtr parse_or() {
        auto e = parse_and();
        while (check_punct("||")) {
            advance();
            e = make_binary("||", std::move(e), parse_and());
        }
        return e;
    }
    ast::ExprPtr parse_and() {
        auto e = parse_equality();
        while (check_punct("&&")) {
            advance();
            e = make_binary("&&", std::move(e), parse_equality());
        }
        return e;
    }
    ast::ExprPtr parse_equality() {
        auto e = parse_relational();
        while (check_punct("==") || check_punct("!=")) {
            std::string op = advance().text;
            e = make_binary(op, std::move(e), parse_relational());
        }
        return e;
    }
    ast::ExprPtr parse_relational() {
        auto e = parse_additive();
        while (check_punct("<") || check_punct("<=") || check_punct(">") || check_punct(">=")) {
            std::string op = advance().text;
            e = make_binary(op, std::move(e), parse_additive());
        }
        return e;
    }
    ast::ExprPtr parse_additive() {
        auto e = parse_multiplicative();
        while (check_punct("+") || check_punct("-")) {
            std::string op = advance().text;
            e = make_binary(op, std::move(e), parse_multiplicative());
        }
        return e;
    }
    ast::ExprPtr parse_multiplicative() {
        auto e = parse_unary();
        while (check_punct("*") || check_punct("/") || check_punct("%")) {
            std::string op = advance().text;
            e = make_binary(op, std::move(e), parse_unary());
        }
        return e;
    }
    ast::ExprPtr parse_unary() {
        if (check_punct("-") || check_punct("!")) {
            auto e = std::make_unique<ast::Expr>();
            e->tag = ast::Expr::Tag::Unary;
            e->line = peek().line;
            e->col = peek().col;
            e->text = advance().text;
            e->lhs = parse_unary();
            return e;
        }
        return parse_postfix();
    }

    ast::ExprPtr parse_postfix() {
        auto e = parse_primary();
        while (check_punct(".")) {
            advance();
            std::string member = expect_any_ident();
            auto outer = std::make_unique<ast::Expr>();
            outer->line = e->line;
            outer->col = e->col;
            outer->text = member;
            outer->lhs = std::move(e);
            if (match_punct("(")) {
                outer->tag = ast::Expr::Tag::Call;
                if (!check_punct(")")) {
                    do {
                        outer->args.push_back(parse_expr());
                    } while (match_punct(","));
                }
                expect_punct(")");
            } else {
                outer->tag = ast::Expr::Tag::FieldAccess;
            }
            e = std::move(outer);
        }
        return e;
    }

    ast::ExprPtr parse_primary() {
        auto e = std::make_unique<ast::Expr>();
        e->line = peek().line;
        e->col = peek().col;
        const Token& t = peek();
        switch (t.kind) {
            case Token::Kind::Int:
                e->tag = ast::Expr::Tag::IntLit;
                e->text = advance().text;
                e->intVal = std::stoll(e->text);
                return e;
            case Token::Kind::Float:
                e->tag = ast::Expr::Tag::FloatLit;
                e->text = advance().text;
                e->floatVal = std::stod(e->text);
                return e;
            case Token::Kind::String:
                e->tag = ast::Expr::Tag::StringLit;
                e->text = advance().text;
                return e;
            case Token::Kind::Ident:
                if (t.text == "true" || t.text == "false") {
                    e->tag = ast::Expr::Tag::BoolLit;
                    e->boolVal = t.text == "true";
                    e->text = advance().text;
                    return e;
                }
                if (t.text == "null") {
                    e->tag = ast::Expr::Tag::NullLit;
                    e->text = advance().text;
                    return e;
                }
                if (t.text == "new") {
                    advance();
                    e->tag = ast::Expr::Tag::New;
                    e->text = expect_any_ident();
                    expect_punct("(");
                    if (!check_punct(")")) {
                        do {
                            e->args.push_back(parse_expr());
                        } while (match_punct(","));
                    }
                    expect_punct(")");
                    return e;
                }
                if (t.text == "throw") {
                    advance();
                    e->tag = ast::Expr::Tag::Throw;
                    expect_punct("(");
                    e->text = expect_any_ident();
                    expect_punct(")");
                    return e;
                }
                // bare name or bare call
                e->text = advance().text;
                if (match_punct("(")) {
                    e->tag = ast::Expr::Tag::Call;
                    if (!check_punct(")")) {
                        do {
                            e->args.push_back(parse_expr());
                        } while (match_punct(","));
                    }
                    expect_punct(")");
                } else {
                    e->tag = ast::Expr::Tag::Name;
                }
                return e;
            default:
                break;
        }
        if (match_punct("(")) {
            auto inner = parse_expr();
            if (check_punct(",")) {  // tuple literal, only meaningful inside a list
                e->tag = ast::Expr::Tag::TupleLit;
                e->args.push_back(std::move(inner));
                while (match_punct(",")) e->args.push_back(parse_expr());
                expect_punct(")");
                return e;
            }
            expect_punct(")");
            return inner;
        }
        if (match_punct("[")) {
            e->tag = ast::Expr::Tag::ListLit;
            if (!check_punct("]")) {
                do {
                    e->args.push_back(parse_expr());
                } while (match_punct(","));
            }
            expect_punct("]");
            return e;
        }
        fail("expected expression");
    }

    std::vector<Token> toks_;
    size_t pos_ = 0;
};

inline ast::File parse_minij(std::string_view src) {
    Parser p(src);
    return p.parse_file();
}

}  // namespace selertion
