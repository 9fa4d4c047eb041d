#pragma once

#include <cctype>
#include <stdexcept>
#include <string>
#include <vector>

namespace selertion {

struct ParseError : std::runtime_error {
    int line, col;
    ParseError(std::string msg, int line_, int col_)
        : std::runtime_error(std::move(msg)), line(line_), col(col_) {}
};

struct Token {
    enum class Kind { Ident, Int, Float, String, Punct, End };
    Kind kind;
    std::string text;  // lexeme; for String, the unquoted value
    int line = 1, col = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> tokenize() {
        std::vector<Token> out;
        while (true) {
            skip_ws_and_comments();
            if (pos_ >= src_.size()) break;
            out.push_back(next_token());
        }
        out.push_back({Token::Kind::End, "", line_, col_});
        return out;
    }

private:
    [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, line_, col_); }

    char peek(size_t off = 0) const {
        return pos_ + off < src_.size() ? src_[pos_ + off] : '\0';
    }

    char advance() {
        char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skip_ws_and_comments() {
        while (pos_ < src_.size()) {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '/' && peek(1) == '/') {
                while (pos_ < src_.size() && peek() != '\n') advance();
            } else if (c == '/' && peek(1) == '*') {
                advance();
                advance();
                while (pos_ < src_.size() && !(peek() == '*' && peek(1) == '/')) advance();
                if (pos_ >= src_.size()) fail("unterminated block comment");
                advance();
                advance();
            } else {
                break;
            }
        }
    }

    Token next_token() {
        int line = line_, col = col_;
        char c = peek();
        if (std::isalpha((unsigned char)c) || c == '_') {
            std::string t;
            while (std::isalnum((unsigned char)peek()) || peek() == '_') t += advance();
            return {Token::Kind::Ident, t, line, col};
        }
        if (std::isdigit((unsigned char)c)) {
            std::string t;
            bool isFloat = false;
            while (std::isdigit((unsigned char)peek())) t += advance();
            if (peek() == '.' && std::isdigit((unsigned char)peek(1))) {
                isFloat = true;
                t += advance();
                while (std::isdigit((unsigned char)peek())) t += advance();
            }
            if (peek() == 'e' || peek() == 'E') {
                isFloat = true;
                t += advance();
                if (peek() == '+' || peek() == '-') t += advance();
                if (!std::isdigit((unsigned char)peek())) fail("malformed float exponent");
                while (std::isdigit((unsigned char)peek())) t += advance();
            }
            return {isFloat ? Token::Kind::Float : Token::Kind::Int, t, line, col};
        }
        if (c == '"') {
            advance();
            std::string t;
            while (peek() != '"') {
                if (pos_ >= src_.size() || peek() == '\n') fail("unterminated string literal");
                char ch = advance();
                if (ch == '\\') {
                    char esc = advance();
                    switch (esc) {
                        case 'n': t += '\n'; break;
                        case 't': t += '\t'; break;
                        case '"': t += '"'; break;
                        case '\\': t += '\\'; break;
                        default: fail("unknown escape sequence");
                    }
                } else {
                    t += ch;
                }
            }
            advance();
            return {Token::Kind::String, t, line, col};
        }
        // multi-char operators first
        static const char* two[] = {"==", "!=", "<=", ">=", "&&", "||"};
        for (const char* op : two) {
            if (c == op[0] && peek(1) == op[1]) {
                advance();
                advance();
                return {Token::Kind::Punct, op, line, col};
            }
        }
        static const std::string single = "+-*/%<>!=(){}[],.;@";
        if (single.find(c) != std::string::npos) {
            advance();
            return {Token::Kind::Punct, std::string(1, c), line, col};
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    std::string_view src_;
    size_t pos_ = 0;
    int line_ = 1, col_ = 1;
};

}  // namespace selertion
