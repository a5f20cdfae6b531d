#include <array>
#include <cctype>
#include <fstream>
#include <sstream>

#include "soalens/frontend.hpp"

namespace soalens {

namespace {

constexpr std::array kKeywords = {
    "struct", "void", "double", "float", "int", "long", "bool", "auto", "ref",
    "for", "if", "else", "return", "true", "false", "new", "delete",
};

// Longest match first.
constexpr std::array kPuncts = {
    "::", "<=", ">=", "==", "!=", "&&", "||", "+=", "-=", "*=", "/=", "++", "--",
    "{", "}", "(", ")", "[", "]", ";", ",", ".", "&", "*", "+", "-", "/",
    "<", ">", "!", "=", ":",
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

class Lexer {
public:
    Lexer(std::string_view src, const std::string& file) : src_(src), file_(file) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_space_and_comments();
            if (pos_ >= src_.size()) break;
            out.push_back(next());
        }
        out.push_back(Token{TokenKind::Eof, "", here()});
        return out;
    }

private:
    SourceLoc here() const { return SourceLoc{line_, col_, pos_}; }

    char peek(std::size_t k = 0) const { return pos_ + k < src_.size() ? src_[pos_ + k] : '\0'; }

    void advance(std::size_t n = 1) {
        for (std::size_t i = 0; i < n && pos_ < src_.size(); ++i) {
            if (src_[pos_] == '\n') {
                ++line_;
                col_ = 1;
            } else {
                ++col_;
            }
            ++pos_;
        }
    }

    void skip_space_and_comments() {
        while (pos_ < src_.size()) {
            char c = peek();
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '/' && peek(1) == '/') {
                while (pos_ < src_.size() && peek() != '\n') advance();
            } else if (c == '/' && peek(1) == '*') {
                SourceLoc start = here();
                advance(2);
                while (pos_ < src_.size() && !(peek() == '*' && peek(1) == '/')) advance();
                if (pos_ >= src_.size()) throw LexError(start, "unterminated block comment", file_);
                advance(2);
            } else {
                break;
            }
        }
    }

    Token next() {
        SourceLoc start = here();
        char c = peek();
        if (ident_start(c)) {
            std::size_t b = pos_;
            while (ident_char(peek())) advance();
            std::string word(src_.substr(b, pos_ - b));
            return Token{is_keyword(word) ? TokenKind::Keyword : TokenKind::Identifier, std::move(word), start};
        }
        if (digit(c) || (c == '.' && digit(peek(1)))) return number(start);
        if (c == '"') return string_literal(start);
        if (c == '[' && peek(1) == '[' && attr_depth_ < 0) {
            advance(2);
            attr_depth_ = 0;
            return Token{TokenKind::AttrOpen, "[[", start};
        }
        if (c == ']' && peek(1) == ']' && attr_depth_ == 0) {
            advance(2);
            attr_depth_ = -1;
            return Token{TokenKind::AttrClose, "]]", start};
        }
        for (std::string_view p : kPuncts) {
            if (src_.substr(pos_, p.size()) == p) {
                advance(p.size());
                if (attr_depth_ >= 0) {
                    if (p == "[" || p == "(") ++attr_depth_;
                    if (p == "]" || p == ")") --attr_depth_;
                }
                return Token{TokenKind::Punct, std::string(p), start};
            }
        }
        std::ostringstream msg;
        msg << "illegal character '" << c << "'";
        throw LexError(start, msg.str(), file_);
    }

    Token number(SourceLoc start) {
        std::size_t b = pos_;
        bool is_float = false;
        while (digit(peek())) advance();
        if (peek() == '.') {
            is_float = true;
            advance();
            while (digit(peek())) advance();
        }
        if (peek() == 'e' || peek() == 'E') {
            std::size_t k = 1;
            if (peek(k) == '+' || peek(k) == '-') ++k;
            if (!digit(peek(k))) throw LexError(here(), "malformed exponent in numeric literal", file_);
            is_float = true;
            advance(k);
            while (digit(peek())) advance();
        }
        if (ident_char(peek())) throw LexError(here(), "invalid suffix on numeric literal", file_);
        return Token{is_float ? TokenKind::FloatLiteral : TokenKind::IntLiteral, std::string(src_.substr(b, pos_ - b)),
                     start};
    }

    Token string_literal(SourceLoc start) {
        std::size_t b = pos_;
        advance();
        while (true) {
            if (pos_ >= src_.size() || peek() == '\n') throw LexError(start, "unterminated string literal", file_);
            if (peek() == '\\') {
                advance(2);
                continue;
            }
            if (peek() == '"') {
                advance();
                break;
            }
            advance();
        }
        return Token{TokenKind::StringLiteral, std::string(src_.substr(b, pos_ - b)), start};
    }

    std::string_view src_;
    const std::string& file_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    int attr_depth_ = -1;  // bracket depth inside [[ ]], -1 outside
};

}  // namespace

std::string_view to_string(TokenKind kind) {
    switch (kind) {
        case TokenKind::Identifier: return "identifier";
        case TokenKind::Keyword: return "keyword";
        case TokenKind::Punct: return "punctuation";
        case TokenKind::IntLiteral: return "integer literal";
        case TokenKind::FloatLiteral: return "float literal";
        case TokenKind::StringLiteral: return "string literal";
        case TokenKind::AttrOpen: return "'[['";
        case TokenKind::AttrClose: return "']]'";
        case TokenKind::Eof: return "end of input";
    }
    return "?";
}

bool is_keyword(std::string_view word) {
    for (std::string_view k : kKeywords)
        if (k == word) return true;
    return false;
}

std::vector<Token> lex(std::string_view source, const std::string& file) { return Lexer(source, file).run(); }

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace soalens
