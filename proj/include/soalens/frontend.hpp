#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "soalens/ast.hpp"

namespace soalens {

enum class TokenKind : std::uint8_t {
    Identifier,
    Keyword,
    Punct,
    IntLiteral,
    FloatLiteral,
    StringLiteral,
    AttrOpen,   // [[
    AttrClose,  // ]]
    Eof,
};

std::string_view to_string(TokenKind kind);

struct Token {
    TokenKind kind = TokenKind::Eof;
    std::string lexeme;
    SourceLoc loc;

    [[nodiscard]] bool is(TokenKind k, std::string_view text) const { return kind == k && lexeme == text; }
    [[nodiscard]] bool is_punct(std::string_view text) const { return is(TokenKind::Punct, text); }
    [[nodiscard]] bool is_keyword(std::string_view text) const { return is(TokenKind::Keyword, text); }
};

bool is_keyword(std::string_view word);

// Tokenizes miniC. Comments are dropped and an Eof token is always appended.
// `]]` is only an attribute close inside an attribute, so a[b[0]] lexes as
// two `]` punctuators.
std::vector<Token> lex(std::string_view source, const std::string& file = {});

// Builds a SourceUnit. Attribute statements attach to the for statement that
// directly follows them.
SourceUnit parse(const std::vector<Token>& tokens, std::string_view source = {}, const std::string& file = {});

SourceUnit parse_source(std::string_view source, const std::string& file = {});
SourceUnit parse_file(const std::string& path);

std::string read_text_file(const std::string& path);

}  // namespace soalens
