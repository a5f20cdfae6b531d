#pragma once

#include <stdexcept>
#include <string>

namespace soalens {

// Position in a source file (1-based). Locations never take part in AST
// structural equality; use same_position() when they matter.
struct SourceLoc {
    int line = 0;
    int column = 0;
    std::size_t offset = 0;

    [[nodiscard]] bool same_position(const SourceLoc& o) const {
        return line == o.line && column == o.column;
    }
    friend bool operator==(const SourceLoc&, const SourceLoc&) { return true; }
};

std::string format_location(const std::string& file, const SourceLoc& loc);

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// Errors tied to a source position.
class LocatedError : public Error {
public:
    LocatedError(const std::string& kind, SourceLoc loc, std::string message, std::string file = {});

    [[nodiscard]] const SourceLoc& location() const { return loc_; }
    [[nodiscard]] const std::string& message() const { return message_; }
    [[nodiscard]] const std::string& file() const { return file_; }

private:
    SourceLoc loc_;
    std::string message_;
    std::string file_;
};

class LexError : public LocatedError {
public:
    LexError(SourceLoc loc, std::string message, std::string file = {})
        : LocatedError("lex", loc, std::move(message), std::move(file)) {}
};

class ParseError : public LocatedError {
public:
    static ParseError expected(SourceLoc loc, const std::string& what, const std::string& found,
                               std::string file = {});
    ParseError(SourceLoc loc, std::string message, std::string file = {})
        : LocatedError("parse", loc, std::move(message), std::move(file)) {}
};

class InternalError : public Error {
public:
    using Error::Error;
};

class ToolchainError : public Error {
public:
    using Error::Error;
};

}  // namespace soalens
