#pragma once

#include <stdexcept>
#include <string>

namespace semproto {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text (protocol source, ontology document, CSV cell).
class ParseError : public Error {
public:
    ParseError(const std::string& message, int line = 0, int column = 0)
        : Error(line > 0 ? message + " at line " + std::to_string(line) + ", column " +
                               std::to_string(column)
                         : message),
          line_(line),
          column_(column) {}

    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

class SemanticError : public Error {
public:
    using Error::Error;
};

class CycleError : public Error {
public:
    using Error::Error;
};

class DanglingReferenceError : public Error {
public:
    using Error::Error;
};

class UnknownClassError : public Error {
public:
    using Error::Error;
};

class UnknownQueryError : public Error {
public:
    using Error::Error;
};

class UnknownVariableError : public Error {
public:
    using Error::Error;
};

class UnknownColumnError : public Error {
public:
    using Error::Error;
};

class TagMismatchError : public Error {
public:
    using Error::Error;
};

class SchemaError : public Error {
public:
    using Error::Error;
};

class NoExtentError : public Error {
public:
    using Error::Error;
};

class DependencyCycleError : public Error {
public:
    using Error::Error;
};

class InconsistentTraceError : public Error {
public:
    using Error::Error;
};

class MalformedReportError : public Error {
public:
    using Error::Error;
};

}  // namespace semproto
