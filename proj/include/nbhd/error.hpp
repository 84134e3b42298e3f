#ifndef NBHD_ERROR_HPP
#define NBHD_ERROR_HPP

#include <stdexcept>
#include <string>

namespace nbhd {

/**
 * Category of a failure. The service layer maps these onto HTTP status codes
 * and the CLI maps any of them onto a nonzero exit.
 */
enum class ErrorKind {
    Schema,      // missing or duplicated column in an input file
    Validation,  // input violates a data invariant (duplicate id, non-finite value, bad parameter)
    Format,      // malformed or empty file, degenerate matrix
    Io,          // unreadable or unwritable path
    State,       // operation not valid in the current state (e.g. no loaded session)
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Schema: return "schema";
        case ErrorKind::Validation: return "validation";
        case ErrorKind::Format: return "format";
        case ErrorKind::Io: return "io";
        case ErrorKind::State: return "state";
    }
    return "unknown";
}

}  // namespace nbhd

#endif
