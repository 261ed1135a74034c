#pragma once

#include <stdexcept>
#include <string>

namespace mgcn {

/// Error categories. Values mirror the status codes of the C API, so the
/// shared-library layer can translate exceptions without a lookup table.
enum class ErrorCode : int {
    parse = 1,
    topology = 2,
    geometry = 3,
    shape = 4,
    config = 5,
    label = 6,
    tape = 7,
    io = 8,
    internal = 99,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

struct ParseError : Error {
    explicit ParseError(const std::string& msg) : Error(ErrorCode::parse, msg) {}
};
struct TopologyError : Error {
    explicit TopologyError(const std::string& msg) : Error(ErrorCode::topology, msg) {}
};
struct GeometryError : Error {
    explicit GeometryError(const std::string& msg) : Error(ErrorCode::geometry, msg) {}
};
struct ShapeError : Error {
    explicit ShapeError(const std::string& msg) : Error(ErrorCode::shape, msg) {}
};
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(ErrorCode::config, msg) {}
};
struct LabelError : Error {
    explicit LabelError(const std::string& msg) : Error(ErrorCode::label, msg) {}
};
struct TapeError : Error {
    explicit TapeError(const std::string& msg) : Error(ErrorCode::tape, msg) {}
};
struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(ErrorCode::io, msg) {}
};

}  // namespace mgcn
