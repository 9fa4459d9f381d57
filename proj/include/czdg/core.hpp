#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace czdg {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class MeshError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class CohesiveError : public Error {
public:
    using Error::Error;
};

class SolveError : public Error {
public:
    using Error::Error;
};

// Prints "czdg: warning: <message>" to stderr. Non-fatal diagnostics only.
void warn(const std::string& message);

// Number of worker threads for assembly loops. Honours the CZDG_THREADS
// environment variable; defaults to min(4, hardware_concurrency()).
int worker_threads();

}  // namespace czdg
