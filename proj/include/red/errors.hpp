#pragma once

#include <stdexcept>
#include <string>

namespace red {

struct CycleError : std::runtime_error {
    explicit CycleError(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyDagError : std::runtime_error {
    explicit EmptyDagError(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidMutation : std::runtime_error {
    explicit InvalidMutation(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyReadyQueue : std::runtime_error {
    explicit EmptyReadyQueue(const std::string& what) : std::runtime_error(what) {}
};

struct ScenarioError : std::runtime_error {
    explicit ScenarioError(const std::string& what) : std::runtime_error(what) {}
};

struct UnknownPlatform : std::runtime_error {
    explicit UnknownPlatform(const std::string& what) : std::runtime_error(what) {}
};

struct MalformedTrace : std::runtime_error {
    explicit MalformedTrace(const std::string& what) : std::runtime_error(what) {}
};

struct IllegalState : std::logic_error {
    explicit IllegalState(const std::string& what) : std::logic_error(what) {}
};

} // namespace red
