#pragma once

#include <stdexcept>
#include <string>

namespace conjnet {

// One exception type for the whole library; `kind` identifies the contract
// violation so callers and tests can dispatch without string matching.
class Error : public std::runtime_error {
  public:
    enum class Kind {
        MalformedRow,
        MissingParent,
        DuplicateCellId,
        NonPositiveExtent,
        DegenerateCdf,
        NoCandidateEdges,
        CyclicGraph,
        EmptyTrial,
        UnknownQueryTarget,
        TooLarge,
        ConfigError,
        DataError,
    };

    Error(Kind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}

    Kind kind() const { return kind_; }

  private:
    Kind kind_;
};

}  // namespace conjnet
