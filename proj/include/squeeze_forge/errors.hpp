#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace sqf {

/// Point outside the chart where a graphing function is defined.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class DegenerateVector : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A hypothesis of the two-ball squeezing bound fails (radicand ≤ 0, d ≥ r, ...).
class HypothesisViolated : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A type invariant does not hold for the supplied data.
class InvariantViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Gluing-radius search ran out of halvings for stage `k`.
class SearchExhausted : public std::runtime_error {
public:
    SearchExhausted(int k, int m, const std::string& what)
        : std::runtime_error(what), k_(k), m_(m) {}
    int k() const noexcept { return k_; }
    int m() const noexcept { return m_; }

private:
    int k_;
    int m_;
};

class NotFound : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Certificate assembly refused because a prerequisite report has violations.
class PrerequisiteFailed : public std::runtime_error {
public:
    PrerequisiteFailed(std::string suite, int k, const std::string& what)
        : std::runtime_error(what), suite_(std::move(suite)), k_(k) {}
    const std::string& suite() const noexcept { return suite_; }
    int k() const noexcept { return k_; }

private:
    std::string suite_;
    int k_;
};

}  // namespace sqf
