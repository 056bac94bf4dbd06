#pragma once

#include <memory>
#include <string>

#include "gapbench/quadrature.hpp"
#include "gapbench/rng.hpp"

namespace gapbench {

enum class ProtocolCode { PointCount, NonFinite, Malformed };

inline const char* protocol_code_name(ProtocolCode c) {
    switch (c) {
        case ProtocolCode::PointCount: return "PROTO_POINTCOUNT";
        case ProtocolCode::NonFinite: return "PROTO_NONFINITE";
        case ProtocolCode::Malformed: return "PROTO_MALFORMED";
    }
    return "PROTO_UNKNOWN";
}

class ProtocolError : public std::runtime_error {
  public:
    ProtocolError(ProtocolCode code, const std::string& detail)
        : std::runtime_error(std::string(protocol_code_name(code)) + ": " + detail), code(code) {}
    ProtocolCode code;
};

// Nonadaptive point-sample reconstruction: the sample sites depend only on
// (N, d) and are declared before any values are seen.
class ReconstructionAlgorithm {
  public:
    virtual ~ReconstructionAlgorithm() = default;
    virtual std::string name() const = 0;
    virtual std::vector<Vec> plan(std::size_t n, std::size_t d) = 0;
    virtual EvalFn reconstruct(const std::vector<Vec>& points, const Vec& values) = 0;

    // Expected-budget randomized methods may vary the per-trial count; the
    // harness then checks the empirical mean stays within the budget.
    virtual bool randomized() const { return false; }
    virtual std::vector<Vec> plan_trial(std::size_t n, std::size_t d, Rng& /*rng*/) {
        return plan(n, d);
    }

    // Adapters that hold external state declare themselves single-threaded and
    // the harness serializes their trials.
    virtual bool thread_safe() const { return true; }
};

using AlgorithmPtr = std::shared_ptr<ReconstructionAlgorithm>;

}  // namespace gapbench
