#ifndef ELLIPTIC_REPORT_HPP
#define ELLIPTIC_REPORT_HPP

#include <string>

#include <json.hpp>

#include "elliptic/comparison_diagnostics.hpp"
#include "elliptic/dual.hpp"
#include "elliptic/hypothesis.hpp"
#include "elliptic/linearization.hpp"
#include "elliptic/shooting.hpp"
#include "elliptic/spectrum.hpp"

namespace elliptic {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kVersion = "0.1.0";

/// Finite numbers as JSON numbers; inf / nan as the strings "inf", "-inf", "nan".
Json number(double x);

/// Hex SHA-256 of the compact dump of a config object.
std::string config_hash(const Json& config);

Json to_json(const StructuralConstants& c);
Json to_json(const Classification& c);
Json to_json(const DecayFit& d);
Json to_json(const AdmissibilityVerdict& v);
Json to_json(const GroundState& g);
Json to_json(const HypothesisReport& r);
Json to_json(const KeyLemmaReport& r);
Json to_json(const QuasilinearSolution& q);
Json to_json(const SpectralReport& r);

/// Semilinear condition label -> the matching quasilinear label for a = 1.
std::string quasilinear_alias(const std::string& label);

}  // namespace elliptic

#endif
