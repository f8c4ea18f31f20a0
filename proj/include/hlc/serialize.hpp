#pragma once

// JSON forms of matrices, measurement sets, certificates and sweep results.
// Matrices carry explicit dimensions and store entries row-major as
// [re, im] pairs. Doubles are written with round-trip precision.

#include <string>
#include <variant>

#include "json.hpp"

#include "hlc/analytic_certs.hpp"
#include "hlc/lhs_sdp.hpp"
#include "hlc/measurements.hpp"
#include "hlc/states.hpp"
#include "hlc/sweep.hpp"
#include "hlc/verification.hpp"

namespace hlc {

using Json = nlohmann::json;

inline constexpr const char* kCertificateSchema = "hlc-certificate/1";
inline constexpr const char* kSweepSchema = "hlc-sweep/1";

Json matrix_to_json(const ComplexMatrix& m);
/// Throws DomainError on malformed input.
ComplexMatrix matrix_from_json(const Json& j);

Json density_to_json(const DensityMatrix& rho);
DensityMatrix density_from_json(const Json& j);

Json filters_to_json(const FilterPair& f);
FilterPair filters_from_json(const Json& j);

/// Elements as {weight, bloch}: M = (weight/2)(1 + bloch . sigma).
Json measurement_set_to_json(const MeasurementSet& ms);
MeasurementSet measurement_set_from_json(const Json& j);

Json report_to_json(const VerificationReport& r);

Json certificate_to_json(const LhsSdpCertificate& c, const MeasurementSet& ms);
Json certificate_to_json(const DecompositionCertificate& c);

struct LoadedLhsCertificate {
  LhsSdpCertificate certificate;
  MeasurementSet measurements;
};
using AnyCertificate = std::variant<LoadedLhsCertificate, DecompositionCertificate>;

/// Accepts either certificate kind; throws DomainError on a wrong schema.
AnyCertificate certificate_from_json(const Json& j);

/// Re-verifies a loaded certificate. For the icosahedron id, the stored set
/// must match the built-in one.
VerificationReport verify_any(const AnyCertificate& c);

Json config_to_json(const SweepConfig& cfg);
SweepConfig config_from_json(const Json& j);

/// Full result with every certificate embedded. Timings are included only
/// when `with_timings` is set, so the default output is deterministic.
Json sweep_to_json(const SweepResult& r, bool with_timings = false);
SweepResult sweep_from_json(const Json& j);

Json verdict_to_json(const VerdictReport& v);

/// Reads / writes a file; I/O failures throw Error naming the path.
Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace hlc
