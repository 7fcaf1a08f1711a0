#pragma once

#include <string>

#include "atlas/render.hpp"
#include "atlas/visibility.hpp"
#include "json.hpp"

// JSON records shared by the CLI and the HTTP service.
namespace atlas::records {

using json = nlohmann::json;

json classification(Family fam, cplx value, Tier tier);

// classification plus the component center when one is found nearby
json query_result(Family fam, cplx value, Tier tier);

json ecalle_sample(const EcalleSample& s);
json phase_sample(const PhaseSample& s);
json scan_report(const ScanReport& r);

// Analysis requests: {"kind": "arc-trace" | "visibility" | "scan" | "phase", ...}.
// Throws Error(InvalidArgument) on a body that does not match the schema.
void validate_analysis(const json& request);
json run_analysis(const json& request);

json error_body(const Error& e);

}  // namespace atlas::records
