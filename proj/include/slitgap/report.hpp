#pragma once

#include <json.hpp>
#include <string>

#include "slitgap/closed_form.hpp"
#include "slitgap/measures.hpp"
#include "slitgap/oracle.hpp"

namespace slitgap {

using json = nlohmann::json;

const char* build_version();
json versions_json();

json to_json(const DiffReport& r);
json counterexamples_json(const DiffReport& r);
json to_json(const TailEstimate& e);
json to_json(const std::vector<PieceMismatch>& pm);
json to_json(const std::vector<ContinuityCheck>& cc);
json to_json(const AffineLattice& L);
AffineLattice surface_from_json(const json& j);  // throws InvalidInput

// {config, results, counterexamples, versions}
json make_report(const json& config, const json& results, const json& counterexamples = json::array());

std::string csv_number(double x);  // %.17g, '.' decimal regardless of locale

// "paper-reproduction" for the formula engine and closed forms,
// "ground-truth" for oracle engines.
const char* provenance_label(Engine e);

}  // namespace slitgap
