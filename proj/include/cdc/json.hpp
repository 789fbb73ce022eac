#pragma once

// JSON encoding of the public types. Field names are snake_case, ids 1-based, and
// rationals are {"num": "<int>", "den": "<int>"}.

#include "cdc/allocator.hpp"
#include "cdc/bounds.hpp"
#include "cdc/core.hpp"
#include "cdc/placement.hpp"
#include "cdc/shuffle.hpp"
#include "cdc/simulator.hpp"

#include <json.hpp>

namespace cdc {

using Json = nlohmann::ordered_json;

Json rational_json(const Rational& r);
Rational rational_from_json(const Json& j);

Json to_json(const JobSpec& spec);
JobSpec job_spec_from_json(const Json& j);

Json to_json(const Placement& placement);
Placement placement_from_json(const Json& j);

Json to_json(const LoadReport& report);
Json to_json(const ValidationReport& report);
Json to_json(const AllocationPlan& plan);
Json to_json(const EnvelopeFn& env);

Json to_json(const SchemeLayout& layout);
SchemeLayout layout_from_json(const Json& j);

Json to_json(const ShufflePlan& plan);
ShufflePlan shuffle_plan_from_json(const Json& j);

Json to_json(const AvailabilityTable& table);
Json to_json(const BoundReport& report);
Json to_json(const SearchResult& result);
Json to_json(const RunResult& result);

std::string to_hex(std::span<const std::uint8_t> bytes);
Bytes from_hex(const std::string& hex);

}  // namespace cdc
