#include "cdc/json.hpp"

#include "cdc/error.hpp"

namespace cdc {

namespace {

template <class T>
T field(const Json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) throw UsageError(std::string("missing JSON field '") + name + "'");
  try {
    return j.at(name).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("bad JSON field '") + name + "': " + e.what());
  }
}

const Json& sub(const Json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) throw UsageError(std::string("missing JSON field '") + name + "'");
  return j.at(name);
}

Json optional_int(const std::optional<std::int64_t>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

Json rational_json(const Rational& r) {
  return Json{{"num", numerator_of(r).str()}, {"den", denominator_of(r).str()}};
}

Rational rational_from_json(const Json& j) {
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  try {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    return parse_rational(field<std::string>(j, "num") + "/" + field<std::string>(j, "den"));
  } catch (const UsageError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("bad rational: ") + e.what());
  }
}

Json to_json(const JobSpec& spec) {
  return Json{{"q", spec.q},
              {"n", spec.n},
              {"c_m", rational_json(spec.cm)},
              {"c_s", rational_json(spec.cs)},
              {"c_r", rational_json(spec.cr)},
              {"t_bits", spec.t_bits}};
}

JobSpec job_spec_from_json(const Json& j) {
  JobSpec spec;
  spec.q = field<int>(j, "q");
  spec.n = field<int>(j, "n");
  spec.cm = rational_from_json(sub(j, "c_m"));
  spec.cs = rational_from_json(sub(j, "c_s"));
  spec.cr = rational_from_json(sub(j, "c_r"));
  spec.t_bits = j.contains("t_bits") ? field<int>(j, "t_bits") : 64;
  validate(spec);
  return spec;
}

Json to_json(const Placement& placement) {
  Json j{{"k", placement.k}, {"map_sets", placement.map_sets}, {"reduce_sets", placement.reduce_sets}};
  if (placement.batch_index) {
    Json batches = Json::array();
    for (const Batch& b : *placement.batch_index) batches.push_back({{"label", b.label.key()}, {"files", b.files}});
    j["batch_index"] = std::move(batches);
  } else {
    j["batch_index"] = nullptr;
  }
  return j;
}

Placement placement_from_json(const Json& j) {
  Placement p;
  p.k = field<int>(j, "k");
  p.map_sets = field<std::vector<std::vector<int>>>(j, "map_sets");
  p.reduce_sets = field<std::vector<std::vector<int>>>(j, "reduce_sets");
  for (auto& m : p.map_sets) std::sort(m.begin(), m.end());
  for (auto& w : p.reduce_sets) std::sort(w.begin(), w.end());
  if (j.contains("batch_index") && !j.at("batch_index").is_null()) {
    std::vector<Batch> batches;
    for (const auto& b : j.at("batch_index")) {
      batches.push_back({parse_batch_key(field<std::string>(b, "label")), field<std::vector<int>>(b, "files")});
    }
    p.batch_index = std::move(batches);
  }
  return p;
}

Json to_json(const LoadReport& r) {
  return Json{{"p", rational_json(r.p)},
              {"l", rational_json(r.l)},
              {"t_map", rational_json(r.t_map)},
              {"t_shuffle", rational_json(r.t_shuffle)},
              {"t_reduce", rational_json(r.t_reduce)},
              {"t_sequential", rational_json(r.t_sequential)},
              {"t_parallel", rational_json(r.t_parallel)},
              {"bits_sent", r.bits_sent}};
}

Json to_json(const ValidationReport& report) {
  Json v = Json::array();
  for (const auto& violation : report.violations) v.push_back(violation.message);
  return Json{{"valid", report.ok()}, {"violations", std::move(v)}};
}

Json to_json(const AllocationPlan& plan) {
  return Json{{"mode", to_string(plan.mode)},
              {"coded", plan.coded},
              {"r_star", rational_json(plan.r_star)},
              {"k_star", optional_int(plan.k_star)},
              {"finite_k_achievable", plan.finite_k_achievable()},
              {"t_star", rational_json(plan.t_star)},
              {"t_map_pred", rational_json(plan.t_map_pred)},
              {"t_shuffle_pred", rational_json(plan.t_shuffle_pred)},
              {"t_reduce_pred", rational_json(plan.t_reduce_pred)},
              {"r_star_approx", plan.r_star_approx},
              {"r_star_unique", plan.r_star_unique}};
}

Json to_json(const EnvelopeFn& env) {
  Json points = Json::array();
  for (const auto& [r, v] : env.breakpoints) points.push_back({{"r", r}, {"value", rational_json(v)}});
  return Json{{"q", env.q}, {"breakpoints", std::move(points)}};
}

Json to_json(const SchemeLayout& layout) {
  Json strata = Json::array();
  for (const auto& s : layout.strata) {
    strata.push_back({{"stratum", to_string(s.tag)},
                      {"repetition", s.repetition},
                      {"first_file", s.first_file},
                      {"file_count", s.file_count}});
  }
  return Json{{"spec", to_json(layout.spec)},
              {"requested_n", layout.requested_n},
              {"r_effective", rational_json(layout.r_effective)},
              {"alpha", rational_json(layout.alpha)},
              {"strata", std::move(strata)},
              {"placement", to_json(layout.placement)}};
}

SchemeLayout layout_from_json(const Json& j) {
  SchemeLayout layout;
  layout.spec = job_spec_from_json(sub(j, "spec"));
  layout.requested_n = j.contains("requested_n") ? field<int>(j, "requested_n") : layout.spec.n;
  layout.r_effective = rational_from_json(sub(j, "r_effective"));
  layout.alpha = rational_from_json(sub(j, "alpha"));
  for (const auto& s : sub(j, "strata")) {
    layout.strata.push_back({parse_stratum(field<std::string>(s, "stratum")), field<int>(s, "repetition"),
                             field<int>(s, "first_file"), field<int>(s, "file_count")});
  }
  layout.placement = placement_from_json(sub(j, "placement"));
  return layout;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 15]);
  }
  return out;
}

Bytes from_hex(const std::string& hex) {
  if (hex.size() % 2) throw UsageError("odd-length hex string");
  auto nibble = [&](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw UsageError("bad hex digit");
  };
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1]));
  }
  return out;
}

Json to_json(const ShufflePlan& plan) {
  Json messages = Json::array();
  for (const auto& m : plan.messages) {
    Json groups = Json::array();
    for (const auto& g : m.xor_of) {
      groups.push_back({{"target_fn", g.target_fn},
                        {"files", g.files},
                        {"batch", g.batch ? Json(g.batch->key()) : Json(nullptr)}});
    }
    Json msg{{"sender", m.sender}, {"recipients", m.recipients}, {"groups", std::move(groups)}};
    if (m.payload) msg["payload"] = to_hex(*m.payload);
    messages.push_back(std::move(msg));
  }
  return Json{{"q", plan.q},
              {"n", plan.n},
              {"t_bits", plan.t_bits},
              {"coded", plan.coded},
              {"predicted_load", rational_json(plan.predicted_load)},
              {"total_bits", plan.total_bits()},
              {"messages", std::move(messages)}};
}

ShufflePlan shuffle_plan_from_json(const Json& j) {
  ShufflePlan plan;
  plan.q = field<int>(j, "q");
  plan.n = field<int>(j, "n");
  plan.t_bits = field<int>(j, "t_bits");
  plan.coded = field<bool>(j, "coded");
  plan.predicted_load = rational_from_json(sub(j, "predicted_load"));
  for (const auto& m : sub(j, "messages")) {
    MulticastMessage msg;
    msg.sender = field<int>(m, "sender");
    msg.recipients = field<std::vector<int>>(m, "recipients");
    for (const auto& g : sub(m, "groups")) {
      ValueGroup group;
      group.target_fn = field<int>(g, "target_fn");
      group.files = field<std::vector<int>>(g, "files");
      if (g.contains("batch") && !g.at("batch").is_null()) group.batch = parse_batch_key(field<std::string>(g, "batch"));
      msg.xor_of.push_back(std::move(group));
    }
    if (m.contains("payload")) msg.payload = from_hex(field<std::string>(m, "payload"));
    plan.messages.push_back(std::move(msg));
  }
  return plan;
}

Json to_json(const AvailabilityTable& table) {
  Json entries = Json::array();
  for (const auto& [key, count] : table.a) entries.push_back({{"s", key.first}, {"d", key.second}, {"count", count}});
  return Json{{"q", table.q}, {"n", table.n}, {"k", table.k}, {"a", std::move(entries)}};
}

Json to_json(const BoundReport& report) {
  return Json{{"raw_bound", rational_json(report.raw_bound)},
              {"enhanced_bound", rational_json(report.enhanced_bound)},
              {"time_lower_sequential", rational_json(report.time_lower_sequential)},
              {"time_lower_parallel", rational_json(report.time_lower_parallel)}};
}

Json to_json(const SearchResult& result) {
  Json per_k = Json::array();
  for (const auto& [k, v] : result.minimum_per_k) per_k.push_back({{"k", k}, {"minimum", rational_json(v)}});
  return Json{{"minimum", rational_json(result.minimum)},
              {"minimum_per_k", std::move(per_k)},
              {"evaluated", result.evaluated},
              {"witness", to_json(result.witness)}};
}

Json to_json(const RunResult& result) {
  Json outputs = Json::object();
  for (const auto& [q, d] : result.outputs) outputs[std::to_string(q)] = to_hex(d);
  return Json{{"mode", to_string(result.mode)},
              {"report", to_json(result.report)},
              {"t_total", rational_json(result.total_time())},
              {"oracle_match", result.oracle_match},
              {"failure", result.failure ? Json(*result.failure) : Json(nullptr)},
              {"digest", digest_version},
              {"outputs", std::move(outputs)}};
}

}  // namespace cdc
