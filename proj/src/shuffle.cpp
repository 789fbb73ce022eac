#include "cdc/shuffle.hpp"

#include "cdc/combinatorics.hpp"
#include "cdc/error.hpp"

#include <algorithm>
#include <string>
#include <unordered_map>

namespace cdc {

namespace {

std::string value_name(int q, int n) { return "(" + std::to_string(q) + "," + std::to_string(n) + ")"; }

}  // namespace

void xor_into(std::span<std::uint8_t> dst, std::span<const std::uint8_t> src) {
  if (dst.size() != src.size()) {
    throw InvalidSchemeError("xor of unequal lengths " + std::to_string(dst.size()) + " and " +
                             std::to_string(src.size()));
  }
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] ^= src[i];
}

ValueStore::ValueStore(int q, int n, int value_bytes)
    : q_(q),
      n_(n),
      value_bytes_(value_bytes),
      data_(static_cast<std::size_t>(q) * n * value_bytes, 0),
      present_(static_cast<std::size_t>(q) * n, 0) {}

std::size_t ValueStore::index(int q, int n) const {
  if (q < 1 || q > q_ || n < 1 || n > n_) throw InvalidSchemeError("value " + value_name(q, n) + " out of range");
  return static_cast<std::size_t>(q - 1) * n_ + (n - 1);
}

std::span<const std::uint8_t> ValueStore::at(int q, int n) const {
  std::size_t i = index(q, n);
  if (!present_[i]) throw InvalidSchemeError("value " + value_name(q, n) + " not available");
  return {data_.data() + i * value_bytes_, static_cast<std::size_t>(value_bytes_)};
}

std::span<std::uint8_t> ValueStore::slot(int q, int n) {
  std::size_t i = index(q, n);
  present_[i] = 1;
  return {data_.data() + i * value_bytes_, static_cast<std::size_t>(value_bytes_)};
}

void ValueStore::put(int q, int n, std::span<const std::uint8_t> bytes) {
  if (bytes.size() != static_cast<std::size_t>(value_bytes_)) {
    throw InvalidSchemeError("value " + value_name(q, n) + " has " + std::to_string(bytes.size()) +
                             " bytes, expected " + std::to_string(value_bytes_));
  }
  auto dst = slot(q, n);
  std::copy(bytes.begin(), bytes.end(), dst.begin());
}

std::size_t ValueStore::size() const { return std::count(present_.begin(), present_.end(), 1); }

std::vector<ValueStore> local_stores(const Placement& placement, const ValueStore& values) {
  std::vector<ValueStore> stores;
  stores.reserve(placement.k);
  for (const auto& files : placement.map_sets) {
    ValueStore local(values.q(), values.n(), values.value_bytes());
    for (int n : files) {
      for (int q = 1; q <= values.q(); ++q) local.put(q, n, values.at(q, n));
    }
    stores.push_back(std::move(local));
  }
  return stores;
}

std::int64_t MulticastMessage::payload_bytes(int value_bytes) const {
  if (xor_of.empty()) return 0;
  return static_cast<std::int64_t>(xor_of.front().files.size()) * value_bytes;
}

std::int64_t ShufflePlan::total_bits() const {
  std::int64_t bits = 0;
  for (const auto& m : messages) bits += m.payload_bytes(t_bits / 8) * 8;
  return bits;
}

namespace {

Rational load_of(const ShufflePlan& plan) {
  std::int64_t values = 0;
  for (const auto& m : plan.messages) values += m.payload_bytes(1);
  return make_rational(values, static_cast<std::int64_t>(plan.q) * plan.n);
}

}  // namespace

ShufflePlan build_coded_plan(const SchemeLayout& layout) {
  if (!layout.placement.batch_index) throw InfeasibleError("coded shuffle needs a layout with batch labels");
  const int q = layout.spec.q;

  std::map<std::string, const Batch*> by_key;
  for (const Batch& b : layout.labels()) by_key.emplace(b.label.key(), &b);

  ShufflePlan plan;
  plan.q = q;
  plan.n = layout.spec.n;
  plan.t_bits = layout.spec.t_bits;
  plan.coded = true;

  for (int helper = q + 1; helper <= layout.k(); ++helper) {
    for (const StratumInfo& stratum : layout.strata) {
      if (stratum.file_count == 0 || stratum.repetition >= q) continue;
      for (SubsetMask s : colex_subsets(q, stratum.repetition + 1)) {
        MulticastMessage msg;
        msg.sender = helper;
        msg.recipients = mask_to_ids(s);
        for (int k : msg.recipients) {
          BatchLabel label{helper, mask_to_ids(s & ~(SubsetMask{1} << (k - 1))), stratum.tag};
          auto it = by_key.find(label.key());
          if (it == by_key.end()) throw InvalidSchemeError("layout is missing batch " + label.key());
          msg.xor_of.push_back({k, it->second->files, label});
        }
        plan.messages.push_back(std::move(msg));
      }
    }
  }
  plan.predicted_load = load_of(plan);
  return plan;
}

ShufflePlan build_uncoded_plan(const JobSpec& spec, const Placement& placement) {
  if (auto report = validate_placement(spec, placement); !report.ok()) {
    throw InvalidSchemeError("uncoded shuffle on invalid placement: " + report.violations.front().message);
  }
  std::vector<int> lowest_mapper(spec.n + 1, 0);
  std::vector<int> reducer(spec.q + 1, 0);
  std::vector<std::vector<char>> maps(placement.k, std::vector<char>(spec.n + 1, 0));
  for (int server = placement.k; server >= 1; --server) {
    for (int n : placement.map_set(server)) {
      lowest_mapper[n] = server;
      maps[server - 1][n] = 1;
    }
    for (int fn : placement.reduce_set(server)) reducer[fn] = server;
  }

  ShufflePlan plan;
  plan.q = spec.q;
  plan.n = spec.n;
  plan.t_bits = spec.t_bits;
  plan.coded = false;
  for (int fn = 1; fn <= spec.q; ++fn) {
    const int k = reducer[fn];
    for (int n = 1; n <= spec.n; ++n) {
      if (maps[k - 1][n]) continue;
      if (lowest_mapper[n] == 0) throw InvalidSchemeError("value " + value_name(fn, n) + " is mapped nowhere");
      MulticastMessage msg;
      msg.sender = lowest_mapper[n];
      msg.recipients = {k};
      msg.xor_of.push_back({fn, {n}, std::nullopt});
      plan.messages.push_back(std::move(msg));
    }
  }
  plan.predicted_load = load_of(plan);
  return plan;
}

ShufflePlan build_uncoded_plan(const SchemeLayout& layout) {
  return build_uncoded_plan(layout.spec, layout.placement);
}

ShufflePlan encode(const ShufflePlan& plan, std::span<const ValueStore> stores) {
  ShufflePlan out = plan;
  const int vb = plan.t_bits / 8;
  for (auto& msg : out.messages) {
    if (msg.sender < 1 || msg.sender > static_cast<int>(stores.size())) {
      throw InvalidSchemeError("message sender " + std::to_string(msg.sender) + " is not a server");
    }
    if (msg.recipients.size() != msg.xor_of.size()) {
      throw InvalidSchemeError("message has " + std::to_string(msg.recipients.size()) + " recipients but " +
                               std::to_string(msg.xor_of.size()) + " groups");
    }
    const ValueStore& local = stores[msg.sender - 1];
    Bytes payload(static_cast<std::size_t>(msg.payload_bytes(vb)), 0);
    for (const auto& group : msg.xor_of) {
      if (static_cast<std::int64_t>(group.files.size()) * vb != static_cast<std::int64_t>(payload.size())) {
        throw InvalidSchemeError("groups of one message differ in length");
      }
      for (std::size_t j = 0; j < group.files.size(); ++j) {
        const int n = group.files[j];
        if (!local.contains(group.target_fn, n)) {
          throw InvalidSchemeError("server " + std::to_string(msg.sender) + " references value " +
                                   value_name(group.target_fn, n) + " it did not map");
        }
        xor_into(std::span(payload).subspan(j * vb, vb), local.at(group.target_fn, n));
      }
    }
    msg.payload = std::move(payload);
  }
  return out;
}

DecodedValues decode(int server, const ShufflePlan& encoded, const ValueStore& local, const Placement& placement) {
  const int vb = encoded.t_bits / 8;
  DecodedValues out;
  for (const auto& msg : encoded.messages) {
    auto pos = std::find(msg.recipients.begin(), msg.recipients.end(), server);
    if (pos == msg.recipients.end()) continue;
    if (!msg.payload) throw InvalidSchemeError("message from server " + std::to_string(msg.sender) + " not encoded");
    Bytes residue = *msg.payload;
    const auto mine = static_cast<std::size_t>(pos - msg.recipients.begin());
    for (std::size_t g = 0; g < msg.xor_of.size(); ++g) {
      if (g == mine) continue;
      const auto& group = msg.xor_of[g];
      for (std::size_t j = 0; j < group.files.size(); ++j) {
        if (!local.contains(group.target_fn, group.files[j])) {
          throw InvalidSchemeError("server " + std::to_string(server) + " cannot cancel value " +
                                   value_name(group.target_fn, group.files[j]) + " in a message from server " +
                                   std::to_string(msg.sender));
        }
        xor_into(std::span(residue).subspan(j * vb, vb), local.at(group.target_fn, group.files[j]));
      }
    }
    const auto& wanted = msg.xor_of[mine];
    for (std::size_t j = 0; j < wanted.files.size(); ++j) {
      auto first = residue.begin() + static_cast<std::ptrdiff_t>(j * vb);
      out.insert_or_assign({wanted.target_fn, wanted.files[j]}, Bytes(first, first + vb));
    }
  }

  const auto& mapped = placement.map_set(server);
  for (int fn : placement.reduce_set(server)) {
    for (int n = 1; n <= encoded.n; ++n) {
      if (std::binary_search(mapped.begin(), mapped.end(), n)) continue;
      if (!out.contains({fn, n})) {
        throw InvalidSchemeError("value " + value_name(fn, n) + " needed by server " + std::to_string(server) +
                                 " is never delivered");
      }
    }
  }
  return out;
}

}  // namespace cdc
