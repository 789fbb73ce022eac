#include "cdc/simulator.hpp"

#include "cdc/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <ostream>

namespace cdc {

namespace {

constexpr std::uint64_t golden = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t load_le(std::span<const std::uint8_t> bytes) {
  std::uint64_t w = 0;
  for (std::size_t i = 0; i < bytes.size() && i < 8; ++i) w |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return w;
}

}  // namespace

std::string to_hex(const Digest& d) {
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(d[1]),
                static_cast<unsigned long long>(d[0]));
  return buf;
}

SyntheticDataset::SyntheticDataset(const JobSpec& spec, std::uint64_t seed)
    : seed_(seed), q_(spec.q), n_(spec.n), value_bytes_(spec.value_bytes()) {}

void SyntheticDataset::fill(int q, int n, std::span<std::uint8_t> out) const {
  std::uint64_t state = mix64(seed_ ^ mix64(static_cast<std::uint64_t>(q) * golden));
  state = mix64(state ^ (static_cast<std::uint64_t>(n) * 0xc2b2ae3d27d4eb4fULL));
  for (std::size_t i = 0; i < out.size(); i += 8) {
    state += golden;
    std::uint64_t word = mix64(state);
    for (std::size_t b = 0; b < 8 && i + b < out.size(); ++b) out[i + b] = static_cast<std::uint8_t>(word >> (8 * b));
  }
}

Bytes SyntheticDataset::value(int q, int n) const {
  Bytes out(value_bytes_);
  fill(q, n, out);
  return out;
}

ValueStore SyntheticDataset::all_values() const {
  ValueStore store(q_, n_, value_bytes_);
  for (int q = 1; q <= q_; ++q) {
    for (int n = 1; n <= n_; ++n) fill(q, n, store.slot(q, n));
  }
  return store;
}

void DigestAccumulator::absorb(std::span<const std::uint8_t> value) {
  for (std::size_t i = 0; i < value.size(); i += 8) {
    std::uint64_t w = load_le(value.subspan(i, std::min<std::size_t>(8, value.size() - i)));
    lo_ = mix64(lo_ ^ w) + golden;
    hi_ = mix64(hi_ + (w ^ lo_)) ^ (hi_ >> 7);
  }
  ++count_;
}

Digest DigestAccumulator::finish() const { return {mix64(lo_ ^ count_), mix64(hi_ + count_ * golden)}; }

std::map<int, Digest> centralized_oracle(const JobSpec& spec, std::uint64_t seed) {
  SyntheticDataset data(spec, seed);
  Bytes v(spec.value_bytes());
  std::map<int, Digest> out;
  for (int q = 1; q <= spec.q; ++q) {
    DigestAccumulator acc;
    for (int n = 1; n <= spec.n; ++n) {
      data.fill(q, n, v);
      acc.absorb(v);
    }
    out[q] = acc.finish();
  }
  return out;
}

RunResult run(const JobSpec& spec, const Placement& placement, const ShufflePlan& plan, std::uint64_t seed, Mode mode,
              const RunOptions& options) {
  RunResult result;
  result.mode = mode;
  auto fail = [&](std::string why) {
    result.failure = std::move(why);
    result.oracle_match = false;
    return result;
  };

  if (auto report = validate_placement(spec, placement); !report.ok()) {
    return fail("invalid placement: " + report.violations.front().message);
  }
  if (plan.q != spec.q || plan.n != spec.n || plan.t_bits != spec.t_bits) {
    return fail("shuffle plan was built for a different job");
  }

  // Map: each server computes all Q values of every file it maps.
  SyntheticDataset data(spec, seed);
  std::vector<ValueStore> stores;
  stores.reserve(placement.k);
  std::size_t most_files = 0;
  for (int server = 1; server <= placement.k; ++server) {
    ValueStore local(spec.q, spec.n, spec.value_bytes());
    for (int n : placement.map_set(server)) {
      for (int q = 1; q <= spec.q; ++q) data.fill(q, n, local.slot(q, n));
    }
    most_files = std::max(most_files, placement.map_set(server).size());
    stores.push_back(std::move(local));
  }

  // Shuffle.
  ShufflePlan encoded;
  try {
    encoded = encode(plan, stores);
  } catch (const InvalidSchemeError& e) {
    return fail(std::string("encode: ") + e.what());
  }
  std::int64_t bits = 0;
  for (std::size_t i = 0; i < encoded.messages.size(); ++i) {
    const auto& msg = encoded.messages[i];
    bits += static_cast<std::int64_t>(msg.payload->size()) * 8;
    if (options.trace) {
      nlohmann::json line = {{"index", i},
                             {"sender", msg.sender},
                             {"recipients", msg.recipients},
                             {"groups", msg.xor_of.size()},
                             {"bytes", msg.payload->size()}};
      *options.trace << line.dump() << '\n';
    }
  }

  // Reduce.
  int most_functions = 0;
  for (int server = 1; server <= placement.k; ++server) {
    const auto& functions = placement.reduce_set(server);
    most_functions = std::max(most_functions, static_cast<int>(functions.size()));
    if (functions.empty()) continue;
    DecodedValues received;
    try {
      received = decode(server, encoded, stores[server - 1], placement);
    } catch (const InvalidSchemeError& e) {
      return fail(std::string("decode: ") + e.what());
    }
    const ValueStore& local = stores[server - 1];
    for (int q : functions) {
      DigestAccumulator acc;
      for (int n = 1; n <= spec.n; ++n) {
        if (local.contains(q, n)) {
          acc.absorb(local.at(q, n));
        } else {
          acc.absorb(received.at({q, n}));
        }
      }
      result.outputs[q] = acc.finish();
    }
  }

  const Rational p = make_rational(static_cast<std::int64_t>(most_files), spec.n);
  const Rational l = Rational(bits) / (Rational(spec.q) * spec.n * spec.t_bits);
  result.report = make_load_report(spec, p, l, most_functions, bits);
  result.oracle_match = result.outputs == centralized_oracle(spec, seed);
  return result;
}

RunResult run(const SchemeLayout& layout, const ShufflePlan& plan, std::uint64_t seed, Mode mode,
              const RunOptions& options) {
  return run(layout.spec, layout.placement, plan, seed, mode, options);
}

}  // namespace cdc
