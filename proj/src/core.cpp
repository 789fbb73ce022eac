#include "cdc/core.hpp"

#include "cdc/error.hpp"

#include <algorithm>
#include <sstream>

namespace cdc {

std::string to_string(Mode m) { return m == Mode::sequential ? "sequential" : "parallel"; }

Mode parse_mode(const std::string& s) {
  if (s == "sequential" || s == "seq") return Mode::sequential;
  if (s == "parallel" || s == "par") return Mode::parallel;
  throw UsageError("unknown mode '" + s + "'");
}

void validate(const JobSpec& spec) {
  if (spec.q < 1) throw UsageError("Q must be >= 1");
  if (spec.n < 1) throw UsageError("N must be >= 1");
  if (spec.cm <= 0) throw UsageError("c_m must be > 0");
  if (spec.cs <= 0) throw UsageError("c_s must be > 0");
  if (spec.cr < 0) throw UsageError("c_r must be >= 0");
  if (spec.t_bits <= 0 || spec.t_bits % 8 != 0) throw UsageError("T_bits must be a positive multiple of 8");
}

std::string to_string(Stratum s) {
  switch (s) {
    case Stratum::none: return "none";
    case Stratum::plus: return "plus";
    case Stratum::minus: return "minus";
    case Stratum::solver_only: return "solver_only";
  }
  return "none";
}

Stratum parse_stratum(const std::string& s) {
  if (s == "none") return Stratum::none;
  if (s == "plus") return Stratum::plus;
  if (s == "minus") return Stratum::minus;
  if (s == "solver_only") return Stratum::solver_only;
  throw UsageError("unknown stratum '" + s + "'");
}

std::string BatchLabel::key() const {
  std::ostringstream os;
  os << "i=";
  if (helper) {
    os << *helper;
  } else {
    os << '-';
  }
  os << ",A={";
  for (std::size_t j = 0; j < solver_set.size(); ++j) {
    if (j) os << ' ';
    os << solver_set[j];
  }
  os << "},stratum=" << to_string(stratum);
  return os.str();
}

BatchLabel parse_batch_key(const std::string& key) {
  auto fail = [&] { return UsageError("malformed batch key '" + key + "'"); };
  if (key.rfind("i=", 0) != 0) throw fail();
  auto comma = key.find(",A={");
  auto close = key.find("},stratum=");
  if (comma == std::string::npos || close == std::string::npos || close < comma) throw fail();

  BatchLabel label;
  std::string helper = key.substr(2, comma - 2);
  if (helper != "-") {
    try {
      label.helper = std::stoi(helper);
    } catch (const std::exception&) {
      throw fail();
    }
  }
  std::istringstream ids(key.substr(comma + 4, close - comma - 4));
  int id = 0;
  while (ids >> id) label.solver_set.push_back(id);
  if (!ids.eof()) throw fail();
  label.stratum = parse_stratum(key.substr(close + 10));
  return label;
}

bool ValidationReport::contains(const std::string& message) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation& v) { return v.message == message; });
}

ValidationReport validate_placement(const JobSpec& spec, const Placement& placement) {
  ValidationReport report;
  auto add = [&](ViolationKind kind, std::string message) {
    report.violations.push_back({kind, std::move(message)});
  };

  if (placement.k < 1 || static_cast<int>(placement.map_sets.size()) != placement.k ||
      static_cast<int>(placement.reduce_sets.size()) != placement.k) {
    add(ViolationKind::server_count, "expected " + std::to_string(placement.k) + " map and reduce sets, got " +
                                         std::to_string(placement.map_sets.size()) + " and " +
                                         std::to_string(placement.reduce_sets.size()));
    return report;
  }

  std::vector<int> mapped(spec.n + 1, 0);
  std::vector<int> reduced(spec.q + 1, 0);
  for (int server = 1; server <= placement.k; ++server) {
    std::vector<bool> seen(spec.n + 1, false);
    for (int file : placement.map_set(server)) {
      if (file < 1 || file > spec.n) {
        add(ViolationKind::file_out_of_range,
            "server " + std::to_string(server) + " maps out-of-range file " + std::to_string(file));
        continue;
      }
      if (seen[file]) {
        add(ViolationKind::duplicate_entry,
            "server " + std::to_string(server) + " lists file " + std::to_string(file) + " twice");
        continue;
      }
      seen[file] = true;
      ++mapped[file];
    }
    for (int fn : placement.reduce_set(server)) {
      if (fn < 1 || fn > spec.q) {
        add(ViolationKind::function_out_of_range,
            "server " + std::to_string(server) + " reduces out-of-range function " + std::to_string(fn));
        continue;
      }
      ++reduced[fn];
    }
  }
  for (int file = 1; file <= spec.n; ++file) {
    if (mapped[file] == 0) add(ViolationKind::file_unmapped, "file " + std::to_string(file) + " unmapped");
  }
  for (int fn = 1; fn <= spec.q; ++fn) {
    if (reduced[fn] == 0) {
      add(ViolationKind::function_unreduced, "function " + std::to_string(fn) + " not reduced");
    } else if (reduced[fn] > 1) {
      add(ViolationKind::function_reduced_twice, "function " + std::to_string(fn) + " reduced twice");
    }
  }

  if (placement.batch_index) {
    std::vector<bool> in_batch(spec.n + 1, false);
    for (const Batch& batch : *placement.batch_index) {
      for (int file : batch.files) {
        if (file < 1 || file > spec.n) {
          add(ViolationKind::batch_file_out_of_range,
              "batch " + batch.label.key() + " holds out-of-range file " + std::to_string(file));
          continue;
        }
        if (in_batch[file]) {
          add(ViolationKind::batch_overlap, "file " + std::to_string(file) + " appears in more than one batch");
        }
        in_batch[file] = true;
      }
    }
  }
  return report;
}

Rational peak_load(const JobSpec& spec, const Placement& placement) {
  if (auto report = validate_placement(spec, placement); !report.ok()) {
    throw InvalidSchemeError("peak_load on invalid placement: " + report.violations.front().message);
  }
  std::size_t most = 0;
  for (const auto& m : placement.map_sets) most = std::max(most, m.size());
  return make_rational(static_cast<std::int64_t>(most), spec.n);
}

LoadReport make_load_report(const JobSpec& spec, const Rational& p, const Rational& l, int max_reduce_count,
                            std::int64_t bits_sent) {
  LoadReport r;
  r.p = p;
  r.l = l;
  r.t_map = spec.cm * p;
  r.t_shuffle = spec.cs * l;
  r.t_reduce = spec.cr * max_reduce_count;
  r.t_sequential = r.t_map + r.t_shuffle + r.t_reduce;
  r.t_parallel = std::max(r.t_map, r.t_shuffle) + r.t_reduce;
  r.bits_sent = bits_sent;
  return r;
}

}  // namespace cdc
