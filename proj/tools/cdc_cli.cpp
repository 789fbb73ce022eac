// cdc: plan, build, simulate, bound, search and sweep coded MapReduce schemes.
//
// Exit codes: 0 success, 1 internal invariant violation, 2 usage error,
// 3 infeasible request (e.g. divisibility in strict mode, search budget).

#include "cdc/allocator.hpp"
#include "cdc/bounds.hpp"
#include "cdc/error.hpp"
#include "cdc/json.hpp"
#include "cdc/placement.hpp"
#include "cdc/shuffle.hpp"
#include "cdc/simulator.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using cdc::Json;

struct JobFlags {
  int q = 0;
  int n = 1;
  std::string cm;
  std::string cs;
  std::string cr = "0";
  int t_bits = 64;

  void add_to(CLI::App* app, bool need_costs = true) {
    app->add_option("--q", q, "number of Reduce functions")->required()->check(CLI::PositiveNumber);
    app->add_option("--n", n, "number of input files")->check(CLI::PositiveNumber);
    auto* cm_opt = app->add_option("--cm", cm, "Map cost constant (p/q or decimal)");
    auto* cs_opt = app->add_option("--cs", cs, "Shuffle cost constant (p/q or decimal)");
    if (need_costs) {
      cm_opt->required();
      cs_opt->required();
    }
    app->add_option("--cr", cr, "Reduce cost constant (p/q or decimal)");
    app->add_option("--t-bits", t_bits, "intermediate value size in bits");
  }

  cdc::JobSpec spec() const {
    cdc::JobSpec s;
    s.q = q;
    s.n = n;
    s.cm = parse(cm, "--cm");
    s.cs = parse(cs, "--cs");
    s.cr = parse(cr, "--cr");
    s.t_bits = t_bits;
    cdc::validate(s);
    return s;
  }

  static cdc::Rational parse(const std::string& text, const char* flag) {
    try {
      return cdc::parse_rational(text);
    } catch (const std::invalid_argument& e) {
      throw cdc::UsageError(std::string(flag) + ": " + e.what());
    }
  }
};

void emit(const Json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw cdc::UsageError("cannot write '" + out_path + "'");
  out << j.dump(2) << '\n';
}

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw cdc::UsageError("cannot read '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw cdc::UsageError("'" + path + "' is not valid JSON: " + e.what());
  }
}

std::string decimal(const cdc::Rational& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", cdc::to_double(r));
  return buf;
}

struct Scheme {
  cdc::JobSpec spec;
  cdc::Placement placement;
  std::optional<cdc::SchemeLayout> layout;
  std::optional<cdc::ShufflePlan> shuffle;
  std::optional<cdc::Mode> mode;
};

// Accepts `build` output or a hand-written {"spec": ..., "placement": ...} document.
Scheme load_scheme(const std::string& path) {
  Json j = read_json(path);
  Scheme s;
  if (j.contains("layout")) {
    s.layout = cdc::layout_from_json(j.at("layout"));
    s.spec = s.layout->spec;
    s.placement = s.layout->placement;
  } else {
    if (!j.contains("spec") || !j.contains("placement")) {
      throw cdc::UsageError("scheme file needs either 'layout' or both 'spec' and 'placement'");
    }
    s.spec = cdc::job_spec_from_json(j.at("spec"));
    s.placement = cdc::placement_from_json(j.at("placement"));
  }
  if (j.contains("shuffle")) s.shuffle = cdc::shuffle_plan_from_json(j.at("shuffle"));
  if (j.contains("plan") && j.at("plan").contains("mode")) s.mode = cdc::parse_mode(j.at("plan").at("mode"));
  return s;
}

Json build_document(const cdc::JobSpec& spec, cdc::Mode mode, std::optional<int> k, bool pad, const std::string& eps,
                    bool uncoded_shuffle) {
  cdc::AllocationPlan plan = cdc::plan(spec, mode, true);
  cdc::BuildOptions options;
  options.k = k;
  options.divisibility = pad ? cdc::Divisibility::pad : cdc::Divisibility::strict;
  options.epsilon = JobFlags::parse(eps, "--epsilon");
  cdc::SchemeLayout layout = cdc::build_from_plan(spec, plan, options);
  cdc::ShufflePlan shuffle = uncoded_shuffle ? cdc::build_uncoded_plan(layout) : cdc::build_coded_plan(layout);
  return Json{{"plan", cdc::to_json(plan)}, {"layout", cdc::to_json(layout)}, {"shuffle", cdc::to_json(shuffle)}};
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Coded distributed computing planner, scheme generator, simulator and bound verifier"};
  app.require_subcommand(1);

  // plan
  JobFlags plan_flags;
  std::string plan_mode = "both";
  bool plan_uncoded = false;
  auto* plan_cmd = app.add_subcommand("plan", "optimal allocation (r*, K*, T*)");
  plan_flags.add_to(plan_cmd);
  plan_cmd->add_option("--mode", plan_mode)->check(CLI::IsMember({"seq", "par", "both"}));
  plan_cmd->add_flag("--uncoded", plan_uncoded, "uncoded shuffle baseline");

  // build
  JobFlags build_flags;
  std::string build_mode = "seq";
  std::optional<int> build_k;
  bool build_pad = false;
  bool build_uncoded = false;
  std::string build_eps = "1/100";
  std::string build_out;
  auto* build_cmd = app.add_subcommand("build", "synthesize layout and shuffle plan");
  build_flags.add_to(build_cmd);
  build_cmd->add_option("--mode", build_mode)->check(CLI::IsMember({"seq", "par"}));
  build_cmd->add_option("--k", build_k, "server count override");
  build_cmd->add_flag("--pad", build_pad, "raise N to the least compatible value");
  build_cmd->add_flag("--uncoded-shuffle", build_uncoded, "unicast shuffle instead of coded multicast");
  build_cmd->add_option("--epsilon", build_eps, "helper load target when r* = 0");
  build_cmd->add_option("--out", build_out, "write JSON here instead of stdout");

  // simulate
  JobFlags sim_flags;
  std::string sim_scheme;
  std::string sim_mode;
  std::uint64_t sim_seed = 0;
  std::string sim_trace;
  std::string sim_out;
  auto* sim_cmd = app.add_subcommand("simulate", "run Map, Shuffle and Reduce on synthetic data");
  sim_cmd->add_option("--scheme", sim_scheme, "scheme JSON from `build`");
  sim_cmd->add_option("--q", sim_flags.q)->check(CLI::PositiveNumber);
  sim_cmd->add_option("--n", sim_flags.n)->check(CLI::PositiveNumber);
  sim_cmd->add_option("--cm", sim_flags.cm);
  sim_cmd->add_option("--cs", sim_flags.cs);
  sim_cmd->add_option("--cr", sim_flags.cr);
  sim_cmd->add_option("--t-bits", sim_flags.t_bits);
  sim_cmd->add_option("--seed", sim_seed);
  sim_cmd->add_option("--mode", sim_mode)->check(CLI::IsMember({"seq", "par"}));
  sim_cmd->add_option("--trace", sim_trace, "per-message JSON lines");
  sim_cmd->add_option("--out", sim_out);

  // bound
  std::string bound_scheme;
  auto* bound_cmd = app.add_subcommand("bound", "communication and execution-time lower bounds");
  bound_cmd->add_option("--scheme", bound_scheme)->required();

  // search
  JobFlags search_flags;
  int search_kmax = 0;
  std::string search_mode = "seq";
  std::int64_t search_budget = cdc::SearchOptions{}.budget;
  bool search_no_prune = false;
  auto* search_cmd = app.add_subcommand("search", "exhaustive placement search on tiny instances");
  search_flags.add_to(search_cmd);
  search_cmd->add_option("--kmax", search_kmax)->required()->check(CLI::PositiveNumber);
  search_cmd->add_option("--mode", search_mode)->check(CLI::IsMember({"seq", "par"}));
  search_cmd->add_option("--budget", search_budget);
  search_cmd->add_flag("--no-prune", search_no_prune, "enumerate every reduce assignment");

  // sweep
  int sweep_q = 0;
  std::string sweep_min;
  std::string sweep_max;
  int sweep_steps = 1;
  std::string sweep_mode = "seq";
  std::string sweep_cr = "0";
  std::string sweep_out;
  auto* sweep_cmd = app.add_subcommand("sweep", "coded vs uncoded over a c_s/c_m range (CSV)");
  sweep_cmd->add_option("--q", sweep_q)->required()->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--ratio-min", sweep_min)->required();
  sweep_cmd->add_option("--ratio-max", sweep_max)->required();
  sweep_cmd->add_option("--steps", sweep_steps)->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--mode", sweep_mode)->check(CLI::IsMember({"seq", "par"}));
  sweep_cmd->add_option("--cr", sweep_cr);
  sweep_cmd->add_option("--out", sweep_out, "CSV path (stdout when absent)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*plan_cmd) {
    cdc::JobSpec spec = plan_flags.spec();
    if (plan_mode == "both") {
      emit(Json{{"sequential", cdc::to_json(cdc::plan(spec, cdc::Mode::sequential, !plan_uncoded))},
                {"parallel", cdc::to_json(cdc::plan(spec, cdc::Mode::parallel, !plan_uncoded))}},
           "");
    } else {
      emit(cdc::to_json(cdc::plan(spec, cdc::parse_mode(plan_mode), !plan_uncoded)), "");
    }
  } else if (*build_cmd) {
    emit(build_document(build_flags.spec(), cdc::parse_mode(build_mode), build_k, build_pad, build_eps, build_uncoded),
         build_out);
  } else if (*sim_cmd) {
    Scheme scheme;
    if (!sim_scheme.empty()) {
      scheme = load_scheme(sim_scheme);
    } else {
      if (sim_flags.q == 0 || sim_flags.cm.empty() || sim_flags.cs.empty()) {
        throw cdc::UsageError("simulate needs --scheme or --q, --cm and --cs");
      }
      auto mode = cdc::parse_mode(sim_mode.empty() ? "seq" : sim_mode);
      Json doc = build_document(sim_flags.spec(), mode, std::nullopt, true, "1/100", false);
      scheme.layout = cdc::layout_from_json(doc.at("layout"));
      scheme.spec = scheme.layout->spec;
      scheme.placement = scheme.layout->placement;
      scheme.shuffle = cdc::shuffle_plan_from_json(doc.at("shuffle"));
      scheme.mode = mode;
    }
    if (!scheme.shuffle) {
      scheme.shuffle = scheme.layout ? cdc::build_coded_plan(*scheme.layout)
                                     : cdc::build_uncoded_plan(scheme.spec, scheme.placement);
    }
    cdc::Mode mode = !sim_mode.empty() ? cdc::parse_mode(sim_mode) : scheme.mode.value_or(cdc::Mode::sequential);
    std::ofstream trace;
    cdc::RunOptions options;
    if (!sim_trace.empty()) {
      trace.open(sim_trace);
      if (!trace) throw cdc::UsageError("cannot write '" + sim_trace + "'");
      options.trace = &trace;
    }
    cdc::RunResult result = cdc::run(scheme.spec, scheme.placement, *scheme.shuffle, sim_seed, mode, options);
    emit(cdc::to_json(result), sim_out);
    if (result.failure) return 1;
  } else if (*bound_cmd) {
    Scheme scheme = load_scheme(bound_scheme);
    cdc::BoundReport report = cdc::time_lower_bounds(scheme.placement, scheme.spec);
    Json j = cdc::to_json(report);
    j["availability_raw"] = cdc::to_json(cdc::availability(scheme.placement, scheme.spec, false));
    j["availability_merged"] = cdc::to_json(cdc::availability(scheme.placement, scheme.spec, true));
    emit(j, "");
  } else if (*search_cmd) {
    cdc::SearchOptions options;
    options.budget = search_budget;
    options.prune_symmetry = !search_no_prune;
    cdc::SearchResult result =
        cdc::brute_force_search(search_flags.spec(), search_kmax, cdc::parse_mode(search_mode), options);
    emit(cdc::to_json(result), "");
  } else if (*sweep_cmd) {
    auto rows = cdc::sweep(sweep_q, JobFlags::parse(sweep_min, "--ratio-min"), JobFlags::parse(sweep_max, "--ratio-max"),
                           sweep_steps, cdc::parse_mode(sweep_mode), JobFlags::parse(sweep_cr, "--cr"));
    std::ostringstream csv;
    csv << "ratio,r_star,k_star,t_coded,t_uncoded,ratio_exact,r_star_exact,t_coded_exact,t_uncoded_exact\n";
    for (const auto& row : rows) {
      csv << decimal(row.ratio) << ',' << decimal(row.coded.r_star) << ','
          << (row.coded.k_star ? std::to_string(*row.coded.k_star) : std::string()) << ','
          << decimal(row.coded.t_star) << ',' << decimal(row.uncoded.t_star) << ',' << cdc::to_string(row.ratio) << ','
          << cdc::to_string(row.coded.r_star) << ',' << cdc::to_string(row.coded.t_star) << ','
          << cdc::to_string(row.uncoded.t_star) << '\n';
    }
    if (sweep_out.empty()) {
      std::cout << csv.str();
    } else {
      std::ofstream out(sweep_out);
      if (!out) throw cdc::UsageError("cannot write '" + sweep_out + "'");
      out << csv.str();
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const cdc::UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const cdc::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
}
