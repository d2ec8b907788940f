#include "mot/cli.hpp"

#include <chrono>
#include <cmath>

#include "mot/certify.hpp"
#include "mot/entropic.hpp"
#include "mot/pipeline.hpp"
#include "mot/truncation.hpp"

namespace mot::cli {
namespace {

using nlohmann::json;

template <Scalar T>
json value(const T& x) {
  return exact_value(x);
}

json index_json(const MultiIndex& idx) { return json(idx); }

std::string label(const Rational& x) { return to_exact_string(x); }
std::string label(double x) { return json(x).dump(); }

template <Scalar T>
json family_json(const PotentialFamily<T>& f) {
  json out = json::array();
  for (const auto& fk : f.potentials) {
    json row = json::array();
    for (const T& v : fk) row.push_back(value(v));
    out.push_back(std::move(row));
  }
  return out;
}

// Accumulates named checks and the failure section.
class Checks {
 public:
  void add(const std::string& name, bool passed, json detail = nullptr) {
    json entry{{"name", name}, {"passed", passed}};
    if (!detail.is_null()) entry["detail"] = detail;
    list_.push_back(entry);
    if (!passed) failures_.push_back({{"check", name}, {"detail", detail}});
  }
  void finish(json& report) const {
    report["checks"] = list_;
    report["failures"] = failures_;
    report["status"] = failures_.empty() ? "pass" : "fail";
  }
  bool ok() const { return failures_.empty(); }

 private:
  json list_ = json::array();
  json failures_ = json::array();
};

template <Scalar T>
T tolerance_for(const CostTensor<T>& c) {
  return default_tolerance(c.sup_norm());
}

template <Scalar T>
json support_json(const Coupling<T>& pi) {
  json out = json::array();
  const T zero(0);
  for (const auto& idx : extract_support(pi, zero)) {
    out.push_back({{"index", index_json(idx)}, {"mass", value(pi.at(idx))}});
  }
  return out;
}

template <Scalar T>
void solve_section(const Instance<T>& inst, const RunFlags& flags, const SolveOutcome<T>& out,
                   json& report, Checks& checks) {
  report["primal_value"] = value(out.gap.primal_value);
  report["dual_value"] = value(out.gap.dual_value);
  report["gap"] = value(out.gap.gap);
  report["verdict"] = to_string(out.gap.verdict);
  report["simplex_iterations"] = out.primal.iterations;
  report["anchor"] = index_json(out.anchor);
  report["coupling_support"] = support_json(out.primal.coupling);
  report["potentials"] = family_json(out.improved.family);
  (void)flags;

  checks.add("dual_admissible", out.gap.verdict != Verdict::infeasible_dual,
             {{"min_slack", value(out.gap.min_slack)}, {"witness", out.gap.slack_witness}});
  const T tol = tolerance_for(inst.cost);
  checks.add("strong_duality", abs_value(out.gap.gap) <= tol, {{"gap", value(out.gap.gap)}});
  const auto& fp = out.improved.is_fixed_point;
  checks.add("conjugate_fixed_point", std::all_of(fp.begin(), fp.end(), [](bool b) { return b; }),
             {{"per_coordinate", fp}});
  checks.add("potential_bounds", out.improved.bounds_ok);
}

template <Scalar T>
void run_solve(const Instance<T>& inst, const RunFlags& flags, json& report, Checks& checks) {
  auto out = solve_with_certified_duals(inst.marginals, inst.cost, flags.guard_entries);
  solve_section(inst, flags, out, report, checks);
}

template <Scalar T>
void run_certify(const Instance<T>& inst, const RunFlags& flags, json& report, Checks& checks) {
  auto out = solve_with_certified_duals(inst.marginals, inst.cost, flags.guard_entries);
  solve_section(inst, flags, out, report, checks);
  const T zero(0);
  auto gamma = extract_support(out.primal.coupling, zero);

  json certificates;
  SplittingCheck<T> split = check_splitting(gamma, out.improved.family, inst.cost);
  json sj{{"passed", static_cast<bool>(split)}, {"support_size", gamma.size()}};
  if (split.violation) {
    sj["violation"] = {{"index", split.violation->index},
                       {"side", split.violation->side == SplittingSide::equality ? "equality"
                                                                                 : "inequality"},
                       {"excess", value(split.violation->excess)}};
  }
  certificates["splitting"] = sj;
  checks.add("splitting", static_cast<bool>(split));

  json mj{{"n_max", flags.nmax_cycles}};
  MonotonicityGuard guard;
  if (flags.nmax_cycles > guard.max_cycle || gamma.size() > guard.max_support) {
    mj["status"] = "skipped";
    mj["reason"] = "combinatorial guard: n_max <= 3 and support size <= 12";
  } else {
    auto mono = check_cyclical_monotonicity(gamma, inst.cost, flags.nmax_cycles, guard);
    mj["status"] = mono.passed() ? "pass" : "fail";
    mj["families_checked"] = mono.families_checked;
    if (mono.witness) {
      mj["witness"] = {{"tuples", mono.witness->tuples},
                       {"permutations", mono.witness->permutations},
                       {"lhs", value(mono.witness->lhs)},
                       {"rhs", value(mono.witness->rhs)}};
    }
    checks.add("cyclical_monotonicity", mono.passed());
  }
  certificates["monotonicity"] = mj;
  report["certificates"] = certificates;
}

template <Scalar T>
std::vector<T> eps_values(const RunFlags& flags, const std::vector<std::string>& fallback) {
  std::vector<std::string> text = flags.eps_ladder;
  if (text.empty() && flags.eps) text.push_back(*flags.eps);
  if (text.empty()) text = fallback;
  std::vector<T> out;
  for (const auto& s : text) out.push_back(from_rational<T>(parse_rational(s)));
  return out;
}

template <Scalar T>
void run_truncate(const Instance<T>& inst, const RunFlags& flags, json& report, Checks& checks) {
  std::vector<T> ladder = eps_values<T>(flags, {"1/5", "1/10", "1/20"});
  TruncationOptions<T> options;
  options.guard_entries = flags.guard_entries;
  auto rows = run_truncation_ladder(inst.marginals, inst.cost, ladder, options);
  json table = json::array();
  for (const auto& r : rows) {
    json row{{"eps", value(r.eps)},
             {"core_sizes", r.core_sizes},
             {"complement_mass", value(r.complement_mass)},
             {"inf_full", value(r.inf_full)},
             {"inf_truncated", value(r.inf_truncated)},
             {"glued_cost", value(r.glued_cost)},
             {"dual_full", value(r.dual_full)},
             {"dual_truncated", value(r.dual_truncated)},
             {"bound_constant", value(r.bound_constant)}};
    json cj = json::array();
    for (const auto& c : r.checks) {
      cj.push_back({{"name", c.name}, {"lhs", value(c.lhs)}, {"rhs", value(c.rhs)}, {"passed", c.ok}});
      checks.add("eps=" + label(r.eps) + ":" + c.name, c.ok);
    }
    row["bound_checks"] = std::move(cj);
    table.push_back(std::move(row));
  }
  report["sup_norm"] = value(inst.cost.sup_norm());
  report["truncation"] = std::move(table);
}

void run_entropic(const Instance<double>& inst, const Instance<Rational>& exact,
                  const RunFlags& flags, json& report, Checks& checks) {
  std::vector<double> ladder = eps_values<double>(flags, {"1", "1/10", "1/100"});
  const double norm = inst.cost.sup_norm();
  double log_sum = 0;
  for (const auto& m : inst.marginals) log_sum += std::log(static_cast<double>(m.size()));

  std::optional<double> lp_value;
  if (inst.cost.size() <= flags.guard_entries) {
    lp_value = solve_primal(build_lp(exact.marginals, exact.cost, flags.guard_entries)).value.get_d();
    report["lp_value"] = *lp_value;
  }
  json rows = json::array();
  for (double scale : ladder) {
    SinkhornOptions opt;
    opt.epsilon = scale * (norm > 0 ? norm : 1.0);
    opt.tol = 1e-12;
    opt.max_iters = 200'000;
    SinkhornResult r = sinkhorn_mmot(inst.marginals, inst.cost, opt);
    json row{{"eps_units", scale},
             {"epsilon", opt.epsilon},
             {"iterations", r.state.iterations},
             {"marginal_residual", r.state.marginal_residual},
             {"converged", r.state.converged},
             {"transport_cost", r.transport_cost}};
    const std::string tag = "eps_units=" + json(scale).dump();
    checks.add(tag + ":converged", r.state.converged);
    if (lp_value) {
      const double excess = r.transport_cost - *lp_value;
      const double bound = opt.epsilon * log_sum;
      row["excess_over_lp"] = excess;
      row["bound"] = bound;
      checks.add(tag + ":within_entropic_bound", excess >= -1e-10 && excess <= bound,
                 {{"excess", excess}, {"bound", bound}});
    }
    rows.push_back(std::move(row));
  }
  report["entropic"] = std::move(rows);
}

template <Scalar T>
void run_oracle(const Instance<T>& inst, const RunFlags& flags, json& report, Checks& checks) {
  auto lp = build_lp(inst.marginals, inst.cost, flags.guard_entries);
  auto vertices = enumerate_vertices(lp);
  auto solved = solve_primal(lp);
  T best = eval_primal_cost(vertices.front(), inst.cost);
  for (const auto& v : vertices) {
    T cost = eval_primal_cost(v, inst.cost);
    if (cost < best) best = cost;
  }
  report["vertex_count"] = vertices.size();
  report["vertex_minimum"] = value(best);
  report["primal_value"] = value(solved.value);
  const T diff = abs_value(T(best - solved.value));
  checks.add("oracle_matches_simplex", diff <= tolerance_for(inst.cost),
             {{"difference", value(diff)}});
}

template <Scalar T>
void dispatch(const std::string& command, const ProblemDocument& doc, const RunFlags& flags,
              json& report, Checks& checks) {
  std::vector<std::string> warnings;
  Instance<T> inst = make_instance<T>(doc, warnings, flags.guard_entries);
  report["shape"] = inst.cost.shape().dims();
  report["warnings"] = warnings;
  if (command == "solve") {
    run_solve(inst, flags, report, checks);
  } else if (command == "certify") {
    run_certify(inst, flags, report, checks);
  } else if (command == "truncate") {
    run_truncate(inst, flags, report, checks);
  } else if (command == "oracle") {
    run_oracle(inst, flags, report, checks);
  } else if (command == "entropic") {
    std::vector<std::string> ignored;
    Instance<Rational> exact = make_instance<Rational>(doc, ignored, flags.guard_entries);
    run_entropic(make_instance<double>(doc, ignored, flags.guard_entries), exact, flags, report,
                 checks);
  }
}

}  // namespace

RunResult run(const std::string& command, const RunFlags& flags, const std::string& document) {
  const auto start = std::chrono::steady_clock::now();
  RunResult result;
  json& report = result.report;
  report["version"] = kReportVersion;
  report["command"] = command;
  report["mode"] = flags.mode;
  try {
    if (std::find(commands().begin(), commands().end(), command) == commands().end()) {
      throw Error(ErrorKind::invalid_argument, "unknown command '" + command + "'");
    }
    const NumericMode mode = parse_mode(flags.mode);
    if (command == "generate") {
      FixtureSpec spec;
      spec.shape = flags.shape;
      result.report = to_json(document_from_instance(random_instance(flags.seed, spec)));
      return result;
    }
    ProblemDocument doc = parse_problem(document, mode);
    report["instance_digest"] = instance_digest(doc);
    Checks checks;
    if (mode == NumericMode::rational || command == "entropic") {
      dispatch<Rational>(command, doc, flags, report, checks);
    } else {
      dispatch<double>(command, doc, flags, report, checks);
    }
    checks.finish(report);
    result.exit_code = checks.ok() ? kPass : kCheckFailed;
  } catch (const Error& e) {
    report["status"] = "error";
    report["failures"] = json::array({{{"kind", to_string(e.kind())}, {"message", e.what()}}});
    result.exit_code = kError;
  }
  if (flags.timing) {
    const auto elapsed = std::chrono::steady_clock::now() - start;
    report["timing_ms"] =
        std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(elapsed).count();
  }
  return result;
}

}  // namespace mot::cli
