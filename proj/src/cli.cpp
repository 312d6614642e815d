#include "exactdiff/cli.hpp"

#include "exactdiff/counterexample.hpp"
#include "exactdiff/derivatives.hpp"
#include "exactdiff/martingale.hpp"
#include "exactdiff/nullsets.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace exactdiff::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config;
  std::string out;
  std::optional<std::size_t> depth;
  std::uint64_t seed = 1;
  std::string format = "json";
};

struct Outcome {
  json report;
  std::string csv;
  bool pass = true;
  std::vector<std::string> failures;

  void check(bool ok, const std::string& what) {
    if (ok) return;
    pass = false;
    failures.push_back(what);
  }
};

json read_json(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw UsageError(std::string("cannot open ") + what + " '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("malformed ") + what + " '" + path + "': " + e.what());
  }
}

json load_config(const Options& o) { return o.config.empty() ? json::object() : read_json(o.config, "config"); }

const json& require(const json& cfg, const char* key, const char* within = nullptr) {
  if (!cfg.contains(key)) {
    throw UsageError(std::string("config needs '") + key + "'" + (within ? std::string(" in '") + within + "'" : ""));
  }
  return cfg.at(key);
}

std::size_t depth_of(const Options& o, const json& cfg, std::size_t fallback) {
  if (o.depth) return *o.depth;
  return cfg.value("depth", fallback);
}

Rational rational_of(const json& v) {
  if (v.is_string()) return Rational::parse(v.get<std::string>());
  if (v.is_number_integer()) return Rational(static_cast<long>(v.get<long long>()));
  throw UsageError("expected a rational string, got " + v.dump());
}

Vector point_of(const json& v) {
  if (!v.is_array() || v.empty()) throw UsageError("points must be nonempty arrays of rationals");
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = rational_of(v[i]);
  return out;
}

std::string spaced(const Vector& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? " " : "") + v(i).str();
  return s;
}

const char* status_name(const ProbeVerdict& v) { return v.violated() ? "ViolatedAt" : "ConsistentToDepth"; }

// probe --------------------------------------------------------------------

Outcome cmd_probe(const Options& o) {
  const json cfg = load_config(o);
  const auto f = function_from_json(require(cfg, "function"));
  const json& points = require(cfg, "points");
  if (!points.is_array() || points.empty()) throw UsageError("'points' must be a nonempty array");
  const auto depth = static_cast<unsigned>(depth_of(o, cfg, 6));
  if (depth < 2) throw UsageError("depth must be at least 2");
  const Rational q = cfg.contains("q") ? rational_of(cfg.at("q")) : Rational(1, 2);
  const std::string expect = cfg.value("expect", std::string());
  if (!expect.empty() && expect != "consistent" && expect != "violated") {
    throw UsageError("'expect' must be \"consistent\" or \"violated\"");
  }
  const json lin = cfg.value("linearity", json(nullptr));

  Outcome r;
  std::ostringstream csv;
  csv << "point,class_a,class_b,class_a_value,class_b_value,linearity_defect,pass\n";
  json records = json::array();
  for (const auto& jp : points) {
    const Vector x = point_of(jp);
    if (static_cast<std::size_t>(x.size()) != f.dimension()) throw UsageError("point dimension mismatch");
    if (!in_unit_cube(x)) throw UsageError("point " + to_string(x) + " outside [0,1]^n");
    json rec{{"point", format_vector(x)}};
    bool ok = true;
    auto note = [&](bool cond, const std::string& what) {
      if (!cond) ok = false;
      r.check(cond, to_string(x) + ": " + what);
    };

    json partials = json::array();
    for (std::size_t axis = 0; axis < f.dimension(); ++axis) {
      const auto v = partial_probe(f, x, axis, default_schedule(depth), q);
      if (v.violated()) note(replay_witness(f, v), "partial witness on axis " + std::to_string(axis) + " does not replay");
      partials.push_back(v.to_json());
    }
    rec["partials"] = partials;

    const auto a = diff_class_a(f, x, depth);
    const auto b = diff_class_b(f, x, depth);
    rec["class_a"] = a.to_json();
    rec["class_b"] = b.to_json();
    const bool consistent = a.violated() == b.violated();
    rec["consistent"] = consistent;
    note(consistent, "class A and class B verdicts disagree");
    if (a.violated()) note(replay_witness(f, a), "class A witness does not replay");
    if (b.violated()) note(replay_witness(f, b), "class B witness does not replay");
    if (!expect.empty()) note(a.violated() == (expect == "violated"), "verdict differs from expected '" + expect + "'");

    std::string defect = "";
    if (!lin.is_null()) {
      const Vector u = point_of(require(lin, "u", "linearity"));
      const Vector v = point_of(require(lin, "v", "linearity"));
      const Rational p = lin.contains("p") ? rational_of(lin.at("p")) : Rational(1, 4);
      std::optional<Rational> lq;
      if (lin.contains("q")) lq = rational_of(lin.at("q"));
      std::vector<Rational> grid;
      for (unsigned k = 1; k <= depth; ++k) grid.push_back(Rational::pow2(-static_cast<long>(k)));
      try {
        const auto d = linearity_defect(f, x, u, v, p, grid, lq);
        rec["linearity"] = d.to_json();
        defect = d.value.str();
        if (lin.contains("expect")) note(d.value == rational_of(lin.at("expect")), "linearity defect " + defect);
      } catch (const std::domain_error& e) {
        rec["linearity"] = json{{"error", e.what()}};
        note(!lin.contains("expect"), "linearity defect unavailable");
      }
    }
    rec["pass"] = ok;
    records.push_back(rec);
    csv << spaced(x) << ',' << status_name(a) << ',' << status_name(b) << ',' << a.value.str() << ','
        << b.value.str() << ',' << defect << ',' << (ok ? "true" : "false") << '\n';
  }
  r.report = json{{"command", "probe"}, {"function", f.descriptor()}, {"depth", depth},
                  {"q", q.str()},       {"points", records},          {"pass", r.pass}};
  r.csv = csv.str();
  return r;
}

// bet ----------------------------------------------------------------------

Outcome cmd_bet(const Options& o) {
  const json cfg = load_config(o);
  const auto m = martingale_from_json(require(cfg, "martingale"));
  const auto z = bit_source_from_json(require(cfg, "source"));
  const std::size_t depth = depth_of(o, cfg, 16);
  if (depth < 1) throw UsageError("depth must be at least 1");
  const unsigned fairness_depth = cfg.value("fairness_depth", 12U);
  std::vector<Rational> thresholds;
  for (const auto& t : cfg.value("thresholds", json::array())) thresholds.push_back(rational_of(t));

  Outcome r;
  json fairness{{"depth", fairness_depth}};
  try {
    const auto fc = check_fairness(m, fairness_depth);
    fairness["pass"] = fc.pass;
    if (!fc.pass) {
      fairness["witness"] = fc.witness->str();
      r.check(false, "fairness fails at sigma = '" + fc.witness->str() + "'");
    }
  } catch (const std::out_of_range& e) {
    fairness["pass"] = false;
    fairness["error"] = e.what();
    r.check(false, e.what());
  }
  r.report = json{{"command", "bet"}, {"martingale", m.descriptor()}, {"source", z.description()},
                  {"fairness", fairness}};
  if (!r.pass) {
    r.report["pass"] = false;
    r.csv = "length,capital\n";
    return r;
  }
  const auto run = run_bet(m, z, depth, thresholds);
  json traj = json::array();
  for (const auto& c : run.trajectory) traj.push_back(c.str());
  r.report["summary"] = run.summary();
  r.report["trajectory"] = traj;
  r.report["pass"] = true;
  r.csv = run.to_csv();
  return r;
}

// counterexample -------------------------------------------------------------

NestedTest test_from_config(const json& desc, std::size_t depth) {
  if (desc.is_string()) {
    if (desc.get<std::string>() != "toy") throw UsageError("unknown test '" + desc.get<std::string>() + "'");
    return toy_test(depth);
  }
  json copy = desc;
  if (copy.contains("generator") && copy.value("depth", std::size_t{0}) < depth) copy["depth"] = depth;
  return nested_test_from_json(copy);
}

Outcome cmd_counterexample(const Options& o) {
  const json cfg = load_config(o);
  const std::size_t budget = cfg.value("budget", std::size_t{64});
  const std::size_t pairs = cfg.value("audit_pairs", std::size_t{200});
  Outcome r;
  r.report = json{{"command", "counterexample"}, {"budget", budget}, {"seed", o.seed}};

  std::optional<TentSystem> system;
  if (cfg.contains("bundle_in")) {
    const json bundle = read_json(cfg.at("bundle_in").get<std::string>(), "bundle");
    try {
      system = TentSystem::from_bundle(bundle);
    } catch (const std::exception& e) {
      throw UsageError(std::string("counterexample: unreadable bundle: ") + e.what());
    }
    // A bundle is trusted only if it is exactly what a fresh build produces.
    const std::size_t bundle_budget = bundle.value("budget", budget);
    bool matches = false;
    try {
      const auto test = nested_test_from_json(system->test_descriptor());
      matches = same_partition(system->partition(), build_partition(test, bundle_budget, system->depth()));
    } catch (const std::exception& e) {
      r.report["bundle_error"] = e.what();
    }
    r.report["bundle_matches_rebuild"] = matches;
    r.check(matches, "bundle differs from a fresh build of its test");
  } else {
    const std::size_t depth = depth_of(o, cfg, 4);
    const std::size_t cutoff = cfg.value("cutoff", std::size_t{0});
    const auto test = test_from_config(require(cfg, "test"), depth);
    try {
      system = build_tent_system(test, budget, depth, cutoff);
    } catch (const std::runtime_error& e) {
      r.report["build_error"] = e.what();
      r.check(false, e.what());
      r.report["pass"] = false;
      r.csv = "check,pass\nbuild,false\n";
      return r;
    }
  }
  const TentSystem& sys = *system;
  const std::size_t depth = sys.depth();
  const std::size_t n = sys.dimension();
  r.report["depth"] = depth;
  r.report["cutoff"] = sys.cutoff();
  r.report["test"] = sys.test_descriptor();

  std::ostringstream csv;
  csv << "check,pass\n";
  auto record = [&](const std::string& name, bool ok) {
    r.check(ok, name);
    csv << name << ',' << (ok ? "true" : "false") << '\n';
  };

  const auto check = verify_partition(sys.partition());
  r.report["partition"] = check.to_json();
  record("partition", check.pass());

  json stages = json::array();
  for (std::size_t m = 0; m <= depth; ++m) {
    const auto& blocks = sys.partition().stages[m];
    stages.push_back({{"stage", m},
                      {"blocks", blocks.size()},
                      {"cells", sys.partition().cell_count(m).get_str()},
                      {"cell_scales", [&] {
                         json s = json::array();
                         for (const auto& b : blocks) s.push_back(b.cell_scale);
                         return s;
                       }()}});
  }
  r.report["stages"] = stages;

  json exclusion = json::array();
  for (std::size_t m = 0; m <= depth && n > 1; ++m) {
    for (std::size_t axis = 1; axis < n; ++axis) {
      const auto e = sys.exclusion(m, axis);
      exclusion.push_back(e.to_json());
      record("exclusion m=" + std::to_string(m) + " axis=" + std::to_string(axis), e.pass);
    }
  }
  r.report["exclusion"] = exclusion;

  json modulus = json::array();
  for (std::size_t m = 1; m <= depth; ++m) {
    if (sys.partition().stages[m].empty()) continue;
    const auto a = sys.audit_modulus(m, pairs, o.seed);
    modulus.push_back(a.to_json());
    record("modulus m=" + std::to_string(m), a.pass);
  }
  r.report["modulus"] = modulus;

  json records = json::array();
  bool any_oscillation = false;
  for (const auto& jp : cfg.value("points", json::array())) {
    const Vector z = point_of(jp);
    if (static_cast<std::size_t>(z.size()) != n) throw UsageError("point dimension mismatch");
    json rec{{"point", format_vector(z)}};
    json osc = json::array();
    for (std::size_t m = sys.cutoff() + 1; m <= depth; ++m) {
      try {
        const auto rep = sys.oscillation(z, m);
        osc.push_back(rep.to_json());
        any_oscillation = true;
        record("oscillation " + spaced(z) + " m=" + std::to_string(m), rep.pass());
      } catch (const std::domain_error& e) {
        osc.push_back({{"m", m}, {"skipped", e.what()}});
      }
    }
    rec["oscillation"] = osc;
    json evals = json::array();
    std::optional<EvaluationResult> prev;
    bool nested = true;
    for (std::size_t m = 1; m <= depth; ++m) {
      const auto e = sys.evaluate(clamp_point(z), m);
      if (prev && (e.lower < prev->lower || e.upper > prev->upper)) nested = false;
      evals.push_back(e.to_json());
      prev = e;
    }
    rec["evaluation"] = evals;
    rec["nested"] = nested;
    if (depth >= 1) record("evaluation nested " + spaced(z), nested);
    records.push_back(rec);
  }
  r.report["points"] = records;
  r.report["vacuous"] = depth == 0 || !any_oscillation;

  if (cfg.contains("bundle_out")) {
    json bundle = sys.to_bundle();
    bundle["budget"] = budget;
    const std::string path = cfg.at("bundle_out").get<std::string>();
    std::ofstream bout(path);
    if (!bout) throw UsageError("cannot write bundle '" + path + "'");
    bout << bundle.dump(2) << '\n';
    r.report["bundle_out"] = path;
  }
  r.report["pass"] = r.pass;
  r.csv = csv.str();
  return r;
}

// dore-maleva ----------------------------------------------------------------

Outcome cmd_dore_maleva(const Options& o) {
  const json cfg = load_config(o);
  const std::size_t k = depth_of(o, cfg, cfg.value("stages", std::size_t{4}));
  const std::size_t search = std::max(k, cfg.value("search_stages", std::size_t{8}));
  DoreMalevaParams params;
  if (cfg.contains("N")) {
    std::vector<long> N = cfg.at("N").get<std::vector<long>>();
    std::vector<Rational> p, raw;
    for (const auto& v : require(cfg, "p")) p.push_back(rational_of(v));
    for (const auto& v : cfg.value("p_raw", json::array())) raw.push_back(rational_of(v));
    params = make_dore_maleva_params(std::move(N), std::move(p), std::move(raw));
    if (k > params.stages()) throw UsageError("more stages requested than configured");
  } else {
    params = default_dore_maleva_params(search);
  }
  const std::size_t oracle_max = cfg.value("grid_oracle_stages", std::size_t{3});
  const std::size_t geometry_max = cfg.value("geometry_stages", std::size_t{3});

  Outcome r;
  std::ostringstream csv;
  csv << "stage,N,p,removed_fraction,remaining,grid_oracle\n";
  json table = json::array();
  table.push_back({{"stage", 0}, {"remaining", "1/1"}});
  csv << "0,,,,1/1,1/1\n";
  Rational previous = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    const auto s = dore_maleva_stage(params, i);
    const Rational remaining = dore_maleva_measure(params, i);
    json row{{"stage", i},
             {"N", params.N[i - 1]},
             {"p", params.p[i - 1].str()},
             {"pitch", s.pitch.str()},
             {"d", s.d.str()},
             {"half_side", s.half_side.str()},
             {"removed_fraction", s.removed_fraction.str()},
             {"remaining", remaining.str()},
             {"degenerate", s.degenerate},
             {"below_one", s.below_one},
             {"disjoint", s.disjoint}};
    if (i - 1 < params.p_raw.size()) row["p_raw"] = params.p_raw[i - 1].str();
    std::string oracle;
    bool integral = true;
    for (std::size_t t = 0; t < i; ++t) integral = integral && params.p[t].is_integer();
    if (i <= oracle_max && integral) {
      const Rational g = dore_maleva_grid_measure(params, i);
      oracle = g.str();
      row["grid_oracle"] = oracle;
      r.check(g == remaining, "stage " + std::to_string(i) + ": grid oracle " + oracle + " != product " + remaining.str());
    }
    if (s.removed_fraction > Rational(0)) {
      r.check(remaining < previous, "stage " + std::to_string(i) + ": measure does not decrease");
    }
    previous = remaining;
    table.push_back(row);
    csv << i << ',' << params.N[i - 1] << ',' << params.p[i - 1].str() << ',' << s.removed_fraction.str() << ','
        << remaining.str() << ',' << oracle << '\n';
  }
  const auto below = dore_maleva_stage_below(params, Rational(1, 2));
  r.report = json{{"command", "dore-maleva"},
                  {"stages", k},
                  {"table", table},
                  {"below_half_stage", below ? json(*below) : json(nullptr)},
                  {"geometry", dore_maleva_geometry(params, std::min(k, geometry_max))},
                  {"pass", r.pass}};
  r.csv = csv.str();
  return r;
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "JSON config file");
  sub->add_option("--out", o.out, "write the report here instead of stdout");
  sub->add_option("--depth", o.depth, "depth / stage count, overrides the config");
  sub->add_option("--seed", o.seed, "seed for sampled audits");
  sub->add_option("--format", o.format, "report format")->check(CLI::IsMember({"json", "csv"}));
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"exactdiff: exact-arithmetic differentiability and randomness experiments", "exactdiff"};
  app.require_subcommand(1);
  Options o;
  struct Command {
    const char* name;
    const char* help;
    Outcome (*fn)(const Options&);
  };
  const Command commands[] = {
      {"probe", "differentiability probes at rational points", cmd_probe},
      {"bet", "run a martingale against a bit source", cmd_bet},
      {"counterexample", "build and audit the tent-function system", cmd_counterexample},
      {"dore-maleva", "measure table for the square-removal null set", cmd_dore_maleva},
  };
  for (const auto& c : commands) add_common(app.add_subcommand(c.name, c.help), o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << "exactdiff: " << e.what() << '\n' << app.help();
    return kUsageError;
  }

  const Command* chosen = nullptr;
  for (const auto& c : commands) {
    if (app.got_subcommand(c.name)) chosen = &c;
  }
  Outcome result;
  try {
    result = chosen->fn(o);
  } catch (const UsageError& e) {
    err << "exactdiff " << chosen->name << ": " << e.what() << '\n';
    return kUsageError;
  } catch (const json::exception& e) {
    err << "exactdiff " << chosen->name << ": malformed config: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    err << "exactdiff " << chosen->name << ": invalid config: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::out_of_range& e) {
    err << "exactdiff " << chosen->name << ": invalid config: " << e.what() << '\n';
    return kUsageError;
  }

  const std::string text = o.format == "csv" ? result.csv : result.report.dump(2) + "\n";
  if (o.out.empty()) {
    out << text;
  } else {
    std::ofstream file(o.out);
    if (!file) {
      err << "exactdiff: cannot write '" << o.out << "'\n";
      return kUsageError;
    }
    file << text;
    if (o.format == "csv") {
      std::ofstream summary(o.out + ".summary.json");
      summary << result.report.dump(2) << '\n';
    }
  }
  for (const auto& f : result.failures) err << "FAIL: " << f << '\n';
  return result.pass ? kPass : kAssertionFailure;
}

}  // namespace exactdiff::cli
