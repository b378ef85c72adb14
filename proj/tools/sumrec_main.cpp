// Command-line front door: set generators, density/structure reports, greedy
// certificate searches, finite-system runs, and the sparse-set verifiers.
// Exit status: 0 all checks passed, 1 a verified property failed (witness in
// the report), 2 configuration or input error.

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sumrec/density.hpp"
#include "sumrec/dynamics.hpp"
#include "sumrec/prng.hpp"
#include "sumrec/report_io.hpp"
#include "sumrec/search.hpp"
#include "sumrec/sparse.hpp"
#include "sumrec/structure.hpp"
#include "sumrec/window_set.hpp"

namespace {

using namespace sumrec;
using i64 = std::int64_t;

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitConfig = 2;

// Horizons and other extents accept "4^10" as well as plain decimals.
i64 parse_extent(const std::string& text) {
  const auto caret = text.find('^');
  if (caret == std::string::npos) return std::stoll(text);
  const i64 base = std::stoll(text.substr(0, caret));
  const i64 exp = std::stoll(text.substr(caret + 1));
  if (base < 2 || exp < 0 || exp > 40) throw std::invalid_argument("bad extent " + text);
  i64 v = 1;
  for (i64 i = 0; i < exp; ++i) {
    if (v > (std::int64_t{1} << 62) / base) throw std::invalid_argument("extent overflow");
    v *= base;
  }
  return v;
}

std::vector<i64> parse_int_list(const std::string& text) {
  std::vector<i64> out;
  std::string item;
  std::istringstream is(text);
  while (std::getline(is, item, ','))
    if (!item.empty()) out.push_back(parse_extent(item));
  return out;
}

Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) return Rational(std::stoll(text));
  return Rational(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
}

WindowSet load_set(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot read set file " + path);
  return read_set(is);
}

// Coloring files: one class per line, comma-separated members; the horizon is
// the largest member (classes partition [1, horizon]).
Coloring load_coloring(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot read coloring file " + path);
  std::vector<std::vector<i64>> classes;
  std::string line;
  i64 horizon = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    classes.push_back(parse_int_list(line));
    std::sort(classes.back().begin(), classes.back().end());
    if (!classes.back().empty()) horizon = std::max(horizon, classes.back().back());
  }
  std::vector<WindowSet> sets;
  for (auto& members : classes) sets.push_back(WindowSet::from_members(horizon, std::move(members)));
  return Coloring::of(horizon, std::move(sets));
}

SystemFile load_system(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot read system file " + path);
  nlohmann::json j;
  is >> j;
  return system_from_json(j);
}

PointSet parse_points(const std::string& text, i64 n_points) {
  PointSet e(static_cast<std::size_t>(n_points), 0);
  for (i64 p : parse_int_list(text)) {
    if (p < 0 || p >= n_points) throw std::invalid_argument("point outside the system");
    e[static_cast<std::size_t>(p)] = 1;
  }
  return e;
}

Cylinder parse_cylinder(const std::string& text) {
  Cylinder u;
  if (text.empty()) return u;
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("cylinder entries are pos=bit");
    u.fixed.emplace_back(std::stoll(item.substr(0, eq)), item.substr(eq + 1) == "1");
  }
  return u;
}

void emit(const std::string& out, const std::string& content) {
  if (out.empty())
    std::cout << content;
  else
    atomic_write(out, content);
}

WindowSet family_set(const std::string& family, i64 horizon, i64 step,
                     const std::vector<i64>& generators) {
  if (family == "full") return WindowSet::full(horizon);
  if (family == "evens")
    return WindowSet::from_predicate(horizon, [](i64 i) { return i % 2 == 0; });
  if (family == "odds")
    return WindowSet::from_predicate(horizon, [](i64 i) { return i % 2 == 1; });
  if (family == "mult")
    return WindowSet::from_predicate(horizon, [step](i64 i) { return i % step == 0; });
  if (family == "squares") return gen_squares(horizon);
  if (family == "punctured") return gen_punctured_complement(horizon);
  if (family == "fs4") return gen_fs(powers_of_four(std::max<i64>(horizon, 4)), horizon);
  if (family == "fs1") return sparse_f(horizon);
  if (family == "fs") return gen_fs(generators, horizon);
  throw std::invalid_argument("unknown family " + family);
}

// label carries family parameters (e.g. the declared period) into the file
// name, so corpus files are self-describing.
WindowSet corpus_member(const std::string& family, i64 horizon, i64 index, SplitMix64& rng,
                        std::string& label) {
  if (family == "random") {
    const std::uint64_t pct = 10 + rng.below(81);
    label = "random" + std::to_string(pct);
    std::vector<i64> m;
    for (i64 i = 1; i <= horizon; ++i)
      if (rng.chance(pct, 100)) m.push_back(i);
    return WindowSet::from_members(horizon, std::move(m));
  }
  if (family == "periodic") {
    const i64 period = 2 + static_cast<i64>(rng.below(31));
    label = "period" + std::to_string(period);
    std::vector<i64> residues;
    for (i64 r = 0; r < period; ++r)
      if (rng.chance(1, 2)) residues.push_back(r);
    if (residues.empty()) residues.push_back(static_cast<i64>(rng.below(static_cast<std::uint64_t>(period))));
    return WindowSet::from_predicate(horizon, [&](i64 i) {
      return std::find(residues.begin(), residues.end(), i % period) != residues.end();
    });
  }
  if (family == "fs-like") {
    std::vector<i64> gens;
    i64 g = 2 + static_cast<i64>(rng.below(5));
    while (g <= horizon) {
      gens.push_back(g);
      g = g * (3 + static_cast<i64>(rng.below(3))) + static_cast<i64>(rng.below(4));
    }
    label = "fs" + std::to_string(gens.front());
    return gen_fs(gens, horizon);
  }
  if (family == "punctured") {
    label = "punctured";
    return gen_punctured_complement(std::max<i64>(horizon - index, 1));
  }
  throw std::invalid_argument("unknown corpus family " + family);
}

// ---- sparse verifiers shared by `sparse verify-*` and `verify ...` ----

struct CountingOutcome {
  std::string csv;
  i64 rows = 0;
  bool pass = true;
};

CountingOutcome run_counting(i64 horizon) {
  const std::vector<i64> powers = powers_of_four(std::max<i64>(horizon, 4));
  i64 reach = 0;
  for (i64 p : powers) reach += p;
  const std::vector<i64> elements = gen_fs(powers, reach).members();
  std::ostringstream os;
  os << "element,formula,direct\n";
  CountingOutcome out;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const i64 formula = fs_count(elements[i]);
    const i64 direct = static_cast<i64>(i) + 1;
    if (formula != direct) out.pass = false;
    os << elements[i] << "," << formula << "," << direct << "\n";
    ++out.rows;
  }
  out.csv = os.str();
  return out;
}

int emit_counting(const std::string& horizon_text, const std::string& out) {
  const CountingOutcome outcome = run_counting(parse_extent(horizon_text));
  emit(out, outcome.csv);
  if (!out.empty()) {
    const RunConfigEcho echo{"verify counting", {{"--horizon", horizon_text}}};
    atomic_write(out + ".json", nlohmann::json{{"schema_version", kReportSchemaVersion},
                                               {"config", to_json(echo)},
                                               {"rows", outcome.rows},
                                               {"pass", outcome.pass}}
                                        .dump(2) +
                                    "\n");
  }
  std::cerr << outcome.rows << " rows, " << (outcome.pass ? "all exact" : "MISMATCH") << "\n";
  return outcome.pass ? kExitOk : kExitViolation;
}

int run_bound(const std::string& horizon_text, const std::string& lengths_text,
              const std::string& out) {
  const auto rows = banach_bound_check(parse_extent(horizon_text), parse_int_list(lengths_text));
  emit(out, bound_rows_csv(rows));
  bool pass = true;
  for (const auto& r : rows) {
    pass = pass && r.ok;
    std::fprintf(stderr, "length %" PRId64 ": observed %s bound %s %s\n", r.length,
                 r.observed.str().c_str(), r.bound.str().c_str(), r.ok ? "ok" : "VIOLATED");
  }
  if (!out.empty()) {
    const RunConfigEcho echo{"verify bound",
                             {{"--horizon", horizon_text}, {"--lengths", lengths_text}}};
    atomic_write(out + ".json", nlohmann::json{{"schema_version", kReportSchemaVersion},
                                               {"config", to_json(echo)},
                                               {"pass", pass}}
                                        .dump(2) +
                                    "\n");
  }
  return pass ? kExitOk : kExitViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-window laboratory for sumset and recurrence structure"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value file; command-line flags win");
  std::function<int()> action;

  // ---- gen ----
  CLI::App* gen = app.add_subcommand("gen", "emit sets and corpora");
  gen->require_subcommand(1);
  {
    CLI::App* set = gen->add_subcommand("set", "write one named set");
    auto family = std::make_shared<std::string>("full");
    auto horizon = std::make_shared<std::string>("100");
    auto step = std::make_shared<i64>(3);
    auto gens = std::make_shared<std::string>("");
    auto out = std::make_shared<std::string>("");
    set->add_option("--family", *family,
                    "full|evens|odds|mult|squares|punctured|fs4|fs1|fs");
    set->add_option("--horizon", *horizon);
    set->add_option("--step", *step, "modulus for family=mult");
    set->add_option("--generators", *gens, "comma list for family=fs");
    set->add_option("--out", *out);
    set->callback([=, &action]() {
      action = [=]() {
        const i64 h = parse_extent(*horizon);
        if (h < 1) throw std::invalid_argument("horizon must be positive");
        std::ostringstream os;
        write_set(os, family_set(*family, h, *step, parse_int_list(*gens)));
        emit(*out, os.str());
        return kExitOk;
      };
    });

    CLI::App* corpus = gen->add_subcommand("corpus", "seeded benchmark sets");
    auto cfamily = std::make_shared<std::string>("random");
    auto seed = std::make_shared<std::uint64_t>(1);
    auto count = std::make_shared<i64>(1);
    auto chorizon = std::make_shared<std::string>("1000");
    auto dir = std::make_shared<std::string>(".");
    corpus->add_option("--family", *cfamily, "random|periodic|fs-like|punctured");
    corpus->add_option("--seed", *seed);
    corpus->add_option("--count", *count);
    corpus->add_option("--horizon", *chorizon);
    corpus->add_option("--out-dir", *dir);
    corpus->callback([=, &action]() {
      action = [=]() {
        const i64 h = parse_extent(*chorizon);
        if (h < 1 || *count < 1) throw std::invalid_argument("need horizon >= 1 and count >= 1");
        std::filesystem::create_directories(*dir);
        SplitMix64 rng(*seed);
        for (i64 i = 0; i < *count; ++i) {
          std::string label;
          const WindowSet s = corpus_member(*cfamily, h, i, rng, label);
          char name[96];
          std::snprintf(name, sizeof(name), "set%03" PRId64 "_%s.txt", i, label.c_str());
          std::ostringstream os;
          write_set(os, s);
          atomic_write((std::filesystem::path(*dir) / name).string(), os.str());
        }
        std::cout << *count << " files written to " << *dir << "\n";
        return kExitOk;
      };
    });
  }

  // ---- density ----
  CLI::App* density = app.add_subcommand("density", "window and prefix densities");
  density->require_subcommand(1);
  {
    CLI::App* banach = density->add_subcommand(
        "banach", "max window density; csv: grid_point,numerator,denominator,value");
    auto set_path = std::make_shared<std::string>();
    auto lengths = std::make_shared<std::string>("64");
    auto out = std::make_shared<std::string>("");
    banach->add_option("--set", *set_path)->required();
    banach->add_option("--lengths", *lengths);
    banach->add_option("--out", *out, "basename: writes .csv and .json");
    banach->callback([=, &action]() {
      action = [=]() {
        const WindowSet a = load_set(*set_path);
        const DensityReport rep = upper_banach(a, parse_int_list(*lengths));
        const RunConfigEcho echo{"density banach", {{"--set", *set_path}, {"--lengths", *lengths}}};
        if (!out->empty()) {
          atomic_write(*out + ".csv", density_csv(rep));
          atomic_write(*out + ".json", density_sidecar(rep, echo).dump(2) + "\n");
        }
        std::cout << density_csv(rep);
        std::cout << "extremum " << rep.extremum.str() << "\n";
        return kExitOk;
      };
    });

    CLI::App* relative = density->add_subcommand(
        "relative", "prefix density inside a host; csv: grid_point,numerator,denominator,value");
    auto a_path = std::make_shared<std::string>();
    auto f_path = std::make_shared<std::string>();
    auto grid = std::make_shared<std::string>();
    auto rout = std::make_shared<std::string>("");
    relative->add_option("--set", *a_path)->required();
    relative->add_option("--host", *f_path)->required();
    relative->add_option("--grid", *grid)->required();
    relative->add_option("--out", *rout);
    relative->callback([=, &action]() {
      action = [=]() {
        const DensityReport rep =
            lower_relative(load_set(*a_path), load_set(*f_path), parse_int_list(*grid));
        const RunConfigEcho echo{"density relative",
                                 {{"--set", *a_path}, {"--host", *f_path}, {"--grid", *grid}}};
        if (!rout->empty()) {
          atomic_write(*rout + ".csv", density_csv(rep));
          atomic_write(*rout + ".json", density_sidecar(rep, echo).dump(2) + "\n");
        }
        std::cout << density_csv(rep);
        std::cout << "extremum " << rep.extremum.str() << "\n";
        return kExitOk;
      };
    });

    CLI::App* threshold = density->add_subcommand("threshold", "least stable prefix index");
    auto ta = std::make_shared<std::string>();
    auto tf = std::make_shared<std::string>();
    auto target = std::make_shared<std::string>("1/2");
    auto cap = std::make_shared<std::string>("0");
    threshold->add_option("--set", *ta)->required();
    threshold->add_option("--host", *tf)->required();
    threshold->add_option("--target", *target, "rational p/q");
    threshold->add_option("--cap", *cap, "0 = host horizon");
    threshold->callback([=, &action]() {
      action = [=]() {
        const WindowSet f = load_set(*tf);
        const i64 c = parse_extent(*cap);
        const auto n =
            threshold_index(load_set(*ta), f, parse_rational(*target), c > 0 ? c : f.horizon());
        std::cout << (n ? std::to_string(*n) : std::string("none")) << "\n";
        return kExitOk;
      };
    });
  }

  // ---- detect ----
  CLI::App* detect = app.add_subcommand("detect", "syndetic / thick / piecewise structure");
  detect->require_subcommand(1);
  {
    CLI::App* gap = detect->add_subcommand("gap", "largest gap");
    auto path = std::make_shared<std::string>();
    gap->add_option("--set", *path)->required();
    gap->callback([=, &action]() {
      action = [=]() {
        const auto g = syndetic_gap(load_set(*path));
        std::cout << (g ? std::to_string(*g) : std::string("none")) << "\n";
        return kExitOk;
      };
    });

    CLI::App* run = detect->add_subcommand("run", "longest block");
    auto rpath = std::make_shared<std::string>();
    run->add_option("--set", *rpath)->required();
    run->callback([=, &action]() {
      action = [=]() {
        std::cout << max_run(load_set(*rpath)) << "\n";
        return kExitOk;
      };
    });

    CLI::App* pws = detect->add_subcommand("pws", "recurring pattern witness");
    auto ppath = std::make_shared<std::string>();
    auto span = std::make_shared<i64>(4);
    auto min_runs = std::make_shared<i64>(3);
    auto pout = std::make_shared<std::string>("");
    pws->add_option("--set", *ppath)->required();
    pws->add_option("--span", *span);
    pws->add_option("--min-runs", *min_runs);
    pws->add_option("--out", *pout);
    pws->callback([=, &action]() {
      action = [=]() {
        const auto w = pws_witness(load_set(*ppath), *span, *min_runs);
        if (!w) {
          std::cout << "none\n";
          return kExitOk;
        }
        const std::string body = witness_json(*w).dump(2) + "\n";
        emit(*pout, body);
        if (!pout->empty()) std::cout << "witness with pattern size " << w->pattern.size() << "\n";
        return kExitOk;
      };
    });

    CLI::App* color = detect->add_subcommand("color", "piecewise-syndetic class of a coloring");
    auto cpath = std::make_shared<std::string>();
    color->add_option("--coloring", *cpath)->required();
    color->callback([=, &action]() {
      action = [=]() {
        std::cout << pws_color(load_coloring(*cpath)) << "\n";
        return kExitOk;
      };
    });
  }

  // ---- search ----
  CLI::App* search = app.add_subcommand("search", "witnesses and greedy certificates");
  search->require_subcommand(1);
  {
    CLI::App* witness = search->add_subcommand("witness", "least k-intersective witness");
    auto a_path = std::make_shared<std::string>("");
    auto coloring_path = std::make_shared<std::string>("");
    auto s_path = std::make_shared<std::string>();
    auto k = std::make_shared<i64>(1);
    witness->add_option("--set", *a_path);
    witness->add_option("--coloring", *coloring_path, "chromatic variant");
    witness->add_option("--s", *s_path)->required();
    witness->add_option("--k", *k);
    witness->callback([=, &action]() {
      action = [=]() {
        const WindowSet s = load_set(*s_path);
        if (!coloring_path->empty()) {
          const auto w = chromatic_witness(load_coloring(*coloring_path), s, *k);
          if (w)
            std::cout << "class " << w->class_index << " a=" << w->witness.a
                      << " n=" << w->witness.n << "\n";
          else
            std::cout << "none\n";
          return kExitOk;
        }
        if (a_path->empty()) throw std::invalid_argument("need --set or --coloring");
        const auto w = k_intersective_witness(load_set(*a_path), s, *k);
        if (w)
          std::cout << "a=" << w->a << " n=" << w->n << "\n";
        else
          std::cout << "none\n";
        return kExitOk;
      };
    });

    const auto add_greedy = [&](const char* name, bool pws_mode) {
      CLI::App* cmd = search->add_subcommand(
          name, pws_mode ? "greedy pair over pattern run starts" : "greedy pair over the set");
      auto a_path = std::make_shared<std::string>();
      auto s_path = std::make_shared<std::string>();
      auto k = std::make_shared<i64>(1);
      auto target_m = std::make_shared<i64>(2);
      auto trace_path = std::make_shared<std::string>("");
      auto cert_path = std::make_shared<std::string>("");
      auto max_span = std::make_shared<i64>(12);
      auto min_runs = std::make_shared<i64>(3);
      cmd->add_option("--set", *a_path)->required();
      cmd->add_option("--s", *s_path)->required();
      cmd->add_option("--k", *k);
      cmd->add_option("--target-m", *target_m);
      cmd->add_option("--trace", *trace_path, "JSON-lines trace output");
      cmd->add_option("--cert", *cert_path, "certificate JSON output");
      if (pws_mode) {
        cmd->add_option("--max-span", *max_span);
        cmd->add_option("--min-runs", *min_runs);
      }
      cmd->callback([=, &action]() {
        action = [=]() {
          const WindowSet a = load_set(*a_path);
          const WindowSet s = load_set(*s_path);
          const CoefficientProfile profile{*k, *target_m, true};
          GreedyTrace trace;
          if (pws_mode) {
            const auto r =
                greedy_pws_pair(a, s, profile, *target_m, {*max_span, *min_runs, {}});
            if (r.status == PwsSearchStatus::not_piecewise_syndetic) {
              std::cout << "not piecewise syndetic at spans <= " << *max_span << "\n";
              return kExitOk;
            }
            trace = r.trace;
            std::cout << "witness span " << r.scale_n << "\n";
          } else {
            trace = greedy_dense_pair(a, s, profile, *target_m);
          }
          trace.certificate.a_id = *a_path;
          trace.certificate.s_id = *s_path;
          if (!trace_path->empty()) atomic_write(*trace_path, trace_jsonl(trace, *k));
          if (!cert_path->empty())
            atomic_write(*cert_path,
                         certificate_json(trace.certificate, *k, !trace.exhausted).dump(2) + "\n");
          std::cout << (trace.exhausted ? "exhausted" : "completed") << " with "
                    << trace.certificate.b_list.size() << " pairs\n";
          return kExitOk;
        };
      });
    };
    add_greedy("dense", false);
    add_greedy("pws", true);
  }

  // ---- dynamics ----
  CLI::App* dynamics = app.add_subcommand("dynamics", "finite systems and subshifts");
  dynamics->require_subcommand(1);
  {
    CLI::App* measure = dynamics->add_subcommand("measure", "intersection measures");
    auto sys_path = std::make_shared<std::string>();
    auto points = std::make_shared<std::string>();
    auto shifts = std::make_shared<std::string>();
    auto k = std::make_shared<i64>(1);
    measure->add_option("--system", *sys_path)->required();
    measure->add_option("--points", *points)->required();
    measure->add_option("--shifts", *shifts)->required();
    measure->add_option("--k", *k);
    measure->callback([=, &action]() {
      action = [=]() {
        const FiniteMPS sys = load_system(*sys_path).mps();
        const std::vector<i64> ns = parse_int_list(*shifts);
        const auto values = intersection_measure(sys, parse_points(*points, sys.n_points()), ns, *k);
        for (std::size_t i = 0; i < ns.size(); ++i)
          std::cout << ns[i] << " " << values[i].str() << "\n";
        return kExitOk;
      };
    });

    CLI::App* staged_cmd = dynamics->add_subcommand("staged", "staged recurrence times");
    auto lsys = std::make_shared<std::string>();
    auto lpoints = std::make_shared<std::string>();
    auto ls = std::make_shared<std::string>();
    auto lk = std::make_shared<i64>(1);
    auto lm = std::make_shared<i64>(2);
    staged_cmd->add_option("--system", *lsys)->required();
    staged_cmd->add_option("--points", *lpoints)->required();
    staged_cmd->add_option("--s", *ls)->required();
    staged_cmd->add_option("--k", *lk);
    staged_cmd->add_option("--m", *lm);
    staged_cmd->callback([=, &action]() {
      action = [=]() {
        const FiniteMPS sys = load_system(*lsys).mps();
        const StagedRecurrence r =
            staged_recurrence_times(sys, parse_points(*lpoints, sys.n_points()), load_set(*ls), *lk, *lm);
        if (!r.completed) {
          std::cout << "not extendable after " << r.terms.size() << " terms\n";
          return kExitOk;
        }
        std::cout << "terms";
        for (i64 t : r.terms) std::cout << " " << t;
        std::cout << "\nfinal measure " << r.final_measure.str() << "\n";
        return kExitOk;
      };
    });

    CLI::App* toprec = dynamics->add_subcommand("toprec", "topological recurrence witness");
    auto tsys = std::make_shared<std::string>();
    auto cyl = std::make_shared<std::string>("");
    auto ts = std::make_shared<std::string>();
    auto tk = std::make_shared<i64>(1);
    toprec->add_option("--system", *tsys)->required();
    toprec->add_option("--cylinder", *cyl, "comma list pos=bit, 0-based");
    toprec->add_option("--s", *ts)->required();
    toprec->add_option("--k", *tk);
    toprec->callback([=, &action]() {
      action = [=]() {
        const ShiftContext ctx = load_system(*tsys).shift();
        const auto n = top_recurrence_witness(ctx, parse_cylinder(*cyl), load_set(*ts), *tk);
        std::cout << (n ? std::to_string(*n) : std::string("none")) << "\n";
        return kExitOk;
      };
    });
  }

  // ---- sparse ----
  CLI::App* sparse = app.add_subcommand("sparse", "the zero-density construction");
  sparse->require_subcommand(1);
  {
    CLI::App* build = sparse->add_subcommand("build", "write the sparse host set");
    auto horizon = std::make_shared<std::string>("4^6");
    auto out = std::make_shared<std::string>("");
    build->add_option("--horizon", *horizon);
    build->add_option("--out", *out);
    build->callback([=, &action]() {
      action = [=]() {
        std::ostringstream os;
        write_set(os, sparse_f(parse_extent(*horizon)));
        emit(*out, os.str());
        return kExitOk;
      };
    });

    CLI::App* counting = sparse->add_subcommand(
        "verify-counting", "digit formula vs enumeration; csv: element,formula,direct");
    auto chorizon = std::make_shared<std::string>("4^8");
    auto cout_path = std::make_shared<std::string>("");
    counting->add_option("--horizon", *chorizon, "largest generator bound");
    counting->add_option("--out", *cout_path);
    counting->callback([=, &action]() {
      action = [=]() { return emit_counting(*chorizon, *cout_path); };
    });

    CLI::App* bound = sparse->add_subcommand(
        "verify-bound",
        "window density bound; csv: length,exponent,bound_num,bound_den,observed_num,observed_den,witness,ok");
    auto bhorizon = std::make_shared<std::string>("4^8");
    auto blengths = std::make_shared<std::string>("4,16,64,256,1024,4096,16384");
    auto bout = std::make_shared<std::string>("");
    bound->add_option("--horizon", *bhorizon);
    bound->add_option("--lengths", *blengths);
    bound->add_option("--out", *bout);
    bound->callback([=, &action]() {
      action = [=]() { return run_bound(*bhorizon, *blengths, *bout); };
    });

    CLI::App* y = sparse->add_subcommand("y", "threshold-removed subset");
    auto ym = std::make_shared<i64>(17);
    auto ynt = std::make_shared<std::string>("t");
    auto yhorizon = std::make_shared<std::string>("4^6");
    auto yset = std::make_shared<std::string>("");
    auto yout = std::make_shared<std::string>("");
    y->add_option("--m,--M", *ym, "least removed gap M")->capture_default_str();
    y->add_option("--nt,--Nt", *ynt, "t | const:c | linear:a,b | geom:c,g");
    y->add_option("--horizon", *yhorizon);
    y->add_option("--set", *yset, "subset of the host (default: the host itself)");
    y->add_option("--out", *yout);
    y->callback([=, &action]() {
      action = [=]() {
        const i64 h = parse_extent(*yhorizon);
        const SparseParams params(*ym, NtRule::parse(*ynt), h);
        const WindowSet a = yset->empty() ? sparse_f(h) : load_set(*yset);
        std::ostringstream os;
        write_set(os, y_set(a, params));
        emit(*yout, os.str());
        return kExitOk;
      };
    });

    CLI::App* decay = sparse->add_subcommand(
        "decay",
        "relative density along the stage grid; csv: grid_point,y_count,f_count,numerator,denominator,value");
    auto dm = std::make_shared<i64>(17);
    auto dnt = std::make_shared<std::string>("t");
    auto dhorizon = std::make_shared<std::string>("4^10");
    auto dgrid = std::make_shared<std::string>("");
    auto dout = std::make_shared<std::string>("");
    decay->add_option("--m,--M", *dm)->capture_default_str();
    decay->add_option("--nt,--Nt", *dnt);
    decay->add_option("--horizon", *dhorizon);
    decay->add_option("--grid", *dgrid, "default: stage lengths inside the horizon");
    decay->add_option("--out", *dout, "basename: writes .csv and .json");
    decay->callback([=, &action]() {
      action = [=]() {
        const i64 h = parse_extent(*dhorizon);
        const SparseParams params(*dm, NtRule::parse(*dnt), h);
        const DecayReport rep = decay_report(sparse_f(h), params, parse_int_list(*dgrid));
        const RunConfigEcho echo{"sparse decay",
                                 {{"--m", std::to_string(*dm)},
                                  {"--nt", *dnt},
                                  {"--horizon", *dhorizon},
                                  {"--grid", *dgrid}}};
        if (!dout->empty()) {
          atomic_write(*dout + ".csv", decay_csv(rep));
          atomic_write(*dout + ".json", decay_sidecar(rep, echo).dump(2) + "\n");
        }
        std::cout << decay_csv(rep);
        return rep.pass ? kExitOk : kExitViolation;
      };
    });

    CLI::App* census = sparse->add_subcommand("census", "pair gaps of the removed set");
    auto cm = std::make_shared<i64>(17);
    auto cnt = std::make_shared<std::string>("t");
    auto chor = std::make_shared<std::string>("4^6");
    auto cset = std::make_shared<std::string>("");
    auto cout2 = std::make_shared<std::string>("");
    census->add_option("--m,--M", *cm)->capture_default_str();
    census->add_option("--nt,--Nt", *cnt);
    census->add_option("--horizon", *chor);
    census->add_option("--set", *cset, "a precomputed removed set (default: rebuild)");
    census->add_option("--out", *cout2);
    census->callback([=, &action]() {
      action = [=]() {
        const i64 h = parse_extent(*chor);
        const SparseParams params(*cm, NtRule::parse(*cnt), h);
        const WindowSet y = cset->empty() ? y_set(sparse_f(h), params) : load_set(*cset);
        const PairGapCensus result = pair_gap_census(y, params);
        const RunConfigEcho echo{"sparse census",
                                 {{"--m", std::to_string(*cm)}, {"--nt", *cnt}, {"--horizon", *chor}}};
        emit(*cout2, census_json(result, echo).dump(2) + "\n");
        return result.pass ? kExitOk : kExitViolation;
      };
    });
  }

  // ---- verify ----
  CLI::App* verify = app.add_subcommand("verify", "scripted checks with witnesses");
  verify->require_subcommand(1);
  {
    CLI::App* counting = verify->add_subcommand(
        "counting", "digit-count formula; csv: element,formula,direct");
    auto horizon = std::make_shared<std::string>("4^8");
    auto out = std::make_shared<std::string>("");
    counting->add_option("--horizon", *horizon);
    counting->add_option("--out", *out);
    counting->callback([=, &action]() {
      action = [=]() { return emit_counting(*horizon, *out); };
    });

    CLI::App* bound = verify->add_subcommand(
        "bound",
        "window density bound; csv: length,exponent,bound_num,bound_den,observed_num,observed_den,witness,ok");
    auto bh = std::make_shared<std::string>("4^8");
    auto bl = std::make_shared<std::string>("4,16,64,256,1024,4096,16384");
    auto bo = std::make_shared<std::string>("");
    bound->add_option("--horizon", *bh);
    bound->add_option("--lengths", *bl);
    bound->add_option("--out", *bo);
    bound->callback([=, &action]() {
      action = [=]() { return run_bound(*bh, *bl, *bo); };
    });

    CLI::App* decay = verify->add_subcommand(
        "decay",
        "stage-grid decay with bounds; csv: grid_point,y_count,f_count,numerator,denominator,value");
    auto dh = std::make_shared<std::string>("4^10");
    auto dm = std::make_shared<i64>(17);
    auto dnt = std::make_shared<std::string>("t");
    decay->add_option("--horizon", *dh);
    decay->add_option("--m,--M", *dm)->capture_default_str();
    decay->add_option("--nt,--Nt", *dnt);
    decay->callback([=, &action]() {
      action = [=]() {
        const i64 h = parse_extent(*dh);
        const DecayReport rep = decay_report(sparse_f(h), SparseParams(*dm, NtRule::parse(*dnt), h));
        std::cout << decay_csv(rep);
        for (const DecayBoundRow& b : rep.bounds)
          std::fprintf(stderr, "N=%" PRId64 " %s bound %s %s\n", b.exponent,
                       b.applicable ? "applicable" : "not applicable", b.bound.str().c_str(),
                       b.applicable ? (b.ok && b.copy_counts_ok ? "ok" : "VIOLATED") : "-");
        return rep.pass ? kExitOk : kExitViolation;
      };
    });

    CLI::App* pairs = verify->add_subcommand("pairs", "pair-gap thresholds");
    auto ph = std::make_shared<std::string>("4^10");
    auto pm = std::make_shared<i64>(17);
    auto pnt = std::make_shared<std::string>("t");
    pairs->add_option("--horizon", *ph);
    pairs->add_option("--m,--M", *pm)->capture_default_str();
    pairs->add_option("--nt,--Nt", *pnt);
    pairs->callback([=, &action]() {
      action = [=]() {
        const i64 h = parse_extent(*ph);
        const SparseParams params(*pm, NtRule::parse(*pnt), h);
        const PairGapCensus census = pair_gap_census(y_set(sparse_f(h), params), params);
        std::cout << census_json(census, {"verify pairs", {}}).dump(2) << "\n";
        return census.pass ? kExitOk : kExitViolation;
      };
    });

    CLI::App* cert = verify->add_subcommand("certificate", "check a certificate file");
    auto ca = std::make_shared<std::string>();
    auto cc = std::make_shared<std::string>();
    auto ck = std::make_shared<i64>(1);
    auto cm2 = std::make_shared<i64>(0);
    cert->add_option("--set", *ca)->required();
    cert->add_option("--cert", *cc)->required();
    cert->add_option("--k", *ck);
    cert->add_option("--m", *cm2, "0 = certificate's own m");
    cert->callback([=, &action]() {
      action = [=]() {
        std::ifstream is(*cc);
        if (!is) throw std::invalid_argument("cannot read certificate " + *cc);
        nlohmann::json j;
        is >> j;
        const SumCertificate parsed = certificate_from_json(j);
        const CoefficientProfile profile{*ck, *cm2 > 0 ? *cm2 : parsed.verified_m, true};
        const CertificateReport rep = verify_certificate(load_set(*ca), parsed, profile);
        if (rep.passed) {
          std::cout << "pass checked=" << rep.checked << " untestable=" << rep.untestable << "\n";
          return kExitOk;
        }
        const CertificateViolation& v = *rep.first_violation;
        nlohmann::json witness{{"c", v.c},
                               {"b_selection", v.b_selection},
                               {"coefficients", v.coefficients},
                               {"sum", v.sum}};
        std::cout << "fail " << witness.dump() << "\n";
        return kExitViolation;
      };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (action) return action();
    return kExitOk;  // subcommands with immediate callbacks already ran
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}
