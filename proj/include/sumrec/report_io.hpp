#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sumrec/configurations.hpp"
#include "sumrec/density.hpp"
#include "sumrec/dynamics.hpp"
#include "sumrec/rational.hpp"
#include "sumrec/search.hpp"
#include "sumrec/sparse.hpp"
#include "sumrec/structure.hpp"
#include "sumrec/window_set.hpp"

namespace sumrec {

constexpr int kReportSchemaVersion = 1;

/// The (command, flags) pair that produced a report; embedded into every
/// JSON output so reports are self-describing.
struct RunConfigEcho {
  std::string command;
  std::vector<std::pair<std::string, std::string>> args;
};

inline nlohmann::json to_json(const RunConfigEcho& cfg) {
  nlohmann::json args = nlohmann::json::object();
  for (const auto& [key, value] : cfg.args) args[key] = value;
  return {{"command", cfg.command}, {"args", args}};
}

inline nlohmann::json to_json(const Rational& r) {
  return nlohmann::json::array({r.num(), r.den()});
}

/// temp-then-rename, so readers never observe a half-written report.
inline void atomic_write(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp);
    os << content;
  }
  std::filesystem::rename(tmp, path);
}

inline std::string format_value(const Rational& r) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", r.to_double());
  return buf;
}

// --- density reports: CSV body plus a JSON sidecar ---

inline std::string density_csv(const DensityReport& rep) {
  std::ostringstream os;
  os << "grid_point,numerator,denominator,value\n";
  for (std::size_t i = 0; i < rep.grid.size(); ++i)
    os << rep.grid[i] << "," << rep.values[i].num() << "," << rep.values[i].den() << ","
       << format_value(rep.values[i]) << "\n";
  return os.str();
}

inline nlohmann::json density_sidecar(const DensityReport& rep, const RunConfigEcho& cfg) {
  nlohmann::json witnesses = nlohmann::json::array();
  if (rep.functional == DensityFunctional::upper_banach)
    for (std::size_t i = 0; i < rep.grid.size(); ++i)
      witnesses.push_back({{"grid_point", rep.grid[i]}, {"window_start", rep.witnesses[i]}});
  return {{"schema_version", kReportSchemaVersion},
          {"config", to_json(cfg)},
          {"functional", to_string(rep.functional)},
          {"extremum", to_json(rep.extremum)},
          {"witnesses", witnesses}};
}

// --- certificates ---

inline nlohmann::json certificate_json(const SumCertificate& cert, std::int64_t k, bool verified) {
  return {{"schema_version", kReportSchemaVersion},
          {"b_list", cert.b_list},
          {"c_list", cert.c_list},
          {"k", k},
          {"m", cert.verified_m},
          {"verified", verified},
          {"a_id", cert.a_id},
          {"s_id", cert.s_id}};
}

inline SumCertificate certificate_from_json(const nlohmann::json& j) {
  SumCertificate cert;
  cert.b_list = j.at("b_list").get<std::vector<std::int64_t>>();
  cert.c_list = j.at("c_list").get<std::vector<std::int64_t>>();
  cert.verified_m = j.value("m", static_cast<std::int64_t>(cert.b_list.size()));
  cert.a_id = j.value("a_id", "");
  cert.s_id = j.value("s_id", "");
  return cert;
}

// --- structure witnesses ---

inline nlohmann::json witness_json(const PwsWitness& w) {
  return {{"schema_version", kReportSchemaVersion},
          {"gap_bound", w.gap_bound},
          {"pattern", w.pattern},
          {"run_starts", w.run_starts},
          {"run_lengths", w.run_lengths}};
}

// --- greedy traces: one JSON line per step, then a closing summary line ---

inline std::string trace_jsonl(const GreedyTrace& trace, std::int64_t k) {
  std::ostringstream os;
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const GreedyStep& st = trace.steps[i];
    os << nlohmann::json{{"step", i + 1},
                         {"kind", std::string(1, st.kind)},
                         {"value", st.value},
                         {"intersection_size", st.intersection_size},
                         {"rejected", st.rejected}}
              .dump()
       << "\n";
  }
  os << nlohmann::json{{"certificate", certificate_json(trace.certificate, k, !trace.exhausted)},
                       {"exhausted", trace.exhausted}}
            .dump()
     << "\n";
  return os.str();
}

// --- finite systems and shift contexts share one file schema ---

struct SystemFile {
  std::vector<Rational> weights;
  std::vector<std::int64_t> map;
  std::optional<std::int64_t> period;
  std::optional<std::string> word;

  FiniteMPS mps() const { return FiniteMPS(weights, map); }
  ShiftContext shift() const {
    if (!word) throw std::invalid_argument("system file: no word for a shift context");
    const BinaryWord w = BinaryWord::from_string(*word);
    return period ? ShiftContext::periodic(w, *period) : ShiftContext::aperiodic(w);
  }
};

inline nlohmann::json system_json(const SystemFile& sys) {
  nlohmann::json weights = nlohmann::json::array();
  for (const Rational& w : sys.weights) weights.push_back(to_json(w));
  nlohmann::json j{{"schema_version", kReportSchemaVersion},
                   {"weights", weights},
                   {"map", sys.map}};
  if (sys.period) j["period"] = *sys.period;
  if (sys.word) j["word"] = *sys.word;
  return j;
}

inline SystemFile system_from_json(const nlohmann::json& j) {
  SystemFile sys;
  for (const auto& pair : j.at("weights"))
    sys.weights.emplace_back(pair.at(0).get<std::int64_t>(), pair.at(1).get<std::int64_t>());
  sys.map = j.at("map").get<std::vector<std::int64_t>>();
  if (j.contains("period")) sys.period = j.at("period").get<std::int64_t>();
  if (j.contains("word")) sys.word = j.at("word").get<std::string>();
  return sys;
}

// --- sparse reports ---

inline std::string bound_rows_csv(const std::vector<WindowBoundRow>& rows) {
  std::ostringstream os;
  os << "length,exponent,bound_num,bound_den,observed_num,observed_den,witness,ok\n";
  for (const WindowBoundRow& r : rows)
    os << r.length << "," << r.exponent << "," << r.bound.num() << "," << r.bound.den() << ","
       << r.observed.num() << "," << r.observed.den() << "," << r.witness << ","
       << (r.ok ? 1 : 0) << "\n";
  return os.str();
}

inline std::string decay_csv(const DecayReport& rep) {
  std::ostringstream os;
  os << "grid_point,y_count,f_count,numerator,denominator,value\n";
  for (const DecayRow& row : rep.rows)
    os << row.grid_n << "," << row.y_count << "," << row.f_count << "," << row.ratio.num() << ","
       << row.ratio.den() << "," << format_value(row.ratio) << "\n";
  return os.str();
}

inline nlohmann::json decay_sidecar(const DecayReport& rep, const RunConfigEcho& cfg) {
  nlohmann::json bounds = nlohmann::json::array();
  for (const DecayBoundRow& b : rep.bounds)
    bounds.push_back({{"exponent", b.exponent},
                      {"applicable", b.applicable},
                      {"first_grid", b.first_grid},
                      {"bound", to_json(b.bound)},
                      {"ok", b.ok},
                      {"copy_counts_ok", b.copy_counts_ok}});
  return {{"schema_version", kReportSchemaVersion},
          {"config", to_json(cfg)},
          {"ell", rep.ell},
          {"bounds", bounds},
          {"pass", rep.pass}};
}

inline nlohmann::json census_json(const PairGapCensus& census, const RunConfigEcho& cfg) {
  nlohmann::json rows = nlohmann::json::array();
  for (const GapCensusRow& r : census.rows) rows.push_back({{"gap", r.gap}, {"pairs", r.pairs}});
  nlohmann::json violations = nlohmann::json::array();
  for (const auto& [lo, hi] : census.violations)
    violations.push_back(nlohmann::json::array({lo, hi}));
  return {{"schema_version", kReportSchemaVersion},
          {"config", to_json(cfg)},
          {"rows", rows},
          {"violations", violations},
          {"pass", census.pass}};
}

}  // namespace sumrec
