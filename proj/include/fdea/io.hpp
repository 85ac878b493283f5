#pragma once

#include <array>
#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "fdea/analysis.hpp"
#include "fdea/config.hpp"
#include "fdea/dataset.hpp"
#include "fdea/error.hpp"

namespace fdea {

// Dataset files
// -------------
// Delimited text, one record per DMU:
//
//   # comment
//   @dmus,15
//   @stage1_inputs,branch_costs,employee
//   @stage1_outputs,documents
//   @intermediates,deposit,loans
//   @stage2_inputs,staff,facilities
//   @stage2_outputs,net_profit
//   dmu,branch_costs_L,branch_costs_M,branch_costs_U,employee_L,...
//   Emamzadeh_Abdollah,5872332921.05,6053951465.00,...
//
// Measure columns follow the block order of the @ lines, three per measure.
// @dmus is optional; when present the record count must match it.

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string> split(std::string_view line, char sep = ',') {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    out.emplace_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::optional<double> parse_number(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

inline std::string format_number(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

inline constexpr std::array<char, 3> kSuffix = {'L', 'M', 'U'};

inline void check_measure_names(const std::array<MeasureGroup, 5>& groups,
                                const std::string& where) {
  std::unordered_set<std::string> seen;
  for (std::size_t b = 0; b < groups.size(); ++b) {
    if (groups[b].names.empty()) {
      throw ParseError(where, "block '" + std::string(block_key(kAllBlocks[b])) +
                                  "' declares no measures");
    }
    for (const auto& n : groups[b].names) {
      if (n.empty()) throw ParseError(where, "empty measure name");
      if (!seen.insert(n).second) throw ParseError(where, "duplicate measure name '" + n + "'");
    }
  }
}

inline void check_triple(const TriangularFuzzyNumber& f, const std::string& where,
                         std::size_t row, const std::string& dmu, const std::string& measure) {
  if (auto err = validate(f)) {
    throw ParseError(where, *err + " at row " + std::to_string(row) + " (DMU '" + dmu +
                                "', measure '" + measure + "')");
  }
}

}  // namespace detail

inline TwoStageDataset parse_dataset_csv(std::istream& in, const std::string& source = "<csv>") {
  std::array<MeasureGroup, 5> groups;
  std::array<bool, 5> declared{};
  std::optional<std::size_t> declared_n;
  std::vector<std::string> names;
  std::vector<std::vector<TriangularFuzzyNumber>> records;
  std::unordered_set<std::string> seen_dmus;
  bool have_header = false;
  std::size_t width = 0;

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto text = detail::trim(line);
    if (text.empty() || text.front() == '#') continue;
    const std::string where = source + ":" + std::to_string(lineno);
    auto fields = detail::split(text);

    if (text.front() == '@') {
      if (have_header) throw ParseError(where, "metadata after the column header");
      const std::string key = fields.front().substr(1);
      if (key == "dmus") {
        if (fields.size() != 2) throw ParseError(where, "@dmus takes one value");
        const auto v = detail::parse_number(fields[1]);
        if (!v || *v < 0 || *v != static_cast<double>(static_cast<std::size_t>(*v))) {
          throw ParseError(where, "@dmus must be a non-negative integer");
        }
        declared_n = static_cast<std::size_t>(*v);
        continue;
      }
      std::size_t b = 0;
      while (b < kAllBlocks.size() && block_key(kAllBlocks[b]) != key) ++b;
      if (b == kAllBlocks.size()) throw ParseError(where, "unknown metadata key '@" + key + "'");
      if (declared[b]) throw ParseError(where, "block '@" + key + "' declared twice");
      declared[b] = true;
      groups[b].names.assign(fields.begin() + 1, fields.end());
      continue;
    }

    if (!have_header) {
      for (std::size_t b = 0; b < declared.size(); ++b) {
        if (!declared[b]) {
          throw ParseError(where, "missing metadata line '@" +
                                      std::string(block_key(kAllBlocks[b])) + "'");
        }
      }
      detail::check_measure_names(groups, where);
      std::vector<std::string> expected{"dmu"};
      for (const auto& g : groups) {
        for (const auto& n : g.names) {
          for (char s : detail::kSuffix) expected.push_back(n + "_" + s);
        }
      }
      if (fields != expected) {
        std::size_t k = 0;
        while (k < fields.size() && k < expected.size() && fields[k] == expected[k]) ++k;
        throw ParseError(where, "column header does not match the declared measures (column " +
                                    std::to_string(k + 1) + ": expected '" +
                                    (k < expected.size() ? expected[k] : std::string("<end>")) +
                                    "')");
      }
      width = expected.size();
      have_header = true;
      continue;
    }

    if (fields.size() != width) {
      throw ParseError(where, "dimension mismatch: record has " + std::to_string(fields.size()) +
                                  " fields, header declares " + std::to_string(width));
    }
    const std::string& dmu = fields.front();
    if (dmu.empty()) throw ParseError(where, "empty DMU name");
    if (!seen_dmus.insert(dmu).second) {
      throw ParseError(where, "duplicate DMU name '" + dmu + "'");
    }
    std::vector<TriangularFuzzyNumber> row;
    std::size_t col = 1;
    for (const auto& g : groups) {
      for (const auto& measure : g.names) {
        std::array<double, 3> t{};
        for (std::size_t k = 0; k < 3; ++k, ++col) {
          const auto v = detail::parse_number(fields[col]);
          if (!v) {
            throw ParseError(where, "malformed number '" + fields[col] + "' for DMU '" + dmu +
                                        "', measure '" + measure + "'");
          }
          t[k] = *v;
        }
        TriangularFuzzyNumber f{t[0], t[1], t[2]};
        detail::check_triple(f, where, records.size() + 1, dmu, measure);
        row.push_back(f);
      }
    }
    names.push_back(dmu);
    records.push_back(std::move(row));
  }

  if (!have_header) throw ParseError(source, "no column header found");
  if (declared_n && *declared_n != records.size()) {
    throw ParseError(source, "dimension mismatch: header declares " +
                                 std::to_string(*declared_n) + " DMUs, found " +
                                 std::to_string(records.size()) + " records");
  }
  std::size_t col = 0;
  for (auto& g : groups) {
    g.values = FuzzyGrid(records.size(), g.names.size());
    for (std::size_t j = 0; j < records.size(); ++j) {
      for (std::size_t i = 0; i < g.names.size(); ++i) g.values(j, i) = records[j][col + i];
    }
    col += g.names.size();
  }
  try {
    return TwoStageDataset(std::move(names), std::move(groups));
  } catch (const ParseError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ParseError(source, e.what());
  }
}

inline void write_dataset_csv(std::ostream& out, const TwoStageDataset& data) {
  out << "@dmus," << data.size() << '\n';
  for (MeasureBlock b : kAllBlocks) {
    out << '@' << block_key(b);
    for (const auto& n : data.group(b).names) out << ',' << n;
    out << '\n';
  }
  out << "dmu";
  for (MeasureBlock b : kAllBlocks) {
    for (const auto& n : data.group(b).names) {
      for (char s : detail::kSuffix) out << ',' << n << '_' << s;
    }
  }
  out << '\n';
  for (std::size_t j = 0; j < data.size(); ++j) {
    out << data.dmu_names()[j];
    for (MeasureBlock b : kAllBlocks) {
      for (const auto& f : data.values(b).row(j)) {
        out << ',' << detail::format_number(f.lower) << ',' << detail::format_number(f.mode)
            << ',' << detail::format_number(f.upper);
      }
    }
    out << '\n';
  }
}

// Structured alternative:
//   {"dmus": 15,
//    "measures": {"stage1_inputs": ["branch_costs", ...], ...},
//    "records": [{"dmu": "Emamzadeh_Abdollah",
//                 "values": {"branch_costs": [L, M, U], ...}}, ...]}

inline nlohmann::json dataset_to_json(const TwoStageDataset& data) {
  nlohmann::json j;
  j["dmus"] = data.size();
  for (MeasureBlock b : kAllBlocks) j["measures"][std::string(block_key(b))] = data.group(b).names;
  j["records"] = nlohmann::json::array();
  for (std::size_t r = 0; r < data.size(); ++r) {
    nlohmann::json rec;
    rec["dmu"] = data.dmu_names()[r];
    rec["values"] = nlohmann::json::object();
    for (MeasureBlock b : kAllBlocks) {
      const auto& g = data.group(b);
      for (std::size_t i = 0; i < g.names.size(); ++i) {
        const auto& f = g.values(r, i);
        rec["values"][g.names[i]] = {f.lower, f.mode, f.upper};
      }
    }
    j["records"].push_back(std::move(rec));
  }
  return j;
}

inline TwoStageDataset dataset_from_json(const nlohmann::json& j,
                                         const std::string& source = "<json>") {
  try {
    std::array<MeasureGroup, 5> groups;
    const auto& measures = j.at("measures");
    for (std::size_t b = 0; b < kAllBlocks.size(); ++b) {
      const std::string key(block_key(kAllBlocks[b]));
      if (!measures.contains(key)) throw ParseError(source, "missing measures." + key);
      groups[b].names = measures.at(key).get<std::vector<std::string>>();
    }
    detail::check_measure_names(groups, source);
    const auto& records = j.at("records");
    if (j.contains("dmus") && j.at("dmus").get<std::size_t>() != records.size()) {
      throw ParseError(source, "dimension mismatch: header declares " +
                                   std::to_string(j.at("dmus").get<std::size_t>()) +
                                   " DMUs, found " + std::to_string(records.size()) + " records");
    }
    std::vector<std::string> names;
    std::unordered_set<std::string> seen;
    for (auto& g : groups) g.values = FuzzyGrid(records.size(), g.names.size());
    for (std::size_t r = 0; r < records.size(); ++r) {
      const std::string where = source + ": records[" + std::to_string(r) + "]";
      const auto& rec = records[r];
      const auto dmu = rec.at("dmu").get<std::string>();
      if (!seen.insert(dmu).second) throw ParseError(where, "duplicate DMU name '" + dmu + "'");
      const auto& values = rec.at("values");
      std::size_t expected = 0;
      for (auto& g : groups) {
        expected += g.names.size();
        for (std::size_t i = 0; i < g.names.size(); ++i) {
          if (!values.contains(g.names[i])) {
            throw ParseError(where, "missing measure '" + g.names[i] + "'");
          }
          const auto t = values.at(g.names[i]).get<std::vector<double>>();
          if (t.size() != 3) {
            throw ParseError(where, "measure '" + g.names[i] + "' needs 3 values");
          }
          TriangularFuzzyNumber f{t[0], t[1], t[2]};
          detail::check_triple(f, where, r + 1, dmu, g.names[i]);
          g.values(r, i) = f;
        }
      }
      if (values.size() != expected) {
        throw ParseError(where, "dimension mismatch: record has " +
                                    std::to_string(values.size()) + " measures, expected " +
                                    std::to_string(expected));
      }
      names.push_back(dmu);
    }
    return TwoStageDataset(std::move(names), std::move(groups));
  } catch (const ParseError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(source, e.what());
  } catch (const ValidationError& e) {
    throw ParseError(source, e.what());
  }
}

inline bool is_json_path(const std::filesystem::path& path) {
  return path.extension() == ".json";
}

/// Reads a dataset file; ".json" selects the structured format, anything else CSV.
inline TwoStageDataset parse_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), "cannot open dataset file");
  if (is_json_path(path)) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string(), e.what());
    }
    return dataset_from_json(j, path.string());
  }
  return parse_dataset_csv(in, path.string());
}

inline void write_dataset(const std::filesystem::path& path, const TwoStageDataset& data) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  if (is_json_path(path)) {
    out << dataset_to_json(data).dump(2) << '\n';
  } else {
    write_dataset_csv(out, data);
  }
}

// Run configuration
// -----------------

enum class RunMode { kTwoStage, kBlackBox, kSensitivity, kFull };
enum class OutputFormat { kCsv, kJson, kMarkdown };

/// Extra weight cases used when a config does not list its own.
inline std::vector<WeightCase> default_sensitivity_cases() {
  return {{0.15, 0.85}, {0.45, 0.55}, {0.55, 0.45}, {0.85, 0.15}};
}

struct RunConfig {
  ModelConfig model;
  RunMode mode = RunMode::kTwoStage;
  std::vector<WeightCase> sensitivity_cases = default_sensitivity_cases();
  OutputFormat format = OutputFormat::kCsv;
  int precision = 4;
  bool full_precision = false;
  unsigned threads = 1;

  bool wants_sensitivity() const {
    return mode == RunMode::kSensitivity || mode == RunMode::kFull;
  }
  bool wants_blackbox() const { return mode == RunMode::kBlackBox || mode == RunMode::kFull; }

  void validate() const {
    model.validate();
    if (precision < 0 || precision > 17) throw ValidationError("precision must be in [0, 17]");
    if (wants_sensitivity()) {
      if (sensitivity_cases.empty()) throw ValidationError("no sensitivity cases given");
      for (const auto& c : sensitivity_cases) model.with_weights(c.w1, c.w2).validate();
    }
  }
};

inline RunMode parse_mode(std::string_view s) {
  if (s == "two-stage") return RunMode::kTwoStage;
  if (s == "blackbox") return RunMode::kBlackBox;
  if (s == "sensitivity") return RunMode::kSensitivity;
  if (s == "full") return RunMode::kFull;
  throw ValidationError("unknown mode '" + std::string(s) +
                        "' (expected two-stage, blackbox, sensitivity or full)");
}

inline OutputFormat parse_format(std::string_view s) {
  if (s == "csv") return OutputFormat::kCsv;
  if (s == "json") return OutputFormat::kJson;
  if (s == "markdown" || s == "md") return OutputFormat::kMarkdown;
  throw ValidationError("unknown output format '" + std::string(s) + "'");
}

/// Parses "0,0.5,1" or "start:stop:step".
inline std::vector<double> parse_alpha_grid(std::string_view spec) {
  const auto bad = [&] { return ValidationError("malformed alpha grid '" + std::string(spec) + "'"); };
  if (detail::trim(spec).empty()) throw ValidationError("alpha grid is empty");
  if (spec.find(':') != std::string_view::npos) {
    const auto parts = detail::split(spec, ':');
    if (parts.size() != 3) throw bad();
    std::array<double, 3> v{};
    for (std::size_t k = 0; k < 3; ++k) {
      const auto x = detail::parse_number(parts[k]);
      if (!x) throw bad();
      v[k] = *x;
    }
    return make_alpha_grid(v[0], v[1], v[2]);
  }
  std::vector<double> grid;
  for (const auto& part : detail::split(spec)) {
    const auto x = detail::parse_number(part);
    if (!x) throw bad();
    grid.push_back(*x);
  }
  return grid;
}

inline RunConfig run_config_from_json(const nlohmann::json& j,
                                      const std::string& source = "<config>") {
  static const std::unordered_set<std::string> kKeys = {
      "weights", "alpha_grid", "big_m", "t_floor", "feasibility_tol", "optimality_tol",
      "epsilon", "mode", "sensitivity_cases", "blackbox_composition", "format", "precision",
      "full_precision", "threads"};
  RunConfig c;
  try {
    if (!j.is_object()) throw ParseError(source, "config must be a JSON object");
    for (const auto& [key, _] : j.items()) {
      if (!kKeys.contains(key)) throw ParseError(source, "unknown config key '" + key + "'");
    }
    if (j.contains("weights")) {
      const auto& w = j["weights"];
      if (w.is_array()) {
        const auto v = w.get<std::vector<double>>();
        if (v.size() != 2) throw ParseError(source, "weights needs two values");
        c.model.w1 = v[0];
        c.model.w2 = v[1];
      } else {
        c.model.w1 = w.at("w1").get<double>();
        c.model.w2 = w.at("w2").get<double>();
      }
    }
    if (j.contains("alpha_grid")) {
      const auto& g = j["alpha_grid"];
      if (g.is_array()) {
        c.model.alpha_grid = g.get<std::vector<double>>();
      } else if (g.is_string()) {
        c.model.alpha_grid = parse_alpha_grid(g.get<std::string>());
      } else {
        c.model.alpha_grid = make_alpha_grid(g.at("start").get<double>(), g.at("stop").get<double>(),
                                             g.at("step").get<double>());
      }
    }
    if (j.contains("big_m")) c.model.big_m = j["big_m"].get<double>();
    if (j.contains("t_floor")) c.model.t_floor = j["t_floor"].get<double>();
    if (j.contains("feasibility_tol")) c.model.feasibility_tol = j["feasibility_tol"].get<double>();
    if (j.contains("optimality_tol")) c.model.optimality_tol = j["optimality_tol"].get<double>();
    if (j.contains("epsilon")) {
      const auto& e = j["epsilon"];
      if (e.is_string()) {
        if (e.get<std::string>() != "tie-to-alpha") {
          throw ParseError(source, "epsilon must be \"tie-to-alpha\" or five levels");
        }
      } else {
        const auto v = e.get<std::vector<double>>();
        if (v.size() != 5) throw ParseError(source, "epsilon needs five levels");
        c.model.epsilon = std::array<double, 5>{v[0], v[1], v[2], v[3], v[4]};
      }
    }
    if (j.contains("mode")) c.mode = parse_mode(j["mode"].get<std::string>());
    if (j.contains("sensitivity_cases")) {
      c.sensitivity_cases.clear();
      for (const auto& w : j["sensitivity_cases"]) {
        const auto v = w.get<std::vector<double>>();
        if (v.size() != 2) throw ParseError(source, "each sensitivity case needs two weights");
        c.sensitivity_cases.push_back({v[0], v[1]});
      }
    }
    if (j.contains("blackbox_composition")) {
      const auto s = j["blackbox_composition"].get<std::string>();
      if (s == "union") {
        c.model.blackbox = BlackBoxComposition::kUnion;
      } else if (s == "stage1") {
        c.model.blackbox = BlackBoxComposition::kStage1Only;
      } else {
        throw ParseError(source, "blackbox_composition must be \"union\" or \"stage1\"");
      }
    }
    if (j.contains("format")) c.format = parse_format(j["format"].get<std::string>());
    if (j.contains("precision")) c.precision = j["precision"].get<int>();
    if (j.contains("full_precision")) c.full_precision = j["full_precision"].get<bool>();
    if (j.contains("threads")) c.threads = j["threads"].get<unsigned>();
  } catch (const ParseError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(source, e.what());
  } catch (const ValidationError& e) {
    throw ParseError(source, e.what());
  }
  return c;
}

inline RunConfig parse_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), "cannot open config file");
  try {
    return run_config_from_json(nlohmann::json::parse(in), path.string());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string(), e.what());
  }
}

}  // namespace fdea
