#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fdea/analysis.hpp"
#include "fdea/dataset.hpp"
#include "fdea/error.hpp"
#include "fdea/io.hpp"

namespace fdea {

/// Everything one run produces, before formatting.
struct RunOutput {
  EfficiencyMatrix matrix;
  AnalysisReport analysis;
  std::optional<SensitivityBlock> sensitivity;
  std::optional<BlackBoxBlock> blackbox;
  std::vector<std::string> warnings;
};

/// Validates, sweeps and aggregates according to `cfg.mode`.
inline RunOutput run_analysis(const TwoStageDataset& data, const RunConfig& cfg) {
  cfg.validate();
  cfg.model.validate_for(data);
  if (cfg.wants_sensitivity()) {
    for (const auto& c : cfg.sensitivity_cases) cfg.model.with_weights(c.w1, c.w2).validate_for(data);
  }
  const SweepOptions opts{cfg.threads};
  RunOutput out{alpha_sweep(data, cfg.model, opts), {}, std::nullopt, std::nullopt, {}};
  out.analysis = analyze(out.matrix);
  out.warnings = out.analysis.warnings();
  if (const auto k = out.matrix.unsolved()) {
    out.warnings.insert(out.warnings.begin(),
                        std::to_string(k) + " of " +
                            std::to_string(out.matrix.dmus() * out.matrix.levels()) +
                            " two-stage cells are infeasible");
  }
  if (cfg.wants_sensitivity()) {
    out.sensitivity = weight_sensitivity(data, cfg.model, cfg.sensitivity_cases, opts);
  }
  if (cfg.wants_blackbox()) {
    out.blackbox = blackbox_comparison(data, cfg.model, out.analysis.layer(Layer::kOverall).scc, opts);
    for (const auto& w : out.blackbox->blackbox.warnings) out.warnings.push_back("black-box: " + w);
  }
  return out;
}

struct Cell {
  enum class Kind { kEmpty, kText, kNumber, kInteger, kInfeasible };
  Kind kind = Kind::kEmpty;
  std::string text;
  double number = 0.0;
  long long integer = 0;

  static Cell empty() { return {}; }
  static Cell str(std::string s) { return {Kind::kText, std::move(s), 0.0, 0}; }
  static Cell num(double v) { return {Kind::kNumber, {}, v, 0}; }
  static Cell integer_value(long long v) { return {Kind::kInteger, {}, 0.0, v}; }
  static Cell infeasible() { return {Kind::kInfeasible, {}, 0.0, 0}; }
  static Cell score(const std::optional<double>& v) { return v ? num(*v) : infeasible(); }
};

struct Table {
  /// File stem, e.g. "overall_efficiency".
  std::string name;
  std::string title;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::string> notes;
};

struct NumberFormat {
  int precision = 4;
  bool full_precision = false;
};

inline constexpr const char* kInfeasibleMarker = "infeasible";

namespace detail {

inline std::string shortest(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline std::string format_cell(const Cell& c, const NumberFormat& f) {
  switch (c.kind) {
    case Cell::Kind::kEmpty:
      return {};
    case Cell::Kind::kText:
      return c.text;
    case Cell::Kind::kInteger:
      return std::to_string(c.integer);
    case Cell::Kind::kInfeasible:
      return kInfeasibleMarker;
    case Cell::Kind::kNumber:
      break;
  }
  if (f.full_precision) return shortest(c.number + 0.0);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", f.precision, c.number);
  std::string s(buf);
  // "-0.0000" reads as a sign where there is none.
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

inline std::string md_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch == '|') out += '\\';
    out += ch;
  }
  return out;
}

inline std::string alpha_label(double a) { return "alpha=" + shortest(a); }

}  // namespace detail

inline void write_csv(std::ostream& out, const Table& t, const NumberFormat& f) {
  for (std::size_t k = 0; k < t.columns.size(); ++k) {
    out << (k ? "," : "") << detail::csv_escape(t.columns[k]);
  }
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      out << (k ? "," : "") << detail::csv_escape(detail::format_cell(row[k], f));
    }
    out << '\n';
  }
}

inline void write_markdown(std::ostream& out, const Table& t, const NumberFormat& f) {
  out << "# " << t.title << "\n\n|";
  for (const auto& c : t.columns) out << ' ' << detail::md_escape(c) << " |";
  out << "\n|";
  for (std::size_t k = 0; k < t.columns.size(); ++k) out << (k < 2 ? " --- |" : " ---: |");
  out << '\n';
  for (const auto& row : t.rows) {
    out << '|';
    for (const auto& c : row) out << ' ' << detail::md_escape(detail::format_cell(c, f)) << " |";
    out << '\n';
  }
  if (!t.notes.empty()) {
    out << '\n';
    for (const auto& n : t.notes) out << "- " << n << '\n';
  }
}

inline nlohmann::json to_json(const Table& t, const NumberFormat& f) {
  nlohmann::json j;
  j["title"] = t.title;
  j["columns"] = t.columns;
  j["rows"] = nlohmann::json::array();
  for (const auto& row : t.rows) {
    nlohmann::json r = nlohmann::json::array();
    for (const auto& c : row) {
      switch (c.kind) {
        case Cell::Kind::kEmpty:
          r.push_back(nullptr);
          break;
        case Cell::Kind::kText:
          r.push_back(c.text);
          break;
        case Cell::Kind::kInteger:
          r.push_back(c.integer);
          break;
        case Cell::Kind::kInfeasible:
          r.push_back(kInfeasibleMarker);
          break;
        case Cell::Kind::kNumber: {
          // Round through the text form so JSON and CSV agree digit for digit.
          const auto s = detail::format_cell(c, f);
          double v = 0.0;
          std::from_chars(s.data(), s.data() + s.size(), v);
          r.push_back(v);
          break;
        }
      }
    }
    j["rows"].push_back(std::move(r));
  }
  j["notes"] = t.notes;
  return j;
}

inline std::string render(const Table& t, OutputFormat fmt, const NumberFormat& f) {
  std::ostringstream os;
  switch (fmt) {
    case OutputFormat::kCsv:
      write_csv(os, t, f);
      break;
    case OutputFormat::kMarkdown:
      write_markdown(os, t, f);
      break;
    case OutputFormat::kJson:
      os << to_json(t, f).dump(2) << '\n';
      break;
  }
  return os.str();
}

inline const char* extension(OutputFormat fmt) {
  switch (fmt) {
    case OutputFormat::kCsv:
      return ".csv";
    case OutputFormat::kJson:
      return ".json";
    case OutputFormat::kMarkdown:
      return ".md";
  }
  return "";
}

// Table builders
// --------------

inline Table efficiency_table(const EfficiencyMatrix& m, Layer layer) {
  static constexpr const char* kNames[] = {"overall_efficiency", "stage1_efficiency",
                                           "stage2_efficiency"};
  static constexpr const char* kTitles[] = {"Overall efficiency by alpha level",
                                            "Stage 1 efficiency by alpha level",
                                            "Stage 2 efficiency by alpha level"};
  const auto idx = static_cast<std::size_t>(layer);
  Table t{kNames[idx], kTitles[idx], {"No.", "DMU"}, {}, {}};
  for (double a : m.alphas()) t.columns.push_back(detail::alpha_label(a));
  const auto scores = m.layer(layer);
  for (std::size_t p = 0; p < m.dmus(); ++p) {
    std::vector<Cell> row{Cell::integer_value(static_cast<long long>(p + 1)), Cell::str(m.names()[p])};
    for (const auto& v : scores[p]) row.push_back(Cell::score(v));
    t.rows.push_back(std::move(row));
  }
  if (m.unsolved() > 0) t.notes.push_back("cells marked infeasible had no feasible group setting");
  return t;
}

inline Table closeness_table(const AnalysisReport& r) {
  Table t{"closeness",
          "Stochastic closeness coefficients and rankings",
          {"No.", "DMU", "overall_scc", "overall_rank", "stage1_scc", "stage1_rank", "stage2_scc",
           "stage2_rank"},
          {},
          {"rank 1 is the largest coefficient; ties are broken by DMU order"}};
  for (std::size_t p = 0; p < r.names.size(); ++p) {
    std::vector<Cell> row{Cell::integer_value(static_cast<long long>(p + 1)), Cell::str(r.names[p])};
    for (Layer l : kAllLayers) {
      row.push_back(Cell::num(r.layer(l).scc.psi[p]));
      row.push_back(Cell::integer_value(static_cast<long long>(r.layer(l).ranks[p])));
    }
    t.rows.push_back(std::move(row));
  }
  std::vector<Cell> avg{Cell::empty(), Cell::str("Average")};
  for (Layer l : kAllLayers) {
    avg.push_back(Cell::num(r.layer(l).scc.average()));
    avg.push_back(Cell::empty());
    if (r.layer(l).scc.degenerate) {
      t.notes.push_back(std::string(l == Layer::kOverall  ? "overall"
                                    : l == Layer::kStage1 ? "stage 1"
                                                          : "stage 2") +
                        " scores are all equal; every coefficient is set to 0.5");
    }
  }
  t.rows.push_back(std::move(avg));
  for (const auto& w : r.warnings()) t.notes.push_back(w);
  return t;
}

inline Table sensitivity_table(const SensitivityBlock& s, const std::vector<std::string>& names) {
  Table t{"sensitivity", "Overall rankings under alternative stage weights", {"No.", "DMU"}, {}, {}};
  for (std::size_t k = 0; k < s.cases.size(); ++k) {
    const std::string label = k == 0 ? "main" : "case" + std::to_string(k);
    t.columns.push_back(label + " (" + detail::shortest(s.cases[k].w1) + "/" +
                        detail::shortest(s.cases[k].w2) + ")");
  }
  t.columns.push_back("sensitivity");
  for (std::size_t p = 0; p < names.size(); ++p) {
    std::vector<Cell> row{Cell::integer_value(static_cast<long long>(p + 1)), Cell::str(names[p])};
    for (const auto& r : s.ranks) row.push_back(Cell::integer_value(static_cast<long long>(r[p])));
    row.push_back(Cell::num(s.sensitivity[p]));
    t.rows.push_back(std::move(row));
  }
  std::vector<Cell> rho{Cell::empty(), Cell::str("Spearman"), Cell::empty()};
  for (double v : s.spearman) rho.push_back(Cell::num(v));
  rho.push_back(Cell::empty());
  t.rows.push_back(std::move(rho));
  t.notes.push_back("sensitivity is the sample standard deviation of each DMU's ranks");
  t.notes.push_back("Spearman coefficients compare each case with the main case");
  return t;
}

inline Table blackbox_table(const BlackBoxBlock& b, const std::vector<std::string>& names) {
  Table t{"blackbox", "Two-stage versus black-box closeness coefficients",
          {"No.", "DMU", "two_stage", "blackbox"}, {}, {}};
  for (std::size_t p = 0; p < names.size(); ++p) {
    t.rows.push_back({Cell::integer_value(static_cast<long long>(p + 1)), Cell::str(names[p]),
                      Cell::num(b.two_stage[p]), Cell::num(b.blackbox.psi[p])});
  }
  t.rows.push_back({Cell::empty(), Cell::str("Average"), Cell::num(b.two_stage_average),
                    Cell::num(b.blackbox_average)});
  for (const auto& w : b.blackbox.warnings) t.notes.push_back(w);
  return t;
}

inline std::vector<Table> build_tables(const RunOutput& out) {
  std::vector<Table> tables;
  for (Layer l : kAllLayers) tables.push_back(efficiency_table(out.matrix, l));
  tables.push_back(closeness_table(out.analysis));
  if (out.sensitivity) tables.push_back(sensitivity_table(*out.sensitivity, out.matrix.names()));
  if (out.blackbox) tables.push_back(blackbox_table(*out.blackbox, out.matrix.names()));
  return tables;
}

/// Writes one file per table; returns the paths written.
inline std::vector<std::filesystem::path> write_tables(const std::filesystem::path& dir,
                                                       const std::vector<Table>& tables,
                                                       OutputFormat fmt, const NumberFormat& f) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  for (const auto& t : tables) {
    const auto path = dir / (t.name + extension(fmt));
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ValidationError("cannot write " + path.string());
    os << render(t, fmt, f);
    written.push_back(path);
  }
  return written;
}

}  // namespace fdea
