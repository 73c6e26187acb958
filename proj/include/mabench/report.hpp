#pragma once

// Run reports: per-task/per-dataset score rows plus the macro average over
// task accuracies, in machine-readable (JSON) and human-readable (aligned
// text table) forms. Report bytes are deterministic for a given run.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mabench/canonical_json.hpp"
#include "mabench/error.hpp"

namespace mabench {

struct TaskScore {
  std::string task;
  std::string source;  // dataset name
  int samples = 0;
  double acc = 0.0;
  std::optional<double> f1;
};

struct RunReport {
  std::vector<TaskScore> rows;
  double avg_acc = 0.0;                    // macro average over present rows
  std::vector<std::string> missing_rows;   // expected but absent task__source
};

/// Assembles the report; `expected` lists every task__source the run config
/// asked for, so partial runs mark absent rows instead of hiding them.
inline RunReport build_report(std::vector<TaskScore> rows,
                              const std::vector<std::string>& expected = {}) {
  RunReport report;
  report.rows = std::move(rows);
  std::sort(report.rows.begin(), report.rows.end(),
            [](const TaskScore& a, const TaskScore& b) {
              return a.task != b.task ? a.task < b.task : a.source < b.source;
            });
  double sum = 0.0;
  for (const auto& r : report.rows) sum += r.acc;
  report.avg_acc = report.rows.empty() ? 0.0 : sum / double(report.rows.size());
  for (const auto& key : expected) {
    bool present = false;
    for (const auto& r : report.rows) {
      if (r.task + "__" + r.source == key) present = true;
    }
    if (!present) report.missing_rows.push_back(key);
  }
  return report;
}

inline json to_json(const RunReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    json row{{"acc", r.acc}, {"samples", r.samples}, {"source", r.source},
             {"task", r.task}};
    if (r.f1) row["f1"] = *r.f1;
    rows.push_back(std::move(row));
  }
  return json{{"avg_acc", report.avg_acc},
              {"missing_rows", report.missing_rows},
              {"rows", std::move(rows)}};
}

namespace report_detail {

inline std::string fixed1(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", v);
  return buf;
}

inline std::string pad(std::string s, std::size_t width) {
  while (s.size() < width) s.push_back(' ');
  return s;
}

}  // namespace report_detail

inline std::string report_to_text(const RunReport& report) {
  using report_detail::fixed1;
  using report_detail::pad;
  std::size_t task_w = 4, source_w = 6;
  for (const auto& r : report.rows) {
    task_w = std::max(task_w, r.task.size());
    source_w = std::max(source_w, r.source.size());
  }
  std::string out;
  out += pad("task", task_w + 2) + pad("source", source_w + 2) +
         pad("samples", 9) + pad("acc", 7) + "f1\n";
  for (const auto& r : report.rows) {
    out += pad(r.task, task_w + 2) + pad(r.source, source_w + 2) +
           pad(std::to_string(r.samples), 9) + pad(fixed1(r.acc), 7) +
           (r.f1 ? fixed1(*r.f1) : std::string("-")) + "\n";
  }
  out += pad("Avg (Acc)", task_w + source_w + 4 + 9) + fixed1(report.avg_acc) + "\n";
  if (!report.missing_rows.empty()) {
    out += "note: average covers present rows only; missing:";
    for (const auto& m : report.missing_rows) out += " " + m;
    out += "\n";
  }
  return out;
}

inline void write_report_files(const RunReport& report,
                               const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "report.json", std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write report.json");
    out << canonical_dump(to_json(report)) << '\n';
  }
  {
    std::ofstream out(dir / "report.txt", std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write report.txt");
    out << report_to_text(report);
  }
}

}  // namespace mabench
