#include "hri/orchestrator/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace hri::orch {

std::string_view stage_key(Stage s) {
  switch (s) {
    case Stage::STT: return "stt";
    case Stage::AE: return "ae";
    case Stage::OD: return "od";
    case Stage::RA: return "ra";
  }
  return "?";
}

std::optional<Stage> stage_from_key(std::string_view key) {
  for (Stage s : kStages) {
    if (stage_key(s) == key) return s;
  }
  return std::nullopt;
}

double stage_time_sum(const StageMetrics& m) {
  return ((m.t(Stage::STT) + m.t(Stage::AE)) + m.t(Stage::OD)) + m.t(Stage::RA);
}

void finalize(TrialRecord& r, double measured_total) {
  const double stages = stage_time_sum(r.metrics);
  r.overhead = std::max(0.0, measured_total - stages);
  r.t_total = stages + r.overhead;
  const bool all = std::all_of(r.metrics.accuracy.begin(), r.metrics.accuracy.end(),
                               [](int a) { return a == 100; });
  r.a_total = all ? 100 : 0;
}

bool identity_holds(const TrialRecord& r) {
  const bool all = std::all_of(r.metrics.accuracy.begin(), r.metrics.accuracy.end(),
                               [](int a) { return a == 100; });
  return r.t_total == stage_time_sum(r.metrics) + r.overhead && r.a_total == (all ? 100 : 0);
}

Summary summarize(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("summarize: no values");
  Summary s;
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.min = *lo;
  s.max = *hi;
  if (values.size() > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(sq / (n - 1.0));
  }
  return s;
}

ErrorAttribution error_attribution(std::span<const TrialRecord> records) {
  ErrorAttribution e;
  for (const auto& r : records) {
    if (r.a_total == 100) continue;
    ++e.failed;
    // A zero a_total always has a zero stage; take the first in order.
    for (Stage s : kStages) {
      if (r.metrics.a(s) != 100) {
        ++e.counts[static_cast<std::size_t>(s)];
        break;
      }
    }
  }
  e.no_failures = e.failed == 0;
  if (!e.no_failures) {
    for (std::size_t i = 0; i < kStageCount; ++i) {
      e.percent[i] = 100.0 * e.counts[i] / static_cast<double>(e.failed);
    }
  }
  return e;
}

const Summary& AggregateReport::row(std::string_view metric) const {
  for (const auto& [name, s] : rows) {
    if (name == metric) return s;
  }
  throw std::out_of_range("no metric '" + std::string(metric) + "'");
}

AggregateReport aggregate(std::span<const TrialRecord> records) {
  if (records.empty()) throw std::invalid_argument("aggregate: no records");
  AggregateReport out;
  out.trials = records.size();
  auto column = [&](auto get) {
    std::vector<double> v;
    v.reserve(records.size());
    for (const auto& r : records) v.push_back(get(r));
    return v;
  };
  for (const auto& r : records) {
    if (!identity_holds(r)) throw std::logic_error("trial " + r.id + " breaks the timing identity");
    if (r.errored) ++out.errored;
  }
  for (Stage s : kStages) {
    out.rows.emplace_back("t_" + std::string(stage_key(s)),
                          summarize(column([s](const TrialRecord& r) { return r.metrics.t(s); })));
  }
  out.rows.emplace_back("t_total", summarize(column([](const TrialRecord& r) { return r.t_total; })));
  out.rows.emplace_back("c", summarize(column([](const TrialRecord& r) { return r.overhead; })));
  for (Stage s : kStages) {
    out.rows.emplace_back("a_" + std::string(stage_key(s)), summarize(column([s](const TrialRecord& r) {
                            return static_cast<double>(r.metrics.a(s));
                          })));
  }
  out.rows.emplace_back("a_total", summarize(column([](const TrialRecord& r) {
                          return static_cast<double>(r.a_total);
                        })));

  const double total = out.row("t_total").mean;
  if (total > 0.0) {
    for (Stage s : kStages) {
      out.time_contribution[static_cast<std::size_t>(s)] =
          100.0 * out.row("t_" + std::string(stage_key(s))).mean / total;
    }
    out.overhead_share = 100.0 * out.row("c").mean / total;
  }
  out.errors = error_attribution(records);
  return out;
}

namespace {

nlohmann::json calls_json(const std::vector<grammar::ActionCall>& calls) {
  return grammar::to_json(calls);
}

std::string fmt(double v, int precision = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

nlohmann::json to_json(const TrialRecord& r) {
  nlohmann::json j;
  j["id"] = r.id;
  j["utterance"] = r.utterance;
  j["transcript"] = r.transcript;
  j["expected_actions"] = calls_json(r.expected_actions);
  j["actions"] = calls_json(r.actions);
  for (Stage s : kStages) {
    j["t_" + std::string(stage_key(s))] = r.metrics.t(s);
    j["a_" + std::string(stage_key(s))] = r.metrics.a(s);
  }
  j["c"] = r.overhead;
  j["t_total"] = r.t_total;
  j["a_total"] = r.a_total;
  j["first_failure"] = r.first_failure ? nlohmann::json(stage_key(*r.first_failure)) : nullptr;
  j["failure_reason"] = r.failure_reason;
  j["errored"] = r.errored;
  j["injected_fault"] = r.injected_fault ? nlohmann::json(stage_key(*r.injected_fault)) : nullptr;
  return j;
}

nlohmann::json to_json(const AggregateReport& r) {
  nlohmann::json j;
  j["trials"] = r.trials;
  j["errored"] = r.errored;
  auto& metrics = j["metrics"] = nlohmann::json::object();
  for (const auto& [name, s] : r.rows) {
    metrics[name] = {{"mean", s.mean}, {"sd", s.sd}, {"min", s.min}, {"max", s.max}};
  }
  auto& time = j["time_contribution"] = nlohmann::json::object();
  auto& err = j["error_contribution"] = nlohmann::json::object();
  auto& counts = j["error_counts"] = nlohmann::json::object();
  for (Stage s : kStages) {
    const auto i = static_cast<std::size_t>(s);
    time[std::string(stage_key(s))] = r.time_contribution[i];
    err[std::string(stage_key(s))] = r.errors.percent[i];
    counts[std::string(stage_key(s))] = r.errors.counts[i];
  }
  time["overhead"] = r.overhead_share;
  j["failed_trials"] = r.errors.failed;
  j["no_failures"] = r.errors.no_failures;
  return j;
}

void write_summary_csv(std::ostream& out, const AggregateReport& r) {
  out << "metric,mean,sd,min,max\n";
  for (const auto& [name, s] : r.rows) {
    out << name << ',' << fmt(s.mean) << ',' << fmt(s.sd) << ',' << fmt(s.min) << ','
        << fmt(s.max) << '\n';
  }
}

void write_trials_csv(std::ostream& out, std::span<const TrialRecord> records) {
  out << "id,t_stt,t_ae,t_od,t_ra,c,t_total,a_stt,a_ae,a_od,a_ra,a_total,first_failure,"
         "injected_fault,errored,reason\n";
  for (const auto& r : records) {
    out << csv_field(r.id);
    for (Stage s : kStages) out << ',' << fmt(r.metrics.t(s));
    out << ',' << fmt(r.overhead) << ',' << fmt(r.t_total);
    for (Stage s : kStages) out << ',' << r.metrics.a(s);
    out << ',' << r.a_total << ',' << (r.first_failure ? stage_key(*r.first_failure) : "")
        << ',' << (r.injected_fault ? stage_key(*r.injected_fault) : "") << ','
        << (r.errored ? 1 : 0) << ',' << csv_field(r.failure_reason) << '\n';
  }
}

void print_summary(std::ostream& out, const AggregateReport& r) {
  char line[160];
  std::snprintf(line, sizeof line, "%-10s %10s %10s %21s\n", "metric", "mean", "sd", "range");
  out << line;
  for (const auto& [name, s] : r.rows) {
    const std::string range = fmt(s.min, 2) + "-" + fmt(s.max, 2);
    std::snprintf(line, sizeof line, "%-10s %10.2f %10.2f %21s\n", name.c_str(), s.mean, s.sd,
                  range.c_str());
    out << line;
  }
  out << "\nstage   time%   error%\n";
  for (Stage s : kStages) {
    const auto i = static_cast<std::size_t>(s);
    std::snprintf(line, sizeof line, "%-5s %7.2f  %7.2f\n", std::string(stage_key(s)).c_str(),
                  r.time_contribution[i], r.errors.percent[i]);
    out << line;
  }
  std::snprintf(line, sizeof line, "%-5s %7.2f\n", "C", r.overhead_share);
  out << line;
  out << r.trials << " trials, " << r.errors.failed << " failed, " << r.errored << " errored\n";
}

}  // namespace hri::orch
