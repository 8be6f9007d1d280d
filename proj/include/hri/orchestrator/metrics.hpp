#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hri/grammar/actions.hpp"

namespace hri::orch {

enum class Stage { STT = 0, AE = 1, OD = 2, RA = 3 };
inline constexpr std::array<Stage, 4> kStages = {Stage::STT, Stage::AE, Stage::OD, Stage::RA};
inline constexpr std::size_t kStageCount = kStages.size();

/// "stt", "ae", "od", "ra".
std::string_view stage_key(Stage s);
std::optional<Stage> stage_from_key(std::string_view key);

struct StageMetrics {
  std::array<double, kStageCount> time{};  // seconds
  std::array<int, kStageCount> accuracy{};  // 0 or 100

  double& t(Stage s) { return time[static_cast<std::size_t>(s)]; }
  double t(Stage s) const { return time[static_cast<std::size_t>(s)]; }
  int& a(Stage s) { return accuracy[static_cast<std::size_t>(s)]; }
  int a(Stage s) const { return accuracy[static_cast<std::size_t>(s)]; }
};

struct TrialRecord {
  std::string id;
  std::string utterance;
  std::string transcript;
  std::vector<grammar::ActionCall> expected_actions;
  std::vector<grammar::ActionCall> actions;
  StageMetrics metrics;
  double overhead = 0.0;  // C
  double t_total = 0.0;
  int a_total = 0;
  std::optional<Stage> first_failure;
  std::string failure_reason;
  bool errored = false;  // an exception, not a judged failure
  std::optional<Stage> injected_fault;
};

/// Sum of the four stage times, always added in pipeline order.
double stage_time_sum(const StageMetrics& m);

/// Sets overhead from a measured total, then t_total as stages + C and
/// a_total from the stage accuracies. Overhead is floored at zero.
void finalize(TrialRecord& r, double measured_total);

/// Bit-exact check of t_total == stages + C and the a_total rule.
bool identity_holds(const TrialRecord& r);

struct Summary {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation; 0 for a single value
  double min = 0.0;
  double max = 0.0;
};

Summary summarize(std::span<const double> values);

struct ErrorAttribution {
  std::array<int, kStageCount> counts{};
  std::array<double, kStageCount> percent{};
  int failed = 0;
  bool no_failures = true;
};

/// Each failed trial counts once, against its first failing stage.
ErrorAttribution error_attribution(std::span<const TrialRecord> records);

struct AggregateReport {
  std::size_t trials = 0;
  /// Rows in display order: t_stt … t_ra, t_total, c, a_stt … a_ra, a_total.
  std::vector<std::pair<std::string, Summary>> rows;
  std::array<double, kStageCount> time_contribution{};  // % of mean t_total
  double overhead_share = 0.0;                           // % of mean t_total
  ErrorAttribution errors;
  std::size_t errored = 0;

  const Summary& row(std::string_view metric) const;
};

/// Throws std::invalid_argument on empty input and std::logic_error if a
/// record breaks the timing identity.
AggregateReport aggregate(std::span<const TrialRecord> records);

nlohmann::json to_json(const TrialRecord& r);
nlohmann::json to_json(const AggregateReport& r);

/// metric,mean,sd,min,max
void write_summary_csv(std::ostream& out, const AggregateReport& r);
void write_trials_csv(std::ostream& out, std::span<const TrialRecord> records);
/// Fixed-width table for terminals.
void print_summary(std::ostream& out, const AggregateReport& r);

}  // namespace hri::orch
