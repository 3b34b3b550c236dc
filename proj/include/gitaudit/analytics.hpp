#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <variant>

#include "gitaudit/identity.hpp"
#include "gitaudit/pipeline.hpp"

namespace gitaudit {

/// Database statistics. Percentages are unrounded, in [0, 100].
struct DbStats {
  std::size_t total_persons = 0;
  double persons_ge2_repos_pct = 0;
  double persons_ge5_commits_pct = 0;
  std::int64_t shortlog_lines_total = 0;
  double noreply_enabled_pct = 0;
  double compromised_pct = 0;  // of noreply-enabled persons
  double failed_repos_pct = 0; // of selected repositories
};

/// Throws EmptyDatabase when the database holds no person.
DbStats database_stats(const PersonDatabase& db, const PipelineStats& pipeline = {});

/// One decimal place, halves rounded away from zero (12.25 -> 12.3).
double round_pct(double pct);
std::string format_pct(double pct);

struct PowerCurve {  // y = a * x^b
  double a = 0, b = 0;
};
struct LogLinearCurve {  // y = m * log10(x) + c
  double m = 0, c = 0;
};
struct LinearCurve {  // y = m * x
  double m = 0;
};
using FitCurve = std::variant<PowerCurve, LogLinearCurve, LinearCurve>;

enum class CurveFamily { Power, LogLinear, Linear };

CurveFamily family_of(const FitCurve& curve);
double evaluate(const FitCurve& curve, double x);

enum class PowerFitSpace {
  /// Ordinary least squares on (ln x, ln y) only.
  LogLog,
  /// Least squares on y itself, seeded from the log-log solution.
  Linear,
};

struct FitOptions {
  PowerFitSpace power_space = PowerFitSpace::Linear;
};

struct Point {
  double x = 0, y = 0;
};

/// Least-squares fit. LogLinear regresses y on log10 x; Linear goes through
/// the origin. Throws DegenerateInput for < 2 points or identical x values,
/// std::invalid_argument for x <= 0 (Power, LogLinear) or y <= 0 (Power).
FitCurve fit_curve(std::span<const Point> points, CurveFamily family, const FitOptions& opts = {});

enum class Metric { TotalPersons, ShortlogLines, TotalTime, CompromisedPct };

CurveFamily family_for(Metric metric);
FitCurve published_curve(Metric metric);
std::string to_string(Metric metric);
Metric metric_from_string(const std::string& s);  // throws std::invalid_argument

/// Evaluates `curve` at num_repos. Throws FamilyMismatch when the curve is
/// not of the metric's family, std::invalid_argument when num_repos < 1.
double estimate(Metric metric, std::int64_t num_repos, const FitCurve& curve);
inline double estimate(Metric metric, std::int64_t num_repos) {
  return estimate(metric, num_repos, published_curve(metric));
}

/// Bracketing estimate of how many of `person_count` recipients would click
/// a phishing link (8 % .. 35 %).
std::pair<double, double> phishing_click_range(std::uint64_t person_count);

}  // namespace gitaudit
