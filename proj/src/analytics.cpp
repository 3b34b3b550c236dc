#include "gitaudit/analytics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <vector>

#include "gitaudit/errors.hpp"

namespace gitaudit {

DbStats database_stats(const PersonDatabase& db, const PipelineStats& pipeline) {
  if (db.empty()) throw EmptyDatabase("database holds no persons");
  DbStats s;
  std::size_t ge2 = 0, ge5 = 0, noreply = 0, compromised = 0;
  for (const Person* p : db.persons()) {
    ge2 += p->contributions.size() >= 2;
    ge5 += p->total_commits() >= 5;
    s.shortlog_lines_total += p->lines;
    if (!p->usernames.empty()) {
      ++noreply;
      compromised += is_compromised(*p);
    }
  }
  const double n = static_cast<double>(db.size());
  s.total_persons = db.size();
  s.persons_ge2_repos_pct = 100.0 * static_cast<double>(ge2) / n;
  s.persons_ge5_commits_pct = 100.0 * static_cast<double>(ge5) / n;
  s.noreply_enabled_pct = 100.0 * static_cast<double>(noreply) / n;
  s.compromised_pct = noreply ? 100.0 * static_cast<double>(compromised) / static_cast<double>(noreply) : 0.0;
  s.failed_repos_pct = pipeline.selected
                           ? 100.0 * static_cast<double>(pipeline.failed) / static_cast<double>(pipeline.selected)
                           : 0.0;
  return s;
}

double round_pct(double pct) {
  // Percentages arrive as ratios like 100*k/n; nudge by a relative epsilon so
  // exact halves that landed a hair low still round up.
  const double scaled = pct * 10.0;
  const double nudge = std::abs(scaled) * 1e-12;
  return std::copysign(std::floor(std::abs(scaled) + 0.5 + nudge), scaled) / 10.0;
}

std::string format_pct(double pct) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", round_pct(pct));
  return buf;
}

CurveFamily family_of(const FitCurve& curve) {
  switch (curve.index()) {
    case 0: return CurveFamily::Power;
    case 1: return CurveFamily::LogLinear;
    default: return CurveFamily::Linear;
  }
}

double evaluate(const FitCurve& curve, double x) {
  if (const auto* p = std::get_if<PowerCurve>(&curve)) return p->a * std::pow(x, p->b);
  if (const auto* l = std::get_if<LogLinearCurve>(&curve)) return l->m * std::log10(x) + l->c;
  return std::get<LinearCurve>(curve).m * x;
}

namespace {

// Slope and intercept of the OLS line through (u, v).
std::pair<double, double> ols(const std::vector<double>& u, const std::vector<double>& v) {
  const double n = static_cast<double>(u.size());
  double mu = 0, mv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    mu += u[i];
    mv += v[i];
  }
  mu /= n;
  mv /= n;
  double suu = 0, suv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    suu += (u[i] - mu) * (u[i] - mu);
    suv += (u[i] - mu) * (v[i] - mv);
  }
  if (suu == 0) throw DegenerateInput("all x values are identical");
  const double slope = suv / suu;
  return {slope, mv - slope * mu};
}

double power_sse(std::span<const Point> pts, double a, double b) {
  double sse = 0;
  for (const auto& p : pts) {
    const double r = p.y - a * std::pow(p.x, b);
    sse += r * r;
  }
  return sse;
}

// Levenberg-Marquardt on r_i = y_i - a x_i^b.
PowerCurve refine_power(std::span<const Point> pts, PowerCurve start) {
  double a = start.a, b = start.b;
  double sse = power_sse(pts, a, b);
  double lambda = 1e-3;
  for (int iter = 0; iter < 200 && sse > 0; ++iter) {
    double jaa = 0, jab = 0, jbb = 0, ga = 0, gb = 0;
    for (const auto& p : pts) {
      const double xb = std::pow(p.x, b);
      const double r = p.y - a * xb;
      const double da = xb;
      const double db = a * xb * std::log(p.x);
      jaa += da * da;
      jab += da * db;
      jbb += db * db;
      ga += da * r;
      gb += db * r;
    }
    bool improved = false;
    for (int tries = 0; tries < 30; ++tries) {
      const double m11 = jaa * (1 + lambda), m22 = jbb * (1 + lambda), m12 = jab;
      const double det = m11 * m22 - m12 * m12;
      if (det == 0 || !std::isfinite(det)) break;
      const double step_a = (ga * m22 - gb * m12) / det;
      const double step_b = (m11 * gb - m12 * ga) / det;
      const double na = a + step_a, nb = b + step_b;
      const double nsse = power_sse(pts, na, nb);
      if (std::isfinite(nsse) && na > 0 && nsse <= sse) {
        const bool converged = std::abs(step_a) <= 1e-15 * std::abs(a) &&
                               std::abs(step_b) <= 1e-15 * std::max(1.0, std::abs(b));
        a = na;
        b = nb;
        const double old = sse;
        sse = nsse;
        lambda = std::max(lambda / 10, 1e-12);
        improved = !converged && (old - nsse) > old * 1e-16;
        break;
      }
      lambda *= 10;
    }
    if (!improved) break;
  }
  return {a, b};
}

}  // namespace

FitCurve fit_curve(std::span<const Point> points, CurveFamily family, const FitOptions& opts) {
  if (points.size() < 2) throw DegenerateInput("need at least 2 points");
  bool all_same_x = true;
  for (const auto& p : points) all_same_x &= p.x == points.front().x;
  if (all_same_x) throw DegenerateInput("all x values are identical");

  switch (family) {
    case CurveFamily::Power: {
      std::vector<double> u, v;
      for (const auto& p : points) {
        if (!(p.x > 0) || !(p.y > 0)) throw std::invalid_argument("power fit needs x > 0 and y > 0");
        u.push_back(std::log(p.x));
        v.push_back(std::log(p.y));
      }
      auto [slope, intercept] = ols(u, v);
      PowerCurve seed{std::exp(intercept), slope};
      if (opts.power_space == PowerFitSpace::LogLog) return seed;
      return refine_power(points, seed);
    }
    case CurveFamily::LogLinear: {
      std::vector<double> u, v;
      for (const auto& p : points) {
        if (!(p.x > 0)) throw std::invalid_argument("log-linear fit needs x > 0");
        u.push_back(std::log10(p.x));
        v.push_back(p.y);
      }
      auto [slope, intercept] = ols(u, v);
      return LogLinearCurve{slope, intercept};
    }
    case CurveFamily::Linear: {
      double sxy = 0, sxx = 0;
      for (const auto& p : points) {
        sxy += p.x * p.y;
        sxx += p.x * p.x;
      }
      if (sxx == 0) throw DegenerateInput("all x values are zero");
      return LinearCurve{sxy / sxx};
    }
  }
  throw std::logic_error("unknown curve family");
}

CurveFamily family_for(Metric metric) {
  switch (metric) {
    case Metric::TotalPersons:
    case Metric::ShortlogLines: return CurveFamily::Power;
    case Metric::TotalTime: return CurveFamily::Linear;
    case Metric::CompromisedPct: return CurveFamily::LogLinear;
  }
  throw std::logic_error("unknown metric");
}

FitCurve published_curve(Metric metric) {
  switch (metric) {
    case Metric::TotalPersons: return PowerCurve{3310.0, 0.382};
    case Metric::ShortlogLines: return PowerCurve{2000.0, 0.5};
    case Metric::TotalTime: return LinearCurve{0.1};  // seconds per repository
    case Metric::CompromisedPct: return LogLinearCurve{9.4, -11.0};
  }
  throw std::logic_error("unknown metric");
}

std::string to_string(Metric metric) {
  switch (metric) {
    case Metric::TotalPersons: return "total-persons";
    case Metric::ShortlogLines: return "shortlog-lines";
    case Metric::TotalTime: return "total-time";
    case Metric::CompromisedPct: return "compromised-pct";
  }
  return "?";
}

Metric metric_from_string(const std::string& s) {
  for (auto m : {Metric::TotalPersons, Metric::ShortlogLines, Metric::TotalTime, Metric::CompromisedPct})
    if (to_string(m) == s) return m;
  throw std::invalid_argument("unknown metric '" + s +
                              "' (expected total-persons, shortlog-lines, total-time, compromised-pct)");
}

double estimate(Metric metric, std::int64_t num_repos, const FitCurve& curve) {
  if (num_repos < 1) throw std::invalid_argument("num_repos must be >= 1");
  if (family_of(curve) != family_for(metric))
    throw FamilyMismatch("curve family does not match metric " + to_string(metric));
  return evaluate(curve, static_cast<double>(num_repos));
}

std::pair<double, double> phishing_click_range(std::uint64_t person_count) {
  const double n = static_cast<double>(person_count);
  return {0.08 * n, 0.35 * n};
}

}  // namespace gitaudit
