#include "fbm/fuzzy.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>
#include <string>
#include <vector>

namespace fbm {

TrapezoidMF::TrapezoidMF(double a, double b, double c, double d)
    : a_(a), b_(b), c_(c), d_(d) {
  if (!(a <= b && b <= c && c <= d)) {
    throw std::invalid_argument("TrapezoidMF: breakpoints must be ordered");
  }
}

double mf_eval(const TrapezoidMF& mf, double x) {
  if (x < mf.a() || x > mf.d()) {
    return 0.0;
  }
  if (x >= mf.b() && x <= mf.c()) {
    return 1.0;
  }
  // The plateau branch above absorbs vertical edges, so the ramps divide by
  // strictly positive widths here.
  if (x < mf.b()) {
    return (x - mf.a()) / (mf.b() - mf.a());
  }
  return (mf.d() - x) / (mf.d() - mf.c());
}

FuzzyMatcherConfig::FuzzyMatcherConfig()
    : FuzzyMatcherConfig(TrapezoidMF(0, 0, 10, 15),
                         TrapezoidMF(10, 15, 256, 256)) {}

FuzzyMatcherConfig::FuzzyMatcherConfig(TrapezoidMF low, TrapezoidMF high,
                                       double singleton_match,
                                       double singleton_nomatch, double cutoff)
    : low_(low),
      high_(high),
      singleton_match_(singleton_match),
      singleton_nomatch_(singleton_nomatch),
      cutoff_(cutoff) {
  if (!(singleton_match_ > singleton_nomatch_)) {
    throw std::invalid_argument(
        "FuzzyMatcherConfig: singleton_match must exceed singleton_nomatch");
  }
}

bool FuzzyMatcherConfig::covers_domain() const {
  // Both memberships are piecewise linear, so their sum is too: positive at
  // every breakpoint within [0, 256] implies positive on the whole interval.
  std::vector<double> knots = {0.0,      256.0,    low_.a(),  low_.b(),
                               low_.c(), low_.d(), high_.a(), high_.b(),
                               high_.c(), high_.d()};
  for (double x : knots) {
    if (x < 0.0 || x > 256.0) continue;
    if (mf_eval(low_, x) + mf_eval(high_, x) <= 0.0) {
      return false;
    }
  }
  return true;
}

double sugeno_infer(const FuzzyMatcherConfig& cfg, double d) {
  if (!(d >= 0.0 && d <= 256.0)) {
    throw std::invalid_argument("sugeno_infer: distance outside [0, 256]");
  }
  const double w_low = mf_eval(cfg.low(), d);
  const double w_high = mf_eval(cfg.high(), d);
  const double total = w_low + w_high;
  if (total == 0.0) {
    // Silent rule base: reject rather than fail. Unreachable with the
    // default membership functions.
    return cfg.singleton_nomatch();
  }
  return (w_low * cfg.singleton_match() + w_high * cfg.singleton_nomatch()) /
         total;
}

FuzzyDecision fuzzy_decide(const FuzzyMatcherConfig& cfg, double d) {
  const double degree = sugeno_infer(cfg, d);
  return {degree >= cfg.cutoff(), degree};
}

namespace {

double parse_double(std::string_view text, std::string_view what) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw std::invalid_argument("fuzzy config: bad " + std::string(what) +
                                " value '" + std::string(text) + "'");
  }
  return value;
}

TrapezoidMF parse_trapezoid(std::string_view text, std::string_view key) {
  double v[4];
  std::size_t pos = 0;
  for (int i = 0; i < 4; ++i) {
    const std::size_t comma = text.find(',', pos);
    const bool last = i == 3;
    if (last != (comma == std::string_view::npos)) {
      throw std::invalid_argument("fuzzy config: " + std::string(key) +
                                  " needs 4 comma-separated breakpoints");
    }
    v[i] = parse_double(
        text.substr(pos, last ? std::string_view::npos : comma - pos), key);
    pos = comma + 1;
  }
  return TrapezoidMF(v[0], v[1], v[2], v[3]);
}

}  // namespace

FuzzyMatcherConfig parse_fuzzy_config(std::string_view line) {
  FuzzyMatcherConfig defaults;
  TrapezoidMF low = defaults.low();
  TrapezoidMF high = defaults.high();
  double cutoff = defaults.cutoff();

  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && line[pos] == ' ') ++pos;
    if (pos >= line.size()) break;
    std::size_t end = line.find(' ', pos);
    if (end == std::string_view::npos) end = line.size();
    const std::string_view token = line.substr(pos, end - pos);
    pos = end;

    const std::size_t eq = token.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("fuzzy config: expected key=value, got '" +
                                  std::string(token) + "'");
    }
    const std::string_view key = token.substr(0, eq);
    const std::string_view value = token.substr(eq + 1);
    if (key == "low") {
      low = parse_trapezoid(value, key);
    } else if (key == "high") {
      high = parse_trapezoid(value, key);
    } else if (key == "cutoff") {
      cutoff = parse_double(value, key);
    } else {
      throw std::invalid_argument("fuzzy config: unknown key '" +
                                  std::string(key) + "'");
    }
  }
  return FuzzyMatcherConfig(low, high, defaults.singleton_match(),
                            defaults.singleton_nomatch(), cutoff);
}

}  // namespace fbm
