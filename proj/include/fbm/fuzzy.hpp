#pragma once

#include <string_view>

namespace fbm {

/// Trapezoidal membership function with breakpoints a <= b <= c <= d:
/// zero outside [a, d], one on [b, c], linear on the ramps. At a vertical
/// edge (a == b or c == d) the plateau value wins.
class TrapezoidMF {
 public:
  TrapezoidMF(double a, double b, double c, double d);

  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }
  double d() const { return d_; }

  friend bool operator==(const TrapezoidMF&, const TrapezoidMF&) = default;

 private:
  double a_, b_, c_, d_;
};

double mf_eval(const TrapezoidMF& mf, double x);

/// Two-rule zero-order Sugeno matcher over Hamming distance:
///   if distance is LOW  then MATCH     (singleton_match)
///   if distance is HIGH then NO MATCH  (singleton_nomatch)
/// The defaults put the LOW/HIGH crossover at 12.5 bits, so the hard
/// decision coincides with a crisp threshold of 13 differing bits.
class FuzzyMatcherConfig {
 public:
  FuzzyMatcherConfig();
  FuzzyMatcherConfig(TrapezoidMF low, TrapezoidMF high,
                     double singleton_match = 1.0,
                     double singleton_nomatch = 0.0, double cutoff = 0.5);

  const TrapezoidMF& low() const { return low_; }
  const TrapezoidMF& high() const { return high_; }
  double singleton_match() const { return singleton_match_; }
  double singleton_nomatch() const { return singleton_nomatch_; }
  double cutoff() const { return cutoff_; }

  /// True when mu_LOW(x) + mu_HIGH(x) > 0 for every x in [0, 256], i.e. the
  /// rule base is never silent on the input domain. Holds for the defaults;
  /// inference still handles configs that violate it (see sugeno_infer).
  bool covers_domain() const;

 private:
  TrapezoidMF low_;
  TrapezoidMF high_;
  double singleton_match_;
  double singleton_nomatch_;
  double cutoff_;
};

struct FuzzyDecision {
  bool is_match = false;
  double degree = 0.0;
};

/// Weighted-singleton inference: (wL*match + wH*nomatch) / (wL + wH) with
/// wL = mu_LOW(d), wH = mu_HIGH(d). A silent rule base (wL + wH == 0)
/// returns singleton_nomatch. Requires d in [0, 256].
double sugeno_infer(const FuzzyMatcherConfig& cfg, double d);

/// is_match = (degree >= cutoff); the degree is kept as a confidence value.
FuzzyDecision fuzzy_decide(const FuzzyMatcherConfig& cfg, double d);

/// Plain-text config line: `low=a,b,c,d high=a,b,c,d cutoff=v`
/// Keys may appear in any order; omitted keys keep their defaults.
FuzzyMatcherConfig parse_fuzzy_config(std::string_view line);

}  // namespace fbm
