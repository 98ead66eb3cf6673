#pragma once

#include <cstdint>

// Closed-form constants and schedules tied to the mixing-matrix spectrum:
// estimator-error constants (C1, C2, b_n, D), the admissible step-size bound,
// the (S1, S2, q, eta) schedule for a target accuracy, and gradient-cost
// bounds for a finished run.

namespace dspider {

struct TheoryConstants {
  double b_n = 0.0;  // |b_n|: sqrt(lambda_n) for lambda_n >= 0, else
                     // |lambda_n - sqrt(lambda_n^2 - lambda_n)|
  double c1 = 1.0;
  double c2 = 0.0;
  double d = 1.0;  // 1 - 48 c2 q eta^2 L^2 / s2
  double eta_max = 0.0;
  bool d_valid = true;  // d in (0, 1]
  // inputs echoed
  double lambda2 = 0.0;
  double lambda_n = 0.0;
  double lipschitz = 1.0;
  double eta = 0.0;
  int q = 1;
  int s2 = 1;
};

// The step-size bound appears with three different constants in different
// statements; kAppendixProof is the most conservative and is the default
// everywhere a single value is needed.
enum class EtaBound {
  kMainText,           // 1 / (4 sqrt(3 c2) L)
  kAppendixStatement,  // 1 / (4 sqrt(6 c2) L)
  kAppendixProof,      // 1 / (8 sqrt(3 c2) L)
};

// min( (-1+sqrt(13)) / (12 L), variant branch ); c2 = 0 leaves only the
// first branch.
double eta_max(double lipschitz, double c2,
               EtaBound variant = EtaBound::kAppendixProof);

// Requires lambda2 in [0,1), lambda_n in (-1/3, lambda2], L > 0, s2/q >= 1.
// d <= 0 is reported via d_valid rather than thrown.
TheoryConstants constants(double lambda2, double lambda_n, double lipschitz,
                          double eta, int q, int s2);

struct ParamRecommendation {
  double epsilon = 0.0;
  long long s1 = 1;  // ceil(sigma^2 / eps^2)
  long long s2 = 1;  // ceil(sigma / eps)
  long long q = 1;   // ceil(sigma / eps)
  double eta = 0.0;  // 0.9 * eta_max (strict-inequality margin)
  double l = 0.0;
  long long k_iterations = 1;  // floor(l / eps^2) + 1
  double predicted_cost = 0.0;  // 2 l sigma eps^-3 + 2 sigma^2 eps^-2
};

// l = 2 f0_gap / eta + 84 c1 L^2 eta^2 (sigma^2 + zeta0^2 + grad0^2) / d.
// Throws NonpositiveD when d <= 0.
ParamRecommendation recommend(double epsilon, double sigma, double lipschitz,
                              double c1, double c2, double d, double f0_gap,
                              double zeta0, double grad0_norm,
                              EtaBound variant = EtaBound::kAppendixProof);

struct CostBound {
  long long paper_bound = 0;  // (floor(K/q)+1) * ((q-1) s2 + s1)
  long long exact_paper_convention = 0;  // restarts*s1 + others*s2
  long long exact_raw_evals = 0;         // restarts*s1 + others*2*s2
};

// Per-worker counts over iterations k = 0..K-1 with restarts at k % q == 0.
CostBound cost_bound(long long k_iters, long long q, long long s1,
                     long long s2);

}  // namespace dspider
