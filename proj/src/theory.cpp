#include "dspider/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dspider/errors.hpp"

namespace dspider {

double eta_max(double lipschitz, double c2, EtaBound variant) {
  if (lipschitz <= 0.0) throw InadmissibleSpectrum("lipschitz must be > 0");
  if (c2 < 0.0) throw InadmissibleSpectrum("c2 must be >= 0");
  const double first = (-1.0 + std::sqrt(13.0)) / (12.0 * lipschitz);
  if (c2 == 0.0) return first;
  double second;
  switch (variant) {
    case EtaBound::kMainText:
      second = 1.0 / (4.0 * std::sqrt(3.0 * c2) * lipschitz);
      break;
    case EtaBound::kAppendixStatement:
      second = 1.0 / (4.0 * std::sqrt(6.0 * c2) * lipschitz);
      break;
    case EtaBound::kAppendixProof:
    default:
      second = 1.0 / (8.0 * std::sqrt(3.0 * c2) * lipschitz);
      break;
  }
  return std::min(first, second);
}

TheoryConstants constants(double lambda2, double lambda_n, double lipschitz,
                          double eta, int q, int s2) {
  // tolerate eigensolver noise around the domain edges
  if (lambda2 < 0.0 && lambda2 > -1e-9) lambda2 = 0.0;
  if (lambda_n < 0.0 && lambda_n > -1e-9) lambda_n = 0.0;
  if (lambda_n > lambda2 && lambda_n < lambda2 + 1e-9) lambda_n = lambda2;
  std::ostringstream bad;
  if (!(lambda2 >= 0.0 && lambda2 < 1.0))
    bad << "lambda2 = " << lambda2 << " outside [0, 1)";
  else if (!(lambda_n > -1.0 / 3.0 && lambda_n <= lambda2))
    bad << "lambda_n = " << lambda_n << " outside (-1/3, lambda2]";
  else if (lipschitz <= 0.0)
    bad << "lipschitz = " << lipschitz << " must be > 0";
  else if (q < 1 || s2 < 1)
    bad << "q and s2 must be >= 1";
  if (!bad.str().empty()) throw InadmissibleSpectrum(bad.str());

  TheoryConstants tc;
  tc.lambda2 = lambda2;
  tc.lambda_n = lambda_n;
  tc.lipschitz = lipschitz;
  tc.eta = eta;
  tc.q = q;
  tc.s2 = s2;

  tc.b_n = lambda_n >= 0.0
               ? std::sqrt(lambda_n)
               : std::abs(lambda_n - std::sqrt(lambda_n * lambda_n - lambda_n));
  const double one_minus_b2 = 1.0 - tc.b_n * tc.b_n;
  tc.c1 = std::max(1.0 / one_minus_b2, 1.0 / ((1.0 - lambda2) * (1.0 - lambda2)));
  const double c2_first = lambda_n * lambda_n / one_minus_b2;
  const double c2_second =
      lambda2 == 0.0
          ? 0.0
          : lambda2 * lambda2 /
                (((1.0 - std::sqrt(lambda2)) * (1.0 - std::sqrt(lambda2))) *
                 (1.0 - lambda2));
  tc.c2 = std::max(c2_first, c2_second);
  tc.d = 1.0 - 48.0 * tc.c2 * q * eta * eta * lipschitz * lipschitz / s2;
  tc.d_valid = tc.d > 0.0 && tc.d <= 1.0;
  tc.eta_max = eta_max(lipschitz, tc.c2);
  return tc;
}

ParamRecommendation recommend(double epsilon, double sigma, double lipschitz,
                              double c1, double c2, double d, double f0_gap,
                              double zeta0, double grad0_norm,
                              EtaBound variant) {
  if (epsilon <= 0.0 || sigma <= 0.0 || lipschitz <= 0.0)
    throw InadmissibleSpectrum("epsilon, sigma, lipschitz must be > 0");
  if (d <= 0.0) {
    std::ostringstream msg;
    msg << "d = " << d << " <= 0: shrink eta or grow s2 before scheduling";
    throw NonpositiveD(msg.str());
  }
  ParamRecommendation rec;
  rec.epsilon = epsilon;
  rec.s1 = static_cast<long long>(std::ceil(sigma * sigma / (epsilon * epsilon)));
  rec.s2 = static_cast<long long>(std::ceil(sigma / epsilon));
  rec.q = rec.s2;
  rec.s1 = std::max<long long>(rec.s1, 1);
  rec.s2 = std::max<long long>(rec.s2, 1);
  rec.q = std::max<long long>(rec.q, 1);
  rec.eta = 0.9 * eta_max(lipschitz, c2, variant);
  rec.l = 2.0 * f0_gap / rec.eta +
          84.0 * c1 * lipschitz * lipschitz * rec.eta * rec.eta *
              (sigma * sigma + zeta0 * zeta0 + grad0_norm * grad0_norm) / d;
  rec.k_iterations =
      static_cast<long long>(std::floor(rec.l / (epsilon * epsilon))) + 1;
  rec.predicted_cost = 2.0 * rec.l * sigma / (epsilon * epsilon * epsilon) +
                       2.0 * sigma * sigma / (epsilon * epsilon);
  return rec;
}

CostBound cost_bound(long long k_iters, long long q, long long s1,
                     long long s2) {
  if (k_iters < 1 || q < 1 || s1 < 1 || s2 < 1)
    throw InvalidDimension("cost_bound arguments must be >= 1");
  CostBound cb;
  const long long restarts = (k_iters + q - 1) / q;  // k % q == 0 in [0, K)
  const long long others = k_iters - restarts;
  cb.exact_paper_convention = restarts * s1 + others * s2;
  cb.exact_raw_evals = restarts * s1 + others * 2 * s2;
  cb.paper_bound = (k_iters / q + 1) * ((q - 1) * s2 + s1);
  return cb;
}

}  // namespace dspider
