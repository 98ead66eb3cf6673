#include "dspider/topology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dspider/errors.hpp"

namespace dspider {

namespace {

double off_diag_fro(const std::vector<double>& a, int n) {
  double acc = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) acc += a[i * n + j] * a[i * n + j];
  return std::sqrt(acc);
}

}  // namespace

std::vector<double> jacobi_eigenvalues(std::vector<double> a, int n) {
  constexpr double kOffTol = 1e-12;
  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (off_diag_fro(a, n) < kOffTol) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (apq == 0.0) continue;
        const double app = a[p * n + p];
        const double aqq = a[q * n + q];
        const double theta = (aqq - app) / (2.0 * apq);
        const double t =
            (theta >= 0.0 ? 1.0 : -1.0) /
            (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);
        a[p * n + p] = app - t * apq;
        a[q * n + q] = aqq + t * apq;
        a[p * n + q] = 0.0;
        a[q * n + p] = 0.0;
        for (int r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double arp = a[r * n + p];
          const double arq = a[r * n + q];
          a[r * n + p] = arp - s * (arq + tau * arp);
          a[p * n + r] = a[r * n + p];
          a[r * n + q] = arq + s * (arp - tau * arq);
          a[q * n + r] = a[r * n + q];
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (int i = 0; i < n; ++i) ev[i] = a[i * n + i];
  std::sort(ev.begin(), ev.end(), std::greater<double>());
  return ev;
}

MixingMatrix MixingMatrix::finish(std::vector<double> w, int n,
                                  bool throw_on_violation) {
  MixingMatrix m;
  m.n_ = n;
  m.w_ = std::move(w);
  if (n == 1) {
    m.lambda2_ = 1.0;
    m.lambda_n_ = 1.0;
    m.admissible_ = true;  // single worker: check skipped
    return m;
  }
  const std::vector<double> ev = jacobi_eigenvalues(m.w_, n);
  m.lambda2_ = ev[1];
  m.lambda_n_ = ev[n - 1];
  if (std::abs(ev[0] - 1.0) > 1e-9)
    throw NotDoublyStochastic("largest eigenvalue is " +
                              std::to_string(ev[0]) + ", expected 1");
  m.admissible_ = m.lambda2_ < 1.0 && m.lambda_n_ > -1.0 / 3.0;
  if (!m.admissible_ && throw_on_violation) {
    std::ostringstream msg;
    msg << "spectral gap violation: lambda2 = " << m.lambda2_
        << " (need < 1), lambda_n = " << m.lambda_n_ << " (need > -1/3)";
    throw SpectralGapViolation(msg.str());
  }
  return m;
}

MixingMatrix build_ring(int n) {
  if (n < 1) throw InvalidDimension("ring size must be >= 1");
  std::vector<double> w(static_cast<std::size_t>(n) * n, 0.0);
  if (n == 1) {
    w[0] = 1.0;
  } else if (n == 2) {
    w = {0.5, 0.5, 0.5, 0.5};
  } else {
    for (int i = 0; i < n; ++i) {
      w[i * n + i] = 0.5;
      w[i * n + (i + 1) % n] = 0.25;
      w[i * n + (i + n - 1) % n] = 0.25;
    }
  }
  return MixingMatrix::finish(std::move(w), n, /*throw_on_violation=*/true);
}

MixingMatrix build_complete(int n) {
  if (n < 1) throw InvalidDimension("complete graph size must be >= 1");
  std::vector<double> w(static_cast<std::size_t>(n) * n, 1.0 / n);
  return MixingMatrix::finish(std::move(w), n, /*throw_on_violation=*/true);
}

namespace {

std::vector<double> check_and_symmetrize(const std::vector<double>& entries,
                                         int n) {
  constexpr double kTol = 1e-12;
  if (n < 1 || entries.size() != static_cast<std::size_t>(n) * n)
    throw InvalidDimension("matrix must be square with n >= 1");
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (std::abs(entries[i * n + j] - entries[j * n + i]) > kTol) {
        std::ostringstream msg;
        msg << "entry (" << i << "," << j << ") = " << entries[i * n + j]
            << " but (" << j << "," << i << ") = " << entries[j * n + i];
        throw NotSymmetric(msg.str());
      }
    }
  }
  std::vector<double> w(entries.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      w[i * n + j] = 0.5 * (entries[i * n + j] + entries[j * n + i]);
  for (int i = 0; i < n; ++i) {
    double row = 0.0, col = 0.0;
    for (int j = 0; j < n; ++j) {
      const double e = w[i * n + j];
      if (e < -kTol || e > 1.0 + kTol) {
        std::ostringstream msg;
        msg << "entry (" << i << "," << j << ") = " << e
            << " outside [0, 1]";
        throw NotDoublyStochastic(msg.str());
      }
      row += e;
      col += w[j * n + i];
    }
    if (std::abs(row - 1.0) > kTol || std::abs(col - 1.0) > kTol) {
      std::ostringstream msg;
      msg << "row/column " << i << " sums to " << row
          << " / " << col << ", expected 1";
      throw NotDoublyStochastic(msg.str());
    }
  }
  return w;
}

}  // namespace

MixingMatrix validate(const std::vector<double>& entries, int n) {
  return MixingMatrix::finish(check_and_symmetrize(entries, n), n,
                /*throw_on_violation=*/true);
}

MixingMatrix unchecked_matrix(const std::vector<double>& entries, int n) {
  return MixingMatrix::finish(check_and_symmetrize(entries, n), n,
                /*throw_on_violation=*/false);
}

std::pair<std::vector<double>, int> read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open topology file: " + path);
  int n = 0;
  if (!(in >> n) || n < 1)
    throw ConfigParseError("topology file " + path +
                           ": first token must be a positive matrix size");
  std::vector<double> w(static_cast<std::size_t>(n) * n);
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!(in >> w[i])) {
      std::ostringstream msg;
      msg << "topology file " << path << ": expected " << n * n
          << " entries, got " << i;
      throw ConfigParseError(msg.str());
    }
  }
  return {std::move(w), n};
}

MixingMatrix load_matrix(const std::string& path) {
  auto [w, n] = read_matrix_file(path);
  return validate(w, n);
}

void save_matrix(const MixingMatrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write topology file: " + path);
  out << m.n() << "\n";
  out.precision(17);
  for (int i = 0; i < m.n(); ++i) {
    for (int j = 0; j < m.n(); ++j) out << (j ? " " : "") << m.entry(i, j);
    out << "\n";
  }
}

}  // namespace dspider
