#pragma once

#include <string>
#include <utility>
#include <vector>

// Gossip mixing matrices: symmetric, doubly stochastic, with the spectrum
// endpoints (lambda2, lambda_n) cached at construction. One multiplication by
// W is one synchronous communication round.

namespace dspider {

class MixingMatrix {
 public:
  int n() const { return n_; }
  double entry(int row, int col) const { return w_[row * n_ + col]; }
  const std::vector<double>& entries() const { return w_; }

  double lambda2() const { return lambda2_; }
  double lambda_n() const { return lambda_n_; }
  // lambda2 < 1 and lambda_n > -1/3; vacuously true for n = 1
  bool admissible() const { return admissible_; }

 private:
  friend MixingMatrix build_ring(int n);
  friend MixingMatrix build_complete(int n);
  friend MixingMatrix validate(const std::vector<double>& entries, int n);
  friend MixingMatrix unchecked_matrix(const std::vector<double>& entries,
                                       int n);
  MixingMatrix() = default;
  static MixingMatrix finish(std::vector<double> w, int n,
                             bool throw_on_violation);

  int n_ = 0;
  std::vector<double> w_;  // row-major, symmetric
  double lambda2_ = 1.0;
  double lambda_n_ = 1.0;
  bool admissible_ = false;
};

// Circulant ring: 1/2 self weight, 1/4 per cyclic neighbour. n=2 collapses
// both neighbour links onto the same node (off-diagonal 1/2); n=1 is [1].
MixingMatrix build_ring(int n);

// All entries 1/n: one round reaches exact consensus.
MixingMatrix build_complete(int n);

// Checks symmetry (tol 1e-12), entries in [0,1], row/column sums 1 +- 1e-12,
// then symmetrizes to remove representation noise and computes the spectrum.
// Throws NotSymmetric / NotDoublyStochastic / SpectralGapViolation. The
// admissibility check (lambda2 < 1, lambda_n > -1/3) is skipped for n = 1.
MixingMatrix validate(const std::vector<double>& entries, int n);

// Same construction without the admissibility throw (for experiments with
// deliberately bad matrices); the admissible() flag still reports the truth.
MixingMatrix unchecked_matrix(const std::vector<double>& entries, int n);

inline std::pair<double, double> spectrum(const MixingMatrix& m) {
  return {m.lambda2(), m.lambda_n()};
}

// Text format: first line n, then n rows of n entries.
MixingMatrix load_matrix(const std::string& path);
// Reads the same format without constructing (no validation beyond shape).
std::pair<std::vector<double>, int> read_matrix_file(const std::string& path);
void save_matrix(const MixingMatrix& m, const std::string& path);

// Cyclic Jacobi on a row-major symmetric matrix; eigenvalues sorted
// descending. Stops when the off-diagonal Frobenius norm drops below 1e-12.
std::vector<double> jacobi_eigenvalues(std::vector<double> a, int n);

}  // namespace dspider
