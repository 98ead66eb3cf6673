#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "dspider/kernels.hpp"
#include "dspider/rng.hpp"
#include "support/oracles.hpp"

using namespace dspider;
using namespace dspider::kernels;

namespace {

std::vector<double> seeded_vec(std::size_t n, std::uint64_t tag) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = rng::normal(42, rng::kDomProbe, tag, i, 0) * 3.0;
  return v;
}

const std::size_t kSizes[] = {0, 1, 2, 3, 4, 5, 7, 8, 15, 16, 17, 1000};

void check_tables_agree(const KernelTable& a, const KernelTable& b) {
  for (std::size_t n : kSizes) {
    const std::vector<double> x = seeded_vec(n, 1);
    const std::vector<double> y = seeded_vec(n, 2);
    const std::vector<double> d = seeded_vec(n, 3);

    // reductions: same values up to reassociation round-off
    CHECK(a.dot(x.data(), y.data(), n) ==
          doctest::Approx(b.dot(x.data(), y.data(), n)).epsilon(1e-13));
    CHECK(a.nrm2sq(x.data(), n) ==
          doctest::Approx(b.nrm2sq(x.data(), n)).epsilon(1e-13));
    CHECK(a.sq_dist(x.data(), y.data(), n) ==
          doctest::Approx(b.sq_dist(x.data(), y.data(), n)).epsilon(1e-13));

    // elementwise ops must round identically lane by lane
    std::vector<double> out_a(n), out_b(n);
    a.wscale(0.37, x.data(), out_a.data(), n);
    b.wscale(0.37, x.data(), out_b.data(), n);
    CHECK(std::memcmp(out_a.data(), out_b.data(), n * sizeof(double)) == 0);

    a.half_step(x.data(), y.data(), 0.05, d.data(), out_a.data(), n);
    b.half_step(x.data(), y.data(), 0.05, d.data(), out_b.data(), n);
    CHECK(std::memcmp(out_a.data(), out_b.data(), n * sizeof(double)) == 0);

    a.vsub(x.data(), y.data(), out_a.data(), n);
    b.vsub(x.data(), y.data(), out_b.data(), n);
    CHECK(std::memcmp(out_a.data(), out_b.data(), n * sizeof(double)) == 0);

    a.vadd(x.data(), y.data(), out_a.data(), n);
    b.vadd(x.data(), y.data(), out_b.data(), n);
    CHECK(std::memcmp(out_a.data(), out_b.data(), n * sizeof(double)) == 0);

    std::vector<double> acc_a = y, acc_b = y;
    a.axpy(-1.25, x.data(), acc_a.data(), n);
    b.axpy(-1.25, x.data(), acc_b.data(), n);
    CHECK(std::memcmp(acc_a.data(), acc_b.data(), n * sizeof(double)) == 0);

    acc_a = x;
    acc_b = x;
    a.scal(0.8, acc_a.data(), n);
    b.scal(0.8, acc_b.data(), n);
    CHECK(std::memcmp(acc_a.data(), acc_b.data(), n * sizeof(double)) == 0);
  }
}

}  // namespace

TEST_CASE("scalar kernels match naive references") {
  for (std::size_t n : kSizes) {
    const std::vector<double> x = seeded_vec(n, 11);
    const std::vector<double> y = seeded_vec(n, 12);
    const std::vector<double> d = seeded_vec(n, 13);

    CHECK(kScalarTable.dot(x.data(), y.data(), n) ==
          doctest::Approx(oracle::naive_dot(x, y)).epsilon(1e-13));
    CHECK(kScalarTable.nrm2sq(x.data(), n) ==
          doctest::Approx(oracle::naive_dot(x, x)).epsilon(1e-13));

    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) sq += (x[i] - y[i]) * (x[i] - y[i]);
    CHECK(kScalarTable.sq_dist(x.data(), y.data(), n) ==
          doctest::Approx(sq).epsilon(1e-13));

    std::vector<double> out(n);
    kScalarTable.half_step(x.data(), y.data(), 0.1, d.data(), out.data(), n);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(out[i] == (2.0 * x[i] - y[i]) - 0.1 * d[i]);

    kScalarTable.wscale(0.25, x.data(), out.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(out[i] == 0.25 * x[i]);
  }
}

TEST_CASE("neutral scalings are exact no-ops") {
  const std::vector<double> x = seeded_vec(33, 21);
  std::vector<double> out(33);
  active().wscale(1.0, x.data(), out.data(), 33);
  CHECK(std::memcmp(out.data(), x.data(), 33 * sizeof(double)) == 0);
  std::vector<double> y = x;
  active().scal(1.0, y.data(), 33);
  CHECK(std::memcmp(y.data(), x.data(), 33 * sizeof(double)) == 0);
}

#if defined(__x86_64__) || defined(_M_X64)
TEST_CASE("avx2 kernels agree with scalar") {
  if (!avx2_supported()) return;
  check_tables_agree(kScalarTable, kAvx2Table);
}
#endif

#if defined(__aarch64__)
TEST_CASE("neon kernels agree with scalar") {
  check_tables_agree(kScalarTable, kNeonTable);
}
#endif

TEST_CASE("active table is one of the compiled variants") {
  const std::string name = active_name();
  bool known = name == "scalar";
#if defined(__x86_64__) || defined(_M_X64)
  known = known || name == "avx2";
#endif
#if defined(__aarch64__)
  known = known || name == "neon";
#endif
  CHECK(known);
  // forwarders hit the same table
  const std::vector<double> x = seeded_vec(9, 31);
  CHECK(dot(x.data(), x.data(), 9) == active().dot(x.data(), x.data(), 9));
}
