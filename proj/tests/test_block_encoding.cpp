#include <climits>

#include "doctest.h"
#include "stopcost/block_encoding.hpp"
#include "stopcost/lambda_norms.hpp"
#include "test_support.hpp"

using namespace stopcost;
using testsupport::bundled;
using testsupport::rel;

namespace {

struct Row {
  const char* name;
  double per_step;
  double qubits;
};
const Row kTable3[] = {{"alpha_hydrogen", 2.498e4, 5650}, {"proton_deuterium", 1.423e5, 33038}, {"proton_carbon", 3.836e4, 8841}};

BlockEncodingLedger ledger_for(const char* name, bool amplified = true) {
  const auto s = bundled(name);
  const auto [lam, b] = resolve_lambda_and_budget(s, 0.01, amplified);
  return ledger(s, b, amplified);
}

}  // namespace

TEST_CASE("QROM erasure cost is the scan minimum") {
  for (long long x = 1; x <= 5000; x += (x < 100 ? 1 : 37)) {
    long long best = LLONG_MAX;
    int best_k = -1;
    for (int k = 0; k < 20; ++k) {
      const long long c = (x + (1LL << k) - 1) / (1LL << k) + (1LL << k);
      if (c < best) {
        best = c;
        best_k = k;
      }
    }
    CAPTURE(x);
    CHECK(qrom_erasure(x) == best);
    // k = 0 never wins: it costs x + 1 against ceil(x/2) + 2.
    if (best_k > 0) CHECK(qrom_erasure_k(x) == best_k);
  }
  CHECK(qrom_erasure(216) == 30);  // k = 4: 14 + 16
  CHECK_THROWS(qrom_erasure(0));
}

TEST_CASE("ledger items on a hand-sized system") {
  SystemSpec s;
  s.cell = {1000.0, 3, 2};
  s.target.eta = 2;
  s.target.lambda_zeta = 2;
  s.target.num_nuclei = 2;
  s.projectile.n_n = 3;
  s.projectile.mass = 1836;
  s.projectile.charge = 1;
  PrecisionBudget b{0.01, 20, 25, 25, 7, PrecisionRule::kGuard};
  const auto L = ledger(s, b, true);
  CHECK(L.c1 == 122);
  CHECK(L.c2 == 14 * 1 + 56 - 36);
  CHECK(L.c4 == 12 * 2 * 2 + 18 + 8 - 6);
  CHECK(L.c5 == 13);
  CHECK(L.c6 == 27 + 48 - 2 - 6 + 4 * 25 * 2);
  CHECK(L.c6_amp == 2 * L.c6);
  CHECK(L.c7 == 2 + qrom_erasure(2));
  CHECK(L.c8 == 60);
  CHECK(L.c9 == 6 * 3 * 25);
  long long sum = 0;
  for (const auto& it : L.items) sum += it.count;
  CHECK(sum == L.total_per_step);
  const auto plain = ledger(s, b, false);
  CHECK(plain.total_per_step == L.total_per_step - L.c6_amp);
  for (const auto& it : plain.items) CHECK(it.label != "C6_amp");
  s.projectile.n_n = 1;
  CHECK_THROWS(ledger(s, b, true));
}

TEST_CASE("published per-step cost within 2 percent") {
  for (const auto& r : kTable3) {
    CAPTURE(r.name);
    CHECK(rel(static_cast<double>(ledger_for(r.name).total_per_step), r.per_step) < 0.02);
  }
}

TEST_CASE("published qubit totals within 15 percent") {
  for (const auto& r : kTable3) {
    const auto L = ledger_for(r.name);
    CAPTURE(r.name);
    CHECK(rel(static_cast<double>(L.qubits), r.qubits) < 0.15);
    long long sum = 0;
    for (const auto& it : L.qubit_items) sum += it.count;
    CHECK(sum == L.qubits);
  }
}

TEST_CASE("controlled swaps dominate the ledger") {
  for (const auto& r : kTable3) {
    const auto L = ledger_for(r.name);
    CHECK(L.largest_non_c4().label == "C6_amp");
    CHECK(L.c4 > 4 * L.largest_non_c4().count);
  }
  const auto pd = ledger_for("proton_deuterium");
  CHECK(pd.c4 >= 10 * pd.largest_non_c4().count);
}
