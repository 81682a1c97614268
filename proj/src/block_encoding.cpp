#include "stopcost/block_encoding.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stopcost {

namespace {

long long ceil_div(long long a, long long b) { return (a + b - 1) / b; }

}  // namespace

int qrom_erasure_k(long long x) {
  if (x < 1) throw std::invalid_argument("Er(x) needs x >= 1");
  int best_k = 0;
  long long best = x + 1;
  for (int k = 1; (1LL << k) <= 2 * x; ++k) {
    const long long c = ceil_div(x, 1LL << k) + (1LL << k);
    if (c < best) {
      best = c;
      best_k = k;
    }
  }
  return best_k;
}

long long qrom_erasure(long long x) {
  const int k = qrom_erasure_k(x);
  return ceil_div(x, 1LL << k) + (1LL << k);
}

const LedgerItem& BlockEncodingLedger::largest_non_c4() const {
  const LedgerItem* best = nullptr;
  for (const auto& it : items) {
    if (it.label == "C4") continue;
    if (!best || it.count > best->count) best = &it;
  }
  if (!best) throw std::logic_error("empty ledger");
  return *best;
}

BlockEncodingLedger ledger(const SystemSpec& spec, const PrecisionBudget& b, bool amplified) {
  const long long eta = spec.target.eta;
  const long long np = spec.cell.n_p;
  const long long nn = spec.projectile.n_n;
  const long long neta = spec.target.n_eta();
  if (nn < np) throw std::invalid_argument("n_n < n_p: invalid register ordering");
  const auto lz = static_cast<long long>(std::llround(spec.target.lambda_zeta));

  BlockEncodingLedger L;
  L.c1 = 6LL * b.n_T + 2;
  L.c2 = 14 * neta + 8LL * b.b_r - 36;
  const long long c3_prep = 2 * (2 * nn + 9) + 2 * (nn - np);
  L.c3 = c3_prep + 20 + 4;
  L.c4 = 12 * eta * np + 6 * nn + 4 * eta - 6;
  L.c5 = 5 * nn - 2;
  L.c6 = 3 * nn * nn + 16 * nn - np - 6 + 4LL * b.n_M * (nn - 1);
  L.c6_amp = amplified ? 2 * L.c6 : 0;
  L.c7 = lz > 0 ? lz + qrom_erasure(lz) : 0;
  L.c8 = 12 * (nn + np);
  L.c9 = 6 * nn * b.n_R;
  L.reflection = b.n_T + 2 * neta + 6 * nn + b.n_M + 16;

  L.items = {
      {"C1", L.c1, "six inequality tests"},
      {"C2", L.c2, "i, j superposition and i != j flag"},
      {"C3", L.c3, "w, r, s preparation (" + std::to_string(c3_prep) + " + 20 second-w test + 4 controlled swaps)"},
      {"C4", L.c4, "controlled swaps into working registers"},
      {"C5", L.c5, "kinetic select"},
      {"C6", L.c6, "1/|nu| state preparation"},
  };
  if (amplified) L.items.push_back({"C6_amp", L.c6_amp, "two extra 1/|nu| preparations for amplitude amplification"});
  L.items.insert(L.items.end(), {
                                    {"C7", L.c7, "QROM for R_l plus erasure"},
                                    {"C8", L.c8, "nu addition and subtraction"},
                                    {"C9", L.c9, "phasing by k_nu . R_l"},
                                    {"CR", L.reflection, "reflection"},
                                });
  L.total_per_step = 0;
  for (const auto& it : L.items) L.total_per_step += it.count;

  L.qubit_items = qubit_ledger_items(spec, b);
  L.qubits = 0;
  for (const auto& it : L.qubit_items) L.qubits += it.count;
  return L;
}

std::vector<LedgerItem> qubit_ledger_items(const SystemSpec& spec, const PrecisionBudget& b) {
  const long long eta = spec.target.eta;
  const long long np = spec.cell.n_p;
  const long long nn = spec.projectile.n_n;
  const auto lz = static_cast<long long>(std::llround(spec.target.lambda_zeta));
  return {
      {"system_electrons", 3 * eta * np, "3 eta n_p"},
      {"system_projectile", 3 * nn, "3 n_n"},
      {"nu_register", 3 * (nn + 1), "3 (n_n + 1) difference register"},
      {"selector_tests", 2LL * b.n_T + (b.n_T - 1), "2 n_T + (n_T - 1) inequality-test bits kept for uncompute"},
      {"equal_superposition", b.n_M, "n_M"},
      {"nuclear_position", 3LL * b.n_R, "3 n_R QROM output"},
      {"qrom_temporaries", lz > 0 ? qrom_erasure_k(lz) : 0, "k chosen by Er(lambda_zeta)"},
      {"phase_gradient", b.n_T, "n_T"},
      {"phasing_products", 3 * nn * b.n_R, "3 n_n n_R partial products of k_nu . R_l"},
  };
}

long long qubit_ledger(const SystemSpec& spec, const PrecisionBudget& budget) {
  long long total = 0;
  for (const auto& it : qubit_ledger_items(spec, budget)) total += it.count;
  return total;
}

}  // namespace stopcost
