#pragma once

#include <string>
#include <vector>

#include "stopcost/system_model.hpp"

namespace stopcost {

struct LedgerItem {
  std::string label;
  long long count = 0;
  std::string note;
};

struct BlockEncodingLedger {
  long long c1 = 0, c2 = 0, c3 = 0, c4 = 0, c5 = 0, c6 = 0, c7 = 0, c8 = 0, c9 = 0;
  long long c6_amp = 0;  // two extra nu preparations when amplitude amplified
  long long reflection = 0;
  long long total_per_step = 0;
  long long qubits = 0;
  std::vector<LedgerItem> items;        // Toffoli items in output order
  std::vector<LedgerItem> qubit_items;  // qubit ledger lines

  // Largest item other than C4 (the dominance check compares against this).
  const LedgerItem& largest_non_c4() const;
};

// Er(x) = min_k ceil(x/2^k) + 2^k and the k attaining it (smallest on ties).
long long qrom_erasure(long long x);
int qrom_erasure_k(long long x);

BlockEncodingLedger ledger(const SystemSpec& spec, const PrecisionBudget& budget, bool amplified = true);

std::vector<LedgerItem> qubit_ledger_items(const SystemSpec& spec, const PrecisionBudget& budget);
long long qubit_ledger(const SystemSpec& spec, const PrecisionBudget& budget);

}  // namespace stopcost
