#ifndef ZDCLONE_BUDGET_DETAIL_HPP
#define ZDCLONE_BUDGET_DETAIL_HPP

// Shared step-budget plumbing (internal to the library sources).
//
// The outermost library call on a thread opens a BudgetScope, which arms a
// thread-local countdown initialized from the global enumeration budget;
// nested calls reuse the active countdown.  Long walks call spend_step once
// per unit of work and get an EnumerationBudgetError when the countdown
// hits zero, so no single public call can silently do unbounded work.

#include <cstdint>

namespace zdclone::detail {

struct BudgetScope {
  std::uint64_t remaining = 0;
  bool owner = false;
  BudgetScope();
  ~BudgetScope();
  BudgetScope(const BudgetScope&) = delete;
  BudgetScope& operator=(const BudgetScope&) = delete;
};

// Throws EnumerationBudgetError mentioning `activity` when exhausted.
void spend_step(const char* activity);

}  // namespace zdclone::detail

#endif  // ZDCLONE_BUDGET_DETAIL_HPP
