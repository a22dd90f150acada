#pragma once

#include <map>
#include <string>
#include <vector>

#include "classprod/chartab.hpp"

namespace classprod {

// hard cap on tuple length; the Sigma_3 selection box grows like 6^m
inline constexpr int kTupleCap = 12;

// one structure-constant instance: a group and an ordered tuple of classes
struct ClassTuple {
  GroupSpec spec;
  std::vector<ClassData> classes;

  int m() const { return static_cast<int>(classes.size()); }
};

ClassTuple tuple_of(const GroupSpec& spec, const std::vector<ClassLabel>& labels);

// one eigenvalue-selection indicator: a picks an eigenvalue slot per entry
// (1-based, a[v] in 1..n_v); the value is 1 iff the selected eigenvalues
// multiply to 1
int delta(const ClassTuple& t, const std::vector<int>& a);

// every delta over the full selection box plus the aggregates the printed
// closed forms use
struct DeltaSummary {
  std::map<std::vector<int>, int> delta;  // full box [n_1] x ... x [n_m]
  Int Delta = 0;                // orbit sums of triple/double products (dim 3)
  std::map<int, Int> Delta_a;   // graded sums over the Omega sub-box
  Int Delta_prime = 0;          // plain sum over the full box
};

DeltaSummary delta_summary(const ClassTuple& t);

// collapsed five-block evaluation of the Burnside sum; dim-3 general groups
Rat nbar_G(const ClassTuple& t);

// det-1 subgroup variant with the split-character correction; dim-3 S groups
Rat nbar_S(const ClassTuple& t);

// direct summation over every irreducible character, as a cross-check of
// nbar_G; refuses q above the cap because the cost grows with the table
Rat nbar_charsum(const ClassTuple& t, int64_t q_cap = 7);

// printed closed form for a triple, normalized as N / |c_1| where c_1 is the
// entry matching the first series of the sorted row; throws NoClosedForm for
// rows outside the tables (and for central entries)
Rat closed_form_triple(const ClassTuple& t);

struct CountResult {
  Int n;
  std::string method;
};

// N(c_1, ..., c_m): the number of tuples (x_1, ..., x_m), x_i in c_i, with
// x_1 ... x_m = 1; method records which evaluation path produced it
CountResult n_count_explained(const ClassTuple& t);
Int n_count(const ClassTuple& t);

}  // namespace classprod
