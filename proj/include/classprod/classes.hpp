#pragma once

#include "classprod/arith.hpp"

#include <compare>
#include <optional>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace classprod {

enum class Family { GL, GU, SL, SU, PSL, PSU };

struct GroupSpec {
  Family family = Family::GL;
  int dim = 3;
  PrimePowerQ q;

  Sign sign() const {
    return (family == Family::GU || family == Family::SU || family == Family::PSU)
               ? Sign::unitary
               : Sign::linear;
  }
  bool is_G() const { return family == Family::GL || family == Family::GU; }
  bool is_S() const { return family == Family::SL || family == Family::SU; }
  bool is_P() const { return family == Family::PSL || family == Family::PSU; }
  auto operator<=>(const GroupSpec&) const = default;
};

GroupSpec make_group(Family f, int dim, int64_t q);
GroupSpec parse_group(const std::string& text);  // "GU3:5", "SL2:7"
std::string to_string(const GroupSpec&);

Int group_order(const GroupSpec&);

// r of the split cases: dim 3 when 3 | q+-1 (q = 3r-+1), dim 2 when q is odd
// (q+-1 = 2r); 0 when the case does not split
int64_t split_r(const GroupSpec&);
bool has_split_classes(const GroupSpec&);

struct ClassLabel {
  int series = 0;                // 1..8 (dim 3), 1..4 (dim 2)
  std::vector<int64_t> params;   // canonical parameter tuple
  std::optional<int> split;      // split-class index: {0,1,2} dim 3, {0,1} dim 2

  auto operator<=>(const ClassLabel&) const = default;
};

std::string to_string(const ClassLabel&);
ClassLabel parse_label(const std::string& text);

struct EigenRec {
  int64_t tau_exp = 0;           // eigenvalue as a power of tau, mod N
  int mult = 1;
  std::vector<int> jordan;       // Jordan block sizes for this eigenvalue
  bool in_omega = false;
};

struct ClassData {
  ClassLabel label;
  Int size = 0;
  int64_t det_exp = 0;           // tau-exponent of the determinant, mod N
  std::vector<EigenRec> eigens;  // ordered: multiplicities non-increasing, Omega first
  int n = 0;                     // distinct eigenvalues
  int n_prime = 0;               // distinct eigenvalues in Omega

  int series() const { return label.series; }
  // rank of (A - lambda_a I) over the closure, 1-based eigenvalue slot
  int rank_at(int a, int dim) const;
};

std::vector<ClassLabel> enumerate_classes(const GroupSpec&);
ClassLabel canonical_label(const GroupSpec&, const ClassLabel& raw);
ClassData class_data(const GroupSpec&, const ClassLabel&);
ClassLabel inverse_class(const GroupSpec&, const ClassLabel&);
ClassLabel scalar_shift(const GroupSpec&, const ClassLabel&, int64_t k_prime);
ClassLabel su2_to_sl2(const ClassLabel&, int64_t q);

bool is_central(const ClassLabel& l);

// cached catalog: classes in canonical order plus index lookup
struct Catalog {
  GroupSpec spec;
  RootTower tower;
  std::vector<ClassData> list;
  std::map<ClassLabel, int> index;

  const ClassData& at(const ClassLabel& l) const;
  int index_of(const ClassLabel& l) const;
};

const Catalog& catalog(const GroupSpec&);

inline std::ostream& operator<<(std::ostream& os, const GroupSpec& g) {
  return os << to_string(g);
}
inline std::ostream& operator<<(std::ostream& os, const ClassLabel& l) {
  return os << to_string(l);
}

}  // namespace classprod
