#pragma once

#include "classprod/classes.hpp"

#include <array>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace classprod {

// Xi-level of a character family: fixes the running parameters and the shape
// of the evaluation formula (dim-3 G-type groups only).
enum class XiLevel { xi1 = 1, xi2, xi3, xi4, xi5 };

struct CharFamilySpec {
  std::string name;  // X1..X8 with ' / '' decorations
  XiLevel level = XiLevel::xi1;
  int series = 0;  // the d_j series the family's characters belong to
  Int dim_d;       // d_j evaluated at (q, sign)
  Rat sym_factor;  // s(X) of the inclusion-exclusion identity over Irr(G)
  std::vector<int64_t> param_ranges;  // modulus of each running parameter
  // (class series, eigenvalue slot) -> coefficient; slot 0 where the row
  // carries a single coefficient per class series
  std::map<std::pair<int, int>, Int> coeff_row;

  Int coeff(int cls_series, int slot = 0) const;
};

// eigenvalue-index patterns of the X6 / X7 evaluation sums, per class series
struct AlphaSets {
  std::map<int, std::vector<std::array<int, 3>>> A6;
  std::map<int, std::vector<std::array<int, 2>>> A7;
};

const AlphaSets& alpha_sets();

// the 14 families: Xi1 = {X1,X2,X3,X4',X5',X6'',X8'}, Xi2 = {X4,X5,X6',X7'},
// Xi3 = {X6}, Xi4 = {X7}, Xi5 = {X8}
std::vector<CharFamilySpec> families(int64_t q, Sign sign);

// exact value of one character on one class, as a formal sum of N-th roots
CycSum char_value(const CharFamilySpec& fam, const std::vector<int64_t>& params,
                  const ClassData& cls, const RootTower& tower);

// restriction data for the det-1 subgroup in the split case q = 3r -+ 1
struct SRestriction {
  int64_t q = 0;
  Sign sign = Sign::unitary;
  int64_t r = 0;
  int64_t P = 0;   // q +- 1 = 3r
  int64_t D = 0;   // q^2 -+ q + 1, divisible by 3 here
  Int dim6_third;  // degree of the three split d6-characters
  Int dim8_third;  // degree of the six split d8-characters

  // chi_{d6/3}^{(t)} on the split class C3^{(k,l)}; independent of k
  int64_t split6_value(int64_t t, int64_t l) const {
    return mod_reduce(t, 3) == mod_reduce(l, 3) ? q - r : -r;
  }
  // chi_{d8/3}^{(t,u)} = eps^{uk} chi_{d6/3}^{(t)}: the eps-exponent
  int64_t split8_eps_exp(int64_t u, int64_t k) const { return mod_reduce(u * k, P); }

  // parameters of the short-orbit parents inside X6 and X8
  std::array<int64_t, 3> d6_params() const { return {0, r, 2 * r}; }
  int64_t d8_param(int64_t u) const { return u * (D / 3); }
};

SRestriction s_restriction(int64_t q, Sign sign);  // NotSplitCase if 3 does not divide q+-1

}  // namespace classprod
