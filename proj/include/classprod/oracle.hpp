#pragma once

#include "classprod/arith.hpp"
#include "classprod/classes.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

namespace classprod {

// ---- packed matrices over a FieldCtx ----
//
// Entries are FieldCtx element indices, row major; slots beyond dim*dim are
// kept at zero so whole-array comparison and hashing are valid.

struct Matrix {
  int dim = 0;
  std::array<int32_t, 9> a{};

  int32_t at(int i, int j) const { return a[i * dim + j]; }
  void set(int i, int j, int32_t v) { a[i * dim + j] = v; }
  bool operator==(const Matrix& o) const { return dim == o.dim && a == o.a; }
};

struct MatrixHash {
  size_t operator()(const Matrix& m) const {
    uint64_t h = 1469598103934665603ull;
    for (int32_t v : m.a) {
      h ^= uint64_t(uint32_t(v));
      h *= 1099511628211ull;
    }
    return size_t(h ^ uint64_t(m.dim));
  }
};

Matrix mat_identity(int dim);
Matrix mat_mul(const FieldCtx& F, const Matrix& A, const Matrix& B);
Matrix mat_inverse(const FieldCtx& F, const Matrix& A);
int64_t mat_det(const FieldCtx& F, const Matrix& A);
// conjugate transpose, entrywise x -> x^conj_pow (conj_pow = q for unitary)
Matrix mat_star(const FieldCtx& F, const Matrix& A, int64_t conj_pow);

// ---- explicit group with conjugacy partition and matched labels ----

inline constexpr int64_t kOracleCapDefault = 300000;

struct ExplicitGroup {
  GroupSpec spec;
  int variant = 0;  // 0 = default form/modulus, 1 = alternate (stability knob)
  FieldCtx field;   // ambient labeling field F_{q^6} (dim 3) or F_{q^2} (dim 2)
  RootTower tower;
  Matrix form;  // Hermitian/skew form preserved by unitary families; unused otherwise

  std::vector<Matrix> elements;
  // matrix -> element id; for projective groups every matrix of the covering
  // S-group is keyed and maps to the id of its central-coset representative
  std::unordered_map<Matrix, int32_t, MatrixHash> index;
  std::vector<int32_t> class_of;   // element id -> class id
  std::vector<int32_t> class_reps; // class id -> element id
  std::vector<int64_t> class_sizes;
  std::vector<ClassLabel> labels;  // class id -> canonical label
  std::map<ClassLabel, int32_t> label_index;
  std::vector<int32_t> inverse_of_class;
  int32_t identity_class = 0;
  // kappa[d][b][e] = #{y in class b : z_d * y in class e} for a fixed z_d in
  // class d; flat layout d * C^2 + b * C + e
  std::vector<int64_t> kappa;

  int32_t class_count() const { return int32_t(class_reps.size()); }
  int64_t kap(int32_t d, int32_t b, int32_t e) const {
    int64_t C = class_count();
    return kappa[(d * C + b) * C + e];
  }
  int32_t class_index(const ClassLabel& label) const;  // canonicalizes first
};

// Registry-backed build (per spec+variant, disk cache via CLASSPROD_CACHE_DIR).
const ExplicitGroup& build(const GroupSpec& spec, int64_t cap = kOracleCapDefault,
                           int variant = 0);
// Fresh build ignoring both the registry and the disk cache.
ExplicitGroup build_uncached(const GroupSpec& spec, int64_t cap = kOracleCapDefault,
                             int variant = 0);

// Recompute the label of every conjugacy class from matrix invariants.
std::vector<ClassLabel> match_labels(const ExplicitGroup& g);

// Exact number of tuples (y_1, ..., y_m), y_i in class i, with product 1.
Int n_oracle(const ExplicitGroup& g, const std::vector<ClassLabel>& labels);
Int n_oracle_by_index(const ExplicitGroup& g, const std::vector<int32_t>& ids);

// Linear dim-3 check: no product of a class of F_q-eigenvalue-free elements
// with its inverse class meets the transvection class C2^(0).
bool check_prop_1_1(const ExplicitGroup& g);

// ---- cache serialization (versioned, bit-exact round trip) ----

std::string serialize_group(const ExplicitGroup& g);
ExplicitGroup deserialize_group(const std::string& bytes);  // Error on corruption
// cache file path under CLASSPROD_CACHE_DIR, empty string if the env is unset
std::string cache_file_path(const GroupSpec& spec, int variant);

// ---- small helpers for tests and diagnostics ----

int64_t element_order(const ExplicitGroup& g, int32_t element_id);
int32_t class_of_element(const ExplicitGroup& g, const Matrix& m);  // InvalidParams if absent

}  // namespace classprod
