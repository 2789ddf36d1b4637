#pragma once
// Compiles a framework into the linear system over world probabilities.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "pd/model.hpp"

namespace pd {

using Matrix = std::vector<std::vector<double>>;
using Vector = std::vector<double>;

enum class Mode { Owa, Pcwa };

Mode mode_from_string(const std::string& s);
const char* mode_name(Mode m);

struct LinearSystem {
    Matrix a;                        // rows over the 2^n world columns
    Vector b;
    std::vector<std::string> row_tags;  // rule:<i> | normalization | pcwa:<lit>
    int n_atoms = 0;
    std::size_t n_worlds = 0;
};

struct HeadGroup {
    Literal head;
    std::vector<std::vector<Literal>> bodies;  // rule order
};

// Rule rows followed by the all-ones normalization row.
LinearSystem build_owa(const Framework& fw);

// One group per distinct head literal, in first-appearance order.
std::vector<HeadGroup> group_heads(const Framework& fw);

// One row per head group: 1 on worlds satisfying the head but none of the
// head-and-body conjunctions, rhs 0. Bodies whose literal set is a strict
// subset of a sibling body are dropped first; they correspond to one-step
// deductions that are never support-maximal, and keeping them would zero
// worlds the deduction semantics allows.
void append_pcwa_rows(LinearSystem& sys, const Framework& fw);

LinearSystem build_system(const Framework& fw, Mode mode);

// Stationarity system for the quadratic entropy surrogate:
// [[A, 0], [I, -A^T]] * [pi; lambda] = [B; 0].
struct AugmentedSystem {
    Matrix a;
    Vector b;
    std::size_t n_worlds = 0;
};

AugmentedSystem build_lagrange_augmented(const LinearSystem& sys);

}  // namespace pd
