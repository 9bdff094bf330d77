// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MOLAL_ELEMENT_H_
#define MOLAL_ELEMENT_H_

#include <array>
#include <string_view>

namespace molal {

struct Element {
  int atomic_number;
  std::string_view symbol;
  double atomic_weight;
  // Main-group valence electron count, 0 for transition metals / noble gases
  // where no valence model is applied.
  int valence_electrons;
};

// Returns nullptr when the symbol is not a known element. Symbol lookup is
// case-sensitive ("Cl", not "CL").
const Element *find_element(std::string_view symbol);
const Element &element(int atomic_number);
int max_atomic_number();

// Allowed valences of a main-group atom with the given formal charge,
// ascending. Empty when no valence model applies (metals, noble gases).
struct ValenceList {
  std::array<int, 4> values{};
  int size = 0;

  const int *begin() const { return values.data(); }
  const int *end() const { return values.data() + size; }
  bool empty() const { return size == 0; }
  int max() const { return size == 0 ? 0 : values[size - 1]; }
};

ValenceList allowed_valences(int atomic_number, int charge);

// True for symbols that may be written outside brackets.
bool is_organic_subset(int atomic_number);
bool is_aromatic_organic_subset(int atomic_number);

}  // namespace molal

#endif  // MOLAL_ELEMENT_H_
