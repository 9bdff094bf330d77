// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#include "molal/element.h"

#include <array>
#include <stdexcept>
#include <string>

namespace molal {
namespace {

// Standard atomic weights (IUPAC abridged, four to five significant digits).
constexpr std::array<Element, 93> kTable = { {
    { 0, "*", 0.0, 0 },
    { 1, "H", 1.008, 1 },      { 2, "He", 4.0026, 0 },   { 3, "Li", 6.94, 1 },
    { 4, "Be", 9.0122, 2 },    { 5, "B", 10.81, 3 },     { 6, "C", 12.011, 4 },
    { 7, "N", 14.007, 5 },     { 8, "O", 15.999, 6 },    { 9, "F", 18.998, 7 },
    { 10, "Ne", 20.180, 0 },   { 11, "Na", 22.990, 1 },  { 12, "Mg", 24.305, 2 },
    { 13, "Al", 26.982, 3 },   { 14, "Si", 28.085, 4 },  { 15, "P", 30.974, 5 },
    { 16, "S", 32.06, 6 },     { 17, "Cl", 35.45, 7 },   { 18, "Ar", 39.948, 0 },
    { 19, "K", 39.098, 1 },    { 20, "Ca", 40.078, 2 },  { 21, "Sc", 44.956, 0 },
    { 22, "Ti", 47.867, 0 },   { 23, "V", 50.942, 0 },   { 24, "Cr", 51.996, 0 },
    { 25, "Mn", 54.938, 0 },   { 26, "Fe", 55.845, 0 },  { 27, "Co", 58.933, 0 },
    { 28, "Ni", 58.693, 0 },   { 29, "Cu", 63.546, 0 },  { 30, "Zn", 65.38, 0 },
    { 31, "Ga", 69.723, 3 },   { 32, "Ge", 72.630, 4 },  { 33, "As", 74.922, 5 },
    { 34, "Se", 78.971, 6 },   { 35, "Br", 79.904, 7 },  { 36, "Kr", 83.798, 0 },
    { 37, "Rb", 85.468, 1 },   { 38, "Sr", 87.62, 2 },   { 39, "Y", 88.906, 0 },
    { 40, "Zr", 91.224, 0 },   { 41, "Nb", 92.906, 0 },  { 42, "Mo", 95.95, 0 },
    { 43, "Tc", 98.0, 0 },     { 44, "Ru", 101.07, 0 },  { 45, "Rh", 102.91, 0 },
    { 46, "Pd", 106.42, 0 },   { 47, "Ag", 107.87, 0 },  { 48, "Cd", 112.41, 0 },
    { 49, "In", 114.82, 3 },   { 50, "Sn", 118.71, 4 },  { 51, "Sb", 121.76, 5 },
    { 52, "Te", 127.60, 6 },   { 53, "I", 126.90, 7 },   { 54, "Xe", 131.29, 0 },
    { 55, "Cs", 132.91, 1 },   { 56, "Ba", 137.33, 2 },  { 57, "La", 138.91, 0 },
    { 58, "Ce", 140.12, 0 },   { 59, "Pr", 140.91, 0 },  { 60, "Nd", 144.24, 0 },
    { 61, "Pm", 145.0, 0 },    { 62, "Sm", 150.36, 0 },  { 63, "Eu", 151.96, 0 },
    { 64, "Gd", 157.25, 0 },   { 65, "Tb", 158.93, 0 },  { 66, "Dy", 162.50, 0 },
    { 67, "Ho", 164.93, 0 },   { 68, "Er", 167.26, 0 },  { 69, "Tm", 168.93, 0 },
    { 70, "Yb", 173.05, 0 },   { 71, "Lu", 174.97, 0 },  { 72, "Hf", 178.49, 0 },
    { 73, "Ta", 180.95, 0 },   { 74, "W", 183.84, 0 },   { 75, "Re", 186.21, 0 },
    { 76, "Os", 190.23, 0 },   { 77, "Ir", 192.22, 0 },  { 78, "Pt", 195.08, 0 },
    { 79, "Au", 196.97, 0 },   { 80, "Hg", 200.59, 0 },  { 81, "Tl", 204.38, 3 },
    { 82, "Pb", 207.2, 4 },    { 83, "Bi", 208.98, 5 },  { 84, "Po", 209.0, 6 },
    { 85, "At", 210.0, 7 },    { 86, "Rn", 222.0, 0 },   { 87, "Fr", 223.0, 1 },
    { 88, "Ra", 226.0, 2 },    { 89, "Ac", 227.0, 0 },   { 90, "Th", 232.04, 0 },
    { 91, "Pa", 231.04, 0 },   { 92, "U", 238.03, 0 },
} };

}  // namespace

const Element *find_element(std::string_view symbol) {
  for (const Element &e: kTable) {
    if (e.atomic_number > 0 && e.symbol == symbol)
      return &e;
  }
  return nullptr;
}

const Element &element(int atomic_number) {
  if (atomic_number < 0 || atomic_number > max_atomic_number())
    throw std::out_of_range("atomic number " + std::to_string(atomic_number));
  return kTable[static_cast<std::size_t>(atomic_number)];
}

int max_atomic_number() {
  return static_cast<int>(kTable.size()) - 1;
}

ValenceList allowed_valences(int atomic_number, int charge) {
  ValenceList out;
  if (atomic_number <= 0 || atomic_number > max_atomic_number())
    return out;
  const int ve = element(atomic_number).valence_electrons;
  if (ve == 0)
    return out;

  auto push = [&out](int v) {
    if (out.size < static_cast<int>(out.values.size()))
      out.values[static_cast<std::size_t>(out.size++)] = v;
  };

  if (atomic_number == 1) {
    push(charge == 0 ? 1 : 0);
    return out;
  }

  // Isoelectronic shift: a charged atom behaves like its neighbour in the
  // period (N+ like C, O- like F, B- like C).
  const int shifted = ve - charge;
  int base;
  if (shifted <= 0 || shifted >= 8)
    base = 0;
  else if (shifted <= 4)
    base = shifted;
  else
    base = 8 - shifted;
  push(base);

  // Expanded octets for period 3 and below.
  if (atomic_number > 10 && shifted >= 5) {
    for (int v = base + 2; v <= shifted; v += 2)
      push(v);
  }
  return out;
}

bool is_organic_subset(int atomic_number) {
  switch (atomic_number) {
  case 5:
  case 6:
  case 7:
  case 8:
  case 9:
  case 15:
  case 16:
  case 17:
  case 35:
  case 53:
    return true;
  default:
    return false;
  }
}

bool is_aromatic_organic_subset(int atomic_number) {
  switch (atomic_number) {
  case 5:
  case 6:
  case 7:
  case 8:
  case 15:
  case 16:
    return true;
  default:
    return false;
  }
}

}  // namespace molal
