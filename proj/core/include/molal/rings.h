// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MOLAL_RINGS_H_
#define MOLAL_RINGS_H_

#include <span>
#include <vector>

#include "molal/molecule.h"

namespace molal::rings {

// Edge-in-cycle flags: a bond lies on some cycle iff it is not a bridge.
std::vector<bool> cyclic_bonds(int num_atoms, std::span<const Bond> bonds);

int count_components(int num_atoms, std::span<const Bond> bonds);

// Minimum cycle basis (Horton candidates, greedy GF(2) independence). Rings
// are ordered by size, then by their sorted atom lists.
std::vector<Ring> minimum_cycle_basis(int num_atoms, std::span<const Bond> bonds,
                                      const std::vector<bool> &cyclic);

}  // namespace molal::rings

#endif  // MOLAL_RINGS_H_
