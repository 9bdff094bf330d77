// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include "molal/descriptors.h"
#include "molal/smiles.h"
#include "test_util.h"

namespace molal {
namespace {

double mqn(const std::string &smiles, const std::string &name) {
  const auto &names = mqn_names();
  const auto it = std::find(names.begin(), names.end(), name);
  EXPECT_NE(it, names.end()) << name;
  return compute_mqn(parse_smiles(smiles))[static_cast<std::size_t>(it - names.begin())];
}

TEST(Mqn, SchemaShape) {
  EXPECT_EQ(mqn_names().size(), 42u);
  const DescriptorVector v = compute_mqn(parse_smiles("CCO"));
  EXPECT_EQ(v.size(), 42u);
  EXPECT_EQ(v.schema(), kMqnSchema);
}

TEST(Mqn, Ethane) {
  EXPECT_EQ(mqn("CC", "hac"), 2);
  EXPECT_EQ(mqn("CC", "c"), 2);
  EXPECT_EQ(mqn("CC", "asb"), 1);
  EXPECT_EQ(mqn("CC", "asv"), 2);
  for (const char *r: {"r3", "r4", "r5", "r6", "r7", "r8", "r9", "rg10"})
    EXPECT_EQ(mqn("CC", r), 0) << r;
}

TEST(Mqn, Cyclopropane) {
  EXPECT_EQ(mqn("C1CC1", "r3"), 1);
  EXPECT_EQ(mqn("C1CC1", "csb"), 3);
  EXPECT_EQ(mqn("C1CC1", "cdv"), 3);
  EXPECT_EQ(mqn("C1CC1", "asb"), 0);
}

TEST(Mqn, HeteroatomsAndFusion) {
  const std::string naph = "c1ccc2ccccc2c1";
  EXPECT_EQ(mqn(naph, "r6"), 2);
  EXPECT_EQ(mqn(naph, "afrc"), 2);
  EXPECT_EQ(mqn(naph, "bfrc"), 1);
  EXPECT_EQ(mqn(naph, "csb") + mqn(naph, "cdb"), 11);
  EXPECT_EQ(mqn("CCOc1ccncc1", "cn"), 1);
  EXPECT_EQ(mqn("CCOc1ccncc1", "ao"), 1);
  EXPECT_EQ(mqn("C[N+](C)(C)C", "posc"), 1);
  EXPECT_EQ(mqn("CC(=O)[O-]", "negc"), 1);
  EXPECT_EQ(mqn("ClCBr", "cl"), 1);
  EXPECT_EQ(mqn("ClCBr", "br"), 1);
  EXPECT_EQ(mqn("C#N", "atb"), 1);
}

TEST(Mqn, PermutationInvariance) {
  std::mt19937_64 rng(1);
  for (const std::string &s: testing::drug_like()) {
    const Molecule m = parse_smiles(s);
    const DescriptorVector want = compute_mqn(m);
    for (int t = 0; t < 10; ++t)
      EXPECT_EQ(compute_mqn(m.permuted(testing::random_permutation(m.num_atoms(), rng))), want) << s;
  }
}

TEST(Mqn, AllFiniteAndNonNegative) {
  for (const std::string &s: testing::drug_like()) {
    const DescriptorVector d = compute_mqn(parse_smiles(s));
    for (double x: d.values()) {
      EXPECT_TRUE(std::isfinite(x));
      EXPECT_GE(x, 0.0);
    }
  }
}

TEST(DescriptorVector, RejectsNonFinite) {
  EXPECT_THROW(DescriptorVector("x", {1.0, std::numeric_limits<double>::quiet_NaN()}), DescriptorError);
  EXPECT_THROW(DescriptorVector("x", {std::numeric_limits<double>::infinity()}), DescriptorError);
}

TEST(Admet, Ethanol) {
  const AdmetProperties p = admet_properties(parse_smiles("CCO"));
  EXPECT_NEAR(p.molecular_weight, 2 * 12.011 + 15.999 + 6 * 1.008, 0.01);
  EXPECT_EQ(p.hbond_acceptors, 1);
  EXPECT_EQ(p.hbond_donors, 1);
  EXPECT_EQ(p.rotatable_bonds, 0);
  EXPECT_EQ(p.rings, 0);
  EXPECT_EQ(p.heteroatoms, 1);
  EXPECT_EQ(p.formal_charge, 0);
  EXPECT_FALSE(p.tpsa.has_value());
  EXPECT_FALSE(p.logp.has_value());
}

TEST(Admet, BenzeneAndAmmonium) {
  const AdmetProperties b = admet_properties(parse_smiles("c1ccccc1"));
  EXPECT_EQ(b.rings, 1);
  EXPECT_EQ(b.heteroatoms, 0);
  EXPECT_EQ(b.hbond_donors, 0);
  EXPECT_EQ(admet_properties(parse_smiles("[NH4+]")).formal_charge, 1);
  const AdmetProperties e = admet_properties(parse_smiles("CCO"), {42.0, 1.5});
  EXPECT_EQ(e.tpsa, 42.0);
  EXPECT_EQ(e.logp, 1.5);
}

TEST(Admet, RingCountIsCyclomaticNumber) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 200; ++i) {
    const Molecule m = testing::random_molecule(rng, 14);
    EXPECT_EQ(admet_properties(m).rings, m.num_bonds() - m.num_atoms() + 1);
    EXPECT_EQ(static_cast<int>(m.rings().size()), m.num_bonds() - m.num_atoms() + 1);
  }
}

TEST(Admet, RotatableBonds) {
  EXPECT_EQ(admet_properties(parse_smiles("CCCC")).rotatable_bonds, 1);
  EXPECT_EQ(admet_properties(parse_smiles("c1ccccc1Cc1ccccc1")).rotatable_bonds, 2);
}

TEST(DescriptorTable, Ingest) {
  std::istringstream in(
      "smiles,a,b,c,d,e\n"
      "CCO,1,2,3,4,5\n"
      "c1ccccc1,1,2,3,4,5\n"
      "CCN,0,0,0,0,0\n");
  const DescriptorTable t = ingest_descriptor_table(in);
  EXPECT_EQ(t.rows.size(), 3u);
  EXPECT_EQ(t.names.size(), 5u);
  for (const auto &[k, v]: t.rows)
    EXPECT_EQ(v.size(), 5u);
  EXPECT_EQ(t.schema, table_schema_id(t.names));
}

TEST(DescriptorTable, RejectsInfiniteAndBadSmiles) {
  std::istringstream in(
      "smiles,a,b\n"
      "CCO,1,inf\n"
      "C1CC,1,2\n"
      "CCC,1,2\n");
  const DescriptorTable t = ingest_descriptor_table(in);
  EXPECT_EQ(t.rows.size(), 1u);
  ASSERT_EQ(t.rejects.size(), 2u);
  EXPECT_EQ(t.rejects[0].line, 2u);
  EXPECT_EQ(t.rejects[1].line, 3u);
}

TEST(DescriptorTable, CanonicalMergeAndConflicts) {
  std::istringstream same("smiles,a\nOCC,1\nCCO,1\n");
  EXPECT_EQ(ingest_descriptor_table(same).rows.size(), 1u);
  std::istringstream conflict("smiles,a\nOCC,1\nCCO,2\n");
  try {
    ingest_descriptor_table(conflict);
    FAIL();
  } catch (const DescriptorError &e) {
    EXPECT_EQ(e.code(), DescriptorErrc::kDuplicateKey);
  }
  std::istringstream ragged("smiles,a,b\nCCO,1\n");
  try {
    ingest_descriptor_table(ragged);
    FAIL();
  } catch (const DescriptorError &e) {
    EXPECT_EQ(e.code(), DescriptorErrc::kSchemaMismatch);
  }
}

}  // namespace
}  // namespace molal
