// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <set>

#include "molal/filters.h"
#include "molal/io.h"
#include "molal/smiles.h"
#include "oracles.h"
#include "test_util.h"

namespace molal {
namespace {

const MotifPattern &named(const std::string &name) {
  for (const MotifPattern &p: default_patterns())
    if (p.name == name)
      return p;
  throw std::runtime_error("no pattern " + name);
}

AdmetProperties at_bounds(bool upper) {
  const AdmetBounds b;
  auto v = [&](AdmetMetric m) { return upper ? b[m].upper : b[m].lower; };
  AdmetProperties p;
  p.molecular_weight = v(AdmetMetric::kMolecularWeight);
  p.hbond_acceptors = static_cast<int>(v(AdmetMetric::kHbondAcceptors));
  p.hbond_donors = static_cast<int>(v(AdmetMetric::kHbondDonors));
  p.rotatable_bonds = static_cast<int>(v(AdmetMetric::kRotatableBonds));
  p.rings = static_cast<int>(v(AdmetMetric::kRings));
  p.heteroatoms = static_cast<int>(v(AdmetMetric::kHeteroatoms));
  p.formal_charge = static_cast<int>(v(AdmetMetric::kFormalCharge));
  p.tpsa = v(AdmetMetric::kTpsa);
  p.logp = v(AdmetMetric::kLogp);
  return p;
}

TEST(Admet, DefaultBounds) {
  const AdmetBounds b;
  EXPECT_EQ(b[AdmetMetric::kMolecularWeight], (MetricBounds{100, 600}));
  EXPECT_EQ(b[AdmetMetric::kHbondAcceptors], (MetricBounds{0, 12}));
  EXPECT_EQ(b[AdmetMetric::kHbondDonors], (MetricBounds{0, 7}));
  EXPECT_EQ(b[AdmetMetric::kRotatableBonds], (MetricBounds{0, 11}));
  EXPECT_EQ(b[AdmetMetric::kRings], (MetricBounds{0, 6}));
  EXPECT_EQ(b[AdmetMetric::kHeteroatoms], (MetricBounds{1, 15}));
  EXPECT_EQ(b[AdmetMetric::kFormalCharge], (MetricBounds{-4, 4}));
  EXPECT_EQ(b[AdmetMetric::kTpsa], (MetricBounds{0, 140}));
  EXPECT_EQ(b[AdmetMetric::kLogp], (MetricBounds{-0.4, 6.5}));
}

TEST(Admet, ShippedDataFileMatchesDefaults) {
  EXPECT_EQ(AdmetBounds::load(MOLAL_SOURCE_DIR "/core/data/admet_bounds.json"), AdmetBounds());
}

TEST(Admet, EthanolFailsOnWeight) {
  const AdmetVerdict v = admet_filter(admet_properties(parse_smiles("CCO")), AdmetBounds());
  EXPECT_FALSE(v.pass);
  EXPECT_EQ(v.failing, std::vector<AdmetMetric>{AdmetMetric::kMolecularWeight});
}

TEST(Admet, BoundsAreInclusive) {
  EXPECT_TRUE(admet_filter(at_bounds(false), AdmetBounds(), true).pass);
  EXPECT_TRUE(admet_filter(at_bounds(true), AdmetBounds(), true).pass);
}

TEST(Admet, ChargeOutOfRange) {
  AdmetProperties p = at_bounds(false);
  p.formal_charge = -5;
  const AdmetVerdict v = admet_filter(p, AdmetBounds());
  ASSERT_EQ(v.failing.size(), 1u);
  EXPECT_EQ(admet_metric_name(v.failing[0]), "formal charge");
}

TEST(Admet, MissingExternalPropertiesOnlyFailStrict) {
  AdmetProperties p = at_bounds(false);
  p.tpsa.reset();
  p.logp.reset();
  EXPECT_TRUE(admet_filter(p, AdmetBounds()).pass);
  const AdmetVerdict v = admet_filter(p, AdmetBounds(), true);
  EXPECT_FALSE(v.pass);
  EXPECT_EQ(v.failing, (std::vector<AdmetMetric>{AdmetMetric::kTpsa, AdmetMetric::kLogp}));
}

TEST(Admet, JsonOverridesAndValidation) {
  const AdmetBounds b = AdmetBounds::from_json(nlohmann::json::parse(R"({"molecular_weight": [50, 700]})"));
  EXPECT_EQ(b[AdmetMetric::kMolecularWeight], (MetricBounds{50, 700}));
  EXPECT_EQ(b[AdmetMetric::kRings], AdmetBounds()[AdmetMetric::kRings]);
  EXPECT_EQ(AdmetBounds::from_json(b.to_json()), b);
  EXPECT_THROW(AdmetBounds::from_json(nlohmann::json::parse(R"({"rings": [5, 1]})")), FilterError);
  EXPECT_THROW(AdmetBounds::from_json(nlohmann::json::parse(R"({"bogus": [0, 1]})")), FilterError);
}

TEST(Motif, NitroHandBuilt) {
  MotifPattern nitro;
  nitro.name = "nitro";
  nitro.atoms = {AtomQuery{7, 1}, AtomQuery{8, 0}, AtomQuery{8, -1}};
  nitro.bonds = {BondQuery{0, 1, BondOrder::kDouble}, BondQuery{0, 2, BondOrder::kSingle}};
  EXPECT_TRUE(match_motif(parse_smiles("C[N+](=O)[O-]"), nitro));
  EXPECT_FALSE(match_motif(parse_smiles("c1ccccc1"), nitro));
  EXPECT_FALSE(match_motif(parse_smiles("CN=O"), nitro));
}

TEST(Motif, WholeMoleculeEmbedsInItself) {
  for (const std::string &s: {"CC(=O)O", "C1CC1N", "OCCN"}) {
    const Molecule m = parse_smiles(s);
    MotifPattern p;
    p.name = "self";
    for (int i = 0; i < m.num_atoms(); ++i) {
      AtomQuery q;
      q.atomic_number = m.atom(i).atomic_number;
      q.h_count = m.atom(i).hydrogens;
      p.atoms.push_back(q);
    }
    for (const Bond &b: m.bonds())
      p.bonds.push_back(BondQuery{b.begin, b.end, b.order});
    EXPECT_TRUE(match_motif(m, p)) << s;
  }
}

TEST(Motif, PatternValidation) {
  MotifPattern empty;
  EXPECT_THROW(empty.validate(), FilterError);
  MotifPattern split;
  split.atoms = {AtomQuery{}, AtomQuery{}};
  EXPECT_THROW(split.validate(), FilterError);
  MotifPattern loop;
  loop.atoms = {AtomQuery{}, AtomQuery{}};
  loop.bonds = {BondQuery{0, 0, {}}, BondQuery{0, 1, {}}};
  EXPECT_THROW(loop.validate(), FilterError);
  EXPECT_THROW(pattern_from_json(nlohmann::json::parse(R"({"name":"x","atoms":[{"element":"Qq"}],"bonds":[]})")),
               FilterError);
}

TEST(Motif, JsonRoundTrip) {
  for (const MotifPattern &p: default_patterns()) {
    const MotifPattern r = pattern_from_json(to_json(p));
    EXPECT_EQ(to_json(r), to_json(p));
  }
}

TEST(Motif, ShippedDataFileMatchesBuiltIn) {
  const auto loaded = load_patterns(MOLAL_SOURCE_DIR "/core/data/functional_groups.json");
  ASSERT_EQ(loaded.size(), default_patterns().size());
  for (std::size_t i = 0; i < loaded.size(); ++i)
    EXPECT_EQ(to_json(loaded[i]), to_json(default_patterns()[i]));
}

TEST(Groups, DefaultListCoverage) {
  std::set<std::string> names;
  for (const MotifPattern &p: default_patterns())
    names.insert(p.name);
  const std::set<std::string> want = {"azide", "nitro", "nitroso", "aldehyde", "ketone",
                                      "ester", "epoxide", "isocyanate", "thiocyanate", "azo",
                                      "diazo", "hydrazine", "terminal acetylene", "phenol", "thiol"};
  EXPECT_EQ(names, want);
}

TEST(Groups, EachPatternFindsItsExample) {
  const std::vector<std::pair<std::string, std::string>> cases = {
      {"azide", "CCN=[N+]=[N-]"},
      {"nitro", "c1ccccc1[N+](=O)[O-]"},
      {"nitroso", "CCN=O"},
      {"aldehyde", "CCC=O"},
      {"ketone", "CCC(=O)CC"},
      {"ester", "CCOC(=O)C"},
      {"epoxide", "CC1CO1"},
      {"isocyanate", "CCN=C=O"},
      {"thiocyanate", "CCSC#N"},
      {"azo", "c1ccccc1N=Nc1ccccc1"},
      {"diazo", "CC(=[N+]=[N-])C"},
      {"hydrazine", "CCNNC"},
      {"terminal acetylene", "CCC#C"},
      {"phenol", "Oc1ccccc1"},
      {"thiol", "CCS"},
  };
  for (const auto &[name, smiles]: cases)
    EXPECT_TRUE(match_motif(parse_smiles(smiles), named(name))) << name << " in " << smiles;
}

TEST(Groups, NearMissesDoNotMatch) {
  EXPECT_FALSE(match_motif(parse_smiles("CC(=O)O"), named("ketone")));
  EXPECT_FALSE(match_motif(parse_smiles("CC(=O)N"), named("ester")));
  EXPECT_FALSE(match_motif(parse_smiles("CC(=O)C"), named("aldehyde")));
  EXPECT_FALSE(match_motif(parse_smiles("CC#CC"), named("terminal acetylene")));
  EXPECT_FALSE(match_motif(parse_smiles("COc1ccccc1"), named("phenol")));
  EXPECT_FALSE(match_motif(parse_smiles("CSC"), named("thiol")));
  EXPECT_FALSE(match_motif(parse_smiles("C1CCO1"), named("epoxide")));
  EXPECT_FALSE(match_motif(parse_smiles("c1ccncn1"), named("hydrazine")));
}

TEST(Groups, FilterVerdicts) {
  const GroupVerdict azide = functional_group_filter(parse_smiles("CCN=[N+]=[N-]"), default_patterns());
  EXPECT_FALSE(azide.pass);
  EXPECT_EQ(azide.matched, "azide");
  EXPECT_TRUE(functional_group_filter(parse_smiles("CC"), default_patterns()).pass);
  EXPECT_TRUE(functional_group_filter(parse_smiles("CCN=[N+]=[N-]"), {}).pass);
}

TEST(Groups, PermutationInvariance) {
  std::mt19937_64 rng(6);
  for (const std::string &s: testing::drug_like()) {
    const Molecule m = parse_smiles(s);
    const GroupVerdict want = functional_group_filter(m, default_patterns());
    for (int t = 0; t < 10; ++t) {
      const Molecule p = m.permuted(testing::random_permutation(m.num_atoms(), rng));
      const GroupVerdict got = functional_group_filter(p, default_patterns());
      EXPECT_EQ(got.pass, want.pass) << s;
      EXPECT_EQ(got.matched, want.matched) << s;
    }
  }
}

TEST(Motif, MatchesBruteForceOracle) {
  std::mt19937_64 rng(13);
  std::vector<Molecule> pool;
  for (const std::string &s: testing::drug_like()) {
    const Molecule m = parse_smiles(s);
    if (m.num_atoms() <= 10)
      pool.push_back(m);
  }
  for (int i = 0; i < 60; ++i)
    pool.push_back(testing::random_molecule(rng, 10));
  int positives = 0, total = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    const Molecule &target = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
    const Molecule &source = std::bernoulli_distribution(0.6)(rng)
                                 ? target
                                 : pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
    const MotifPattern p = testing::random_pattern(source, rng);
    const bool want = oracle::brute_force_match(target, p);
    ASSERT_EQ(match_motif(target, p), want) << "trial " << trial << " " << canonical_string(target)
                                             << " " << to_json(p).dump();
    positives += want ? 1 : 0;
    ++total;
  }
  // Both outcomes must be well represented for the comparison to mean much.
  EXPECT_GT(positives, total / 5);
  EXPECT_LT(positives, total * 4 / 5);
  for (const Molecule &m: pool)
    for (const MotifPattern &p: default_patterns())
      ASSERT_EQ(match_motif(m, p), oracle::brute_force_match(m, p)) << p.name << " " << canonical_string(m);
}

TEST(FilterSet, ReasonsAndReport) {
  FilterSet f;
  f.admet = true;
  f.groups = true;
  EXPECT_EQ(f.reject_reason(parse_smiles("CCO")), "admet:molecular weight");
  EXPECT_EQ(f.reject_reason(parse_smiles("CCCCCCCCN=[N+]=[N-]")), "group:azide");
  EXPECT_FALSE(f.reject_reason(parse_smiles("CC(C)Cc1ccc(cc1)C(C)N")).has_value());
  const std::vector<FilterReportRow> rows = {filter_smiles("CCO", f), filter_smiles("C1CC", f),
                                             filter_smiles("CC(C)Cc1ccc(cc1)C(C)N", f)};
  EXPECT_FALSE(rows[0].pass);
  EXPECT_FALSE(rows[1].pass);
  EXPECT_EQ(rows[1].reason.rfind("parse:", 0), 0u);
  EXPECT_TRUE(rows[2].pass);
  testing::TempDir dir("filter");
  write_filter_report(dir.path() / "r.csv", rows);
  const CsvTable t = read_csv(dir.path() / "r.csv");
  EXPECT_EQ(t.header, (std::vector<std::string>{"smiles", "verdict", "reason"}));
  ASSERT_EQ(t.rows.size(), 3u);
  EXPECT_EQ(t.rows[0].fields[1], "fail");
  EXPECT_EQ(t.rows[2].fields[1], "pass");
}

}  // namespace
}  // namespace molal
