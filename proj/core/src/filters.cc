// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#include "molal/filters.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <set>
#include <utility>

#include "molal/element.h"
#include "molal/io.h"
#include "molal/smiles.h"

namespace molal {

namespace detail {
extern const char kDefaultPatternsJson[];
}  // namespace detail

namespace {

constexpr std::array<std::string_view, kNumAdmetMetrics> kMetricNames = {
    "molecular weight", "hbond acceptors", "hbond donors", "rotatable bonds", "rings",
    "heteroatoms",      "formal charge",   "tpsa",         "logp",
};

constexpr std::array<std::string_view, kNumAdmetMetrics> kMetricKeys = {
    "molecular_weight", "hbond_acceptors", "hbond_donors", "rotatable_bonds", "rings",
    "heteroatoms",      "formal_charge",   "tpsa",         "logp",
};

std::optional<double> metric_value(const AdmetProperties &p, AdmetMetric m) {
  switch (m) {
    case AdmetMetric::kMolecularWeight: return p.molecular_weight;
    case AdmetMetric::kHbondAcceptors: return p.hbond_acceptors;
    case AdmetMetric::kHbondDonors: return p.hbond_donors;
    case AdmetMetric::kRotatableBonds: return p.rotatable_bonds;
    case AdmetMetric::kRings: return p.rings;
    case AdmetMetric::kHeteroatoms: return p.heteroatoms;
    case AdmetMetric::kFormalCharge: return p.formal_charge;
    case AdmetMetric::kTpsa: return p.tpsa;
    case AdmetMetric::kLogp: return p.logp;
  }
  return std::nullopt;
}

std::optional<BondOrder> bond_order_from_name(const std::string &name) {
  if (name == "single") return BondOrder::kSingle;
  if (name == "double") return BondOrder::kDouble;
  if (name == "triple") return BondOrder::kTriple;
  if (name == "aromatic") return BondOrder::kAromatic;
  if (name == "any") return std::nullopt;
  throw FilterError(FilterErrc::kBadPattern, "unknown bond order '" + name + "'");
}

std::string bond_order_name(std::optional<BondOrder> o) {
  if (!o) return "any";
  switch (*o) {
    case BondOrder::kSingle: return "single";
    case BondOrder::kDouble: return "double";
    case BondOrder::kTriple: return "triple";
    case BondOrder::kAromatic: return "aromatic";
  }
  return "any";
}

// Backtracking state for one (molecule, pattern) pair. Pattern atoms are
// visited in BFS order so every atom after the first has a mapped anchor
// whose neighbours are the only candidates.
class Matcher {
 public:
  Matcher(const Molecule &mol, const MotifPattern &p) : mol_(mol), p_(p) {
    const int n = static_cast<int>(p.atoms.size());
    adj_.assign(static_cast<std::size_t>(n), {});
    for (const BondQuery &b : p.bonds) {
      adj_[static_cast<std::size_t>(b.a)].push_back({b.b, &b});
      adj_[static_cast<std::size_t>(b.b)].push_back({b.a, &b});
    }
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    anchor_.assign(static_cast<std::size_t>(n), -1);
    std::queue<int> q;
    q.push(0);
    seen[0] = true;
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      order_.push_back(u);
      for (const auto &[v, bq] : adj_[static_cast<std::size_t>(u)]) {
        if (seen[static_cast<std::size_t>(v)]) continue;
        seen[static_cast<std::size_t>(v)] = true;
        anchor_[static_cast<std::size_t>(v)] = u;
        q.push(v);
      }
    }
    map_.assign(static_cast<std::size_t>(n), -1);
    used_.assign(static_cast<std::size_t>(mol.num_atoms()), false);
  }

  bool run() { return extend(0); }

 private:
  bool feasible(int q, int t) const {
    if (used_[static_cast<std::size_t>(t)]) return false;
    if (!p_.atoms[static_cast<std::size_t>(q)].matches(mol_, t)) return false;
    for (const auto &[v, bq] : adj_[static_cast<std::size_t>(q)]) {
      const int tv = map_[static_cast<std::size_t>(v)];
      if (tv < 0) continue;
      const int b = mol_.find_bond(t, tv);
      if (b < 0 || !bq->matches(mol_.bond(b).order)) return false;
    }
    return true;
  }

  bool assign(std::size_t depth, int q, int t) {
    if (!feasible(q, t)) return false;
    map_[static_cast<std::size_t>(q)] = t;
    used_[static_cast<std::size_t>(t)] = true;
    const bool ok = extend(depth + 1);
    map_[static_cast<std::size_t>(q)] = -1;
    used_[static_cast<std::size_t>(t)] = false;
    return ok;
  }

  bool extend(std::size_t depth) {
    if (depth == order_.size()) return true;
    const int q = order_[depth];
    const int a = anchor_[static_cast<std::size_t>(q)];
    if (a < 0) {
      for (int t = 0; t < mol_.num_atoms(); ++t)
        if (assign(depth, q, t)) return true;
      return false;
    }
    for (const Neighbor &nb : mol_.neighbors(map_[static_cast<std::size_t>(a)]))
      if (assign(depth, q, nb.atom)) return true;
    return false;
  }

  const Molecule &mol_;
  const MotifPattern &p_;
  std::vector<std::vector<std::pair<int, const BondQuery *>>> adj_;
  std::vector<int> order_;
  std::vector<int> anchor_;
  std::vector<int> map_;
  std::vector<bool> used_;
};

}  // namespace

std::string_view admet_metric_name(AdmetMetric m) { return kMetricNames[static_cast<std::size_t>(m)]; }
std::string_view admet_metric_key(AdmetMetric m) { return kMetricKeys[static_cast<std::size_t>(m)]; }

void AdmetBounds::validate() const {
  for (std::size_t i = 0; i < kNumAdmetMetrics; ++i) {
    const MetricBounds &b = bounds[i];
    if (std::isnan(b.lower) || std::isnan(b.upper) || b.lower > b.upper)
      throw FilterError(FilterErrc::kBadBounds,
                        "invalid bounds for " + std::string(kMetricNames[i]) + ": [" +
                            std::to_string(b.lower) + ", " + std::to_string(b.upper) + "]");
  }
}

nlohmann::json AdmetBounds::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (std::size_t i = 0; i < kNumAdmetMetrics; ++i)
    j[std::string(kMetricKeys[i])] = {bounds[i].lower, bounds[i].upper};
  return j;
}

AdmetBounds AdmetBounds::from_json(const nlohmann::json &j) {
  if (!j.is_object()) throw FilterError(FilterErrc::kFormat, "ADMET bounds must be a JSON object");
  AdmetBounds out;
  for (const auto &[key, value] : j.items()) {
    const auto it = std::find(kMetricKeys.begin(), kMetricKeys.end(), key);
    if (it == kMetricKeys.end()) throw FilterError(FilterErrc::kFormat, "unknown ADMET metric '" + key + "'");
    if (!value.is_array() || value.size() != 2 || !value[0].is_number() || !value[1].is_number())
      throw FilterError(FilterErrc::kFormat, "bounds for '" + key + "' must be [lower, upper]");
    out.bounds[static_cast<std::size_t>(it - kMetricKeys.begin())] = {value[0].get<double>(),
                                                                      value[1].get<double>()};
  }
  out.validate();
  return out;
}

AdmetBounds AdmetBounds::load(const std::filesystem::path &path) {
  try {
    return from_json(nlohmann::json::parse(read_file(path)));
  } catch (const nlohmann::json::parse_error &e) {
    throw FilterError(FilterErrc::kFormat, path.string() + ": " + e.what());
  }
}

AdmetVerdict admet_filter(const AdmetProperties &props, const AdmetBounds &bounds, bool strict) {
  AdmetVerdict v;
  for (std::size_t i = 0; i < kNumAdmetMetrics; ++i) {
    const auto m = static_cast<AdmetMetric>(i);
    const std::optional<double> x = metric_value(props, m);
    const bool ok = x ? (*x >= bounds.bounds[i].lower && *x <= bounds.bounds[i].upper) : !strict;
    if (!ok) v.failing.push_back(m);
  }
  v.pass = v.failing.empty();
  return v;
}

bool AtomQuery::matches(const Molecule &mol, int atom) const {
  const Atom &a = mol.atom(atom);
  if (atomic_number && a.atomic_number != *atomic_number) return false;
  if (charge && a.charge != *charge) return false;
  if (aromatic && a.aromatic != *aromatic) return false;
  if (h_count && a.hydrogens != *h_count) return false;
  if (degree && mol.degree(atom) != *degree) return false;
  if (connectivity && mol.degree(atom) + a.hydrogens != *connectivity) return false;
  return true;
}

void MotifPattern::validate() const {
  const int n = static_cast<int>(atoms.size());
  if (n == 0) throw FilterError(FilterErrc::kBadPattern, "pattern '" + name + "' has no atoms");
  if (n > kMaxAtoms)
    throw FilterError(FilterErrc::kBadPattern,
                      "pattern '" + name + "' has " + std::to_string(n) + " atoms, limit is " +
                          std::to_string(kMaxAtoms));
  std::set<std::pair<int, int>> seen;
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  for (const BondQuery &b : bonds) {
    if (b.a < 0 || b.b < 0 || b.a >= n || b.b >= n || b.a == b.b)
      throw FilterError(FilterErrc::kBadPattern, "pattern '" + name + "' has an invalid bond");
    if (!seen.insert(std::minmax(b.a, b.b)).second)
      throw FilterError(FilterErrc::kBadPattern, "pattern '" + name + "' has a duplicate bond");
    adj[static_cast<std::size_t>(b.a)].push_back(b.b);
    adj[static_cast<std::size_t>(b.b)].push_back(b.a);
  }
  std::vector<bool> reached(static_cast<std::size_t>(n), false);
  std::vector<int> stack { 0 };
  reached[0] = true;
  int count = 0;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    ++count;
    for (int v : adj[static_cast<std::size_t>(u)])
      if (!reached[static_cast<std::size_t>(v)]) {
        reached[static_cast<std::size_t>(v)] = true;
        stack.push_back(v);
      }
  }
  if (count != n) throw FilterError(FilterErrc::kBadPattern, "pattern '" + name + "' is not connected");
}

MotifPattern pattern_from_json(const nlohmann::json &j) {
  MotifPattern p;
  try {
    p.name = j.at("name").get<std::string>();
    for (const auto &ja : j.at("atoms")) {
      AtomQuery q;
      for (const auto &[key, value] : ja.items()) {
        if (key == "element") {
          const Element *e = find_element(value.get<std::string>());
          if (!e) throw FilterError(FilterErrc::kBadPattern, "unknown element '" + value.get<std::string>() + "'");
          q.atomic_number = e->atomic_number;
        } else if (key == "charge") {
          q.charge = value.get<int>();
        } else if (key == "aromatic") {
          q.aromatic = value.get<bool>();
        } else if (key == "h_count") {
          q.h_count = value.get<int>();
        } else if (key == "degree") {
          q.degree = value.get<int>();
        } else if (key == "connectivity") {
          q.connectivity = value.get<int>();
        } else {
          throw FilterError(FilterErrc::kBadPattern, "unknown atom constraint '" + key + "'");
        }
      }
      p.atoms.push_back(q);
    }
    for (const auto &jb : j.value("bonds", nlohmann::json::array())) {
      if (!jb.is_array() || jb.size() < 2 || jb.size() > 3)
        throw FilterError(FilterErrc::kBadPattern, "bond must be [i, j] or [i, j, order]");
      BondQuery b;
      b.a = jb[0].get<int>();
      b.b = jb[1].get<int>();
      b.order = jb.size() == 3 ? bond_order_from_name(jb[2].get<std::string>()) : BondOrder::kSingle;
      p.bonds.push_back(b);
    }
  } catch (const nlohmann::json::exception &e) {
    throw FilterError(FilterErrc::kBadPattern, std::string("malformed pattern: ") + e.what());
  }
  p.validate();
  return p;
}

nlohmann::json to_json(const MotifPattern &p) {
  nlohmann::json atoms = nlohmann::json::array();
  for (const AtomQuery &q : p.atoms) {
    nlohmann::json a = nlohmann::json::object();
    if (q.atomic_number) a["element"] = std::string(element(*q.atomic_number).symbol);
    if (q.charge) a["charge"] = *q.charge;
    if (q.aromatic) a["aromatic"] = *q.aromatic;
    if (q.h_count) a["h_count"] = *q.h_count;
    if (q.degree) a["degree"] = *q.degree;
    if (q.connectivity) a["connectivity"] = *q.connectivity;
    atoms.push_back(a);
  }
  nlohmann::json bonds = nlohmann::json::array();
  for (const BondQuery &b : p.bonds) bonds.push_back({b.a, b.b, bond_order_name(b.order)});
  return {{"name", p.name}, {"atoms", atoms}, {"bonds", bonds}};
}

std::vector<MotifPattern> patterns_from_json(const nlohmann::json &j) {
  const nlohmann::json *list = &j;
  if (j.is_object()) {
    if (!j.contains("patterns")) throw FilterError(FilterErrc::kFormat, "pattern file lacks 'patterns'");
    list = &j["patterns"];
  }
  if (!list->is_array()) throw FilterError(FilterErrc::kFormat, "patterns must be an array");
  std::vector<MotifPattern> out;
  for (const auto &p : *list) out.push_back(pattern_from_json(p));
  return out;
}

std::vector<MotifPattern> load_patterns(const std::filesystem::path &path) {
  try {
    return patterns_from_json(nlohmann::json::parse(read_file(path)));
  } catch (const nlohmann::json::parse_error &e) {
    throw FilterError(FilterErrc::kFormat, path.string() + ": " + e.what());
  }
}

const std::vector<MotifPattern> &default_patterns() {
  static const std::vector<MotifPattern> patterns =
      patterns_from_json(nlohmann::json::parse(detail::kDefaultPatternsJson));
  return patterns;
}

bool match_motif(const Molecule &mol, const MotifPattern &pattern) {
  if (pattern.atoms.empty()) return true;
  if (static_cast<int>(pattern.atoms.size()) > mol.num_atoms()) return false;
  return Matcher(mol, pattern).run();
}

GroupVerdict functional_group_filter(const Molecule &mol, std::span<const MotifPattern> patterns) {
  for (const MotifPattern &p : patterns)
    if (match_motif(mol, p)) return {false, p.name};
  return {};
}

std::optional<std::string> FilterSet::reject_reason(const Molecule &mol) const {
  if (admet) {
    const AdmetVerdict v = admet_filter(admet_properties(mol), bounds, strict);
    if (!v.pass) return "admet:" + std::string(admet_metric_name(v.failing.front()));
  }
  if (groups) {
    const GroupVerdict v = functional_group_filter(mol, patterns);
    if (!v.pass) return "group:" + v.matched;
  }
  return std::nullopt;
}

FilterReportRow filter_smiles(std::string_view smiles, const FilterSet &filters) {
  FilterReportRow row;
  try {
    const Molecule mol = parse_smiles(smiles);
    row.smiles = canonical_string(mol);
    if (auto reason = filters.reject_reason(mol)) {
      row.pass = false;
      row.reason = std::move(*reason);
    }
  } catch (const Error &e) {
    row.smiles = std::string(smiles);
    row.pass = false;
    row.reason = std::string("parse:") + e.what();
  }
  return row;
}

void write_filter_report(const std::filesystem::path &path, std::span<const FilterReportRow> rows) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  const std::vector<std::string> header { "smiles", "verdict", "reason" };
  write_csv_row(out, header);
  for (const FilterReportRow &r : rows) {
    const std::vector<std::string> fields { r.smiles, r.pass ? "pass" : "fail", r.reason };
    write_csv_row(out, fields);
  }
}

}  // namespace molal
