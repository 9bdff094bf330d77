// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "molal/element.h"
#include "molal/rings.h"
#include "molal/smiles.h"

namespace molal {

const char *to_string(SmilesErrc code) {
  switch (code) {
  case SmilesErrc::kEmpty:
    return "Empty";
  case SmilesErrc::kSyntax:
    return "Syntax";
  case SmilesErrc::kUnbalancedRing:
    return "UnbalancedRing";
  case SmilesErrc::kUnbalancedParen:
    return "UnbalancedParen";
  case SmilesErrc::kUnknownAtom:
    return "UnknownAtom";
  case SmilesErrc::kValenceError:
    return "ValenceError";
  case SmilesErrc::kMultiComponent:
    return "MultiComponent";
  }
  return "Unknown";
}

SmilesError::SmilesError(SmilesErrc code, std::size_t position, const std::string &what)
    : CodedError(code, std::string(to_string(code)) + " at " + std::to_string(position)
                           + ": " + what),
      position_(position) { }

namespace {

struct PendingBond {
  bool present = false;
  BondOrder order = BondOrder::kSingle;
  BondStereo stereo = BondStereo::kNone;
};

struct RingOpening {
  int atom;
  PendingBond bond;
  std::size_t position;
};

struct ParsedBond {
  Bond bond;
  bool implicit;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) { }

  Molecule run() {
    if (text_.empty())
      fail(SmilesErrc::kEmpty, "empty string");

    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      switch (c) {
      case '(':
        if (prev_ < 0 || pending_.present)
          fail(SmilesErrc::kSyntax, "branch must follow an atom");
        if (pos_ + 1 < text_.size() && text_[pos_ + 1] == ')')
          fail(SmilesErrc::kSyntax, "empty branch");
        branches_.push_back(prev_);
        ++pos_;
        break;
      case ')':
        if (branches_.empty())
          fail(SmilesErrc::kUnbalancedParen, "unmatched ')'");
        if (pending_.present)
          fail(SmilesErrc::kSyntax, "dangling bond before ')'");
        prev_ = branches_.back();
        branches_.pop_back();
        ++pos_;
        break;
      case '-':
        set_bond(BondOrder::kSingle, BondStereo::kNone);
        break;
      case '=':
        set_bond(BondOrder::kDouble, BondStereo::kNone);
        break;
      case '#':
        set_bond(BondOrder::kTriple, BondStereo::kNone);
        break;
      case ':':
        set_bond(BondOrder::kAromatic, BondStereo::kNone);
        break;
      case '/':
        set_bond(BondOrder::kSingle, BondStereo::kUp);
        break;
      case '\\':
        set_bond(BondOrder::kSingle, BondStereo::kDown);
        break;
      case '$':
        fail(SmilesErrc::kSyntax, "quadruple bonds are not supported");
        break;
      case '.':
        fail(SmilesErrc::kMultiComponent, "multi-component SMILES are not accepted");
        break;
      case '%': {
        if (pos_ + 2 >= text_.size()
            || !std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))
            || !std::isdigit(static_cast<unsigned char>(text_[pos_ + 2])))
          fail(SmilesErrc::kSyntax, "'%' must be followed by two digits");
        const int number = (text_[pos_ + 1] - '0') * 10 + (text_[pos_ + 2] - '0');
        ring_bond(number);
        pos_ += 3;
        break;
      }
      case '[':
        parse_bracket_atom();
        break;
      default:
        if (std::isdigit(static_cast<unsigned char>(c))) {
          ring_bond(c - '0');
          ++pos_;
        } else {
          parse_organic_atom();
        }
      }
    }

    if (!rings_.empty())
      fail_at(SmilesErrc::kUnbalancedRing, rings_.begin()->second.position,
              "ring bond " + std::to_string(rings_.begin()->first) + " is never closed");
    if (!branches_.empty())
      fail(SmilesErrc::kUnbalancedParen, "unclosed '('");
    if (pending_.present)
      fail(SmilesErrc::kSyntax, "dangling bond at end of string");

    // Unspecified bonds between aromatic atoms are aromatic only inside rings.
    std::vector<Bond> bonds;
    bonds.reserve(bonds_.size());
    for (const ParsedBond &pb: bonds_)
      bonds.push_back(pb.bond);
    const std::vector<bool> cyclic =
        rings::cyclic_bonds(static_cast<int>(atoms_.size()), bonds);
    for (std::size_t i = 0; i < bonds.size(); ++i) {
      if (bonds_[i].implicit && bonds[i].order == BondOrder::kAromatic && !cyclic[i])
        bonds[i].order = BondOrder::kSingle;
    }

    try {
      return Molecule(std::move(atoms_), std::move(bonds));
    } catch (const MoleculeError &e) {
      if (e.code() == MoleculeErrc::kValence)
        fail_at(SmilesErrc::kValenceError, text_.size(), e.what());
      fail_at(SmilesErrc::kSyntax, text_.size(), e.what());
    }
  }

 private:
  [[noreturn]] void fail(SmilesErrc code, const std::string &what) const {
    throw SmilesError(code, pos_, what);
  }

  [[noreturn]] void fail_at(SmilesErrc code, std::size_t pos, const std::string &what) const {
    throw SmilesError(code, pos, what);
  }

  void set_bond(BondOrder order, BondStereo stereo) {
    if (prev_ < 0)
      fail(SmilesErrc::kSyntax, "bond must follow an atom");
    if (pending_.present)
      fail(SmilesErrc::kSyntax, "two consecutive bond symbols");
    pending_ = { true, order, stereo };
    ++pos_;
  }

  void add_bond(int a, int b, const PendingBond &pb) {
    const Atom &x = atoms_[static_cast<std::size_t>(a)];
    const Atom &y = atoms_[static_cast<std::size_t>(b)];
    Bond bond { a, b, BondOrder::kSingle, BondStereo::kNone };
    bool implicit = !pb.present;
    if (pb.present) {
      bond.order = pb.order;
      bond.stereo = pb.stereo;
    } else if (x.aromatic && y.aromatic) {
      bond.order = BondOrder::kAromatic;
    }
    for (const ParsedBond &existing: bonds_) {
      if ((existing.bond.begin == a && existing.bond.end == b)
          || (existing.bond.begin == b && existing.bond.end == a))
        fail(SmilesErrc::kSyntax, "duplicate bond between the same atoms");
    }
    bonds_.push_back({ bond, implicit });
  }

  void add_atom(Atom atom) {
    atoms_.push_back(atom);
    const int idx = static_cast<int>(atoms_.size()) - 1;
    if (prev_ >= 0)
      add_bond(prev_, idx, pending_);
    else if (pending_.present)
      fail(SmilesErrc::kSyntax, "bond without a preceding atom");
    pending_ = {};
    prev_ = idx;
  }

  void ring_bond(int number) {
    if (prev_ < 0)
      fail(SmilesErrc::kSyntax, "ring bond must follow an atom");
    auto it = rings_.find(number);
    if (it == rings_.end()) {
      rings_.emplace(number, RingOpening { prev_, pending_, pos_ });
      pending_ = {};
      return;
    }
    const RingOpening open = it->second;
    rings_.erase(it);
    if (open.atom == prev_)
      fail(SmilesErrc::kSyntax, "ring bond closes on the same atom");
    PendingBond pb = pending_;
    if (open.bond.present && pb.present) {
      if (open.bond.order != pb.order)
        fail(SmilesErrc::kSyntax, "conflicting ring bond orders");
    } else if (open.bond.present) {
      pb = open.bond;
      // Direction markers are written from the opening atom's side.
      if (pb.stereo == BondStereo::kUp)
        pb.stereo = BondStereo::kDown;
      else if (pb.stereo == BondStereo::kDown)
        pb.stereo = BondStereo::kUp;
    }
    add_bond(prev_, open.atom, pb);
    pending_ = {};
  }

  void parse_organic_atom() {
    const char c = text_[pos_];
    Atom atom;
    std::size_t len = 1;
    switch (c) {
    case 'B':
      if (pos_ + 1 < text_.size() && text_[pos_ + 1] == 'r') {
        atom.atomic_number = 35;
        len = 2;
      } else {
        atom.atomic_number = 5;
      }
      break;
    case 'C':
      if (pos_ + 1 < text_.size() && text_[pos_ + 1] == 'l') {
        atom.atomic_number = 17;
        len = 2;
      } else {
        atom.atomic_number = 6;
      }
      break;
    case 'N':
      atom.atomic_number = 7;
      break;
    case 'O':
      atom.atomic_number = 8;
      break;
    case 'P':
      atom.atomic_number = 15;
      break;
    case 'S':
      atom.atomic_number = 16;
      break;
    case 'F':
      atom.atomic_number = 9;
      break;
    case 'I':
      atom.atomic_number = 53;
      break;
    case 'b':
      atom.atomic_number = 5;
      atom.aromatic = true;
      break;
    case 'c':
      atom.atomic_number = 6;
      atom.aromatic = true;
      break;
    case 'n':
      atom.atomic_number = 7;
      atom.aromatic = true;
      break;
    case 'o':
      atom.atomic_number = 8;
      atom.aromatic = true;
      break;
    case 'p':
      atom.atomic_number = 15;
      atom.aromatic = true;
      break;
    case 's':
      atom.atomic_number = 16;
      atom.aromatic = true;
      break;
    default:
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '*')
        fail(SmilesErrc::kUnknownAtom, std::string("'") + c + "' is not an organic-subset atom");
      fail(SmilesErrc::kSyntax, std::string("unexpected character '") + c + "'");
    }
    pos_ += len;
    add_atom(atom);
  }

  std::optional<int> read_number() {
    std::size_t start = pos_;
    int value = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      value = value * 10 + (text_[pos_] - '0');
      if (value > 100000)
        fail(SmilesErrc::kSyntax, "number too large");
      ++pos_;
    }
    if (pos_ == start)
      return std::nullopt;
    return value;
  }

  void parse_bracket_atom() {
    const std::size_t open_pos = pos_;
    ++pos_;  // '['
    const std::size_t close = text_.find(']', pos_);
    if (close == std::string_view::npos)
      fail(SmilesErrc::kSyntax, "unterminated bracket atom");

    Atom atom;
    atom.bracket = true;
    atom.isotope = read_number();

    if (pos_ >= close)
      fail(SmilesErrc::kUnknownAtom, "bracket atom without element symbol");
    if (text_[pos_] == '*')
      fail(SmilesErrc::kUnknownAtom, "wildcard atoms are not supported");

    // Aromatic symbols: two-letter ones first.
    const Element *elem = nullptr;
    if (std::islower(static_cast<unsigned char>(text_[pos_]))) {
      for (std::string_view sym: { "se", "as", "te" }) {
        if (text_.substr(pos_, 2) == sym) {
          std::string upper(sym);
          upper[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(upper[0])));
          elem = find_element(upper);
          pos_ += 2;
          break;
        }
      }
      if (elem == nullptr) {
        const char c = text_[pos_];
        if (c == 'b' || c == 'c' || c == 'n' || c == 'o' || c == 'p' || c == 's') {
          elem = find_element(std::string(1, static_cast<char>(std::toupper(c))));
          ++pos_;
        }
      }
      if (elem == nullptr)
        fail(SmilesErrc::kUnknownAtom, "unknown aromatic symbol");
      atom.aromatic = true;
    } else if (std::isupper(static_cast<unsigned char>(text_[pos_]))) {
      if (pos_ + 1 < close && std::islower(static_cast<unsigned char>(text_[pos_ + 1])))
        elem = find_element(text_.substr(pos_, 2));
      if (elem != nullptr) {
        pos_ += 2;
      } else {
        elem = find_element(text_.substr(pos_, 1));
        if (elem == nullptr)
          fail(SmilesErrc::kUnknownAtom,
               "unknown element in " + std::string(text_.substr(open_pos, close - open_pos + 1)));
        ++pos_;
      }
    } else {
      fail(SmilesErrc::kUnknownAtom, "bracket atom without element symbol");
    }
    atom.atomic_number = elem->atomic_number;

    if (pos_ < close && text_[pos_] == '@') {
      ++pos_;
      atom.chirality = Chirality::kAnticlockwise;
      if (pos_ < close && text_[pos_] == '@') {
        ++pos_;
        atom.chirality = Chirality::kClockwise;
      }
    }

    if (pos_ < close && text_[pos_] == 'H') {
      ++pos_;
      atom.hydrogens = read_number().value_or(1);
    }

    if (pos_ < close && (text_[pos_] == '+' || text_[pos_] == '-')) {
      const char sign = text_[pos_++];
      int magnitude = 1;
      if (auto n = read_number()) {
        magnitude = *n;
      } else {
        while (pos_ < close && text_[pos_] == sign) {
          ++magnitude;
          ++pos_;
        }
      }
      atom.charge = sign == '+' ? magnitude : -magnitude;
      if (magnitude > 8)
        fail(SmilesErrc::kSyntax, "charge out of range");
    }

    if (pos_ < close && text_[pos_] == ':') {
      ++pos_;
      if (!read_number())
        fail(SmilesErrc::kSyntax, "atom class must be a number");
    }

    if (pos_ != close)
      fail(SmilesErrc::kSyntax, "unexpected character in bracket atom");
    pos_ = close + 1;
    add_atom(atom);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::vector<Atom> atoms_;
  std::vector<ParsedBond> bonds_;
  std::vector<int> branches_;
  std::map<int, RingOpening> rings_;
  PendingBond pending_;
  int prev_ = -1;
};

}  // namespace

Molecule parse_smiles(std::string_view text) {
  return Parser(text).run();
}

}  // namespace molal
