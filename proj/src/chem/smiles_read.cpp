//
// SPDX-License-Identifier: Apache-2.0
//

#include <cctype>
#include <map>
#include <optional>
#include <string>

#include "rxngrow/chem/elements.h"
#include "rxngrow/chem/smiles.h"
#include "rxngrow/errors.h"

namespace rxngrow::chem {
namespace {

class Reader {
public:
  explicit Reader(std::string_view s): s_(s) { }

  Mol run() {
    if (s_.empty())
      fail("empty SMILES");
    std::vector<int> branch_stack;
    int prev = -1;
    std::optional<BondType> pending;
    bool pending_any = false;

    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      if (c == '(') {
        if (prev < 0)
          fail("branch without preceding atom");
        branch_stack.push_back(prev);
        ++pos_;
        continue;
      }
      if (c == ')') {
        if (branch_stack.empty())
          fail("unbalanced ')'");
        if (pending_any)
          fail("bond before ')'");
        prev = branch_stack.back();
        branch_stack.pop_back();
        ++pos_;
        continue;
      }
      if (c == '.') {
        if (pending_any || prev < 0)
          fail("misplaced '.'");
        prev = -1;
        ++pos_;
        continue;
      }
      if (is_bond_char(c)) {
        if (pending_any)
          fail("two consecutive bonds");
        pending = bond_from_char(c);
        pending_any = true;
        ++pos_;
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '%') {
        if (prev < 0)
          fail("ring bond without atom");
        int num;
        if (c == '%') {
          if (pos_ + 2 >= s_.size())
            fail("bad ring number");
          if (!std::isdigit(static_cast<unsigned char>(s_[pos_ + 1]))
              || !std::isdigit(static_cast<unsigned char>(s_[pos_ + 2])))
            fail("bad ring number");
          num = (s_[pos_ + 1] - '0') * 10 + (s_[pos_ + 2] - '0');
          pos_ += 3;
        } else {
          num = c - '0';
          ++pos_;
        }
        ring_bond(prev, num, pending_any ? pending : std::nullopt);
        pending.reset();
        pending_any = false;
        continue;
      }
      const int atom = read_atom();
      if (prev >= 0) {
        add_chain_bond(prev, atom, pending_any ? pending : std::nullopt);
      } else if (pending_any) {
        fail("bond without preceding atom");
      }
      pending.reset();
      pending_any = false;
      prev = atom;
    }
    if (pending_any)
      fail("dangling bond");
    if (!branch_stack.empty())
      fail("unclosed branch");
    if (!open_rings_.empty())
      fail("unclosed ring");
    return std::move(mol_);
  }

private:
  struct OpenRing {
    int atom;
    std::optional<BondType> bond;
  };

  [[noreturn]] void fail(const std::string &msg) const {
    throw ParseError("SMILES parse error at position " + std::to_string(pos_)
                     + " (" + msg + "): " + std::string(s_));
  }

  static bool is_bond_char(char c) {
    return c == '-' || c == '=' || c == '#' || c == ':' || c == '/'
           || c == '\\' || c == '$';
  }

  std::optional<BondType> bond_from_char(char c) const {
    switch (c) {
    case '-':
    case '/':
    case '\\':
      return BondType::kSingle;
    case '=':
      return BondType::kDouble;
    case '#':
      return BondType::kTriple;
    case ':':
      return BondType::kAromatic;
    default:
      fail("unsupported bond");
    }
  }

  void add_chain_bond(int a, int b, std::optional<BondType> type) {
    if (a == b || mol_.bond_between(a, b) >= 0)
      fail("duplicate bond");
    BondType t;
    if (type) {
      t = *type;
    } else {
      t = mol_.atom(a).aromatic && mol_.atom(b).aromatic ? BondType::kAromatic
                                                         : BondType::kSingle;
    }
    mol_.add_bond(a, b, t);
  }

  void ring_bond(int atom, int num, std::optional<BondType> type) {
    auto it = open_rings_.find(num);
    if (it == open_rings_.end()) {
      open_rings_[num] = { atom, type };
      return;
    }
    OpenRing open = it->second;
    open_rings_.erase(it);
    if (open.bond && type && *open.bond != *type)
      fail("conflicting ring bond types");
    if (!type)
      type = open.bond;
    add_chain_bond(open.atom, atom, type);
  }

  int read_atom() {
    Atom atom;
    const char c = s_[pos_];
    if (c == '[')
      return read_bracket_atom();
    if (c == '*') {
      ++pos_;
      return mol_.add_atom(atom);
    }
    // Organic subset.
    static const struct {
      const char *sym;
      int z;
      bool arom;
    } kOrganic[] = {
      { "Cl", 17, false }, { "Br", 35, false }, { "B", 5, false },
      { "C", 6, false },   { "N", 7, false },   { "O", 8, false },
      { "P", 15, false },  { "S", 16, false },  { "F", 9, false },
      { "I", 53, false },  { "b", 5, true },    { "c", 6, true },
      { "n", 7, true },    { "o", 8, true },    { "p", 15, true },
      { "s", 16, true },
    };
    for (const auto &o: kOrganic) {
      const std::string_view sym(o.sym);
      if (s_.substr(pos_, sym.size()) == sym) {
        atom.atomic_num = o.z;
        atom.aromatic = o.arom;
        pos_ += sym.size();
        return mol_.add_atom(atom);
      }
    }
    fail("unexpected character");
  }

  int read_int() {
    int v = 0;
    bool any = false;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      v = v * 10 + (s_[pos_] - '0');
      ++pos_;
      any = true;
      if (v > 100000)
        fail("number too large");
    }
    return any ? v : -1;
  }

  int read_bracket_atom() {
    ++pos_;  // '['
    Atom atom;
    atom.no_implicit = true;
    const int iso = read_int();
    if (iso >= 0)
      atom.isotope = iso;
    if (pos_ >= s_.size())
      fail("unterminated bracket atom");

    if (s_[pos_] == '*') {
      ++pos_;
    } else if (std::islower(static_cast<unsigned char>(s_[pos_]))) {
      static const struct {
        const char *sym;
        int z;
      } kArom[] = { { "se", 34 }, { "te", 52 }, { "as", 33 }, { "b", 5 },
                    { "c", 6 },   { "n", 7 },   { "o", 8 },   { "p", 15 },
                    { "s", 16 } };
      bool found = false;
      for (const auto &a: kArom) {
        const std::string_view sym(a.sym);
        if (s_.substr(pos_, sym.size()) == sym) {
          atom.atomic_num = a.z;
          atom.aromatic = true;
          pos_ += sym.size();
          found = true;
          break;
        }
      }
      if (!found)
        fail("unknown aromatic symbol");
    } else if (std::isupper(static_cast<unsigned char>(s_[pos_]))) {
      // Prefer the two-letter symbol when it exists.
      int z = 0;
      if (pos_ + 1 < s_.size()
          && std::islower(static_cast<unsigned char>(s_[pos_ + 1]))) {
        z = atomic_number(s_.substr(pos_, 2));
        if (z > 0)
          pos_ += 2;
      }
      if (z == 0) {
        z = atomic_number(s_.substr(pos_, 1));
        if (z == 0)
          fail("unknown element");
        ++pos_;
      }
      atom.atomic_num = z;
    } else {
      fail("expected element symbol");
    }

    // Chirality.
    if (pos_ < s_.size() && s_[pos_] == '@') {
      ++pos_;
      if (pos_ < s_.size() && s_[pos_] == '@') {
        ++pos_;
      } else {
        while (pos_ < s_.size() && std::isupper(static_cast<unsigned char>(s_[pos_]))
               && s_[pos_] != 'H')
          ++pos_;
        read_int();
      }
    }
    // Hydrogen count.
    if (pos_ < s_.size() && s_[pos_] == 'H') {
      ++pos_;
      const int h = read_int();
      atom.explicit_h = h >= 0 ? h : 1;
    }
    // Charge.
    if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) {
      const char sign = s_[pos_];
      int mag = 0;
      while (pos_ < s_.size() && s_[pos_] == sign) {
        ++mag;
        ++pos_;
      }
      if (mag == 1) {
        const int n = read_int();
        if (n >= 0)
          mag = n;
      }
      atom.charge = sign == '+' ? mag : -mag;
    }
    // Atom class.
    if (pos_ < s_.size() && s_[pos_] == ':') {
      ++pos_;
      const int cls = read_int();
      if (cls < 0)
        fail("bad atom class");
      atom.map_num = cls;
    }
    if (pos_ >= s_.size() || s_[pos_] != ']')
      fail("unterminated bracket atom");
    ++pos_;
    return mol_.add_atom(atom);
  }

  std::string_view s_;
  size_t pos_ = 0;
  Mol mol_;
  std::map<int, OpenRing> open_rings_;
};

}  // namespace

Mol read_smiles_graph(std::string_view smiles) {
  return Reader(smiles).run();
}

Mol parse_smiles(std::string_view smiles) {
  Mol mol = read_smiles_graph(smiles);
  fold_hydrogens(mol);
  sanitize(mol);
  return mol;
}

}  // namespace rxngrow::chem
