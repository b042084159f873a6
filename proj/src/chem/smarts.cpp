//
// SPDX-License-Identifier: Apache-2.0
//

#include "rxngrow/chem/smarts.h"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <set>

#include "rxngrow/chem/elements.h"
#include "rxngrow/errors.h"

namespace rxngrow::chem {

class SmartsParser {
public:
  explicit SmartsParser(std::string_view s): s_(s) { }

  std::shared_ptr<SmartsPattern> run() {
    auto pat = std::make_shared<SmartsPattern>();
    pat_ = pat.get();
    pat_->text_ = std::string(s_);
    if (s_.empty())
      fail("empty SMARTS");
    std::vector<int> branch_stack;
    int prev = -1;
    std::optional<BondExpr> pending;
    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      if (c == '(') {
        if (prev < 0)
          fail("branch without atom");
        branch_stack.push_back(prev);
        ++pos_;
      } else if (c == ')') {
        if (branch_stack.empty() || pending)
          fail("bad ')'");
        prev = branch_stack.back();
        branch_stack.pop_back();
        ++pos_;
      } else if (c == '.') {
        if (pending || prev < 0)
          fail("misplaced '.'");
        prev = -1;
        ++pos_;
      } else if (is_bond_start(c)) {
        if (pending)
          fail("two consecutive bonds");
        pending = parse_bond_expr();
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '%') {
        if (prev < 0)
          fail("ring bond without atom");
        int num;
        if (c == '%') {
          if (pos_ + 2 >= s_.size())
            fail("bad ring number");
          num = (s_[pos_ + 1] - '0') * 10 + (s_[pos_ + 2] - '0');
          pos_ += 3;
        } else {
          num = c - '0';
          ++pos_;
        }
        auto it = open_rings_.find(num);
        if (it == open_rings_.end()) {
          open_rings_[num] = { prev, pending };
        } else {
          auto [other, expr] = it->second;
          open_rings_.erase(it);
          if (!pending)
            pending = expr;
          add_bond(other, prev, pending);
        }
        pending.reset();
      } else {
        const int atom = parse_atom();
        if (prev >= 0)
          add_bond(prev, atom, pending);
        else if (pending)
          fail("bond without atom");
        pending.reset();
        prev = atom;
      }
    }
    if (pending || !branch_stack.empty() || !open_rings_.empty())
      fail("incomplete pattern");
    return pat;
  }

private:
  [[noreturn]] void fail(const std::string &msg) const {
    throw ParseError("SMARTS parse error at position " + std::to_string(pos_)
                     + " (" + msg + "): " + std::string(s_));
  }

  static bool is_bond_start(char c) {
    return c == '-' || c == '=' || c == '#' || c == ':' || c == '~'
           || c == '@' || c == '!' || c == '/' || c == '\\';
  }

  void add_bond(int a, int b, const std::optional<BondExpr> &expr) {
    if (a == b || pat_->bond_between(a, b) >= 0)
      fail("duplicate bond");
    QueryBond qb;
    qb.begin = a;
    qb.end = b;
    if (expr) {
      qb.expr = *expr;
    }
    switch (qb.expr.op) {
    case BondExpr::Op::kSingle:
      qb.simple = BondType::kSingle;
      break;
    case BondExpr::Op::kDouble:
      qb.simple = BondType::kDouble;
      break;
    case BondExpr::Op::kTriple:
      qb.simple = BondType::kTriple;
      break;
    case BondExpr::Op::kAromatic:
      qb.simple = BondType::kAromatic;
      break;
    default:
      break;
    }
    pat_->bonds_.push_back(std::move(qb));
    const int idx = static_cast<int>(pat_->bonds_.size()) - 1;
    pat_->adj_[a].push_back({ b, idx });
    pat_->adj_[b].push_back({ a, idx });
  }

  // Bond expressions: '!' binds tightest, then '&' / juxtaposition, ',' and
  // finally ';'.
  BondExpr parse_bond_expr() { return bond_low_and(); }

  bool at_bond_prim() const {
    if (pos_ >= s_.size())
      return false;
    const char c = s_[pos_];
    return c == '-' || c == '=' || c == '#' || c == ':' || c == '~'
           || c == '@' || c == '!' || c == '/' || c == '\\';
  }

  BondExpr bond_low_and() {
    BondExpr e = bond_or();
    while (pos_ < s_.size() && s_[pos_] == ';') {
      ++pos_;
      BondExpr r = bond_or();
      e = combine(BondExpr::Op::kAnd, std::move(e), std::move(r));
    }
    return e;
  }

  BondExpr bond_or() {
    BondExpr e = bond_high_and();
    while (pos_ < s_.size() && s_[pos_] == ',') {
      ++pos_;
      BondExpr r = bond_high_and();
      e = combine(BondExpr::Op::kOr, std::move(e), std::move(r));
    }
    return e;
  }

  BondExpr bond_high_and() {
    BondExpr e = bond_unary();
    while (pos_ < s_.size() && (s_[pos_] == '&' || at_bond_prim())) {
      if (s_[pos_] == '&')
        ++pos_;
      BondExpr r = bond_unary();
      e = combine(BondExpr::Op::kAnd, std::move(e), std::move(r));
    }
    return e;
  }

  BondExpr bond_unary() {
    if (pos_ >= s_.size())
      fail("truncated bond");
    const char c = s_[pos_++];
    BondExpr e;
    switch (c) {
    case '!': {
      BondExpr inner = bond_unary();
      e.op = BondExpr::Op::kNot;
      e.children.push_back(std::move(inner));
      return e;
    }
    case '-':
    case '/':
    case '\\':
      e.op = BondExpr::Op::kSingle;
      return e;
    case '=':
      e.op = BondExpr::Op::kDouble;
      return e;
    case '#':
      e.op = BondExpr::Op::kTriple;
      return e;
    case ':':
      e.op = BondExpr::Op::kAromatic;
      return e;
    case '~':
      e.op = BondExpr::Op::kAny;
      return e;
    case '@':
      e.op = BondExpr::Op::kRing;
      return e;
    default:
      --pos_;
      fail("bad bond primitive");
    }
  }

  template <class E>
  static E combine(typename E::Op op, E a, E b) {
    E e;
    e.op = op;
    e.children.push_back(std::move(a));
    e.children.push_back(std::move(b));
    return e;
  }

  int parse_atom() {
    QueryAtom qa;
    const char c = s_[pos_];
    if (c == '[') {
      parse_bracket(qa);
    } else {
      static const struct {
        const char *sym;
        int z;
        int arom;
      } kShort[] = {
        { "Cl", 17, 0 }, { "Br", 35, 0 }, { "B", 5, 0 },  { "C", 6, 0 },
        { "N", 7, 0 },   { "O", 8, 0 },   { "P", 15, 0 }, { "S", 16, 0 },
        { "F", 9, 0 },   { "I", 53, 0 },  { "b", 5, 1 },  { "c", 6, 1 },
        { "n", 7, 1 },   { "o", 8, 1 },   { "p", 15, 1 }, { "s", 16, 1 },
      };
      bool found = false;
      if (c == '*') {
        qa.expr.op = AtomExpr::Op::kTrue;
        ++pos_;
        found = true;
      } else if (c == 'A' || c == 'a') {
        qa.expr.op = AtomExpr::Op::kAromatic;
        qa.expr.value = c == 'a' ? 1 : 0;
        ++pos_;
        found = true;
      } else {
        for (const auto &sh: kShort) {
          const std::string_view sym(sh.sym);
          if (s_.substr(pos_, sym.size()) == sym) {
            qa.expr.op = AtomExpr::Op::kElement;
            qa.expr.value = sh.z;
            qa.expr.flag = sh.arom;
            pos_ += sym.size();
            found = true;
            break;
          }
        }
      }
      if (!found)
        fail("unexpected character");
    }
    derive_simple(qa);
    pat_->atoms_.push_back(std::move(qa));
    pat_->adj_.emplace_back();
    return static_cast<int>(pat_->atoms_.size()) - 1;
  }

  void parse_bracket(QueryAtom &qa) {
    ++pos_;  // '['
    bracket_start_ = pos_;
    qa.expr = atom_low_and();
    if (pos_ < s_.size() && s_[pos_] == ':') {
      ++pos_;
      const int m = read_int();
      if (m < 0)
        fail("bad map number");
      qa.map_num = m;
    }
    if (pos_ >= s_.size() || s_[pos_] != ']')
      fail("unterminated bracket atom");
    ++pos_;
  }

  int read_int() {
    int v = -1;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      v = (v < 0 ? 0 : v * 10) + (s_[pos_] - '0');
      ++pos_;
    }
    return v;
  }

  bool at_atom_prim() const {
    if (pos_ >= s_.size())
      return false;
    const char c = s_[pos_];
    return c != ';' && c != ',' && c != ']' && c != ':' && c != ')';
  }

  AtomExpr atom_low_and() {
    AtomExpr e = atom_or();
    while (pos_ < s_.size() && s_[pos_] == ';') {
      ++pos_;
      AtomExpr r = atom_or();
      e = combine(AtomExpr::Op::kAnd, std::move(e), std::move(r));
    }
    return e;
  }

  AtomExpr atom_or() {
    AtomExpr e = atom_high_and();
    while (pos_ < s_.size() && s_[pos_] == ',') {
      ++pos_;
      AtomExpr r = atom_high_and();
      e = combine(AtomExpr::Op::kOr, std::move(e), std::move(r));
    }
    return e;
  }

  AtomExpr atom_high_and() {
    AtomExpr e = atom_unary();
    while (at_atom_prim()) {
      if (s_[pos_] == '&')
        ++pos_;
      AtomExpr r = atom_unary();
      e = combine(AtomExpr::Op::kAnd, std::move(e), std::move(r));
    }
    return e;
  }

  AtomExpr atom_unary() {
    if (pos_ < s_.size() && s_[pos_] == '!') {
      ++pos_;
      AtomExpr e;
      e.op = AtomExpr::Op::kNot;
      e.children.push_back(atom_unary());
      return e;
    }
    return atom_primitive();
  }

  AtomExpr count_prim(AtomExpr::Op op, int dflt) {
    AtomExpr e;
    e.op = op;
    const int v = read_int();
    e.value = v < 0 ? dflt : v;
    return e;
  }

  AtomExpr atom_primitive() {
    if (pos_ >= s_.size())
      fail("truncated atom");
    const char c = s_[pos_];
    AtomExpr e;
    if (std::isdigit(static_cast<unsigned char>(c))) {
      e.op = AtomExpr::Op::kIsotope;
      e.value = read_int();
      return e;
    }
    // Two-letter elements win over primitives that share the first letter.
    if ((c == 'H' || c == 'D' || c == 'R' || c == 'X') && pos_ + 1 < s_.size()
        && std::islower(static_cast<unsigned char>(s_[pos_ + 1]))) {
      const int z = atomic_number(s_.substr(pos_, 2));
      if (z > 0) {
        pos_ += 2;
        e.op = AtomExpr::Op::kElement;
        e.value = z;
        e.flag = 0;
        return e;
      }
    }
    switch (c) {
    case '#': {
      ++pos_;
      const int z = read_int();
      if (z < 0)
        fail("bad atomic number");
      e.op = AtomExpr::Op::kElement;
      e.value = z;
      e.flag = -1;
      return e;
    }
    case '$': {
      if (pos_ + 1 >= s_.size() || s_[pos_ + 1] != '(')
        fail("bad recursive SMARTS");
      size_t depth = 0;
      size_t end = pos_ + 1;
      for (; end < s_.size(); ++end) {
        if (s_[end] == '(')
          ++depth;
        else if (s_[end] == ')' && --depth == 0)
          break;
      }
      if (end >= s_.size())
        fail("unterminated recursive SMARTS");
      const std::string_view inner = s_.substr(pos_ + 2, end - pos_ - 2);
      e.op = AtomExpr::Op::kRecursive;
      e.recursive = SmartsParser(inner).run();
      pos_ = end + 1;
      return e;
    }
    case '*':
      ++pos_;
      e.op = AtomExpr::Op::kTrue;
      return e;
    case 'D':
      ++pos_;
      return count_prim(AtomExpr::Op::kDegree, 1);
    case 'h':
      ++pos_;
      return count_prim(AtomExpr::Op::kImplicitH, -1);
    case 'R':
      ++pos_;
      return count_prim(AtomExpr::Op::kRingCount, -1);
    case 'r':
      ++pos_;
      return count_prim(AtomExpr::Op::kRingSize, -1);
    case 'v':
      ++pos_;
      return count_prim(AtomExpr::Op::kValence, 1);
    case 'X':
      ++pos_;
      return count_prim(AtomExpr::Op::kConnect, 1);
    case 'x':
      ++pos_;
      return count_prim(AtomExpr::Op::kRingBonds, -1);
    case 'H': {
      // Hydrogen atom when it leads the bracket (after an optional isotope)
      // and is not followed by a count.
      bool leading = true;
      for (size_t i = bracket_start_; i < pos_; ++i)
        leading = leading && std::isdigit(static_cast<unsigned char>(s_[i]));
      const bool count_follows =
        pos_ + 1 < s_.size()
        && std::isdigit(static_cast<unsigned char>(s_[pos_ + 1]));
      ++pos_;
      if (leading && !count_follows) {
        const char nxt = pos_ < s_.size() ? s_[pos_] : ']';
        if (nxt == ']' || nxt == '+' || nxt == '-' || nxt == ':'
            || nxt == ';' || nxt == ',') {
          e.op = AtomExpr::Op::kElement;
          e.value = 1;
          e.flag = -1;
          return e;
        }
      }
      return count_prim(AtomExpr::Op::kTotalH, 1);
    }
    case '+':
    case '-': {
      int mag = 0;
      while (pos_ < s_.size() && s_[pos_] == c) {
        ++mag;
        ++pos_;
      }
      if (mag == 1) {
        const int n = read_int();
        if (n >= 0)
          mag = n;
      }
      e.op = AtomExpr::Op::kCharge;
      e.value = c == '+' ? mag : -mag;
      return e;
    }
    case '@': {
      // Chirality is ignored.
      ++pos_;
      if (pos_ < s_.size() && s_[pos_] == '@')
        ++pos_;
      if (pos_ < s_.size() && s_[pos_] == '?')
        ++pos_;
      e.op = AtomExpr::Op::kTrue;
      return e;
    }
    default:
      break;
    }
    if (std::islower(static_cast<unsigned char>(c))) {
      static const struct {
        const char *sym;
        int z;
      } kArom[] = { { "se", 34 }, { "te", 52 }, { "as", 33 }, { "c", 6 },
                    { "n", 7 },   { "o", 8 },   { "s", 16 },  { "p", 15 },
                    { "b", 5 } };
      for (const auto &a: kArom) {
        const std::string_view sym(a.sym);
        if (s_.substr(pos_, sym.size()) == sym) {
          pos_ += sym.size();
          e.op = AtomExpr::Op::kElement;
          e.value = a.z;
          e.flag = 1;
          return e;
        }
      }
      if (c == 'a') {
        ++pos_;
        e.op = AtomExpr::Op::kAromatic;
        e.value = 1;
        return e;
      }
      fail("unknown primitive");
    }
    if (std::isupper(static_cast<unsigned char>(c))) {
      int z = 0;
      if (pos_ + 1 < s_.size()
          && std::islower(static_cast<unsigned char>(s_[pos_ + 1]))) {
        z = atomic_number(s_.substr(pos_, 2));
        if (z > 0)
          pos_ += 2;
      }
      if (z == 0) {
        if (c == 'A') {
          ++pos_;
          e.op = AtomExpr::Op::kAromatic;
          e.value = 0;
          return e;
        }
        z = atomic_number(s_.substr(pos_, 1));
        if (z == 0)
          fail("unknown element");
        ++pos_;
      }
      e.op = AtomExpr::Op::kElement;
      e.value = z;
      e.flag = 0;
      return e;
    }
    fail("unexpected character in atom");
  }

  // Pulls concrete properties out of conjunctions of primitives.
  static void derive_simple(QueryAtom &qa) {
    std::vector<const AtomExpr *> prims;
    bool ok = true;
    std::vector<const AtomExpr *> stack { &qa.expr };
    while (!stack.empty()) {
      const AtomExpr *e = stack.back();
      stack.pop_back();
      if (e->op == AtomExpr::Op::kAnd) {
        for (const auto &c: e->children)
          stack.push_back(&c);
      } else if (e->op == AtomExpr::Op::kOr || e->op == AtomExpr::Op::kNot) {
        ok = false;
      } else {
        prims.push_back(e);
      }
    }
    if (!ok)
      return;
    for (const AtomExpr *p: prims) {
      switch (p->op) {
      case AtomExpr::Op::kElement:
        qa.element = p->value;
        if (p->flag >= 0)
          qa.aromatic = p->flag == 1;
        if (p->value == 1)
          qa.is_hydrogen = true;
        break;
      case AtomExpr::Op::kCharge:
        qa.charge = p->value;
        break;
      case AtomExpr::Op::kIsotope:
        qa.isotope = p->value;
        break;
      case AtomExpr::Op::kTotalH:
        qa.h_count = p->value;
        break;
      case AtomExpr::Op::kAromatic:
        qa.aromatic = p->value == 1;
        break;
      default:
        break;
      }
    }
  }

  std::string_view s_;
  size_t pos_ = 0;
  size_t bracket_start_ = 0;
  SmartsPattern *pat_ = nullptr;
  std::map<int, std::pair<int, std::optional<BondExpr>>> open_rings_;
};

std::shared_ptr<const SmartsPattern> SmartsPattern::parse(std::string_view s) {
  return SmartsParser(s).run();
}

int SmartsPattern::bond_between(int a, int b) const {
  for (const auto &[nb, bond]: adj_[a])
    if (nb == b)
      return bond;
  return -1;
}

bool SmartsPattern::has_hydrogen_atoms() const {
  return std::any_of(atoms_.begin(), atoms_.end(),
                     [](const QueryAtom &a) { return a.is_hydrogen; });
}

namespace {

int hydrogen_neighbors(const Mol &mol, int atom) {
  int h = 0;
  for (const auto &nb: mol.neighbors(atom))
    if (mol.atom(nb.atom).atomic_num == 1)
      ++h;
  return h;
}

}  // namespace

bool atom_matches(const AtomExpr &e, const Mol &mol, int i, MatchContext &ctx) {
  const Atom &a = mol.atom(i);
  switch (e.op) {
  case AtomExpr::Op::kTrue:
    return true;
  case AtomExpr::Op::kNot:
    return !atom_matches(e.children[0], mol, i, ctx);
  case AtomExpr::Op::kAnd:
    for (const auto &c: e.children)
      if (!atom_matches(c, mol, i, ctx))
        return false;
    return true;
  case AtomExpr::Op::kOr:
    for (const auto &c: e.children)
      if (atom_matches(c, mol, i, ctx))
        return true;
    return false;
  case AtomExpr::Op::kElement:
    return a.atomic_num == e.value
           && (e.flag < 0 || a.aromatic == (e.flag == 1));
  case AtomExpr::Op::kAromatic:
    return a.aromatic == (e.value == 1);
  case AtomExpr::Op::kDegree:
    return mol.degree(i) == e.value;
  case AtomExpr::Op::kTotalH:
    return a.total_h() + hydrogen_neighbors(mol, i) == e.value;
  case AtomExpr::Op::kImplicitH:
    return e.value < 0 ? a.implicit_h > 0 : a.implicit_h == e.value;
  case AtomExpr::Op::kRingCount: {
    const auto &r = mol.rings();
    const int cnt = r.atom_membership.empty() ? 0 : r.atom_membership[i];
    return e.value < 0 ? cnt > 0 : cnt == e.value;
  }
  case AtomExpr::Op::kRingSize: {
    const auto &r = mol.rings();
    if (r.atom_membership.empty())
      return false;
    return e.value < 0 ? r.atom_in_ring(i) : r.atom_in_ring_of_size(i, e.value);
  }
  case AtomExpr::Op::kValence:
    return mol.total_valence(i) == e.value;
  case AtomExpr::Op::kConnect:
    return mol.degree(i) + a.total_h() == e.value;
  case AtomExpr::Op::kRingBonds: {
    const auto &r = mol.rings();
    int cnt = 0;
    if (!r.bond_membership.empty())
      for (const auto &nb: mol.neighbors(i))
        if (r.bond_in_ring(nb.bond))
          ++cnt;
    return e.value < 0 ? cnt > 0 : cnt == e.value;
  }
  case AtomExpr::Op::kCharge:
    return a.charge == e.value;
  case AtomExpr::Op::kIsotope:
    return a.isotope == e.value;
  case AtomExpr::Op::kRecursive:
    return e.recursive->match_anchored(mol, i, ctx);
  }
  return false;
}

bool bond_matches(const BondExpr &e, const Mol &mol, int b) {
  const Bond &bond = mol.bond(b);
  switch (e.op) {
  case BondExpr::Op::kDefault:
    return bond.type == BondType::kSingle || bond.type == BondType::kAromatic;
  case BondExpr::Op::kAny:
    return true;
  case BondExpr::Op::kNot:
    return !bond_matches(e.children[0], mol, b);
  case BondExpr::Op::kAnd:
    for (const auto &c: e.children)
      if (!bond_matches(c, mol, b))
        return false;
    return true;
  case BondExpr::Op::kOr:
    for (const auto &c: e.children)
      if (bond_matches(c, mol, b))
        return true;
    return false;
  case BondExpr::Op::kSingle:
    return bond.type == BondType::kSingle;
  case BondExpr::Op::kDouble:
    return bond.type == BondType::kDouble;
  case BondExpr::Op::kTriple:
    return bond.type == BondType::kTriple;
  case BondExpr::Op::kAromatic:
    return bond.type == BondType::kAromatic;
  case BondExpr::Op::kRing: {
    const auto &r = mol.rings();
    return !r.bond_membership.empty() && r.bond_in_ring(b);
  }
  }
  return false;
}

bool SmartsPattern::match_anchored(const Mol &mol, int atom,
                                   MatchContext &ctx) const {
  auto &memo = ctx.memo[this];
  if (memo.empty())
    memo.assign(mol.num_atoms(), -1);
  if (memo[atom] >= 0)
    return memo[atom] == 1;
  std::vector<std::vector<int>> out;
  match_impl(mol, ctx, false, 1, atom, out);
  memo[atom] = out.empty() ? 0 : 1;
  return !out.empty();
}

void SmartsPattern::match_impl(const Mol &mol, MatchContext &ctx, bool unique,
                               size_t max_matches, int anchor,
                               std::vector<std::vector<int>> &out) const {
  const int nq = num_atoms();
  if (nq == 0 || mol.num_atoms() == 0)
    return;
  // Visit order: depth-first over each query component, remembering a
  // previously placed neighbor to draw candidates from.
  std::vector<int> order;
  std::vector<int> via(nq, -1);
  std::vector<char> placed(nq, 0);
  for (int root = 0; root < nq; ++root) {
    if (placed[root])
      continue;
    std::vector<int> stack { root };
    placed[root] = 1;
    while (!stack.empty()) {
      const int q = stack.back();
      stack.pop_back();
      order.push_back(q);
      const auto &nbs = adj_[q];
      for (auto it = nbs.rbegin(); it != nbs.rend(); ++it) {
        if (!placed[it->first]) {
          placed[it->first] = 1;
          via[it->first] = q;
          stack.push_back(it->first);
        }
      }
    }
  }
  // A DFS stack order can place a child before its recorded parent is
  // ordered; fix by recording the parent as any earlier neighbor.
  std::vector<int> pos(nq);
  for (int k = 0; k < nq; ++k)
    pos[order[k]] = k;
  for (int k = 0; k < nq; ++k) {
    const int q = order[k];
    via[q] = -1;
    for (const auto &[nb, bond]: adj_[q])
      if (pos[nb] < k && (via[q] < 0 || pos[nb] < pos[via[q]]))
        via[q] = nb;
  }

  std::vector<int> map(nq, -1);
  std::vector<char> used(mol.num_atoms(), 0);
  std::set<std::vector<int>> seen;
  bool stop = false;

  auto feasible = [&](int q, int t) {
    if (used[t])
      return false;
    if (!atom_matches(atoms_[q].expr, mol, t, ctx))
      return false;
    for (const auto &[nb, qb]: adj_[q]) {
      if (map[nb] < 0)
        continue;
      const int tb = mol.bond_between(t, map[nb]);
      if (tb < 0 || !bond_matches(bonds_[qb].expr, mol, tb))
        return false;
    }
    return true;
  };

  std::function<void(int)> step = [&](int k) {
    if (stop)
      return;
    if (k == nq) {
      if (unique) {
        std::vector<int> key = map;
        std::sort(key.begin(), key.end());
        if (!seen.insert(key).second)
          return;
      }
      out.push_back(map);
      if (max_matches > 0 && out.size() >= max_matches)
        stop = true;
      return;
    }
    const int q = order[k];
    auto attempt = [&](int t) {
      if (!feasible(q, t))
        return;
      map[q] = t;
      used[t] = 1;
      step(k + 1);
      used[t] = 0;
      map[q] = -1;
    };
    if (k == 0 && anchor >= 0) {
      attempt(anchor);
    } else if (via[q] >= 0) {
      for (const auto &nb: mol.neighbors(map[via[q]])) {
        attempt(nb.atom);
        if (stop)
          return;
      }
    } else {
      for (int t = 0; t < mol.num_atoms(); ++t) {
        attempt(t);
        if (stop)
          return;
      }
    }
  };
  step(0);
}

std::vector<std::vector<int>> SmartsPattern::match(const Mol &mol, bool unique,
                                                   size_t max_matches) const {
  MatchContext ctx;
  std::vector<std::vector<int>> out;
  match_impl(mol, ctx, unique, max_matches, -1, out);
  return out;
}

bool SmartsPattern::has_match(const Mol &mol) const {
  return !match(mol, false, 1).empty();
}

int SmartsPattern::count_matches(const Mol &mol) const {
  return static_cast<int>(match(mol, true).size());
}

}  // namespace rxngrow::chem
