//
// SPDX-License-Identifier: Apache-2.0
//

#include "rxngrow/chem/fragment.h"

#include <algorithm>
#include <cctype>
#include <deque>
#include <map>
#include <memory>
#include <regex>
#include <vector>

#include "rxngrow/chem/reaction.h"
#include "rxngrow/chem/smiles.h"

namespace rxngrow::chem {
namespace {

struct Environ {
  const char *label;
  const char *smarts;
};

constexpr Environ kBricsEnvirons[] = {
  { "1", "[C;D3]([#0,#6,#7,#8])(=O)" },
  { "3", "[O;D2]-;!@[#0,#6,#1]" },
  { "4", "[C;!D1;!$(C=*)]-;!@[#6]" },
  { "5", "[N;!D1;!$(N=*);!$(N-[!#6;!#16;!#0;!#1]);!$([N;R]@[C;R]=O)]" },
  { "6", "[C;D3;!R](=O)-;!@[#0,#6,#7,#8]" },
  { "7a", "[C;D2,D3]-[#6]" },
  { "7b", "[C;D2,D3]-[#6]" },
  { "8", "[C;!R;!D1;!$(C!-*)]" },
  { "9", "[n;+0;$(n(:[c,n,o,s]):[c,n,o,s])]" },
  { "10", "[N;R;$(N(@C(=O))@[C,N,O,S])]" },
  { "11", "[S;D2](-;!@[#0,#6])" },
  { "12", "[S;D4]([#6,#0])(=O)(=O)" },
  { "13", "[C;$(C(-;@[C,N,O,S])-;@[N,O,S])]" },
  { "14", "[c;$(c(:[c,n,o,s]):[n,o,s])]" },
  { "14b", "[c;$(c(:[c,n,o,s]):[n,o,s])]" },
  { "15", "[C;$(C(-;@C)-;@C)]" },
  { "16", "[c;$(c(:c):c)]" },
  { "16b", "[c;$(c(:c):c)]" },
};

struct BricsLink {
  const char *a;
  const char *b;
  const char *bond;
};

// Grouped by the first environment; groups are applied in this order.
const std::vector<std::vector<BricsLink>> &brics_links() {
  static const std::vector<std::vector<BricsLink>> links = {
    { { "1", "3", "-" }, { "1", "5", "-" }, { "1", "10", "-" } },
    { { "3", "4", "-" },
      { "3", "13", "-" },
      { "3", "14", "-" },
      { "3", "15", "-" },
      { "3", "16", "-" } },
    { { "4", "5", "-" }, { "4", "11", "-" } },
    { { "5", "12", "-" },
      { "5", "14", "-" },
      { "5", "16", "-" },
      { "5", "13", "-" },
      { "5", "15", "-" } },
    { { "6", "13", "-" },
      { "6", "14", "-" },
      { "6", "15", "-" },
      { "6", "16", "-" } },
    { { "7a", "7b", "=" } },
    { { "8", "9", "-" },
      { "8", "10", "-" },
      { "8", "13", "-" },
      { "8", "14", "-" },
      { "8", "15", "-" },
      { "8", "16", "-" } },
    { { "9", "13", "-" },
      { "9", "14", "-" },
      { "9", "15", "-" },
      { "9", "16", "-" } },
    { { "10", "13", "-" },
      { "10", "14", "-" },
      { "10", "15", "-" },
      { "10", "16", "-" } },
    { { "11", "13", "-" },
      { "11", "14", "-" },
      { "11", "15", "-" },
      { "11", "16", "-" } },
    { { "13", "14", "-" }, { "13", "15", "-" }, { "13", "16", "-" } },
    { { "14", "14", "-" }, { "14", "15", "-" }, { "14", "16", "-" } },
    { { "15", "16", "-" } },
    { { "16", "16", "-" } },
  };
  return links;
}

std::string environ_smarts(const std::string &label) {
  for (const auto &e: kBricsEnvirons)
    if (label == e.label)
      return e.smarts;
  return {};
}

std::string digits_of(const std::string &label) {
  std::string out;
  for (char c: label)
    if (std::isdigit(static_cast<unsigned char>(c)))
      out += c;
  return out;
}

const std::vector<std::vector<Reaction>> &brics_reactions() {
  static const std::vector<std::vector<Reaction>> rx = [] {
    std::vector<std::vector<Reaction>> groups;
    for (const auto &group: brics_links()) {
      std::vector<Reaction> g;
      for (const auto &l: group) {
        const std::string sma = "[$(" + environ_smarts(l.a) + "):1]" + l.bond
                                + ";!@[$(" + environ_smarts(l.b) + "):2]>>["
                                + digits_of(l.a) + "*]-[*:1].["
                                + digits_of(l.b) + "*]-[*:2]";
        g.push_back(Reaction::parse(sma));
      }
      groups.push_back(std::move(g));
    }
    return groups;
  }();
  return rx;
}

const std::vector<Reaction> &recap_reactions() {
  static const std::vector<Reaction> rx = [] {
    const char *defs[] = {
      // urea
      "[#7;+0;D2,D3:1]!@C(!@=O)!@[#7;+0;D2,D3:2]>>*[#7:1].[#7:2]*",
      // amide
      "[C;!$(C([#7])[#7]):1](=!@[O:2])!@[#7;+0;!D1:3]>>*[C:1]=[O:2].*[#7:3]",
      // ester
      "[C:1](=!@[O:2])!@[O;+0:3]>>*[C:1]=[O:2].[O:3]*",
      // amines
      "[N;!D1;+0;!$(N-C=[#7,#8,#15,#16])](-!@[*:1])-!@[*:2]>>*[*:1].[*:2]*",
      // cyclic amines
      "[#7;R;D3;+0:1]-!@[*:2]>>*[#7:1].[*:2]*",
      // ether
      "[#6:1]-!@[O;+0]-!@[#6:2]>>[#6:1]*.*[#6:2]",
      // olefin
      "[C:1]=!@[C:2]>>[C:1]*.*[C:2]",
      // aromatic nitrogen - aliphatic carbon
      "[n;+0:1]-!@[C:2]>>[n:1]*.[C:2]*",
      // lactam nitrogen - aliphatic carbon
      "[O:3]=[C:4]-@[N;+0:1]-!@[C:2]>>[O:3]=[C:4]-[N:1]*.[C:2]*",
      // aromatic carbon - aromatic carbon
      "[c:1]-!@[c:2]>>[c:1]*.*[c:2]",
      // aromatic nitrogen - aromatic carbon
      "[n;+0:1]-!@[c:2]>>[n:1]*.*[c:2]",
      // sulphonamide
      "[#7;+0;D2,D3:1]-!@[S:2](=[O:3])=[O:4]>>[#7:1]*.*[S:2](=[O:3])=[O:4]",
    };
    std::vector<Reaction> out;
    for (const char *d: defs)
      out.push_back(Reaction::parse(d));
    return out;
  }();
  return rx;
}

// Insertion-ordered pool keyed by SMILES.
class Pool {
public:
  bool empty() const { return order_.empty(); }
  void add(const std::string &smi, Mol mol) {
    if (mols_.emplace(smi, std::move(mol)).second)
      order_.push_back(smi);
  }
  std::pair<std::string, Mol> pop() {
    std::string smi = order_.front();
    order_.pop_front();
    auto it = mols_.find(smi);
    Mol m = std::move(it->second);
    mols_.erase(it);
    return { smi, std::move(m) };
  }
  std::set<std::string> keys() const {
    return std::set<std::string>(order_.begin(), order_.end());
  }

private:
  std::deque<std::string> order_;
  std::map<std::string, Mol> mols_;
};

bool too_small_for_recap(const std::string &smi) {
  std::string s;
  for (char c: smi)
    if (c != '*')
      s += c;
  for (size_t p; (p = s.find("()")) != std::string::npos;)
    s.erase(p, 2);
  return s.empty() || s == "C" || s == "CC" || s == "CCC";
}

}  // namespace

std::set<std::string> brics_leaves(const Mol &mol) {
  std::set<std::string> seen;
  Pool active;
  const std::string root = write_smiles(mol);
  active.add(root, mol);
  seen.insert(root);
  for (const auto &group: brics_reactions()) {
    Pool next;
    while (!active.empty()) {
      auto [smi, m] = active.pop();
      bool matched = false;
      for (const auto &rxn: group) {
        ReactionOptions opts;
        opts.allow_disconnected = true;
        for (auto &products: rxn.run(m, opts)) {
          matched = true;
          for (auto &p: products) {
            const std::string ps = write_smiles(p);
            if (seen.insert(ps).second)
              active.add(ps, std::move(p));
          }
        }
      }
      if (!matched)
        next.add(smi, std::move(m));
    }
    active = std::move(next);
  }
  return active.keys();
}

std::set<std::string> recap_leaves(const Mol &mol) {
  struct Node {
    Mol mol;
    std::set<std::string> children;
  };
  std::map<std::string, Node> nodes;
  std::deque<std::string> queue;
  const std::string root = write_smiles(mol);
  nodes[root] = Node { mol, {} };
  queue.push_back(root);
  while (!queue.empty()) {
    const std::string smi = queue.front();
    queue.pop_front();
    const Mol current = nodes[smi].mol;
    for (const auto &rxn: recap_reactions()) {
      ReactionOptions opts;
      opts.allow_disconnected = true;
      for (auto &products: rxn.run(current, opts)) {
        std::vector<std::string> names;
        bool ok = true;
        for (const auto &p: products) {
          names.push_back(write_smiles(p));
          if (too_small_for_recap(names.back())) {
            ok = false;
            break;
          }
        }
        if (!ok)
          continue;
        for (size_t i = 0; i < products.size(); ++i) {
          nodes[smi].children.insert(names[i]);
          if (!nodes.count(names[i])) {
            nodes[names[i]] = Node { std::move(products[i]), {} };
            queue.push_back(names[i]);
          }
        }
      }
    }
  }
  std::set<std::string> leaves;
  std::set<std::string> visited;
  std::vector<std::string> stack { root };
  while (!stack.empty()) {
    const std::string s = stack.back();
    stack.pop_back();
    if (!visited.insert(s).second)
      continue;
    for (const auto &c: nodes[s].children) {
      if (nodes[c].children.empty())
        leaves.insert(c);
      else
        stack.push_back(c);
    }
  }
  return leaves;
}

Mol cap_dummies(const Mol &mol) {
  Mol m = mol;
  std::vector<bool> kill(m.num_atoms(), false);
  for (int i = 0; i < m.num_atoms(); ++i) {
    if (m.atom(i).atomic_num != 0)
      continue;
    kill[i] = true;
    for (const auto &nb: m.neighbors(i)) {
      Atom &a = m.atom(nb.atom);
      // Aromatic atoms need the hydrogen spelled out to kekulize, e.g. [nH].
      if ((a.no_implicit || a.aromatic) && a.atomic_num != 0)
        a.explicit_h += std::max(1, m.bond(nb.bond).order);
    }
  }
  m.remove_atoms(kill);
  for (int i = 0; i < m.num_atoms(); ++i)
    m.atom(i).implicit_h = 0;
  sanitize(m);
  return m;
}

}  // namespace rxngrow::chem
