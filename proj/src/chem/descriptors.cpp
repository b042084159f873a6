//
// SPDX-License-Identifier: Apache-2.0
//

#include "rxngrow/chem/descriptors.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <set>
#include <tuple>
#include <vector>

#include "rxngrow/chem/elements.h"
#include "rxngrow/chem/smarts.h"
#include "rxngrow/chem/smiles.h"

namespace rxngrow::chem {
namespace {

#include "descriptor_tables.inc"

using PatternPtr = std::shared_ptr<const SmartsPattern>;

std::vector<PatternPtr> compile(std::initializer_list<const char *> list) {
  std::vector<PatternPtr> out;
  for (const char *s: list)
    out.push_back(SmartsPattern::parse(s));
  return out;
}

const PatternPtr &hbd_pattern() {
  static const PatternPtr p = SmartsPattern::parse(
    "[N&!H0&v3,N&!H0&+1&v4,O&H1&+0,S&H1&+0,n&H1&+0]");
  return p;
}

const PatternPtr &hba_pattern() {
  static const PatternPtr p = SmartsPattern::parse(
    "[$([O,S;H1;v2]-[!$(*=[O,N,P,S])]),$([O,S;H0;v2]),$([O,S;-]),"
    "$([N;v3;!$(N-*=!@[O,N,P,S])]),$([n;X2;H0;+0]),$([o,s;+0])]");
  return p;
}

const std::vector<PatternPtr> &qed_acceptor_patterns() {
  static const std::vector<PatternPtr> p = compile({
    "[oH0;X2]",
    "[OH1;X2;v2]",
    "[OH0;X2;v2]",
    "[OH0;X1;v2]",
    "[O-;X1]",
    "[SH0;X2;v2]",
    "[SH0;X1;v2]",
    "[S-;X1]",
    "[nH0;X2]",
    "[NH0;X1;v3]",
    "[$([N;+0;X3;v3]);!$(N[C,S]=O)]",
  });
  return p;
}

const std::vector<PatternPtr> &alert_patterns() {
  static const std::vector<PatternPtr> p = [] {
    std::vector<PatternPtr> out;
    for (const char *s: kQedAlerts)
      out.push_back(SmartsPattern::parse(s));
    return out;
  }();
  return p;
}

const std::vector<PatternPtr> &crippen_patterns() {
  static const std::vector<PatternPtr> p = [] {
    std::vector<PatternPtr> out;
    for (const auto &r: kCrippenRules)
      out.push_back(SmartsPattern::parse(r.smarts));
    return out;
  }();
  return p;
}

const PatternPtr &rotatable_pattern() {
  static const PatternPtr p = SmartsPattern::parse(
    "[!$(*#*)&!D1&!$(C(F)(F)F)&!$(C(Cl)(Cl)Cl)&!$(C(Br)(Br)Br)"
    "&!$(C([CH3])([CH3])[CH3])&!$([CD3](=[N,O,S])-!@[#7,O,S!D1])"
    "&!$([#7,O,S!D1]-!@[CD3]=[N,O,S])&!$([CD3](=[N+])-!@[#7!D1])"
    "&!$([#7!D1]-!@[CD3]=[N+])]-,:;!@[!$(*#*)&!D1&!$(C(F)(F)F)"
    "&!$(C(Cl)(Cl)Cl)&!$(C(Br)(Br)Br)&!$(C([CH3])([CH3])[CH3])]");
  return p;
}

const PatternPtr &aliphatic_ring_pattern() {
  static const PatternPtr p = SmartsPattern::parse("[$([A;R][!a])]");
  return p;
}

int count_atoms(const Mol &mol, const SmartsPattern &p) {
  MatchContext ctx;
  int n = 0;
  for (int i = 0; i < mol.num_atoms(); ++i)
    if (p.match_anchored(mol, i, ctx))
      ++n;
  return n;
}

Mol with_explicit_hydrogens(const Mol &mol) {
  Mol h = mol;
  unfold_hydrogens(h);
  h.set_rings(find_sssr(h));
  return h;
}

int cycle_rank(const Mol &mol) {
  return mol.num_bonds() - mol.num_atoms()
         + static_cast<int>(mol.components().size());
}

struct Ads {
  double a, b, c, d, e, f, dmax;
};

// Asymmetric double sigmoid desirability.
double ads(double x, const Ads &p) {
  const double exp1 = 1.0 + std::exp(-(x - p.c + p.d / 2.0) / p.e);
  const double exp2 = 1.0 + std::exp(-(x - p.c - p.d / 2.0) / p.f);
  const double dx = p.a + p.b / exp1 * (1.0 - 1.0 / exp2);
  return dx / p.dmax;
}

constexpr std::array<Ads, 8> kAds = { {
  { 2.817065973, 392.5754953, 290.7489764, 2.419764353, 49.22325677,
    65.37051707, 104.9805561 },
  { 3.172690585, 137.8624751, 2.534937431, 4.581497897, 0.822739154,
    0.576295591, 131.3186604 },
  { 2.948620388, 160.4605972, 3.615294657, 4.435986202, 0.290141953,
    1.300669958, 148.7763046 },
  { 1.618662227, 1010.051101, 0.985094388, 0.000000001, 0.713820843,
    0.920922555, 258.1632616 },
  { 1.876861559, 125.2232657, 62.90773554, 87.83366614, 12.01999824,
    28.51324732, 104.5686167 },
  { 0.010000000, 272.4121427, 2.558379970, 1.565547684, 1.271567166,
    2.758063707, 105.4420403 },
  { 3.217788970, 957.7374108, 2.274627939, 0.000000001, 1.317690384,
    0.375760881, 312.3372610 },
  { 0.010000000, 1199.094025, -0.09002883, 0.000000001, 0.185904477,
    0.875193782, 417.7253140 },
} };

constexpr std::array<double, 8> kQedWeights = { 0.66, 0.46, 0.05, 0.61,
                                                0.06, 0.65, 0.48, 0.95 };

// Boost-style hash mixing on 32-bit words; the fingerprint ids depend on it.
void hash_combine(std::uint32_t &seed, std::uint32_t v) {
  seed ^= v + 0x9e3779b9u + (seed << 6) + (seed >> 2);
}

}  // namespace

double average_mol_weight(const Mol &mol) {
  const double h = element(1).weight;
  double w = 0;
  for (int i = 0; i < mol.num_atoms(); ++i) {
    const Atom &a = mol.atom(i);
    if (a.atomic_num > 0)
      w += element(a.atomic_num).weight;
    w += a.total_h() * h;
  }
  return w;
}

int num_hbd(const Mol &mol) {
  return count_atoms(mol, *hbd_pattern());
}

int num_hba(const Mol &mol) {
  return count_atoms(mol, *hba_pattern());
}

double tpsa(const Mol &mol) {
  const RingInfo &rings = mol.rings();
  double total = 0;
  for (int i = 0; i < mol.num_atoms(); ++i) {
    const Atom &atom = mol.atom(i);
    const int z = atom.atomic_num;
    if (z != 7 && z != 8)
      continue;
    int hs = atom.total_h();
    const int chg = atom.charge;
    const bool in3 = !rings.atom_membership.empty()
                     && rings.atom_in_ring_of_size(i, 3);
    int nbrs = mol.degree(i);
    int sing = 0, doub = 0, trip = 0, arom = 0;
    for (const auto &nb: mol.neighbors(i)) {
      if (mol.atom(nb.atom).atomic_num == 1) {
        --nbrs;
        ++hs;
        continue;
      }
      switch (mol.bond(nb.bond).type) {
      case BondType::kAromatic:
        ++arom;
        break;
      case BondType::kSingle:
        ++sing;
        break;
      case BondType::kDouble:
        ++doub;
        break;
      case BondType::kTriple:
        ++trip;
        break;
      }
    }
    double v = -1;
    if (z == 7) {
      if (nbrs == 1) {
        if (hs == 0 && trip == 1 && chg == 0)
          v = 23.79;
        else if (hs == 1 && doub == 1 && chg == 0)
          v = 23.85;
        else if (hs == 2 && sing == 1 && chg == 0)
          v = 26.02;
        else if (hs == 2 && doub == 1 && chg == 1)
          v = 25.59;
        else if (hs == 3 && sing == 1 && chg == 1)
          v = 27.64;
      } else if (nbrs == 2) {
        if (hs == 0 && sing == 1 && doub == 1 && chg == 0)
          v = 12.36;
        else if (hs == 0 && trip == 1 && doub == 1 && chg == 0)
          v = 13.60;
        else if (hs == 1 && sing == 2 && chg == 0)
          v = in3 ? 21.94 : 12.03;
        else if (hs == 0 && trip == 1 && sing == 1 && chg == 1)
          v = 4.36;
        else if (hs == 1 && doub == 1 && sing == 1 && chg == 1)
          v = 13.97;
        else if (hs == 2 && sing == 2 && chg == 1)
          v = 16.61;
        else if (hs == 0 && arom == 2 && chg == 0)
          v = 12.89;
        else if (hs == 1 && arom == 2 && chg == 0)
          v = 15.79;
        else if (hs == 1 && arom == 2 && chg == 1)
          v = 14.14;
      } else if (nbrs == 3) {
        if (hs == 0 && sing == 3 && chg == 0)
          v = in3 ? 3.01 : 3.24;
        else if (hs == 0 && sing == 1 && doub == 2 && chg == 0)
          v = 11.68;
        else if (hs == 0 && sing == 2 && doub == 1 && chg == 1)
          v = 3.01;
        else if (hs == 1 && sing == 3 && chg == 1)
          v = 4.44;
        else if (hs == 0 && arom == 3 && chg == 0)
          v = 4.41;
        else if (hs == 0 && sing == 1 && arom == 2 && chg == 0)
          v = 4.93;
        else if (hs == 0 && doub == 1 && arom == 2 && chg == 0)
          v = 8.39;
        else if (hs == 0 && arom == 3 && chg == 1)
          v = 4.10;
        else if (hs == 0 && sing == 1 && arom == 2 && chg == 1)
          v = 3.88;
      } else if (nbrs == 4) {
        if (hs == 0 && sing == 4 && chg == 1)
          v = 0.0;
      }
      if (v < 0)
        v = std::max(0.0, 30.5 - nbrs * 8.2 + hs * 1.5);
    } else {
      if (nbrs == 1) {
        if (hs == 0 && doub == 1 && chg == 0)
          v = 17.07;
        else if (hs == 1 && sing == 1 && chg == 0)
          v = 20.23;
        else if (hs == 0 && sing == 1 && chg == -1)
          v = 23.06;
      } else if (nbrs == 2) {
        if (hs == 0 && sing == 2 && chg == 0)
          v = in3 ? 12.53 : 9.23;
        else if (hs == 0 && arom == 2 && chg == 0)
          v = 13.14;
      }
      if (v < 0)
        v = std::max(0.0, 28.5 - nbrs * 8.6 + hs * 1.5);
    }
    total += v;
  }
  return total;
}

double crippen_logp(const Mol &mol) {
  const Mol h = with_explicit_hydrogens(mol);
  const auto &patterns = crippen_patterns();
  MatchContext ctx;
  double total = 0;
  for (int i = 0; i < h.num_atoms(); ++i) {
    for (size_t r = 0; r < patterns.size(); ++r) {
      if (patterns[r]->match_anchored(h, i, ctx)) {
        total += kCrippenRules[r].logp;
        break;
      }
    }
  }
  return total;
}

int num_rotatable_bonds(const Mol &mol) {
  std::set<int> bonds;
  for (const auto &m: rotatable_pattern()->match(mol, true))
    bonds.insert(mol.bond_between(m[0], m[1]));
  return static_cast<int>(bonds.size());
}

int qed_aromatic_rings(const Mol &mol) {
  const auto &p = *aliphatic_ring_pattern();
  MatchContext ctx;
  std::vector<bool> kill(mol.num_atoms(), false);
  for (int i = 0; i < mol.num_atoms(); ++i)
    kill[i] = p.match_anchored(mol, i, ctx);
  Mol rest = mol;
  rest.remove_atoms(kill);
  return cycle_rank(rest);
}

int qed_alert_count(const Mol &mol) {
  int n = 0;
  for (const auto &p: alert_patterns())
    if (p->has_match(mol))
      ++n;
  return n;
}

int qed_acceptors(const Mol &mol) {
  int n = 0;
  for (const auto &p: qed_acceptor_patterns())
    n += count_atoms(mol, *p);
  return n;
}

QedProperties qed_properties(const Mol &mol) {
  QedProperties p;
  p.mw = average_mol_weight(mol);
  p.alogp = crippen_logp(mol);
  p.hba = qed_acceptors(mol);
  p.hbd = num_hbd(mol);
  p.psa = tpsa(mol);
  p.rotb = num_rotatable_bonds(mol);
  p.arom = qed_aromatic_rings(mol);
  p.alerts = qed_alert_count(mol);
  return p;
}

double qed(const QedProperties &props) {
  const std::array<double, 8> x = { props.mw,
                                    props.alogp,
                                    static_cast<double>(props.hba),
                                    static_cast<double>(props.hbd),
                                    props.psa,
                                    static_cast<double>(props.rotb),
                                    static_cast<double>(props.arom),
                                    static_cast<double>(props.alerts) };
  double num = 0, den = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    num += kQedWeights[i] * std::log(ads(x[i], kAds[i]));
    den += kQedWeights[i];
  }
  return std::exp(num / den);
}

double qed(const Mol &mol) {
  return qed(qed_properties(mol));
}

std::map<std::uint32_t, int> morgan_counts(const Mol &mol, int radius) {
  const int n = mol.num_atoms();
  const int nb = mol.num_bonds();
  const RingInfo &rings = mol.rings();
  std::vector<std::uint32_t> inv(n);
  for (int i = 0; i < n; ++i) {
    const Atom &a = mol.atom(i);
    std::uint32_t seed = 0;
    std::vector<std::uint32_t> parts = {
      static_cast<std::uint32_t>(a.atomic_num),
      static_cast<std::uint32_t>(mol.degree(i) + a.total_h()),
      static_cast<std::uint32_t>(a.total_h()),
      static_cast<std::uint32_t>(a.charge),
      0u,  // isotope mass delta, ignored
    };
    if (!rings.atom_membership.empty() && rings.atom_in_ring(i))
      parts.push_back(1u);
    for (std::uint32_t v: parts)
      hash_combine(seed, v);
    inv[i] = seed;
  }

  std::map<std::uint32_t, int> counts;
  for (int i = 0; i < n; ++i)
    ++counts[inv[i]];

  using Hood = std::vector<bool>;
  std::vector<Hood> hoods(n, Hood(nb, false));
  std::vector<Hood> seen;
  std::vector<bool> dead(n, false);
  std::vector<std::uint32_t> current = inv;
  for (int layer = 0; layer < radius; ++layer) {
    std::vector<std::uint32_t> next(n, 0);
    std::vector<Hood> round = hoods;
    std::vector<std::tuple<Hood, std::uint32_t, int>> found;
    for (int i = 0; i < n; ++i) {
      if (dead[i])
        continue;
      if (mol.degree(i) == 0) {
        dead[i] = true;
        continue;
      }
      std::vector<std::pair<std::int32_t, std::uint32_t>> nbr;
      for (const auto &x: mol.neighbors(i)) {
        round[i][x.bond] = true;
        for (int b = 0; b < nb; ++b)
          if (hoods[x.atom][b])
            round[i][b] = true;
        nbr.emplace_back(static_cast<std::int32_t>(mol.bond(x.bond).type),
                         current[x.atom]);
      }
      std::sort(nbr.begin(), nbr.end());
      std::uint32_t h = static_cast<std::uint32_t>(layer);
      hash_combine(h, current[i]);
      for (const auto &[bt, v]: nbr) {
        std::uint32_t ph = 0;
        hash_combine(ph, static_cast<std::uint32_t>(bt));
        hash_combine(ph, v);
        hash_combine(h, ph);
      }
      next[i] = h;
      found.emplace_back(round[i], h, i);
    }
    std::sort(found.begin(), found.end());
    for (const auto &[hood, id, atom]: found) {
      if (std::find(seen.begin(), seen.end(), hood) == seen.end()) {
        ++counts[id];
        seen.push_back(hood);
      } else {
        dead[atom] = true;
      }
    }
    current = next;
    hoods = round;
  }
  return counts;
}

int num_potential_stereocenters(const Mol &mol) {
  const std::vector<int> cls = symmetry_classes(mol);
  int count = 0;
  for (int i = 0; i < mol.num_atoms(); ++i) {
    const Atom &a = mol.atom(i);
    const int heavy = mol.degree(i);
    const int hs = a.total_h();
    if (hs > 1 || heavy + hs > 4 || heavy < 3 || a.aromatic)
      continue;
    const int z = a.atomic_num;
    bool candidate = false;
    if (heavy + hs == 4) {
      candidate = z == 6 || z == 14 || z == 7 || z == 15 || z == 16 || z == 32;
    } else if (heavy == 3 && hs == 0) {
      // Lone pair acts as the fourth substituent.
      if (z == 7 && a.charge == 0)
        candidate = mol.rings().atom_membership.size() > 0
                    && mol.rings().atom_in_ring_of_size(i, 3);
      else if (z == 15 || z == 33)
        candidate = true;
      else if ((z == 16 || z == 34) && (a.charge == 1 || mol.bond_valence(i) == 4))
        candidate = true;
    }
    if (!candidate)
      continue;
    std::vector<int> seen;
    bool distinct = true;
    for (const auto &nb: mol.neighbors(i)) {
      const int c = cls[nb.atom];
      if (std::find(seen.begin(), seen.end(), c) != seen.end()) {
        distinct = false;
        break;
      }
      seen.push_back(c);
    }
    if (distinct)
      ++count;
  }
  return count;
}

int num_spiro_atoms(const Mol &mol) {
  const auto &rings = mol.rings().atom_rings;
  std::set<int> spiro;
  for (size_t i = 0; i < rings.size(); ++i) {
    std::vector<int> ri(rings[i]);
    std::sort(ri.begin(), ri.end());
    for (size_t j = i + 1; j < rings.size(); ++j) {
      std::vector<int> rj(rings[j]);
      std::sort(rj.begin(), rj.end());
      std::vector<int> inter;
      std::set_intersection(ri.begin(), ri.end(), rj.begin(), rj.end(),
                            std::back_inserter(inter));
      if (inter.size() == 1)
        spiro.insert(inter[0]);
    }
  }
  return static_cast<int>(spiro.size());
}

int num_bridgehead_atoms(const Mol &mol) {
  const auto &rings = mol.rings().bond_rings;
  std::set<int> heads;
  for (size_t i = 0; i < rings.size(); ++i) {
    std::vector<int> ri(rings[i]);
    std::sort(ri.begin(), ri.end());
    for (size_t j = i + 1; j < rings.size(); ++j) {
      std::vector<int> rj(rings[j]);
      std::sort(rj.begin(), rj.end());
      std::vector<int> inter;
      std::set_intersection(ri.begin(), ri.end(), rj.begin(), rj.end(),
                            std::back_inserter(inter));
      if (inter.size() <= 1)
        continue;
      std::vector<int> hits(mol.num_atoms(), 0);
      for (int b: inter) {
        ++hits[mol.bond(b).begin];
        ++hits[mol.bond(b).end];
      }
      for (int a = 0; a < mol.num_atoms(); ++a)
        if (hits[a] == 1)
          heads.insert(a);
    }
  }
  return static_cast<int>(heads.size());
}

}  // namespace rxngrow::chem
