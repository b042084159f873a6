//
// SPDX-License-Identifier: Apache-2.0
//

#include "rxngrow/chem/elements.h"

#include <array>
#include <string>
#include <unordered_map>

namespace rxngrow::chem {
namespace {
constexpr int kVal1[] = {1};
constexpr int kVal2[] = {0};
constexpr int kVal3[] = {1, -1};
constexpr int kVal4[] = {2};
constexpr int kVal5[] = {3};
constexpr int kVal6[] = {4};
constexpr int kVal7[] = {3};
constexpr int kVal8[] = {2};
constexpr int kVal9[] = {1};
constexpr int kVal10[] = {0};
constexpr int kVal11[] = {1, -1};
constexpr int kVal12[] = {2, -1};
constexpr int kVal13[] = {3};
constexpr int kVal14[] = {4};
constexpr int kVal15[] = {3, 5};
constexpr int kVal16[] = {2, 4, 6};
constexpr int kVal17[] = {1};
constexpr int kVal18[] = {0};
constexpr int kVal19[] = {1, -1};
constexpr int kVal20[] = {2, -1};
constexpr int kVal31[] = {3};
constexpr int kVal32[] = {4};
constexpr int kVal33[] = {3, 5};
constexpr int kVal34[] = {2, 4, 6};
constexpr int kVal35[] = {1};
constexpr int kVal36[] = {0};
constexpr int kVal37[] = {1, -1};
constexpr int kVal38[] = {2, -1};
constexpr int kVal49[] = {3};
constexpr int kVal50[] = {2, 4};
constexpr int kVal51[] = {3, 5};
constexpr int kVal52[] = {2, 4, 6};
constexpr int kVal53[] = {1, 3, 5};
constexpr int kVal54[] = {0, 2, 4, 6};
constexpr int kVal55[] = {1};
constexpr int kVal56[] = {2, -1};
constexpr int kVal82[] = {2, 4};
constexpr int kVal83[] = {3, 5};
constexpr int kVal84[] = {2, 4, 6};
constexpr int kVal85[] = {1, 3, 5};
constexpr int kVal86[] = {0};

// Average atomic weights and valence lists follow the conventions of common
// cheminformatics toolkits so descriptor values line up with published numbers.
const std::array<ElementData, kMaxAtomicNum + 1> kElements = {{
    {0, "*", 0.0, 0, std::span<const int>()},
    {1, "H", 1.008, 1, std::span<const int>(kVal1)},
    {2, "He", 4.003, 2, std::span<const int>(kVal2)},
    {3, "Li", 6.941, 1, std::span<const int>(kVal3)},
    {4, "Be", 9.012, 2, std::span<const int>(kVal4)},
    {5, "B", 10.812, 3, std::span<const int>(kVal5)},
    {6, "C", 12.011, 4, std::span<const int>(kVal6)},
    {7, "N", 14.007, 5, std::span<const int>(kVal7)},
    {8, "O", 15.999, 6, std::span<const int>(kVal8)},
    {9, "F", 18.998, 7, std::span<const int>(kVal9)},
    {10, "Ne", 20.18, 8, std::span<const int>(kVal10)},
    {11, "Na", 22.99, 1, std::span<const int>(kVal11)},
    {12, "Mg", 24.305, 2, std::span<const int>(kVal12)},
    {13, "Al", 26.982, 3, std::span<const int>(kVal13)},
    {14, "Si", 28.086, 4, std::span<const int>(kVal14)},
    {15, "P", 30.974, 5, std::span<const int>(kVal15)},
    {16, "S", 32.067, 6, std::span<const int>(kVal16)},
    {17, "Cl", 35.453, 7, std::span<const int>(kVal17)},
    {18, "Ar", 39.948, 8, std::span<const int>(kVal18)},
    {19, "K", 39.098, 1, std::span<const int>(kVal19)},
    {20, "Ca", 40.078, 2, std::span<const int>(kVal20)},
    {21, "Sc", 44.956, 3, std::span<const int>()},
    {22, "Ti", 47.867, 4, std::span<const int>()},
    {23, "V", 50.944, 5, std::span<const int>()},
    {24, "Cr", 51.996, 6, std::span<const int>()},
    {25, "Mn", 54.938, 7, std::span<const int>()},
    {26, "Fe", 55.845, 8, std::span<const int>()},
    {27, "Co", 58.933, 9, std::span<const int>()},
    {28, "Ni", 58.693, 10, std::span<const int>()},
    {29, "Cu", 63.546, 11, std::span<const int>()},
    {30, "Zn", 65.39, 2, std::span<const int>()},
    {31, "Ga", 69.723, 3, std::span<const int>(kVal31)},
    {32, "Ge", 72.61, 4, std::span<const int>(kVal32)},
    {33, "As", 74.922, 5, std::span<const int>(kVal33)},
    {34, "Se", 78.96, 6, std::span<const int>(kVal34)},
    {35, "Br", 79.904, 7, std::span<const int>(kVal35)},
    {36, "Kr", 83.8, 8, std::span<const int>(kVal36)},
    {37, "Rb", 85.468, 1, std::span<const int>(kVal37)},
    {38, "Sr", 87.62, 2, std::span<const int>(kVal38)},
    {39, "Y", 88.906, 3, std::span<const int>()},
    {40, "Zr", 91.224, 4, std::span<const int>()},
    {41, "Nb", 92.906, 5, std::span<const int>()},
    {42, "Mo", 95.94, 6, std::span<const int>()},
    {43, "Tc", 98.0, 7, std::span<const int>()},
    {44, "Ru", 101.07, 8, std::span<const int>()},
    {45, "Rh", 102.906, 9, std::span<const int>()},
    {46, "Pd", 106.42, 10, std::span<const int>()},
    {47, "Ag", 107.868, 11, std::span<const int>()},
    {48, "Cd", 112.412, 2, std::span<const int>()},
    {49, "In", 114.818, 3, std::span<const int>(kVal49)},
    {50, "Sn", 118.711, 4, std::span<const int>(kVal50)},
    {51, "Sb", 121.76, 5, std::span<const int>(kVal51)},
    {52, "Te", 127.6, 6, std::span<const int>(kVal52)},
    {53, "I", 126.904, 7, std::span<const int>(kVal53)},
    {54, "Xe", 131.29, 8, std::span<const int>(kVal54)},
    {55, "Cs", 132.905, 1, std::span<const int>(kVal55)},
    {56, "Ba", 137.328, 2, std::span<const int>(kVal56)},
    {57, "La", 138.906, 3, std::span<const int>()},
    {58, "Ce", 140.116, 4, std::span<const int>()},
    {59, "Pr", 140.908, 3, std::span<const int>()},
    {60, "Nd", 144.24, 4, std::span<const int>()},
    {61, "Pm", 145.0, 5, std::span<const int>()},
    {62, "Sm", 150.36, 6, std::span<const int>()},
    {63, "Eu", 151.964, 7, std::span<const int>()},
    {64, "Gd", 157.25, 8, std::span<const int>()},
    {65, "Tb", 158.925, 9, std::span<const int>()},
    {66, "Dy", 162.5, 10, std::span<const int>()},
    {67, "Ho", 164.93, 11, std::span<const int>()},
    {68, "Er", 167.26, 12, std::span<const int>()},
    {69, "Tm", 168.934, 13, std::span<const int>()},
    {70, "Yb", 173.04, 14, std::span<const int>()},
    {71, "Lu", 174.967, 15, std::span<const int>()},
    {72, "Hf", 178.49, 4, std::span<const int>()},
    {73, "Ta", 180.948, 5, std::span<const int>()},
    {74, "W", 183.84, 6, std::span<const int>()},
    {75, "Re", 186.207, 7, std::span<const int>()},
    {76, "Os", 190.23, 8, std::span<const int>()},
    {77, "Ir", 192.217, 9, std::span<const int>()},
    {78, "Pt", 195.078, 10, std::span<const int>()},
    {79, "Au", 196.967, 11, std::span<const int>()},
    {80, "Hg", 200.59, 2, std::span<const int>()},
    {81, "Tl", 204.383, 3, std::span<const int>()},
    {82, "Pb", 207.2, 4, std::span<const int>(kVal82)},
    {83, "Bi", 208.98, 5, std::span<const int>(kVal83)},
    {84, "Po", 209.0, 6, std::span<const int>(kVal84)},
    {85, "At", 210.0, 7, std::span<const int>(kVal85)},
    {86, "Rn", 222.0, 8, std::span<const int>(kVal86)},
}};

}  // namespace

const ElementData &element(int atomic_num) {
  if (atomic_num < 0 || atomic_num > kMaxAtomicNum) return kElements[0];
  return kElements[atomic_num];
}

int atomic_number(std::string_view symbol) {
  static const auto *const table = [] {
    auto *m = new std::unordered_map<std::string, int>();
    for (const auto &e : kElements) m->emplace(std::string(e.symbol), e.atomic_num);
    return m;
  }();
  auto it = table->find(std::string(symbol));
  return it == table->end() ? 0 : it->second;
}

int default_valence(int atomic_num) {
  const auto &v = element(atomic_num).valences;
  if (v.empty() || v.front() < 0) return -1;
  return v.front();
}

bool more_electronegative(int a, int b) {
  const int ea = element(a).outer_electrons;
  const int eb = element(b).outer_electrons;
  if (ea != eb) return ea > eb;
  return a < b;
}

bool is_early_element(int atomic_num) {
  // H and the noble gases are excluded; everything else with < 4 valence
  // electrons counts.
  if (atomic_num <= 1) return false;
  const int ne = element(atomic_num).outer_electrons;
  return ne < 4 && ne > 0;
}

}  // namespace rxngrow::chem
