#ifndef ZDCLONE_MONOID_HPP
#define ZDCLONE_MONOID_HPP

// A closed transformation monoid built from a cell partition and a tree of
// retarget instructions.
//
// N splits into five cells: {0}, two target cells T_x and T_y, and two
// source cells A_x and A_y.  The standard partition classifies by residue
// mod 4 (T_x = 1, T_y = 2, A_x = 3, A_y = 0 except the point 0 itself).
//
// From a tree whose nodes carry index pairs (ix, iy), every root-to-leaf
// branch (ix_1, iy_1) ... (ix_L, iy_L) yields a transformation f:
//   * identity on {0}, T_x and T_y;
//   * the j-th smallest element of A_x (j < L, 0-based) goes to the ix_j-th
//     smallest element of T_x, and likewise A_y to T_y via iy_j;
//   * elements of index >= L fall back to the constant default: the least
//     element of the target cell.
//
// Together with the identity, the collapse map h (identity except A_y -> 0)
// and the products f after h, these form a monoid under composition:
//   (0)   every element has the shape its kind prescribes;
//   (i)   f o f' = f'          for branch-derived f, f' (absorption);
//   (ii)  h o f = f            (branch values avoid A_y);
//   (iii) f o h is exactly the branch-collapse element of the same branch;
//   (iv)  every pairwise composite is again an element of the family.
// All five laws are checked pointwise and exactly on [0, N); elements cache
// their values on [0, N) as machine words, which is valid because every
// value of every element is itself below N.

#include <zdclone/finfun.hpp>
#include <zdclone/nat.hpp>

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace zdclone {

// --- partitions -------------------------------------------------------------

enum class Cell { zero, target_x, target_y, source_x, source_y };

std::string to_string(Cell c);

class Partition {
 public:
  // {0}; T_x = 1 mod 4; T_y = 2 mod 4; A_x = 3 mod 4; A_y = 0 mod 4, > 0.
  static Partition mod4();

  // classifier must be unary and return the Cell codes 0..4 in declaration
  // order (zero, target_x, target_y, source_x, source_y).
  static Partition custom(FinFun classifier);

  Cell cell_of(const Nat& x) const;

  // The idx-th smallest element of a cell (0-based); walks and memoises.
  Nat nth_element(Cell c, std::size_t idx) const;

  Nat count_below(Cell c, const Nat& horizon) const;

 private:
  struct Impl;
  explicit Partition(std::shared_ptr<Impl> impl);
  std::shared_ptr<Impl> impl_;
};

// --- instruction trees --------------------------------------------------------

// Serialized as "zdclone-tree v1" followed by a parenthesized nesting
// "(root (ix iy child...) ...)"; each non-root node is "(ix iy child*)".
struct PairTree {
  struct Node {
    Nat ix;
    Nat iy;
    std::vector<Node> children;
  };
  std::vector<Node> roots;  // children of the unlabelled root

  static PairTree parse(const std::string& text);
  std::string to_text() const;

  // One branch: labels (0,0), (1,1), ..., (depth-1, depth-1) down a chain.
  static PairTree single_branch(std::size_t depth);

  // Complete binary tree of the given depth; every node has one child
  // labelled (0,0) and one labelled (1,1).
  static PairTree full_binary(std::size_t depth);

  // Root-to-leaf label paths, depth-first, children in listed order.
  std::vector<std::vector<std::pair<Nat, Nat>>> branches() const;
};

// --- the monoid -----------------------------------------------------------------

struct MonoidElement {
  enum class Kind { identity, collapse, branch, branch_collapse };
  Kind kind = Kind::identity;
  std::string name;                          // "id", "h", "f3", "f3*h", ...
  std::vector<std::pair<Nat, Nat>> labels;   // branch labels (branch kinds only)
  std::vector<std::uint32_t> values;         // x -> element(x) for x in [0, N)

  std::uint32_t operator()(std::uint32_t x) const { return values[x]; }
};

struct MonoidBuild {
  Nat n;  // cache horizon N
  std::vector<MonoidElement> elements;  // [0] = id, [1] = h, then f's, then f*h's
};

// Builds the full family for the tree: 2 + 2 * (number of branches)
// elements.  Throws std::invalid_argument if any needed target element
// reaches N (every cached value must stay below N so the caches compose),
// if a working cell holds fewer than N/8 points below N, or if the zero
// cell is not exactly {0} on [0, N).
MonoidBuild build_monoid(const Partition& partition, const PairTree& tree, const Nat& n);

struct MonoidLawReport {
  bool shapes_ok = false;        // law (0)
  bool absorption_ok = false;    // law (i)
  bool collapse_left_ok = false; // law (ii)
  bool collapse_match_ok = false;// law (iii)
  bool closure_ok = false;       // law (iv)
  std::size_t composites_checked = 0;
  std::string detail;            // first failure: law, elements, witness point

  bool all_ok() const {
    return shapes_ok && absorption_ok && collapse_left_ok && collapse_match_ok && closure_ok;
  }
};

MonoidLawReport verify_monoid_laws(const Partition& partition, const MonoidBuild& build);

}  // namespace zdclone

#endif  // ZDCLONE_MONOID_HPP
